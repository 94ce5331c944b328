"""Finite relational structures, embeddings, isomorphism and Fraisse classes.

Structures live on the universe ``{0, ..., size-1}``.  Relations are unary or
binary; a binary relation may be declared symmetric in the signature, in
which case its tuple set is stored closed under reversal.

Isomorphism testing goes through :func:`canonical_code`, an exact canonical
labeling (colour refinement followed by a pruned search for the
lexicographically least adjacency code), intended for structures of at most
eight or so vertices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, StructuralError


@dataclass(frozen=True)
class Relation:
    name: str
    arity: int = 2
    symmetric: bool = False

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise DomainError(f"relation {self.name!r}: arity {self.arity} not supported")
        if self.symmetric and self.arity != 2:
            raise DomainError(f"relation {self.name!r}: only binary relations can be symmetric")


@dataclass(frozen=True)
class Signature:
    relations: tuple[Relation, ...]

    def __post_init__(self):
        names = [r.name for r in self.relations]
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate relation symbols in {names}")

    def index(self, name: str) -> int:
        for i, rel in enumerate(self.relations):
            if rel.name == name:
                return i
        raise KeyError(name)

    @property
    def binary_only(self) -> bool:
        return all(r.arity == 2 for r in self.relations)

    def __len__(self):
        return len(self.relations)


GRAPH_SIGNATURE = Signature((Relation("E", 2, symmetric=True),))
ORDER_SIGNATURE = Signature((Relation("<", 2),))
DIGRAPH_SIGNATURE = Signature((Relation("A", 2),))


@dataclass(frozen=True)
class FinStructure:
    """A finite structure; ``tuples[r]`` is the tuple set of relation ``r``."""

    signature: Signature
    size: int
    tuples: tuple[frozenset, ...]

    def __post_init__(self):
        if self.size < 0:
            raise DomainError("negative structure size")
        if len(self.tuples) != len(self.signature.relations):
            raise StructuralError("one tuple set per relation symbol is required")
        for rel, tset in zip(self.signature.relations, self.tuples):
            for tup in tset:
                if len(tup) != rel.arity:
                    raise DomainError(f"tuple {tup} has wrong arity for {rel.name!r}")
                if any(not 0 <= v < self.size for v in tup):
                    raise DomainError(f"tuple {tup} out of range for size {self.size}")
                if rel.symmetric and (tup[1], tup[0]) not in tset:
                    raise DomainError(f"symmetric relation {rel.name!r} missing reverse of {tup}")

    @classmethod
    def build(cls, signature: Signature, size: int, relations=None) -> "FinStructure":
        """Build from ``{name: iterable of tuples}``; symmetric relations are closed."""
        relations = relations or {}
        unknown = set(relations) - {r.name for r in signature.relations}
        if unknown:
            raise StructuralError(f"unknown relation symbols {sorted(unknown)}")
        sets = []
        for rel in signature.relations:
            tset = set()
            for tup in relations.get(rel.name, ()):
                tup = (tup,) if isinstance(tup, int) else tuple(tup)
                tset.add(tup)
                if rel.symmetric:
                    tset.add((tup[1], tup[0]))
            sets.append(frozenset(tset))
        return cls(signature, size, tuple(sets))

    @classmethod
    def empty(cls, signature: Signature, size: int = 0) -> "FinStructure":
        return cls(signature, size, tuple(frozenset() for _ in signature.relations))

    def holds(self, r: int, *args: int) -> bool:
        return args in self.tuples[r]

    def induced(self, vertices: Sequence[int]) -> "FinStructure":
        """Induced substructure, relabelled so that ``vertices[i]`` becomes ``i``."""
        pos = {v: i for i, v in enumerate(vertices)}
        if len(pos) != len(vertices):
            raise DomainError("induced: repeated vertex")
        sets = []
        for tset in self.tuples:
            sets.append(frozenset(tuple(pos[v] for v in tup) for tup in tset
                                  if all(v in pos for v in tup)))
        return FinStructure(self.signature, len(vertices), tuple(sets))

    def relabel(self, perm: Sequence[int]) -> "FinStructure":
        """Image under the bijection ``i -> perm[i]``."""
        sets = tuple(frozenset(tuple(perm[v] for v in tup) for tup in tset)
                     for tset in self.tuples)
        return FinStructure(self.signature, self.size, sets)

    def pair_bits(self, a: int, b: int) -> tuple[int, ...]:
        """Relation bits of the ordered pair: per binary symbol R(a,b), R(b,a)."""
        bits = []
        for r, rel in enumerate(self.signature.relations):
            if rel.arity == 2:
                bits.append(int((a, b) in self.tuples[r]))
                bits.append(int((b, a) in self.tuples[r]))
        return tuple(bits)

    def vertex_bits(self, a: int) -> tuple[int, ...]:
        bits = []
        for r, rel in enumerate(self.signature.relations):
            bits.append(int(((a,) if rel.arity == 1 else (a, a)) in self.tuples[r]))
        return tuple(bits)

    @cached_property
    def code(self) -> tuple:
        return canonical_code(self)

    @cached_property
    def in_degrees(self) -> tuple[tuple[int, ...], ...]:
        """Per binary relation, the number of ``u`` with ``R(u, v)`` for each ``v``."""
        out = []
        for rel, tset in zip(self.signature.relations, self.tuples):
            counts = [0] * self.size
            if rel.arity == 2:
                for _, b in tset:
                    counts[b] += 1
            out.append(tuple(counts))
        return tuple(out)

    @cached_property
    def neighbours(self) -> tuple[frozenset, ...]:
        """Vertices related to each vertex in either direction by any relation."""
        nb = [set() for _ in range(self.size)]
        for rel, tset in zip(self.signature.relations, self.tuples):
            if rel.arity == 2:
                for a, b in tset:
                    if a != b:
                        nb[a].add(b)
                        nb[b].add(a)
        return tuple(frozenset(x) for x in nb)

    def describe(self) -> str:
        parts = []
        for rel, tset in zip(self.signature.relations, self.tuples):
            tups = sorted(tset)
            if rel.symmetric:
                tups = [t for t in tups if t[0] <= t[1]]
            body = ",".join("".join(map(str, t)) if rel.arity == 2 else str(t[0]) for t in tups)
            parts.append(f"{rel.name}[{body}]")
        return f"n{self.size}:" + ";".join(parts)


@dataclass(frozen=True)
class EmbeddingMap:
    domain_size: int
    codomain_size: int
    image: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.image[i]

    def compose(self, other: "EmbeddingMap") -> "EmbeddingMap":
        """``self ∘ other``."""
        if other.codomain_size != self.domain_size:
            raise DomainError("composition of incompatible maps")
        return EmbeddingMap(other.domain_size, self.codomain_size,
                            tuple(self.image[v] for v in other.image))


def identity_map(n: int, m: int | None = None) -> EmbeddingMap:
    return EmbeddingMap(n, n if m is None else m, tuple(range(n)))


def _check_signatures(A: FinStructure, B: FinStructure):
    if A.signature != B.signature:
        raise StructuralError("signature mismatch")


def is_embedding(A: FinStructure, B: FinStructure, m: EmbeddingMap) -> bool:
    _check_signatures(A, B)
    if m.domain_size != A.size or m.codomain_size != B.size or len(m.image) != A.size:
        raise DomainError("map sizes do not match the structures")
    if len(set(m.image)) != len(m.image) or any(not 0 <= v < B.size for v in m.image):
        return False
    for r, rel in enumerate(A.signature.relations):
        if rel.arity == 1:
            pairs = ((a,) for a in range(A.size))
        else:
            pairs = itertools.product(range(A.size), repeat=2)
        for tup in pairs:
            img = tuple(m.image[v] for v in tup)
            if (tup in A.tuples[r]) != (img in B.tuples[r]):
                return False
    return True


def _compatible(A, B, i, bi, placed, image) -> bool:
    if A.vertex_bits(i) != B.vertex_bits(bi):
        return False
    for j in placed:
        if A.pair_bits(j, i) != B.pair_bits(image[j], bi):
            return False
    return True


def iter_embeddings(A: FinStructure, B: FinStructure) -> Iterator[EmbeddingMap]:
    _check_signatures(A, B)
    image: list[int] = []
    used: set[int] = set()

    def extend(i):
        if i == A.size:
            yield EmbeddingMap(A.size, B.size, tuple(image))
            return
        for bi in range(B.size):
            if bi in used or not _compatible(A, B, i, bi, range(i), image):
                continue
            image.append(bi)
            used.add(bi)
            yield from extend(i + 1)
            image.pop()
            used.discard(bi)

    yield from extend(0)


def embeddings(A: FinStructure, B: FinStructure) -> list[EmbeddingMap]:
    """All embeddings of ``A`` into ``B`` in lexicographic order of images."""
    return list(iter_embeddings(A, B))


def embeds(A: FinStructure, B: FinStructure) -> bool:
    return next(iter_embeddings(A, B), None) is not None


# -- canonical labeling -------------------------------------------------------

def _refined_colours(A: FinStructure) -> list[int]:
    n = A.size
    colours = [A.vertex_bits(v) for v in range(n)]
    keys = sorted(set(colours))
    col = [keys.index(c) for c in colours]
    while True:
        sigs = [(col[v], tuple(sorted((A.pair_bits(v, u), col[u]) for u in range(n) if u != v)))
                for v in range(n)]
        keys = sorted(set(sigs))
        new = [keys.index(s) for s in sigs]
        if len(keys) == len(set(col)):
            return new
        col = new


def _block(A: FinStructure, order: Sequence[int], v: int) -> tuple:
    out = list(A.vertex_bits(v))
    for u in order:
        out.extend(A.pair_bits(u, v))
    return tuple(out)


def canonical_code(A: FinStructure) -> tuple:
    """Exact isomorphism invariant: equal codes iff the structures are isomorphic.

    Vertices are placed in non-decreasing refined colour; among those orders the
    least concatenated adjacency code is chosen.  Transpositions of twin
    vertices are automorphisms, so only one twin per cell is tried at each depth.
    """
    n = A.size
    col = _refined_colours(A)
    twin = {}
    for u in range(n):
        for v in range(u):
            if col[u] == col[v] and twin.get(v, v) == v and _is_twin(A, u, v):
                twin[u] = twin.get(v, v)
                break
    best: list = [None]
    order: list[int] = []
    blocks: list[tuple] = []
    remaining = sorted(range(n), key=lambda v: col[v])

    def search():
        depth = len(order)
        if depth == n:
            code = tuple(blocks)
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        want = min(col[v] for v in remaining)
        cands = []
        seen_twins = set()
        for v in remaining:
            if col[v] != want:
                continue
            rep = twin.get(v, v)
            if rep in seen_twins:
                continue
            seen_twins.add(rep)
            cands.append((_block(A, order, v), v))
        low = min(b for b, _ in cands)
        if best[0] is not None:
            prefix = tuple(blocks) + (low,)
            if prefix > best[0][:depth + 1]:
                return
        for b, v in cands:
            if b != low:
                continue
            order.append(v)
            blocks.append(b)
            remaining.remove(v)
            search()
            remaining.append(v)
            remaining.sort(key=lambda x: col[x])
            blocks.pop()
            order.pop()

    search()
    return (n, tuple(sorted(col)), best[0] or ())


def _is_twin(A: FinStructure, u: int, v: int) -> bool:
    if A.vertex_bits(u) != A.vertex_bits(v) or A.pair_bits(u, v) != A.pair_bits(v, u):
        return False
    return all(A.pair_bits(u, w) == A.pair_bits(v, w) for w in range(A.size) if w not in (u, v))


def is_isomorphic(A: FinStructure, B: FinStructure) -> bool:
    if A.signature != B.signature or A.size != B.size:
        return False
    return A.code == B.code


def all_structures(signature: Signature, size: int, loops: bool = False) -> Iterator[FinStructure]:
    """Every labeled structure on ``size`` vertices (symmetric relations respected)."""
    slots = []
    for r, rel in enumerate(signature.relations):
        if rel.arity == 1:
            slots.extend((r, (a,)) for a in range(size))
        elif rel.symmetric:
            slots.extend((r, (a, b)) for a in range(size) for b in range(a if loops else a + 1, size))
        else:
            slots.extend((r, (a, b)) for a in range(size) for b in range(size) if loops or a != b)
    for bits in itertools.product((0, 1), repeat=len(slots)):
        sets = [set() for _ in signature.relations]
        for bit, (r, tup) in zip(bits, slots):
            if bit:
                sets[r].add(tup)
                if signature.relations[r].symmetric:
                    sets[r].add(tup[::-1])
        yield FinStructure(signature, size, tuple(frozenset(s) for s in sets))


def iso_classes(structures: Iterable[FinStructure]) -> list[FinStructure]:
    """One representative per isomorphism class, sorted by (size, canonical code)."""
    reps = {}
    for s in structures:
        reps.setdefault(s.code, s)
    return [reps[k] for k in sorted(reps)]


# -- Fraisse classes ------------------------------------------------------------

class _ClassBase:
    """Shared behaviour of the three class variants.

    A *letter* is an integer packing the relation bits between an earlier vertex
    ``v`` and a new vertex ``x``: for each binary symbol in signature order, the
    bit ``R(v, x)`` and (unless the symbol is symmetric, or the class is a linear
    order) the bit ``R(x, v)``.  Letters compare as their bit strings read
    most-significant first, which is the literal order used for ``<_lex``.
    """

    signature: Signature
    kind: str

    def _letter_layout(self) -> list[tuple[int, bool]]:
        if not self.signature.binary_only:
            raise DomainError("1-types are only defined here for binary signatures")
        layout = []
        for r, rel in enumerate(self.signature.relations):
            layout.append((r, True))
            if not rel.symmetric and not isinstance(self, LinearOrder):
                layout.append((r, False))
        return layout

    @property
    def letter_width(self) -> int:
        return len(self._letter_layout())

    @property
    def alphabet(self) -> range:
        return range(1 << self.letter_width)

    def letter(self, A: FinStructure, v: int, x: int) -> int:
        code = 0
        for r, forward in self._letter_layout():
            bit = (v, x) in A.tuples[r] if forward else (x, v) in A.tuples[r]
            code = (code << 1) | int(bit)
        return code

    def letter_bits(self, letter: int) -> dict[tuple[int, bool], int]:
        layout = self._letter_layout()
        width = len(layout)
        return {slot: (letter >> (width - 1 - i)) & 1 for i, slot in enumerate(layout)}

    def attach(self, A: FinStructure, letters: Sequence[int]) -> FinStructure:
        """``A`` plus one new vertex whose letter over vertex ``v`` is ``letters[v]``."""
        if len(letters) != A.size:
            raise DomainError("one letter per existing vertex is required")
        x = A.size
        sets = [set(t) for t in A.tuples]
        order = isinstance(self, LinearOrder)
        for v, letter in enumerate(letters):
            for (r, forward), bit in self.letter_bits(letter).items():
                rel = self.signature.relations[r]
                if not bit:
                    if order and forward:
                        sets[r].add((x, v))
                    continue
                if forward:
                    sets[r].add((v, x))
                    if rel.symmetric:
                        sets[r].add((x, v))
                else:
                    sets[r].add((x, v))
        return FinStructure(A.signature, x + 1, tuple(frozenset(s) for s in sets))

    def pair_letter(self, S: FinStructure) -> int:
        """Letter of vertex 1 over vertex 0 in a two-vertex structure."""
        return self.letter(S, 0, 1)

    def fits(self, A: FinStructure, letters: Sequence[int]) -> bool:
        """Whether ``attach(A, letters)`` is in the class, given that ``A`` is."""
        return self.member(self.attach(A, letters))

    def one_point_extensions(self, A: FinStructure) -> Iterator[tuple[tuple[int, ...], FinStructure]]:
        """All class members extending ``A`` by one vertex, with their letter vectors."""
        for letters in itertools.product(self.alphabet, repeat=A.size):
            if self.fits(A, letters):
                yield letters, self.attach(A, letters)

    def extensions(self, A: FinStructure, extra: int) -> Iterator[FinStructure]:
        """All class members on ``A.size + extra`` vertices restricting to ``A``."""
        if extra == 0:
            if self.member(A):
                yield A
            return
        for _, ext in self.one_point_extensions(A):
            yield from self.extensions(ext, extra - 1)

    def members(self, size: int) -> Iterator[FinStructure]:
        yield from self.extensions(FinStructure.empty(self.signature, 0), size)

    def member(self, A: FinStructure) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearOrder(_ClassBase):
    """Finite linear orders ``(n, <)``; the age of the rationals."""

    signature: Signature = ORDER_SIGNATURE
    kind: str = field(default="linear-order", init=False)

    def member(self, A: FinStructure) -> bool:
        if A.signature != self.signature:
            raise StructuralError("signature mismatch")
        lt = A.tuples[0]
        n = A.size
        for a in range(n):
            if (a, a) in lt:
                return False
            for b in range(a + 1, n):
                if ((a, b) in lt) == ((b, a) in lt):
                    return False
        for a, b in lt:
            for c in range(n):
                if (b, c) in lt and (a, c) not in lt:
                    return False
        return True

    def fits(self, A: FinStructure, letters: Sequence[int]) -> bool:
        # the new point must sit in a cut: exactly the |below| lowest points are below it
        below = sum(letters)
        ranks = A.in_degrees[0]
        return all((ranks[v] < below) == bool(bit) for v, bit in enumerate(letters))

    def chain(self, n: int) -> FinStructure:
        return FinStructure.build(self.signature, n, {"<": [(a, b) for a in range(n) for b in range(a + 1, n)]})


def _flip(S: FinStructure) -> FinStructure:
    return S.relabel((1, 0))


@dataclass(frozen=True)
class UnrestrictedBinary(_ClassBase):
    """Structures whose two-element substructures all lie in ``constraints``.

    The order of ``constraints`` is the bijection ``lambda`` onto the alphabet of
    Sauer's tree ``k^{<omega}``.
    """

    signature: Signature
    constraints: tuple[FinStructure, ...]
    kind: str = field(default="unrestricted-binary", init=False)

    def __post_init__(self):
        if not self.constraints:
            raise DomainError("constraint set must be nonempty")
        if not self.signature.binary_only:
            raise DomainError("unrestricted classes need binary relations only")
        for c in self.constraints:
            if c.signature != self.signature or c.size != 2:
                raise DomainError("constraints are two-vertex structures over the signature")
            if any(c.vertex_bits(v) != (0,) * len(self.signature) for v in (0, 1)):
                raise DomainError("constraints with loops are not supported")
            if _flip(c) not in self.constraints:
                raise DomainError(f"constraint set not isomorphism-closed: {c.describe()}")
        if len(set(self.constraints)) != len(self.constraints):
            raise DomainError("duplicate constraint")

    @cached_property
    def _allowed(self) -> frozenset:
        return frozenset(c.pair_bits(0, 1) for c in self.constraints)

    def member(self, A: FinStructure) -> bool:
        if A.signature != self.signature:
            raise StructuralError("signature mismatch")
        zero = (0,) * len(self.signature)
        if any(A.vertex_bits(v) != zero for v in range(A.size)):
            return False
        allowed = self._allowed
        return all(A.pair_bits(a, b) in allowed
                   for a in range(A.size) for b in range(a + 1, A.size))

    @cached_property
    def _allowed_letters(self) -> frozenset:
        return frozenset(self.pair_letter(c) for c in self.constraints)

    def fits(self, A: FinStructure, letters: Sequence[int]) -> bool:
        ok = self._allowed_letters
        return all(a in ok for a in letters)

    @property
    def k(self) -> int:
        return len(self.constraints)

    def lam(self, j: int) -> FinStructure:
        return self.constraints[j]


@dataclass(frozen=True)
class ForbClass(_ClassBase):
    """``Forb(F)``: finite structures into which no member of ``forbidden`` embeds."""

    signature: Signature
    forbidden: tuple[FinStructure, ...]
    kind: str = field(default="forb", init=False)

    def __post_init__(self):
        for f in self.forbidden:
            if f.signature != self.signature:
                raise DomainError("forbidden structure over a different signature")
            if not is_irreducible(f):
                raise DomainError(f"forbidden structure is not irreducible: {f.describe()}")

    def member(self, A: FinStructure) -> bool:
        if A.signature != self.signature:
            raise StructuralError("signature mismatch")
        return not any(f.size <= A.size and embeds(f, A) for f in self.forbidden)

    def fits(self, A: FinStructure, letters: Sequence[int]) -> bool:
        # forbidden structures are irreducible, so a new copy lies inside the
        # new vertex together with the vertices it is related to
        near = [v for v, a in enumerate(letters) if a]
        local = self.attach(A.induced(near), [letters[v] for v in near])
        return self.member(local)


ClassSpec = LinearOrder | UnrestrictedBinary | ForbClass


def is_irreducible(F: FinStructure) -> bool:
    zero = (0,) * (2 * sum(1 for r in F.signature.relations if r.arity == 2))
    return all(F.pair_bits(a, b) != zero for a in range(F.size) for b in range(a + 1, F.size))


def class_member(A: FinStructure, spec: ClassSpec) -> bool:
    return spec.member(A)


# -- named structures and classes ------------------------------------------------

def graph(n: int, edges: Iterable[tuple[int, int]] = ()) -> FinStructure:
    return FinStructure.build(GRAPH_SIGNATURE, n, {"E": list(edges)})


def complete_graph(n: int) -> FinStructure:
    return graph(n, itertools.combinations(range(n), 2))


def cycle_graph(n: int) -> FinStructure:
    return graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> FinStructure:
    return graph(n, [(i, i + 1) for i in range(n - 1)])


def linear_order() -> LinearOrder:
    return LinearOrder()


def rado() -> UnrestrictedBinary:
    """Graphs: lambda(0) = non-edge, lambda(1) = edge."""
    return UnrestrictedBinary(GRAPH_SIGNATURE, (graph(2), graph(2, [(0, 1)])))


def generic_digraph() -> UnrestrictedBinary:
    none = FinStructure.build(DIGRAPH_SIGNATURE, 2)
    fwd = FinStructure.build(DIGRAPH_SIGNATURE, 2, {"A": [(0, 1)]})
    return UnrestrictedBinary(DIGRAPH_SIGNATURE, (none, fwd, _flip(fwd)))


def generic_tournament() -> UnrestrictedBinary:
    fwd = FinStructure.build(DIGRAPH_SIGNATURE, 2, {"A": [(0, 1)]})
    return UnrestrictedBinary(DIGRAPH_SIGNATURE, (fwd, _flip(fwd)))


def forb_clique(k: int) -> ForbClass:
    return ForbClass(GRAPH_SIGNATURE, (complete_graph(k),))


def g3() -> ForbClass:
    """Triangle-free graphs."""
    return forb_clique(3)


NAMED_CLASSES = {
    "linear-order": linear_order,
    "rado": rado,
    "g3": g3,
    "g4": lambda: forb_clique(4),
    "digraph": generic_digraph,
    "tournament": generic_tournament,
}


def class_name(spec: ClassSpec) -> str:
    for name, factory in NAMED_CLASSES.items():
        if factory() == spec:
            return name
    return spec.kind


def vertex(spec: ClassSpec) -> FinStructure:
    return FinStructure.empty(spec.signature, 1)


# -- amalgamation ------------------------------------------------------------------

@dataclass(frozen=True)
class AmalgamationInstance:
    A: FinStructure
    B: FinStructure
    C: FinStructure
    f: EmbeddingMap
    g: EmbeddingMap

    def __post_init__(self):
        if not is_embedding(self.A, self.B, self.f) or not is_embedding(self.A, self.C, self.g):
            raise DomainError("f and g must be embeddings of A")


@dataclass(frozen=True)
class WitnessFound:
    D: FinStructure
    r: EmbeddingMap
    s: EmbeddingMap


@dataclass(frozen=True)
class NoWitnessUpTo:
    bound: int


def _cross_options(spec: ClassSpec) -> list[tuple[int, ...]]:
    """Every relation-bit pattern a single ordered pair may carry."""
    two = FinStructure.empty(spec.signature, 2)
    width = len(two.pair_bits(0, 1))
    return list(itertools.product((0, 1), repeat=width))


def _with_pairs(base_sets, signature: Signature, size: int, pairs) -> FinStructure:
    sets = [set(s) for s in base_sets]
    for (a, b), bits in pairs:
        i = 0
        for r, rel in enumerate(signature.relations):
            if rel.arity != 2:
                continue
            if bits[i]:
                sets[r].add((a, b))
            if bits[i + 1]:
                sets[r].add((b, a))
            i += 2
    return FinStructure(signature, size, tuple(frozenset(s) for s in sets))


def _valid_pattern(signature: Signature, bits) -> bool:
    i = 0
    for rel in signature.relations:
        if rel.arity == 2:
            if rel.symmetric and bits[i] != bits[i + 1]:
                return False
            i += 2
    return True


def check_amalgamation_bounded(spec: ClassSpec, inst: AmalgamationInstance, bound: int,
                               mode: str = "AP"):
    """Search amalgams ``D`` of ``B`` and ``C`` over ``A`` with ``|D| <= bound``.

    ``D`` is restricted to the union of the two images: any larger witness
    restricts to such a one because classes are hereditary, so the search is
    complete for the given bound.  ``mode`` is ``"AP"``, ``"SAP"`` or ``"FAP"``.
    """
    if mode not in ("AP", "SAP", "FAP"):
        raise DomainError(f"unknown mode {mode!r}")
    for S in (inst.A, inst.B, inst.C):
        if not spec.member(S):
            raise DomainError("instance structures must belong to the class")
    sig = spec.signature
    A, B, C, f, g = inst.A, inst.B, inst.C, inst.f, inst.g
    c_image_of_a = {g.image[a]: f.image[a] for a in range(A.size)}
    c_rest = [c for c in range(C.size) if c not in c_image_of_a]
    b_free = [b for b in range(B.size) if b not in set(f.image)]
    strong = mode in ("SAP", "FAP")
    patterns = [p for p in _cross_options(spec) if _valid_pattern(sig, p)]
    zero = tuple(0 for _ in patterns[0])

    # identifications of new C-vertices with B-vertices outside f[A] (AP only)
    def identifications():
        if strong:
            yield {}
            return
        for k in range(len(c_rest) + 1):
            for chosen in itertools.combinations(c_rest, k):
                for targets in itertools.permutations(b_free, k):
                    yield dict(zip(chosen, targets))

    candidates = []
    for ident in identifications():
        size = B.size + len(c_rest) - len(ident)
        if size > bound:
            continue
        smap = dict(c_image_of_a)
        smap.update(ident)
        nxt = B.size
        for c in c_rest:
            if c not in smap:
                smap[c] = nxt
                nxt += 1
        candidates.append((size, smap))
    candidates.sort(key=lambda t: (t[0], sorted(t[1].items())))

    for size, smap in candidates:
        # C's relations on the identified image; clashes with B surface as
        # failed embedding checks below
        sets = [set(t) for t in B.tuples]
        for r, tset in enumerate(C.tuples):
            for tup in tset:
                sets[r].add(tuple(smap[v] for v in tup))
        D0 = FinStructure(sig, size, tuple(frozenset(s) for s in sets))
        s_map = EmbeddingMap(C.size, size, tuple(smap[c] for c in range(C.size)))
        r_map = EmbeddingMap(B.size, size, tuple(range(B.size)))
        s_img = set(s_map.image)
        free_pairs = [(b, d) for b in range(B.size) if b not in s_img for d in range(B.size, size)]
        options = [zero] if mode == "FAP" else patterns
        for choice in itertools.product(options, repeat=len(free_pairs)):
            D = _with_pairs(D0.tuples, sig, size, list(zip(free_pairs, choice)))
            if not spec.member(D):
                continue
            if is_embedding(B, D, r_map) and is_embedding(C, D, s_map):
                return WitnessFound(D, r_map, s_map)
    return NoWitnessUpTo(bound)


# -- SDAP ----------------------------------------------------------------------------

@dataclass(frozen=True)
class VerifiedUpTo:
    bound: int
    A_prime: FinStructure
    C_prime: FinStructure


@dataclass(frozen=True)
class Counterexample:
    B: FinStructure
    D: FinStructure
    sigma: tuple[int, ...]
    tau: tuple[int, ...]


@dataclass(frozen=True)
class Inconclusive:
    bound: int
    reason: str


def _sdap_candidates(spec: ClassSpec, A: FinStructure, C: FinStructure, max_extra: int):
    """Pairs (A', C'): A' extends A by new vertices placed *after* A; C' puts
    the two vertices of C after A', with C' | (A + v', w') equal to C."""
    a = A.size
    for extra in range(max_extra + 1):
        for Ap in spec.extensions(A, extra):
            # v' then w' over A'; their letters over A are fixed by C
            v_base = tuple(spec.letter(C, i, a) for i in range(a))
            w_base = tuple(spec.letter(C, i, a + 1) for i in range(a))
            vw = spec.letter(C, a, a + 1)
            for v_new in itertools.product(spec.alphabet, repeat=extra):
                Cv = spec.attach(Ap, v_base + v_new)
                if not spec.member(Cv):
                    continue
                for w_new in itertools.product(spec.alphabet, repeat=extra):
                    Cp = spec.attach(Cv, w_base + w_new + (vw,))
                    if spec.member(Cp):
                        yield Ap, Cp


def _sdap_failure(spec: ClassSpec, A: FinStructure, C: FinStructure,
                  Ap: FinStructure, Cp: FinStructure, bound: int):
    """First (B, D, sigma, tau) refuting the conclusion for this (A', C'), or None."""
    a, ap = A.size, Ap.size
    sigma0 = tuple(spec.letter(Cp, i, ap) for i in range(ap))
    tau0 = tuple(spec.letter(Cp, i, ap + 1) for i in range(ap))
    vw = spec.letter(C, a, a + 1)
    for extra in range(bound - ap + 1):
        for B in spec.extensions(Ap, extra):
            tails = list(itertools.product(spec.alphabet, repeat=extra))
            sigmas = [sigma0 + t for t in tails if spec.member(spec.attach(B, sigma0 + t))]
            taus = [tau0 + t for t in tails if spec.member(spec.attach(B, tau0 + t))]
            for sigma in sigmas:
                D = spec.attach(B, sigma)
                for tau in taus:
                    E = spec.attach(D, tau + (vw,))
                    if not spec.member(E):
                        return B, D, sigma, tau
    return None


def check_sdap_bounded(spec: ClassSpec, A: FinStructure, C: FinStructure, bound: int):
    """Bounded check of the substructure disjoint amalgamation property.

    ``C`` must restrict to ``A`` on its first ``|A|`` vertices and add two more,
    ``v = |A|`` and ``w = |A| + 1``.  Candidates ``A'`` add at most two vertices
    to ``A``.  For free-amalgamation classes a failure of the base candidate
    ``A' = A`` transfers to every ``A'`` (free amalgamation over ``A``), so it is
    reported as a certified :class:`Counterexample`; otherwise a search without
    a validating candidate is :class:`Inconclusive`.
    """
    if C.size != A.size + 2:
        raise DomainError("C must extend A by exactly two vertices")
    if C.induced(range(A.size)) != A:
        raise DomainError("A must be the substructure of C on its first |A| vertices")
    if not spec.member(C):
        raise DomainError("C must belong to the class")
    base_failure = None
    for Ap, Cp in _sdap_candidates(spec, A, C, 2):
        if Ap.size > bound:
            break
        failure = _sdap_failure(spec, A, C, Ap, Cp, bound)
        if failure is None:
            return VerifiedUpTo(bound, Ap, Cp)
        if Ap.size == A.size and base_failure is None:
            base_failure = failure
    if isinstance(spec, ForbClass) and base_failure is not None:
        return Counterexample(*base_failure)
    return Inconclusive(bound, "no candidate (A', C') with |A'| <= |A| + 2 validated")


# -- serialization -----------------------------------------------------------------------

def signature_to_list(sig: Signature) -> list[dict]:
    return [{"name": r.name, "arity": r.arity, "symmetric": r.symmetric} for r in sig.relations]


def signature_from_list(items) -> Signature:
    try:
        return Signature(tuple(Relation(d["name"], int(d.get("arity", 2)), bool(d.get("symmetric", False)))
                               for d in items))
    except (KeyError, TypeError) as exc:
        raise DomainError(f"bad signature entry: {exc}") from exc


def structure_to_dict(S: FinStructure) -> dict:
    rels = {}
    for rel, tset in zip(S.signature.relations, S.tuples):
        tups = sorted(tset)
        if rel.symmetric:
            tups = [t for t in tups if t[0] <= t[1]]
        rels[rel.name] = [list(t) for t in tups]
    return {"size": S.size, "relations": rels}


def structure_from_dict(d: dict, sig: Signature) -> FinStructure:
    if not isinstance(d, dict) or "size" not in d:
        raise DomainError("structure block needs a 'size' key")
    extra = set(d) - {"size", "relations"}
    if extra:
        raise DomainError(f"unknown keys in structure block: {sorted(extra)}")
    return FinStructure.build(sig, int(d["size"]), d.get("relations", {}))


def class_to_dict(spec: ClassSpec) -> dict:
    if isinstance(spec, LinearOrder):
        return {"class": "linear-order"}
    out = {"class": spec.kind, "signature": signature_to_list(spec.signature)}
    if isinstance(spec, UnrestrictedBinary):
        out["constraints"] = [structure_to_dict(c) for c in spec.constraints]
    else:
        out["forbidden"] = [structure_to_dict(f) for f in spec.forbidden]
    return out


def class_from_dict(d: dict) -> ClassSpec:
    """Inverse of :func:`class_to_dict`; also accepts ``{"class": <named class>}``."""
    if not isinstance(d, dict) or "class" not in d:
        raise DomainError("class document needs a 'class' key")
    kind = d["class"]
    allowed = {"linear-order": {"class"},
               "unrestricted-binary": {"class", "signature", "constraints"},
               "forb": {"class", "signature", "forbidden"}}
    if kind in NAMED_CLASSES and kind not in allowed:
        if set(d) != {"class"}:
            raise DomainError(f"named class {kind!r} takes no further keys")
        return NAMED_CLASSES[kind]()
    if kind not in allowed:
        raise DomainError(f"unknown class kind {kind!r}")
    extra = set(d) - allowed[kind]
    if extra:
        raise DomainError(f"unknown keys for {kind!r}: {sorted(extra)}")
    if kind == "linear-order":
        return LinearOrder()
    sig = signature_from_list(d.get("signature", []))
    if kind == "unrestricted-binary":
        return UnrestrictedBinary(sig, tuple(structure_from_dict(c, sig) for c in d.get("constraints", [])))
    return ForbClass(sig, tuple(structure_from_dict(f, sig) for f in d.get("forbidden", [])))
