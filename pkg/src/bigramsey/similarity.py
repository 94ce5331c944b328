"""Similarity of node sets, canonical diagrams, and catalogs of similarity types.

Two flavors are supported.

``passing-numbers``
    A bijection of meet closures preserving prefixes, relative length order,
    membership in the set and every passing number ``t(|s|)``.
``lex-only``
    The same, with passing numbers replaced by the lexicographic order, plus
    the relations the nodes of the set code among themselves.  On trees of
    1-types this is the structural notion used for diagonal antichains.

A :class:`Rep` says how a node set codes relations: on a coding tree of
1-types the entry ``t[|s|]`` *is* the letter of ``t`` over ``s``; on Sauer's
tree the digit ``j`` stands for the two-element structure ``lambda(j)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, InternalError, Unsupported
from .limit import EnumeratedPrefix, check_prefix
from .structures import (
    ClassSpec,
    FinStructure,
    LinearOrder,
    UnrestrictedBinary,
    class_name,
    is_isomorphic,
    iso_classes,
)
from .trees import (
    CodingTree,
    Node,
    comparable,
    encode_node,
    is_diagonal,
    is_strongly_diagonal,
    meet_closure,
    sequences,
    uc_letter,
)

PASSING = "passing-numbers"
LEX = "lex-only"
FLAVORS = (PASSING, LEX)


@dataclass(frozen=True)
class Rep:
    """A representation: a name and the digit-to-letter table (``None`` is identity)."""

    name: str
    letters: tuple[int, ...] | None = None

    def letter(self, digit: int) -> int:
        return digit if self.letters is None else self.letters[digit]


PLAIN = Rep("plain")


def types_rep(spec: ClassSpec) -> Rep:
    return Rep(f"types:{class_name(spec)}")


def sauer_rep(spec: UnrestrictedBinary) -> Rep:
    return Rep(f"sauer:{class_name(spec)}", tuple(uc_letter(spec, j) for j in range(spec.k)))


@dataclass(frozen=True)
class SimilarityDiagram:
    """Canonical shape of ``mc(A)``; node ``i`` is the ``i``-th in canonical order.

    Canonical order sorts by height rank, then by lexicographic pre-order.
    ``passing[t][s]`` is ``t(|s|)`` when ``s`` is strictly shorter, else -1.
    ``relations`` lists ``(s, t, letter)`` for coded nodes ``|s| < |t|``.
    """

    flavor: str
    m: int
    parent: tuple[int, ...]
    height: tuple[int, ...]
    coding: tuple[bool, ...]
    children: tuple[tuple[int, ...], ...]
    relations: tuple[tuple[int, int, int], ...]
    passing: tuple[tuple[int, ...], ...] | None = None

    @property
    def size(self) -> int:
        """Number of coded nodes."""
        return sum(self.coding)

    @property
    def encoding(self) -> str:
        parts = [
            "P" if self.flavor == PASSING else "L",
            str(self.m),
            ",".join("." if p < 0 else str(p) for p in self.parent),
            ",".join(map(str, self.height)),
            "".join("1" if c else "0" for c in self.coding),
            ",".join("".join(f"{c};" for c in ch).rstrip(";") or "." for ch in self.children),
            ",".join(f"{s}{t}:{a}" for s, t, a in self.relations) or ".",
        ]
        if self.passing is not None:
            parts.append(",".join("".join("-" if x < 0 else str(x) for x in row) for row in self.passing))
        return "|".join(parts)

    def projected(self) -> "SimilarityDiagram":
        """The lex-only diagram obtained by forgetting passing numbers."""
        return replace(self, flavor=LEX, passing=None)

    def coded_nodes(self) -> list[int]:
        return [i for i in range(self.m) if self.coding[i]]

    def decode(self, spec: ClassSpec) -> FinStructure:
        """The structure coded by the flagged nodes, vertices in height order."""
        nodes = self.coded_nodes()
        if len(set(self.height[i] for i in nodes)) != len(nodes):
            raise DomainError("coded nodes of equal height: decoding needs a diagonal set")
        pos = {v: k for k, v in enumerate(nodes)}
        rel = {(pos[s], pos[t]): a for s, t, a in self.relations}
        K = FinStructure.empty(spec.signature, 0)
        for y in range(len(nodes)):
            letters = [rel[(x, y)] for x in range(y)]
            if not spec.fits(K, letters):
                raise DomainError("diagram codes a structure outside the class")
            K = spec.attach(K, letters)
        return K


def canonical_form(A: Iterable[Node], flavor: str = LEX, rep: Rep = PLAIN) -> SimilarityDiagram:
    A = frozenset(A)
    if not A:
        raise DomainError("canonical form of the empty set")
    if flavor not in FLAVORS:
        raise DomainError(f"unknown flavor {flavor!r}")
    mc = meet_closure(A)
    by_len = sorted(mc, key=lambda u: (len(u), u))
    parent: dict[Node, Node | None] = {}
    kids: dict[Node, list[Node]] = defaultdict(list)
    for i, u in enumerate(by_len):
        p = None
        for v in reversed(by_len[:i]):
            if len(v) < len(u) and u[: len(v)] == v:
                p = v
                break
        parent[u] = p
        if p is not None:
            kids[p].append(u)
    roots = [u for u in by_len if parent[u] is None]
    if len(roots) != 1:
        raise InternalError("meet closure without a unique root")
    for p in kids:
        kids[p].sort(key=lambda u: u[len(p)])
    pre: dict[Node, int] = {}
    stack = [roots[0]]
    while stack:
        u = stack.pop()
        pre[u] = len(pre)
        stack.extend(reversed(kids[u]))
    rank = {l: r for r, l in enumerate(sorted({len(u) for u in mc}))}
    order = sorted(mc, key=lambda u: (rank[len(u)], pre[u]))
    idx = {u: i for i, u in enumerate(order)}
    relations = tuple(
        (idx[s], idx[t], rep.letter(t[len(s)]))
        for s in order if s in A
        for t in order if t in A and len(s) < len(t)
    )
    passing = None
    if flavor == PASSING:
        passing = tuple(tuple(t[len(s)] if len(s) < len(t) else -1 for s in order) for t in order)
    return SimilarityDiagram(
        flavor=flavor,
        m=len(order),
        parent=tuple(-1 if parent[u] is None else idx[parent[u]] for u in order),
        height=tuple(rank[len(u)] for u in order),
        coding=tuple(u in A for u in order),
        children=tuple(tuple(idx[c] for c in kids[u]) for u in order),
        relations=relations,
        passing=passing,
    )


def is_similar(A: Iterable[Node], B: Iterable[Node], flavor: str = LEX,
               rep: Rep = PLAIN, rep_b: Rep | None = None) -> bool:
    if rep_b is not None and rep_b != rep:
        raise DomainError("node sets come from different representations")
    return canonical_form(A, flavor, rep) == canonical_form(B, flavor, rep)


# -- catalogs ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _iso_reps(spec: ClassSpec, n: int) -> tuple[FinStructure, ...]:
    return tuple(iso_classes(spec.members(n)))


def structure_id(spec: ClassSpec, S: FinStructure) -> str:
    """``"<size>.<k>"``: ``S`` is the ``k``-th isomorphism class of its size (by canonical code)."""
    for k, R in enumerate(_iso_reps(spec, S.size)):
        if R.code == S.code:
            return f"{S.size}.{k}"
    raise DomainError("structure is not in the class")


@dataclass(frozen=True)
class CatalogEntry:
    diagram: SimilarityDiagram
    structure: str
    witness: tuple[Node, ...] | None
    status: str = "witnessed"

    def line(self) -> str:
        w = "-" if self.witness is None else " ".join(encode_node(t) or "()" for t in self.witness)
        return f"{self.diagram.encoding}\t{self.structure}\t{w}\t{self.status}"


@dataclass(frozen=True)
class TypeCatalog:
    """Pairwise non-similar diagrams, sorted by canonical encoding."""

    flavor: str
    entries: tuple[CatalogEntry, ...]

    @classmethod
    def of(cls, flavor: str, entries: Iterable[CatalogEntry]) -> "TypeCatalog":
        best: dict[str, CatalogEntry] = {}
        for e in entries:
            key = e.diagram.encoding
            if key not in best:
                best[key] = e
        return cls(flavor, tuple(best[k] for k in sorted(best)))

    def __len__(self) -> int:
        return len(self.entries)

    def encodings(self) -> frozenset:
        return frozenset(e.diagram.encoding for e in self.entries)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = defaultdict(int)
        for e in self.entries:
            out[e.structure] += 1
        return dict(sorted(out.items()))

    def restrict(self, structure: str) -> "TypeCatalog":
        return TypeCatalog(self.flavor, tuple(e for e in self.entries if e.structure == structure))

    def projected(self) -> "TypeCatalog":
        return TypeCatalog.of(LEX, (replace(e, diagram=e.diagram.projected()) for e in self.entries))

    @property
    def inconclusive(self) -> tuple[CatalogEntry, ...]:
        return tuple(e for e in self.entries if e.status != "witnessed")

    def export(self) -> str:
        return "".join(e.line() + "\n" for e in self.entries)


# -- generation -------------------------------------------------------------------------

def _shapes(n: int):
    """Plane binary trees with ``n`` leaves: ``None`` is a leaf, pairs are (left, right)."""
    if n == 1:
        return [None]
    out = []
    for k in range(1, n):
        for left in _shapes(k):
            for right in _shapes(n - k):
                out.append((left, right))
    return out


@dataclass
class _Shape:
    parent: list[int]
    children: list[list[int]]   # left to right
    leaf: list[bool]


def _flatten(shape) -> _Shape:
    parent, children, leaf = [], [], []

    def walk(t, p):
        i = len(parent)
        parent.append(p)
        children.append([])
        leaf.append(t is None)
        if p >= 0:
            children[p].append(i)
        if t is not None:
            walk(t[0], i)
            walk(t[1], i)

    walk(shape, -1)
    return _Shape(parent, children, leaf)


def _linear_extensions(sh: _Shape) -> Iterator[list[int]]:
    """Orders of the nodes in which every node follows its parent."""
    m = len(sh.parent)
    order: list[int] = []

    def rec(avail):
        if len(order) == m:
            yield list(order)
            return
        for a in sorted(avail):
            order.append(a)
            yield from rec((avail - {a}) | set(sh.children[a]))
            order.pop()

    yield from rec(frozenset([0]))


def _diagram_from_plan(sh: _Shape, order: list[int], rel: dict) -> SimilarityDiagram:
    pos = {v: i for i, v in enumerate(order)}
    m = len(order)
    return SimilarityDiagram(
        flavor=LEX,
        m=m,
        parent=tuple(-1 if sh.parent[v] < 0 else pos[sh.parent[v]] for v in order),
        height=tuple(range(m)),
        coding=tuple(sh.leaf[v] for v in order),
        children=tuple(tuple(pos[c] for c in sh.children[v]) for v in order),
        relations=tuple(sorted((pos[s], pos[t], a) for (s, t), a in rel.items())),
    )


def _ancestors(sh: _Shape, v: int) -> list[int]:
    out = []
    while v >= 0:
        out.append(v)
        v = sh.parent[v]
    return out


def _meet_node(sh: _Shape, a: int, b: int) -> int:
    anc = set(_ancestors(sh, a))
    for v in _ancestors(sh, b):
        if v in anc:
            return v
    raise InternalError("nodes without a common ancestor")


def _left_of(sh: _Shape, a: int, b: int) -> bool:
    """Leaf ``a`` lies left of leaf ``b`` in the plane tree."""
    m = _meet_node(sh, a, b)
    left = sh.children[m][0]
    return left in _ancestors(sh, a)


def _relation_options(spec: ClassSpec) -> list[int] | None:
    if isinstance(spec, LinearOrder):
        return None
    return sorted(spec._allowed_letters)


def _plans(spec: ClassSpec, sh: _Shape, order: list[int]) -> Iterator[dict]:
    """Relation letters between coded nodes consistent with the tree."""
    h = {v: i for i, v in enumerate(order)}
    leaves = [v for v in order if sh.leaf[v]]
    pairs = [(s, t) for i, s in enumerate(leaves) for t in leaves[i + 1:]]
    opts = _relation_options(spec)
    if opts is None:
        yield {(s, t): int(_left_of(sh, s, t)) for s, t in pairs}
        return
    rel: dict = {}

    def rec(k):
        if k == len(pairs):
            yield dict(rel)
            return
        s, t = pairs[k]
        forced = None
        # t and an earlier-decided t' pass level |s| through the same node
        for (s2, t2), a in rel.items():
            if s2 == s and h[_meet_node(sh, t, t2)] > h[s]:
                forced = a
                break
        for a in ([forced] if forced is not None else opts):
            rel[(s, t)] = a
            yield from rec(k + 1)
            del rel[(s, t)]

    yield from rec(0)


def _decode_plan(spec: ClassSpec, leaves: list[int], rel: dict) -> FinStructure | None:
    K = FinStructure.empty(spec.signature, 0)
    for y, t in enumerate(leaves):
        letters = [rel[(s, t)] for s in leaves[:y]]
        if not spec.fits(K, letters):
            return None
        K = spec.attach(K, letters)
    return K


def _witness(spec: ClassSpec, sh: _Shape, order: list[int], rel: dict) -> EnumeratedPrefix | None:
    """A compact enumeration whose coded leaves realise the plan.

    Vertex ``v_h`` sits at the level of the diagram node of height ``h``; the
    leaves' types are the coding nodes, inner vertices are filled in freely.
    """
    m = len(order)
    h = {v: i for i, v in enumerate(order)}
    node_at = order
    alphabet = list(spec.alphabet)
    types: list[tuple[int, ...]] = []
    segments = [FinStructure.empty(spec.signature, 0)]

    def allowed(y: int, x: int, letters: list[int]) -> list[int]:
        v = node_at[y]
        if not sh.leaf[v]:
            return alphabet
        if sh.leaf[node_at[x]]:
            return [rel[(node_at[x], v)]]
        cands = alphabet
        for y2 in range(x + 1, y):
            v2 = node_at[y2]
            if not sh.leaf[v2]:
                continue
            km = h[_meet_node(sh, v, v2)]
            a2 = types[y2][x]
            if km > x:
                cands = [a for a in cands if a == a2]
            elif km == x:
                if _left_of(sh, v, v2):
                    cands = [a for a in cands if a < a2]
                else:
                    cands = [a for a in cands if a > a2]
        return cands

    def vertex_options(y: int) -> Iterator[tuple[int, ...]]:
        letters: list[int] = []

        def dfs(x):
            if x == y:
                yield tuple(letters)
                return
            for a in allowed(y, x, letters):
                letters.append(a)
                if spec.fits(segments[x + 1], letters):
                    yield from dfs(x + 1)
                letters.pop()

        yield from dfs(0)

    def place(y: int) -> bool:
        if y == m:
            return True
        for t in vertex_options(y):
            types.append(t)
            segments.append(spec.attach(segments[y], t))
            if place(y + 1):
                return True
            types.pop()
            segments.pop()
        return False

    if not place(0):
        return None
    prefix = EnumeratedPrefix(spec, tuple(types))
    check_prefix(prefix)
    return prefix


def enumerate_types(spec: ClassSpec, target: FinStructure) -> TypeCatalog:
    """Similarity types of diagonal antichains of 1-types coding ``target``."""
    if not isinstance(spec, (LinearOrder, UnrestrictedBinary)):
        raise Unsupported("type generation covers linear orders and unrestricted classes")
    if target.signature != spec.signature or not spec.member(target):
        raise DomainError("target is not in the class")
    n = target.size
    if n < 1:
        raise DomainError("target must be nonempty")
    sid = structure_id(spec, target)
    rep = types_rep(spec)
    entries = []
    for shape in _shapes(n):
        sh = _flatten(shape)
        for order in _linear_extensions(sh):
            leaves = [v for v in order if sh.leaf[v]]
            for rel in _plans(spec, sh, order):
                S = _decode_plan(spec, leaves, rel)
                if S is None or not is_isomorphic(S, target):
                    continue
                diagram = _diagram_from_plan(sh, order, rel)
                prefix = _witness(spec, sh, order, rel)
                if prefix is None:
                    entries.append(CatalogEntry(diagram, sid, None, "inconclusive"))
                    continue
                witness = tuple(prefix.types[order.index(v)] for v in leaves)
                got = canonical_form(witness, LEX, rep)
                if got != diagram or not is_diagonal(witness):
                    raise InternalError("witness does not realise its diagram")
                entries.append(CatalogEntry(diagram, sid, witness))
    return TypeCatalog.of(LEX, entries)


# -- scans ------------------------------------------------------------------------------

@dataclass(frozen=True)
class SauerTree:
    """Sauer's tree ``k^{<= depth}`` for an unrestricted class."""

    spec: UnrestrictedBinary
    depth: int

    @property
    def nodes(self) -> list[Node]:
        return sequences(self.spec.k, self.depth)


def _antichains(nodes: Sequence[Node], n: int) -> Iterator[tuple[Node, ...]]:
    nodes = sorted(nodes, key=lambda u: (len(u), u))
    chosen: list[Node] = []

    def rec(start):
        if len(chosen) == n:
            yield tuple(chosen)
            return
        for i in range(start, len(nodes)):
            u = nodes[i]
            # distinct lengths are needed for diagonality anyway
            if chosen and len(u) == len(chosen[-1]):
                continue
            if any(comparable(u, c) for c in chosen):
                continue
            chosen.append(u)
            yield from rec(i + 1)
            chosen.pop()

    yield from rec(0)


def realized_types_in_depth(tree, n: int, depth: int | None = None,
                            flavor: str | None = None, strong: bool = True) -> TypeCatalog:
    """Every similarity type of an ``n``-element diagonal antichain found in the tree.

    ``tree`` is a :class:`CodingTree` (coded nodes ``c(i)`` with ``i <= depth``)
    or a :class:`SauerTree` (all nodes of length ``<= depth``).  On Sauer's tree
    the default flavor is passing numbers and, with ``strong``, only strongly
    diagonal antichains count.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if isinstance(tree, CodingTree):
        depth = tree.depth if depth is None else depth
        if depth > tree.depth:
            raise DomainError("depth exceeds the built tree")
        spec, rep = tree.prefix.spec, types_rep(tree.prefix.spec)
        nodes = list(tree.coding_nodes[: depth + 1])
        flavor = flavor or LEX
        strong = False
    elif isinstance(tree, SauerTree):
        depth = tree.depth if depth is None else depth
        spec, rep = tree.spec, sauer_rep(tree.spec)
        nodes = sequences(spec.k, min(depth, tree.depth))
        flavor = flavor or PASSING
    else:
        raise DomainError("unknown tree representation")
    if depth < n - 1:
        raise DomainError("depth too small for n nodes")
    seen: dict[SimilarityDiagram, CatalogEntry] = {}
    for A in _antichains(nodes, n):
        if not is_diagonal(A):
            continue
        if strong and not is_strongly_diagonal(A):
            continue
        d = canonical_form(A, flavor, rep)
        if d not in seen:
            seen[d] = CatalogEntry(d, structure_id(spec, d.decode(spec)), A)
    return TypeCatalog.of(flavor, seen.values())


def scan_catalog(spec: ClassSpec, n: int, depth: int, prefix: EnumeratedPrefix | None = None) -> TypeCatalog:
    """Lex-only catalog found by scanning: Sauer's tree for unrestricted classes,
    otherwise the coding tree of ``prefix``."""
    from .trees import build_coding_tree
    if isinstance(spec, UnrestrictedBinary) and prefix is None:
        return realized_types_in_depth(SauerTree(spec, depth), n).projected()
    if prefix is None:
        raise DomainError("a prefix is needed to scan this class")
    return realized_types_in_depth(build_coding_tree(prefix, depth), n)
