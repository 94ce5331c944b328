"""Trees of finite sequences, coding trees of 1-types, and Sauer's tree structure.

Every node is a tuple of small integers.  In ``k^{<omega}`` the entries are
digits; in a coding tree of 1-types the entry at position ``i`` is the letter
recording how the new vertex relates to ``v_i``.  Both kinds share the same
meet, lexicographic and passing-number machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import DomainError, InternalError
from .limit import EnumeratedPrefix
from .structures import FinStructure, UnrestrictedBinary

Node = tuple


def is_prefix(s: Node, t: Node) -> bool:
    """``s ⊑ t``."""
    return len(s) <= len(t) and t[:len(s)] == s


def comparable(s: Node, t: Node) -> bool:
    return is_prefix(s, t) or is_prefix(t, s)


def meet(s: Node, t: Node) -> Node:
    n = 0
    for a, b in zip(s, t):
        if a != b:
            break
        n += 1
    return s[:n]


def passing_number(t: Node, s: Node) -> int:
    if len(s) >= len(t):
        raise DomainError("passing number needs |s| < |t|")
    return t[len(s)]


def lex_compare(s: Node, t: Node) -> int:
    """-1 if ``s <_lex t``, +1 if greater; the nodes must be incomparable.

    Entries are compared at the meet level; letters of 1-types are packed so
    that this integer comparison is the literal order.
    """
    if comparable(s, t):
        raise DomainError("lex order is only defined for incomparable nodes")
    k = len(meet(s, t))
    return -1 if s[k] < t[k] else 1


def meet_closure(S: Iterable[Node]) -> frozenset:
    S = list(dict.fromkeys(S))
    out = set(S)
    for s, t in itertools.combinations(S, 2):
        out.add(meet(s, t))
    return frozenset(out)


def is_antichain(S: Iterable[Node]) -> bool:
    return not any(comparable(s, t) for s, t in itertools.combinations(list(S), 2))


def is_diagonal(S: Iterable[Node]) -> bool:
    """Antichain whose meet closure has no two nodes of the same length.

    For ``n`` nodes this says the meet levels form ``n - 1`` distinct values,
    none of them a node length, and the nodes have distinct lengths.
    """
    S = list(S)
    if not is_antichain(S):
        raise DomainError("diagonality is defined for antichains")
    mc = meet_closure(S)
    return len({len(u) for u in mc}) == len(mc) == max(2 * len(S) - 1, 0)


def meet_levels(S: Sequence[Node]) -> dict[tuple[int, int], int]:
    """``{(i, j): |S[i] ∧ S[j]|}`` for ``i < j``."""
    return {(i, j): len(meet(S[i], S[j])) for i, j in itertools.combinations(range(len(S)), 2)}


def is_strongly_diagonal(S: Iterable[Node]) -> bool:
    """Diagonal, and at each meet level every other node of the meet closure
    passes with digit 0 while the two branches of the meet separate as 0 < d.

    This is the shape of Sauer's diagonal antichain inside ``k^{<omega}``.
    """
    S = list(S)
    if not is_diagonal(S):
        return False
    mc = meet_closure(S)
    meets = mc - set(S)
    for m in meets:
        for u in mc:
            if len(u) <= len(m):
                continue
            if is_prefix(m, u):
                continue
            if u[len(m)] != 0:
                return False
        branch = {u[len(m)] for u in mc if len(u) > len(m) and is_prefix(m, u)}
        if 0 not in branch:
            return False
    return True


# -- coding trees of 1-types -----------------------------------------------------

@dataclass(frozen=True)
class CodingTree:
    """All realizable 1-types over ``K_0 ... K_depth`` of an enumerated prefix."""

    prefix: EnumeratedPrefix
    depth: int
    levels: tuple[tuple[Node, ...], ...]

    def coding(self, n: int) -> Node:
        """``c(n)``, the type of ``v_n`` over ``K_n``."""
        if not 0 <= n < min(self.prefix.size, self.depth + 1):
            raise DomainError(f"no coding node c({n}) in this tree")
        return self.prefix.types[n]

    @property
    def coding_nodes(self) -> tuple[Node, ...]:
        return tuple(self.prefix.types[: min(self.prefix.size, self.depth + 1)])

    def nodes(self) -> Iterator[Node]:
        for lvl in self.levels:
            yield from lvl

    def successors(self, t: Node) -> tuple[Node, ...]:
        if len(t) >= self.depth:
            return ()
        return tuple(u for u in self.levels[len(t) + 1] if u[: len(t)] == t)

    def __contains__(self, t: Node) -> bool:
        return len(t) <= self.depth and t in self._index

    @property
    def _index(self) -> dict:
        cached = self.__dict__.get("_idx")
        if cached is None:
            cached = {}
            for lvl in self.levels:
                for t in lvl:
                    cached[t] = len(cached)
            object.__setattr__(self, "_idx", cached)
        return cached

    def dump(self) -> str:
        """One line per node: ``level parent-index letters coding``.

        Nodes are numbered level by level in lexicographic order; ``coding`` is
        ``n`` when the node is ``c(n)`` and ``-`` otherwise.
        """
        idx = self._index
        coding = {t: n for n, t in enumerate(self.coding_nodes)}
        lines = []
        for t in self.nodes():
            parent = idx[t[:-1]] if t else -1
            lines.append(f"{len(t)} {parent} {encode_node(t) or '.'} {coding.get(t, '-')}")
        return "\n".join(lines) + "\n"


def encode_node(t: Node) -> str:
    if all(0 <= a < 10 for a in t):
        return "".join(map(str, t))
    return ".".join(map(str, t))


def decode_node(text: str) -> Node:
    if text in ("", "."):
        return ()
    if "." in text:
        return tuple(int(x) for x in text.split("."))
    return tuple(int(x) for x in text)


def build_coding_tree(prefix: EnumeratedPrefix, depth: int) -> CodingTree:
    if depth > prefix.size:
        raise DomainError("depth exceeds the prefix size")
    spec = prefix.spec
    segments = [prefix.initial(0)]
    for n in range(depth):
        segments.append(spec.attach(segments[-1], prefix.types[n]))
    levels = [((),)]
    for lvl in range(depth):
        K = segments[lvl + 1]
        nxt = []
        for t in levels[-1]:
            for a in spec.alphabet:
                if spec.fits(K, t + (a,)):
                    nxt.append(t + (a,))
        levels.append(tuple(nxt))
    tree = CodingTree(prefix, depth, tuple(levels))
    for n, c in enumerate(tree.coding_nodes):
        if c not in tree:
            raise InternalError(f"coding node c({n}) is not a realizable type")
    return tree


def decoded_letter(prefix: EnumeratedPrefix, i: int, j: int) -> int:
    """Relation of ``v_i`` and ``v_j`` (``i < j``) read from ``c(j)`` at level ``i``."""
    return passing_number(prefix.types[j], prefix.types[i])


# -- Sauer's structure on k^{<omega} ----------------------------------------------------

def sauer_relation(spec: UnrestrictedBinary, s: Node, t: Node) -> FinStructure:
    """The substructure of ``U_C`` on ``{s, t}``, with ``s -> 0`` and ``t -> 1``."""
    if not isinstance(spec, UnrestrictedBinary):
        raise DomainError("Sauer's structure needs an unrestricted class")
    if s == t:
        raise DomainError("need two distinct nodes")
    if any(not 0 <= a < spec.k for a in s + t):
        raise DomainError("node outside the alphabet {0..k-1}")
    if len(s) < len(t):
        return spec.lam(t[len(s)])
    if len(s) > len(t):
        return spec.lam(s[len(t)]).relabel((1, 0))
    lam0 = spec.lam(0)
    return lam0 if lex_compare(s, t) < 0 else lam0.relabel((1, 0))


def sequences(k: int, depth: int) -> list[Node]:
    """``k^{<= depth}`` in order of length, then lexicographically."""
    out = []
    for n in range(depth + 1):
        out.extend(itertools.product(range(k), repeat=n))
    return out


def uc_structure(spec: UnrestrictedBinary, depth: int) -> tuple[list[Node], FinStructure]:
    """``U_C`` restricted to ``k^{<= depth}``: the node list and the structure on it."""
    nodes = sequences(spec.k, depth)
    sets = [set() for _ in spec.signature.relations]
    for (i, s), (j, t) in itertools.combinations(enumerate(nodes), 2):
        pair = sauer_relation(spec, s, t)
        for r, tset in enumerate(pair.tuples):
            for a, b in tset:
                sets[r].add(((i, j)[a], (i, j)[b]))
    return nodes, FinStructure(spec.signature, len(nodes), tuple(frozenset(x) for x in sets))


def uc_letter(spec: UnrestrictedBinary, digit: int) -> int:
    """Letter (as in 1-types) of the later node over the earlier one when the
    passing number is ``digit``."""
    return spec.pair_letter(spec.lam(digit))


# -- subtrees --------------------------------------------------------------------------

@dataclass(frozen=True)
class TreeSubset:
    nodes: frozenset
    levels: tuple[int, ...]

    @classmethod
    def of(cls, nodes: Iterable[Node]) -> "TreeSubset":
        nodes = frozenset(nodes)
        return cls(nodes, tuple(sorted({len(t) for t in nodes})))

    def is_tree(self) -> bool:
        return all(t[:l] in self.nodes for t in self.nodes for l in self.levels if l <= len(t))

    def level(self, i: int) -> list[Node]:
        lv = self.levels[i]
        return sorted(t for t in self.nodes if len(t) == lv)


def full_tree(k: int, depth: int) -> TreeSubset:
    return TreeSubset.of(sequences(k, depth))


def succ(T: TreeSubset, t: Node) -> set[Node]:
    """``Succ_T(t)``: restrictions to length ``|t|+1`` of the nodes of ``T`` above ``t``."""
    return {u[: len(t) + 1] for u in T.nodes if len(u) > len(t) and u[: len(t)] == t}


def is_strong_subtree(T: TreeSubset, S: TreeSubset) -> bool:
    """``S`` is a rooted strong subtree of ``T``.

    Nodes on the top level of ``S`` have nothing above them in ``S`` and are
    exempt from the branching condition.
    """
    if not S.nodes <= T.nodes or not set(S.levels) <= set(T.levels):
        return False
    if not S.nodes or not S.is_tree() or len(S.level(0)) != 1:
        return False
    top = S.levels[-1]
    for s in S.nodes:
        if len(s) == top:
            continue
        for t in succ(T, s):
            if not any(is_prefix(t, u) for u in S.nodes):
                return False
    return True


def strong_subtrees(k: int, depth: int, height: int) -> Iterator[tuple[Node, ...]]:
    """Strong subtrees of ``k^{<= depth}`` with ``height`` levels.

    Each is yielded as the tuple of its nodes, level by level, each level in
    lexicographic order.
    """
    if height < 1:
        return
    for levels in itertools.combinations(range(depth + 1), height):
        for root in itertools.product(range(k), repeat=levels[0]):
            yield from _grow(k, levels, 1, [root], (root,))


def _grow(k, levels, i, current, acc):
    if i == len(levels):
        yield acc
        return
    gap = levels[i] - levels[i - 1] - 1
    # every node splits into k directions, each continued by an arbitrary tail
    slots = [(t + (d,)) for t in current for d in range(k)]
    tails = list(itertools.product(range(k), repeat=gap))
    for choice in itertools.product(tails, repeat=len(slots)):
        nxt = [s + tail for s, tail in zip(slots, choice)]
        yield from _grow(k, levels, i + 1, nxt, acc + tuple(nxt))
