"""Exhaustive checks of small instances of Ramsey, Halpern-Lauchli and Milliken.

Each theorem becomes a hypergraph problem: finitely many *items* are coloured
and a list of *targets* (sets of items) is given.  The verdict is positive when
every colouring makes some target monochromatic.  A backtracking search looks
for a colouring with no monochromatic target; if it finds one, that colouring
is the counterexample.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from .errors import DomainError
from .trees import Node, encode_node, sequences, strong_subtrees

ALL_ADMIT = "AllColoringsAdmitWitness"
COUNTEREXAMPLE = "CounterexampleColoring"
INCONCLUSIVE = "Inconclusive"

DEFAULT_BUDGET = 2 ** 30


def default_budget() -> int:
    env = os.environ.get("BIGDEG_BUDGET")
    if env is None:
        return DEFAULT_BUDGET
    try:
        value = int(env)
    except ValueError:
        raise DomainError(f"BIGDEG_BUDGET is not an integer: {env!r}") from None
    if value < 1:
        raise DomainError("BIGDEG_BUDGET must be positive")
    return value


@dataclass(frozen=True)
class ColoringSpace:
    """``r``-colourings of ``items``; ``targets`` lists index sets into ``items``."""

    description: str
    items: tuple[Hashable, ...]
    r: int
    targets: tuple[tuple[int, ...], ...]

    @property
    def colorings(self) -> int:
        return self.r ** len(self.items)


@dataclass(frozen=True)
class WitnessReport:
    theorem: str
    params: dict
    verdict: str
    coloring: tuple[int, ...] | None = None
    stats: dict = field(default_factory=dict)
    space: ColoringSpace | None = field(default=None, compare=False, repr=False)

    def to_dict(self) -> dict:
        out = {"theorem": self.theorem, "params": self.params, "verdict": self.verdict,
               "stats": self.stats}
        if self.coloring is not None and self.space is not None:
            out["coloring"] = [[_label(x), c] for x, c in zip(self.space.items, self.coloring)]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _label(item) -> str:
    if isinstance(item, frozenset):
        return "{" + ",".join(map(str, sorted(item))) + "}"
    if isinstance(item, tuple) and all(isinstance(t, tuple) for t in item):
        return " ".join(encode_node(t) or "()" for t in item)
    if isinstance(item, tuple):
        return encode_node(item) or "()"
    return str(item)


def monochromatic_targets(space: ColoringSpace, coloring: Sequence[int]) -> list[int]:
    """Indices of targets on which ``coloring`` is constant (brute force)."""
    if len(coloring) != len(space.items):
        raise DomainError("colouring has the wrong length")
    return [k for k, t in enumerate(space.targets) if len({coloring[i] for i in t}) == 1]


def search(space: ColoringSpace, budget: int | None = None) -> tuple[str, tuple[int, ...] | None, dict]:
    """Backtracking search for a colouring without monochromatic targets.

    Colours are assigned in item order.  A new colour may only be the least
    unused one: permuting colours maps counterexamples to counterexamples, so
    every colouring class still has a representative and the verdict is kept.
    ``budget`` caps the number of search nodes; exhausting it is inconclusive.
    """
    budget = default_budget() if budget is None else budget
    n, r = len(space.items), space.r
    if r < 1:
        raise DomainError("need at least one colour")
    closing: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for t in space.targets:
        if not t:
            continue
        closing[max(t)].append(t)
    if any(not t for t in space.targets):
        return ALL_ADMIT, None, {"nodes": 0, "items": n, "targets": len(space.targets)}
    color = [0] * n
    nodes = 0

    def ok(i):
        c = color[i]
        for t in closing[i]:
            if all(color[j] == c for j in t):
                return False
        return True

    # iterative DFS: choice[i] is the colour tried at depth i, used[i] colours used before i
    used = [0] * (n + 1)
    i = 0
    choice = [-1] * n
    while True:
        if i == n:
            stats = {"nodes": nodes, "items": n, "targets": len(space.targets)}
            return COUNTEREXAMPLE, tuple(color), stats
        if i < 0:
            stats = {"nodes": nodes, "items": n, "targets": len(space.targets)}
            return ALL_ADMIT, None, stats
        choice[i] += 1
        limit = min(r, used[i] + 1)
        if choice[i] >= limit:
            choice[i] = -1
            i -= 1
            continue
        nodes += 1
        if nodes > budget:
            stats = {"nodes": nodes - 1, "items": n, "targets": len(space.targets)}
            return INCONCLUSIVE, None, stats
        color[i] = choice[i]
        if ok(i):
            used[i + 1] = max(used[i], choice[i] + 1)
            i += 1


def _report(theorem, params, space, budget) -> WitnessReport:
    verdict, coloring, stats = search(space, budget)
    stats = {**stats, "colorings": space.colorings}
    report = WitnessReport(theorem, params, verdict, coloring, stats, space)
    if verdict == COUNTEREXAMPLE and not reverify(report):
        raise AssertionError("counterexample failed re-verification")
    return report


def reverify(report: WitnessReport) -> bool:
    """A counterexample colouring really has no monochromatic target."""
    if report.verdict != COUNTEREXAMPLE or report.space is None:
        return False
    return not monochromatic_targets(report.space, report.coloring)


# -- the three theorems -------------------------------------------------------------------


def ramsey_space(N: int, k: int, r: int, target_size: int) -> ColoringSpace:
    if not 0 <= k <= target_size <= N or r < 1:
        raise DomainError("need 0 <= k <= target size <= N and r >= 1")
    items = tuple(frozenset(s) for s in itertools.combinations(range(N), k))
    index = {s: i for i, s in enumerate(items)}
    targets = tuple(tuple(index[frozenset(s)] for s in itertools.combinations(X, k))
                    for X in itertools.combinations(range(N), target_size))
    return ColoringSpace(f"{k}-subsets of [{N}]", items, r, targets)


def ramsey_check(N: int, k: int, r: int, target_size: int, budget: int | None = None) -> WitnessReport:
    """Does every ``r``-colouring of the ``k``-subsets of ``[N]`` have a
    monochromatic ``target_size``-set?"""
    space = ramsey_space(N, k, r, target_size)
    return _report("ramsey", {"N": N, "k": k, "r": r, "target": target_size}, space, budget)


def hl_space(m: int, r: int, N: int) -> ColoringSpace:
    if m < 1 or N < 0 or r < 1:
        raise DomainError("need m >= 1, N >= 0, r >= 1")
    items = tuple(sequences(2, N))
    index = {t: i for i, t in enumerate(items)}
    targets = tuple(sorted({tuple(sorted(index[t] for t in S)) for S in strong_subtrees(2, N, m)}))
    return ColoringSpace(f"nodes of 2^<={N}", items, r, targets)


def hl_finite(m: int, r: int, N: int, budget: int | None = None) -> WitnessReport:
    """Does every ``r``-colouring of the nodes of ``2^{<=N}`` leave a strong
    subtree with ``m`` levels monochromatic?"""
    return _report("hl", {"m": m, "r": r, "N": N}, hl_space(m, r, N), budget)


def milliken_space(k_levels: int, r: int, N: int, target_height: int | None = None) -> ColoringSpace:
    target_height = k_levels + 1 if target_height is None else target_height
    if k_levels < 1 or target_height < k_levels or N < 0 or r < 1:
        raise DomainError("need 1 <= kLevels <= target height, N >= 0, r >= 1")
    items = tuple(sorted(strong_subtrees(2, N, k_levels), key=lambda S: (tuple(map(len, S)), S)))
    index = {frozenset(S): i for i, S in enumerate(items)}
    targets = set()
    for S in strong_subtrees(2, N, target_height):
        inner = sorted({len(t) for t in S})
        subs = []
        for lv in itertools.combinations(inner, k_levels):
            part = [t for t in S if len(t) <= lv[-1]]
            for U in strong_subtrees_within(part, lv):
                subs.append(index[frozenset(U)])
        targets.add(tuple(sorted(set(subs))))
    return ColoringSpace(f"{k_levels}-strong subtrees of 2^<={N}", items, r, tuple(sorted(targets)))


def strong_subtrees_within(S: Sequence[Node], levels: Sequence[int]) -> list[tuple[Node, ...]]:
    """Strong subtrees with nodes in ``S`` and levels exactly ``levels``.

    Each node below the top picks, for both directions, one node of ``S`` on
    the next chosen level extending that immediate successor.
    """
    nodes = set(S)
    out = []
    root_level = levels[0]
    for root in sorted(t for t in nodes if len(t) == root_level):
        cur = [(root,)]
        for lv in levels[1:]:
            nxt = []
            for acc in cur:
                frontier = [t for t in acc if len(t) == len(acc[-1])]
                options = []
                for t in frontier:
                    for d in (0, 1):
                        options.append([u for u in nodes if len(u) == lv and u[: len(t) + 1] == t + (d,)])
                for pick in itertools.product(*options):
                    nxt.append(acc + tuple(pick))
            cur = nxt
        out.extend(cur)
    return out


def milliken_finite(k_levels: int, r: int, N: int, target_height: int | None = None,
                    budget: int | None = None) -> WitnessReport:
    """Does every ``r``-colouring of the ``k_levels``-strong subtrees of ``2^{<=N}``
    leave a strong subtree of height ``target_height`` (default ``k_levels + 1``)
    all of whose ``k_levels``-strong subtrees share a colour?"""
    th = k_levels + 1 if target_height is None else target_height
    space = milliken_space(k_levels, r, N, th)
    return _report("milliken", {"k": k_levels, "r": r, "N": N, "height": th}, space, budget)


def minimal_positive(fn, Ns: Sequence[int]) -> tuple[int | None, list[WitnessReport]]:
    """Least ``N`` in ``Ns`` with a positive verdict, and the reports computed."""
    reports = []
    for N in Ns:
        rep = fn(N)
        reports.append(rep)
        if rep.verdict == ALL_ADMIT:
            return N, reports
    return None, reports
