"""Finite prefixes of enumerated Fraisse limits, and the Sierpinski colouring.

A prefix is stored as the list of *types*: ``types[n]`` is the letter vector of
``v_n`` over ``K_n = {v_0, ..., v_{n-1}}`` (see ``_ClassBase.letter``).  The
structure is rebuilt from the types, so the coding tree of the prefix can be
read off directly.

:func:`build_prefix` is the reference enumeration.  It keeps a FIFO queue of
``(stage m, type over K_m)`` entries; at stage ``n`` all types over ``K_n`` are
appended in canonical (lexicographic letter) order and ``v_n`` realizes the
queue head, extended to ``K_n`` by the least letters that stay in the class.
The queue is materialised lazily, one stage block at a time, because the
number of types grows exponentially for graph classes.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import DomainError, InternalError
from .structures import (
    ClassSpec,
    FinStructure,
    LinearOrder,
    class_from_dict,
    class_to_dict,
)


@dataclass(frozen=True)
class ScheduleEntry:
    """How ``v_n`` was chosen: the queued type ``scheduled`` over ``K_stage``,
    its rank within that stage's block, and its realised extension over ``K_n``."""

    n: int
    stage: int
    rank: int
    scheduled: tuple[int, ...]
    realized: tuple[int, ...]


@dataclass(frozen=True)
class EnumeratedPrefix:
    spec: ClassSpec
    types: tuple[tuple[int, ...], ...]
    schedule: tuple[ScheduleEntry, ...] | None = None

    def __post_init__(self):
        for n, t in enumerate(self.types):
            if len(t) != n:
                raise DomainError(f"type of v_{n} must have {n} letters")

    @property
    def size(self) -> int:
        return len(self.types)

    def initial(self, n: int) -> FinStructure:
        """``K_n``, the substructure on the first ``n`` vertices."""
        K = FinStructure.empty(self.spec.signature, 0)
        for t in self.types[:n]:
            K = self.spec.attach(K, t)
        return K

    @property
    def structure(self) -> FinStructure:
        cached = self.__dict__.get("_structure")
        if cached is None:
            cached = self.initial(self.size)
            object.__setattr__(self, "_structure", cached)
        return cached

    def letter(self, i: int, j: int) -> int:
        """Letter of ``v_j`` over ``v_i`` (``i < j``): their relation as seen by ``c(j)``."""
        if not i < j:
            raise DomainError("letter(i, j) needs i < j")
        return self.types[j][i]

    def truncate(self, n: int) -> "EnumeratedPrefix":
        sched = None if self.schedule is None else self.schedule[:n]
        return EnumeratedPrefix(self.spec, self.types[:n], sched)

    # -- key-value export ----------------------------------------------------
    def to_dict(self) -> dict:
        out = {"class": class_to_dict(self.spec), "size": self.size,
               "types": [list(t) for t in self.types]}
        if self.schedule is not None:
            out["schedule"] = [[e.stage, e.rank, list(e.scheduled)] for e in self.schedule]
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "EnumeratedPrefix":
        spec = class_from_dict(d["class"])
        types = tuple(tuple(t) for t in d["types"])
        if d.get("size", len(types)) != len(types):
            raise DomainError("size does not match the number of types")
        sched = None
        if "schedule" in d:
            sched = tuple(ScheduleEntry(n, st, rk, tuple(s), types[n])
                          for n, (st, rk, s) in enumerate(d["schedule"]))
        prefix = cls(spec, types, sched)
        check_prefix(prefix)
        return prefix

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "EnumeratedPrefix":
        return cls.from_dict(json.loads(text))


def check_prefix(prefix: EnumeratedPrefix) -> None:
    """Raise unless every initial segment lies in the class."""
    spec = prefix.spec
    K = FinStructure.empty(spec.signature, 0)
    for n, t in enumerate(prefix.types):
        if not spec.fits(K, t):
            raise DomainError(f"K_{n + 1} leaves the class")
        K = spec.attach(K, t)


def _types_in_order(spec: ClassSpec, segments: Sequence[FinStructure], m: int) -> Iterator[tuple[int, ...]]:
    """Realizable types over ``K_m`` in lexicographic letter order (lazy DFS)."""
    letters: list[int] = []

    def dfs(level):
        if level == m:
            yield tuple(letters)
            return
        for a in spec.alphabet:
            letters.append(a)
            if spec.fits(segments[level + 1], letters):
                yield from dfs(level + 1)
            letters.pop()

    yield from dfs(0)


def _extend_minimally(spec: ClassSpec, segments, base: tuple[int, ...], n: int) -> tuple[int, ...]:
    letters = list(base)
    for level in range(len(base), n):
        for a in spec.alphabet:
            letters.append(a)
            if spec.fits(segments[level + 1], letters):
                break
            letters.pop()
        else:
            raise InternalError(f"no extension of a realizable type at level {level}")
    return tuple(letters)


def build_prefix(spec: ClassSpec, N: int) -> EnumeratedPrefix:
    """The reference enumeration's first ``N`` vertices (round-robin FIFO schedule)."""
    if N < 1:
        raise DomainError("N must be at least 1")
    segments = [FinStructure.empty(spec.signature, 0)]
    if not spec.fits(segments[0], ()):
        raise DomainError("the class has no one-element structure")
    queue: deque = deque()   # entries: [stage, next rank, iterator, lookahead]
    types: list[tuple[int, ...]] = []
    log: list[ScheduleEntry] = []

    for n in range(N):
        K = segments[n]
        it = _types_in_order(spec, segments, n)
        first = next(it, None)
        if first is not None:
            queue.append([n, 0, it, first])
        if not queue:
            raise InternalError("schedule queue ran dry")
        block = queue[0]
        stage, rank, it, head = block
        nxt = next(it, None)
        if nxt is None:
            queue.popleft()
        else:
            block[1], block[3] = rank + 1, nxt
        realized = _extend_minimally(spec, segments, head, n)
        types.append(realized)
        log.append(ScheduleEntry(n, stage, rank, head, realized))
        segments.append(spec.attach(K, realized))
    prefix = EnumeratedPrefix(spec, tuple(types), tuple(log))
    object.__setattr__(prefix, "_structure", segments[-1])
    return prefix


def random_prefix(spec: ClassSpec, N: int, seed: int = 0) -> EnumeratedPrefix:
    """A seeded random enumeration: each letter of ``v_n`` is drawn uniformly
    among those that keep ``K_{n+1}`` in the class.

    Unlike :func:`build_prefix` this gives dense, irregular prefixes, which is
    what checks needing specific configurations at low depth want.
    """
    if N < 1:
        raise DomainError("N must be at least 1")
    rng = random.Random(f"prefix:{seed}")
    segments = [FinStructure.empty(spec.signature, 0)]
    types = []
    for n in range(N):
        letters: list[int] = []
        for level in range(n):
            options = list(spec.alphabet)
            rng.shuffle(options)
            for a in options:
                letters.append(a)
                if spec.fits(segments[level + 1], letters):
                    break
                letters.pop()
            else:
                raise InternalError("no realizable letter")
        if not spec.fits(segments[n], letters):
            raise InternalError("random type left the class")
        types.append(tuple(letters))
        segments.append(spec.attach(segments[n], letters))
    prefix = EnumeratedPrefix(spec, tuple(types))
    object.__setattr__(prefix, "_structure", segments[-1])
    return prefix


def age(prefix: EnumeratedPrefix, max_size: int) -> list[FinStructure]:
    """One representative per isomorphism class of induced substructures of
    size ``1..max_size``, sorted by size then canonical code."""
    if not 0 <= max_size <= prefix.size:
        raise DomainError("max_size must lie between 0 and the prefix size")
    K = prefix.structure
    reps = {}
    for k in range(1, max_size + 1):
        for vs in itertools.combinations(range(prefix.size), k):
            S = K.induced(vs)
            reps.setdefault(S.code, S)
    return [reps[c] for c in sorted(reps)]


def prefix_from_structure(spec: ClassSpec, S: FinStructure) -> EnumeratedPrefix:
    """A hand-supplied enumeration: ``v_n`` is vertex ``n`` of ``S``."""
    types = tuple(tuple(spec.letter(S, v, x) for v in range(x)) for x in range(S.size))
    prefix = EnumeratedPrefix(spec, types)
    check_prefix(prefix)
    object.__setattr__(prefix, "_structure", S)
    return prefix


def order_prefix(values: Sequence) -> EnumeratedPrefix:
    """Enumeration ``q_n = values[n]`` of a finite set of rationals (any comparable values)."""
    if len(set(values)) != len(values):
        raise DomainError("values must be distinct")
    spec = LinearOrder()
    types = tuple(tuple(int(values[v] < values[x]) for v in range(x)) for x in range(len(values)))
    return EnumeratedPrefix(spec, types)


def _sqrt2_frac_cmp(a: int, b: int) -> int:
    """Compare ``frac(a*sqrt2)`` with ``frac(b*sqrt2)`` exactly."""
    # frac(a r) - frac(b r) = x r - y with x = a - b, y = floor(a r) - floor(b r)
    x = a - b
    y = math.isqrt(2 * a * a) - math.isqrt(2 * b * b)
    if x == 0:
        return (y < 0) - (y > 0)
    lhs = 2 * x * x   # compare |x| r with |y| via squares, then fix signs
    if x > 0:
        if y <= 0:
            return 1
        return (lhs > y * y) - (lhs < y * y)
    if y >= 0:
        return -1
    return (y * y > lhs) - (y * y < lhs)


def kronecker_prefix(N: int) -> EnumeratedPrefix:
    """The points ``frac(n * sqrt 2)``, ``n < N``: a second reference enumeration
    of a countable dense order, which spreads early points evenly and so
    realizes small similarity types at low depth."""
    if N < 1:
        raise DomainError("N must be at least 1")
    spec = LinearOrder()
    types = tuple(tuple(int(_sqrt2_frac_cmp(v, x) < 0) for v in range(x)) for x in range(N))
    return EnumeratedPrefix(spec, types)


# A small enumeration of rationals used as a worked example:
# q2 < q5 < q0 < q3 < q1 < q4.
SAMPLE_RATIONALS = (0, 2, -2, 1, 3, -1)

# A triangle-free graph on v_0..v_6 used as a worked example.
SAMPLE_TF_EDGES = ((0, 1), (0, 4), (1, 2), (1, 6), (2, 3), (3, 4), (3, 6), (4, 5), (5, 6))


# -- the Sierpinski colouring ---------------------------------------------------------

BLUE, RED = 0, 1
COLOR_NAMES = {BLUE: "blue", RED: "red"}


@dataclass(frozen=True)
class PairColoring:
    """A colouring of the pairs ``i < j`` of ``{0, ..., size-1}`` into ``r`` colours."""

    size: int
    r: int
    color: Callable[[int, int], int]

    def __call__(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        if i == j or not 0 <= i < j < self.size:
            raise DomainError(f"no pair ({i}, {j})")
        return self.color(i, j)


def sierpinski_color(prefix: EnumeratedPrefix, i: int, j: int) -> int:
    """Blue when the enumeration order agrees with the linear order on ``{v_i, v_j}``."""
    if not isinstance(prefix.spec, LinearOrder):
        raise DomainError("the Sierpinski colouring needs a linear-order prefix")
    if not 0 <= i < j < prefix.size:
        raise DomainError("need 0 <= i < j < N")
    return BLUE if prefix.types[j][i] == 1 else RED


def sierpinski_coloring(prefix: EnumeratedPrefix) -> PairColoring:
    return PairColoring(prefix.size, 2, lambda i, j: sierpinski_color(prefix, i, j))


def constant_coloring(size: int, c: int = 0) -> PairColoring:
    return PairColoring(size, c + 1, lambda i, j: c)


@dataclass(frozen=True)
class PersistenceTrial:
    trial: int
    seed: str
    vertices: tuple[int, ...]
    colors_seen: tuple[int, ...]


@dataclass(frozen=True)
class PersistenceReport:
    master_seed: int
    subcopy_size: int
    trials: tuple[PersistenceTrial, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["trial", "seed", "colors_seen"])
        for t in self.trials:
            w.writerow([t.trial, t.seed, "|".join(str(c) for c in t.colors_seen)])
        return buf.getvalue()


def trial_seed(master_seed: int, trial: int) -> str:
    return f"{master_seed}:{trial}"


def persistence_sample(prefix: EnumeratedPrefix, coloring: PairColoring, subcopy_size: int,
                       trials: int, seed: int = 0) -> PersistenceReport:
    """Colours met on the pairs of ``trials`` random induced substructures.

    Any vertex subset of a prefix induces a member of the age, so subsets are
    drawn uniformly; each trial has its own seed derived from ``seed``.
    """
    if subcopy_size > prefix.size:
        raise DomainError("no subcopy of the requested size in this prefix")
    if subcopy_size < 0 or trials < 0:
        raise DomainError("sizes must be non-negative")
    out = []
    for t in range(trials):
        s = trial_seed(seed, t)
        rng = random.Random(s)
        verts = tuple(sorted(rng.sample(range(prefix.size), subcopy_size)))
        seen = {coloring(a, b) for i, a in enumerate(verts) for b in verts[i + 1:]}
        out.append(PersistenceTrial(t, s, verts, tuple(sorted(seen))))
    return PersistenceReport(seed, subcopy_size, tuple(out))
