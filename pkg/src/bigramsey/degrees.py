"""Big Ramsey degrees: the tangent-number formula, type counts, and the
triangle-free diagonal-substructure checker."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DomainError, InternalError
from .limit import EnumeratedPrefix, kronecker_prefix, random_prefix
from .similarity import (
    CatalogEntry,
    LEX,
    SauerTree,
    TypeCatalog,
    canonical_form,
    enumerate_types,
    realized_types_in_depth,
    structure_id,
    types_rep,
)
from .structures import (
    ClassSpec,
    FinStructure,
    ForbClass,
    LinearOrder,
    UnrestrictedBinary,
    class_name,
    complete_graph,
    is_isomorphic,
    iso_classes,
)
from .trees import build_coding_tree, comparable, is_diagonal

# -- tangent numbers ----------------------------------------------------------------------


@dataclass(frozen=True)
class TangentSeries:
    """Coefficients ``c_1, c_3, ..., c_{2M-1}`` of the Taylor series of ``tan``."""

    coefficients: tuple[Fraction, ...]   # coefficients[i] is c_{2i+1}

    @property
    def M(self) -> int:
        return len(self.coefficients)

    def c(self, k: int) -> Fraction:
        if k < 1 or k > 2 * self.M - 1:
            raise DomainError(f"c_{k} is outside the computed range")
        return Fraction(0) if k % 2 == 0 else self.coefficients[k // 2]

    def check(self) -> None:
        for i, c in enumerate(self.coefficients):
            k = 2 * i + 1
            if c <= 0 or math.factorial(k) % c.denominator:
                raise InternalError(f"c_{k} = {c} breaks the series invariants")


def tangent_coefficients(M: int) -> TangentSeries:
    """Exact coefficients from ``tan' = 1 + tan^2`` with ``tan(0) = 0``."""
    if M < 1:
        raise DomainError("M must be at least 1")
    top = 2 * M - 1
    a = [Fraction(0)] * (top + 1)
    for k in range(top):
        # coefficient of x^k in 1 + tan^2, divided by k+1, is a_{k+1}
        s = sum((a[i] * a[k - i] for i in range(k + 1)), Fraction(0))
        a[k + 1] = ((1 if k == 0 else 0) + s) / (k + 1)
    series = TangentSeries(tuple(a[1::2]))
    series.check()
    return series


def devlin_degree(n: int, series: TangentSeries | None = None) -> int:
    """``(2n-1)! c_{2n-1}``, the number of big Ramsey types of ``n``-element suborders."""
    if n < 1:
        raise DomainError("n must be at least 1")
    series = series or tangent_coefficients(n)
    value = math.factorial(2 * n - 1) * series.c(2 * n - 1)
    if value.denominator != 1:
        raise InternalError(f"(2n-1)! c_(2n-1) = {value} is not an integer")
    return int(value)


# -- the triangle-free checker ---------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    indices: tuple[int, ...]
    m: dict            # i -> least m < i with v_i E v_m
    n: dict            # (i, j) -> least common earlier neighbour, for qualifying non-edges


@dataclass(frozen=True)
class Violation:
    clause: str
    detail: str


def _is_triangle_free_class(spec: ClassSpec) -> bool:
    return isinstance(spec, ForbClass) and len(spec.forbidden) == 1 and \
        is_isomorphic(spec.forbidden[0], complete_graph(3))


def g3_diagonal_check(prefix: EnumeratedPrefix, I: Iterable[int]) -> Certificate | Violation:
    """Check the three clauses defining a diagonal substructure of the triangle-free graph.

    (a) every ``i`` has an earlier neighbour, least one ``m_i``;
    (b) a non-edge ``i < j`` with ``m_j < i`` has a common neighbour below ``i``,
        and the least one ``n(i, j)`` is outside ``I``;
    (c) distinct qualifying pairs have distinct ``n(i, j)``.
    """
    if not _is_triangle_free_class(prefix.spec):
        raise DomainError("the checker needs a triangle-free graph prefix")
    I = tuple(sorted(set(I)))
    if not I or I[-1] >= prefix.size or I[0] < 0:
        raise DomainError("index set outside the prefix")
    c = prefix.types
    for i, j in itertools.combinations(I, 2):
        if comparable(c[i], c[j]):
            raise DomainError(f"c({i}) and c({j}) are comparable: not an antichain")

    def adj(a, b):
        return a != b and c[max(a, b)][min(a, b)] == 1

    m = {}
    for i in I:
        nb = [k for k in range(i) if adj(i, k)]
        if not nb:
            return Violation("a", f"v_{i} has no earlier neighbour")
        m[i] = nb[0]
    n = {}
    for i, j in itertools.combinations(I, 2):
        if adj(i, j) or not m[j] < i:
            continue
        common = [k for k in range(i) if adj(i, k) and adj(j, k)]
        if not common:
            return Violation("b", f"v_{i}, v_{j} have no common neighbour below {i}")
        if common[0] in I:
            return Violation("b", f"least common neighbour {common[0]} of v_{i}, v_{j} lies in I")
        n[(i, j)] = common[0]
    seen = {}
    for pair, k in n.items():
        if k in seen:
            return Violation("c", f"n{seen[k]} = n{pair} = {k}")
        seen[k] = pair
    return Certificate(I, m, n)


def g3_catalog(prefix: EnumeratedPrefix, target: FinStructure, depth: int) -> TypeCatalog:
    """Types of certified diagonal substructures (coding nodes ``c(i)``, ``i <= depth``)
    isomorphic to ``target``."""
    spec = prefix.spec
    rep = types_rep(spec)
    sid = structure_id(spec, target)
    seen = {}
    c = prefix.types
    for I in itertools.combinations(range(min(depth + 1, prefix.size)), target.size):
        A = [c[i] for i in I]
        if any(comparable(a, b) for a, b in itertools.combinations(A, 2)):
            continue
        if not is_diagonal(A) or not is_isomorphic(prefix.structure.induced(I), target):
            continue
        if not isinstance(g3_diagonal_check(prefix, I), Certificate):
            continue
        d = canonical_form(A, LEX, rep)
        seen.setdefault(d.encoding, (d, tuple(A)))
    return TypeCatalog.of(LEX, (CatalogEntry(d, sid, w) for d, w in seen.values()))


# -- degrees ------------------------------------------------------------------------------------

MAX_ORDER_SIZE = 4
MAX_UNRESTRICTED_SIZE = 3
G3_DEPTH = 12
G3_SEED = 0


@dataclass(frozen=True)
class DegreeRow:
    spec: str
    target: str
    degree: int | None
    methods: dict = field(default_factory=dict)
    depth: int | None = None
    flags: tuple[str, ...] = ()

    @property
    def status(self) -> str:
        if "unsupported" in self.flags:
            return "unsupported"
        if "inconclusive" in self.flags:
            return "inconclusive"
        return "flagged" if self.flags else "ok"


def target_label(spec: ClassSpec, S: FinStructure) -> str:
    return f"{structure_id(spec, S)}:{S.describe()}"


def _order_scan_depth(n: int) -> int:
    return 3 * n + 2


def _sauer_scan_depth(spec: UnrestrictedBinary, n: int) -> int | None:
    if spec.k == 2:
        return {1: 4, 2: 8, 3: 6}[n]
    return {1: 2, 2: 4}.get(n)


@lru_cache(maxsize=None)
def _order_scan(n: int, depth: int) -> TypeCatalog:
    return realized_types_in_depth(build_coding_tree(kronecker_prefix(depth + 1), depth), n)


@lru_cache(maxsize=None)
def _sauer_scan(spec: UnrestrictedBinary, n: int, depth: int) -> TypeCatalog:
    return realized_types_in_depth(SauerTree(spec, depth), n).projected()


@lru_cache(maxsize=None)
def _g3_prefix(depth: int) -> EnumeratedPrefix:
    from .structures import g3
    return random_prefix(g3(), depth + 1, seed=G3_SEED)


def big_ramsey_degree(spec: ClassSpec, target: FinStructure, quick: bool = False,
                      max_scan_depth: int | None = None) -> DegreeRow:
    """Degree of ``target`` with every available cross-check.

    Methods: ``formula`` (tangent numbers, orders only), ``generation`` (abstract
    diagrams with witnesses), ``scan`` (exhaustive search of a depth-bounded
    tree) and ``checker`` (certified triangle-free substructures).  Rows whose
    methods disagree carry a flag.  With ``quick`` scans deeper than 8 are skipped.
    """
    if target.signature != spec.signature or not spec.member(target):
        raise DomainError("target is not in the class")
    name, label, n = class_name(spec), target_label(spec, target), target.size
    limit = 8 if quick else max_scan_depth
    methods: dict[str, int] = {}
    flags: list[str] = []
    depth = None

    if isinstance(spec, LinearOrder) and 1 <= n <= MAX_ORDER_SIZE:
        methods["formula"] = devlin_degree(n)
        gen = enumerate_types(spec, target)
        methods["generation"] = len(gen)
        if gen.inconclusive:
            flags.append("inconclusive")
        if n <= 3:
            d = _order_scan_depth(n)
            if limit is None or d <= limit:
                depth = d
                scan = _order_scan(n, d)
                methods["scan"] = len(scan)
                if scan.encodings() != gen.encodings():
                    flags.append("scan-disagrees")
    elif isinstance(spec, UnrestrictedBinary) and 1 <= n <= MAX_UNRESTRICTED_SIZE:
        gen = enumerate_types(spec, target)
        methods["generation"] = len(gen)
        if gen.inconclusive:
            flags.append("inconclusive")
        d = _sauer_scan_depth(spec, n)
        if d is not None and (limit is None or d <= limit):
            depth = d
            scan = _sauer_scan(spec, n, d).restrict(structure_id(spec, target))
            methods["scan"] = len(scan)
            if scan.encodings() != gen.encodings():
                flags.append("scan-disagrees")
    elif _is_triangle_free_class(spec) and n <= 2 and (n == 1 or target.tuples[0]):
        depth = G3_DEPTH
        methods["checker"] = len(g3_catalog(_g3_prefix(depth), target, depth))
    else:
        return DegreeRow(name, label, None, {}, None, ("unsupported",))

    values = set(methods.values())
    if len(values) > 1:
        flags.append("methods-disagree")
    degree = methods.get("generation", methods.get("checker"))
    return DegreeRow(name, label, degree, methods, depth, tuple(sorted(set(flags))))


def _targets(spec: ClassSpec, max_size: int) -> list[FinStructure]:
    out = []
    for n in range(1, max_size + 1):
        out.extend(iso_classes(spec.members(n)))
    return out


def _row_job(args):
    spec, target, quick = args
    return big_ramsey_degree(spec, target, quick=quick)


@dataclass(frozen=True)
class DegreeTable:
    rows: tuple[DegreeRow, ...]

    COLUMNS = ("spec", "target", "degree", "methods", "depth", "flags")

    @property
    def status(self) -> str:
        st = {r.status for r in self.rows}
        for s in ("inconclusive", "flagged", "unsupported"):
            if s in st:
                return s
        return "ok"

    def _cells(self, r: DegreeRow) -> list[str]:
        return [r.spec, r.target, "" if r.degree is None else str(r.degree),
                ";".join(f"{k}={v}" for k, v in sorted(r.methods.items())),
                "" if r.depth is None else str(r.depth), ";".join(r.flags)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.COLUMNS)
        for r in self.rows:
            w.writerow(self._cells(r))
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [{**asdict(r), "flags": list(r.flags), "methods": dict(sorted(r.methods.items()))}
                for r in self.rows]
        return json.dumps(rows, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        cells = [list(self.COLUMNS)] + [self._cells(r) for r in self.rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(self.COLUMNS))]
        return "".join("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() + "\n"
                       for row in cells)


def degree_table(specs: Sequence[ClassSpec], max_size: int, quick: bool = False,
                 jobs: int = 1, include_unsupported: bool = False) -> DegreeTable:
    """Rows for every supported target of size ``<= max_size`` of each class, in a fixed order."""
    if max_size < 1:
        raise DomainError("max_size must be at least 1")
    work = [(spec, t, quick) for spec in specs for t in _targets(spec, max_size)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row_job, work))
    else:
        rows = [_row_job(w) for w in work]
    if not include_unsupported:
        rows = [r for r in rows if r.status != "unsupported"]
    return DegreeTable(tuple(rows))


# -- persistence proxy -----------------------------------------------------------------------


@dataclass(frozen=True)
class PersistenceResult:
    seed: str
    kept: tuple[int, ...]
    missing: tuple[str, ...]


def persistence_check(prefix: EnumeratedPrefix, catalog: TypeCatalog, keep: int,
                      trials: int = 20, seed: int = 0) -> list[PersistenceResult]:
    """For seeded random sets of ``keep`` coding nodes, the catalog types with no
    witness among them.

    Types are measured in the ambient coding tree, so a type is missing exactly
    when no diagonal antichain inside the kept nodes has that canonical form.
    """
    if keep > prefix.size:
        raise DomainError("cannot keep more nodes than the prefix has")
    rep = types_rep(prefix.spec)
    n = max((e.diagram.size for e in catalog.entries), default=0)
    want = catalog.encodings()
    out = []
    for t in range(trials):
        s = f"{seed}:{t}"
        kept = tuple(sorted(random.Random(s).sample(range(prefix.size), keep)))
        found = set()
        for I in itertools.combinations(kept, n):
            A = [prefix.types[i] for i in I]
            if any(comparable(a, b) for a, b in itertools.combinations(A, 2)) or not is_diagonal(A):
                continue
            found.add(canonical_form(A, LEX, rep).encoding)
            if want <= found:
                break
        out.append(PersistenceResult(s, kept, tuple(sorted(want - found))))
    return out
