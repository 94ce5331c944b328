"""The cross-check suite run by ``bigramsey verify``."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .degrees import (
    TangentSeries,
    big_ramsey_degree,
    devlin_degree,
    persistence_check,
    tangent_coefficients,
)
from .errors import BigRamseyError
from .lab import ALL_ADMIT, COUNTEREXAMPLE, hl_finite, ramsey_check, reverify
from .limit import build_prefix, kronecker_prefix, persistence_sample, sierpinski_coloring
from .similarity import enumerate_types, realized_types_in_depth
from .structures import (
    FinStructure,
    embeds,
    g3,
    graph,
    iso_classes,
    linear_order,
    rado,
    vertex,
)
from .trees import build_coding_tree, uc_structure

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"
HL_MINIMAL_N = 3   # least N with every 2-colouring of 2^{<=N} fixing a 2-level strong subtree


@dataclass(frozen=True)
class CheckResult:
    name: str
    status: str
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"{self.status} {self.name}: {self.detail}"


def perturbed_series(M: int = 4) -> TangentSeries:
    """Tangent coefficients with ``c_5`` shifted by ``1/(2 * 5!)``."""
    base = tangent_coefficients(M)
    coeffs = list(base.coefficients)
    coeffs[2] += Fraction(1, 240)
    return TangentSeries(tuple(coeffs))


def check_integrality(series: TangentSeries | None = None, nmax: int = 8) -> str:
    series = series or tangent_coefficients(nmax)
    values = [devlin_degree(n, series) for n in range(1, nmax + 1)]
    return "T(1..%d) = %s" % (nmax, ", ".join(map(str, values)))


def check_devlin(series: TangentSeries | None = None, nmax: int = 4) -> str:
    series = series or tangent_coefficients(nmax)
    lo = linear_order()
    out = []
    for n in range(1, nmax + 1):
        f, g = devlin_degree(n, series), len(enumerate_types(lo, lo.chain(n)))
        if f != g:
            raise AssertionError(f"n={n}: formula {f} != generation {g}")
        out.append(str(f))
    return "formula = generation: " + ", ".join(out)


def check_order_scan(n: int) -> str:
    row = big_ramsey_degree(linear_order(), linear_order().chain(n))
    if row.flags or len(set(row.methods.values())) != 1 or "scan" not in row.methods:
        raise AssertionError(f"row {row}")
    return f"n={n}: {row.methods} at depth {row.depth}"


def check_rado_rows() -> str:
    R = rado()
    rows = [big_ramsey_degree(R, S) for S in iso_classes(R.members(2))]
    for row in rows:
        if row.flags or row.degree != 2 or row.methods.get("scan") != 2:
            raise AssertionError(f"row {row}")
    return "; ".join(f"{r.target} -> {r.methods}" for r in rows)


def check_indivisible() -> str:
    out = []
    for spec in (linear_order(), rado(), g3()):
        row = big_ramsey_degree(spec, vertex(spec))
        if row.degree != 1 or row.flags:
            raise AssertionError(f"row {row}")
        out.append(f"{row.spec}=1")
    return ", ".join(out)


def check_g3_edge() -> str:
    row = big_ramsey_degree(g3(), graph(2, [(0, 1)]))
    if row.degree != 2 or row.flags:
        raise AssertionError(f"row {row}")
    return f"edge -> {row.methods} at depth {row.depth}"


def check_enumeration_invariance() -> str:
    lo = linear_order()
    a, b = kronecker_prefix(12), build_prefix(lo, 17)
    for n in (1, 2, 3):
        ca = realized_types_in_depth(build_coding_tree(a, 11), n).encodings()
        cb = realized_types_in_depth(build_coding_tree(b, 16), n).encodings()
        if ca != cb:
            raise AssertionError(f"n={n}: {len(ca)} vs {len(cb)} types")
    return "n<=3 catalogs equal on two enumerations"


def check_type_persistence(seed: int) -> str:
    lo = linear_order()
    prefix = kronecker_prefix(40)
    cat = enumerate_types(lo, lo.chain(2))
    results = persistence_check(prefix, cat, keep=20, trials=20, seed=seed)
    bad = [r for r in results if r.missing]
    if bad:
        raise AssertionError(f"{len(bad)} of 20 trials miss a type (first seed {bad[0].seed})")
    return "both pair types in 20 of 20 random halves"


def check_sierpinski(seed: int) -> str:
    prefix = build_prefix(linear_order(), 200)
    report = persistence_sample(prefix, sierpinski_coloring(prefix), 20, 100, seed)
    bad = [t for t in report.trials if t.colors_seen != (0, 1)]
    if bad:
        raise AssertionError(f"trial {bad[0].trial} (seed {bad[0].seed}) sees {bad[0].colors_seen}")
    return "both colours in 100 of 100 suborders"


def check_ramsey() -> str:
    pos, neg = ramsey_check(6, 2, 2, 3), ramsey_check(5, 2, 2, 3)
    if pos.verdict != ALL_ADMIT or neg.verdict != COUNTEREXAMPLE or not reverify(neg):
        raise AssertionError(f"verdicts {pos.verdict}, {neg.verdict}")
    return "R(3,3) = 6"


def check_hl() -> str:
    below, at = hl_finite(2, 2, HL_MINIMAL_N - 1), hl_finite(2, 2, HL_MINIMAL_N)
    if below.verdict != COUNTEREXAMPLE or not reverify(below) or at.verdict != ALL_ADMIT:
        raise AssertionError(f"verdicts {below.verdict}, {at.verdict}")
    return f"minimal N = {HL_MINIMAL_N}"


def universal_graph_check(depth: int = 6, max_size: int = 4) -> list[FinStructure]:
    """Graphs on at most ``max_size`` vertices that do not embed in Sauer's graph on ``2^{<=depth}``."""
    _, U = uc_structure(rado(), depth)
    missing = []
    for n in range(1, max_size + 1):
        for S in iso_classes(rado().members(n)):
            if not embeds(S, U):
                missing.append(S)
    return missing


def check_universality() -> str:
    missing = universal_graph_check()
    if missing:
        raise AssertionError("not embedded: " + ", ".join(S.describe() for S in missing))
    return "all 18 graphs on <= 4 vertices embed in 2^<=6"


def suite(quick: bool = False, fault: str | None = None, seed: int = 0) -> list[tuple[str, Callable[[], str] | None, str]]:
    series = perturbed_series(8) if fault == "c5" else None
    slow = "scan depth above 8 skipped" if quick else ""
    return [
        ("tangent-integrality", lambda: check_integrality(series), ""),
        ("devlin-formula-vs-generation", lambda: check_devlin(series), ""),
        ("order-scan-n1", lambda: check_order_scan(1), ""),
        ("order-scan-n2", lambda: check_order_scan(2), ""),
        ("order-scan-n3", None if quick else lambda: check_order_scan(3), slow),
        ("rado-pairs", lambda: check_rado_rows(), ""),
        ("indivisibility", check_indivisible, ""),
        ("g3-edge", check_g3_edge, ""),
        ("enumeration-invariance", None if quick else check_enumeration_invariance, slow),
        ("type-persistence", lambda: check_type_persistence(seed), ""),
        ("sierpinski-persistence", lambda: check_sierpinski(seed), ""),
        ("ramsey", check_ramsey, ""),
        ("halpern-lauchli", check_hl, ""),
        ("universality", check_universality, ""),
    ]


def run_checks(quick: bool = False, fault: str | None = None, seed: int = 0) -> list[CheckResult]:
    out = []
    for name, fn, why in suite(quick, fault, seed):
        if fn is None:
            out.append(CheckResult(name, SKIP, why))
            continue
        t = time.perf_counter()
        try:
            detail, status = fn(), PASS
        except (AssertionError, BigRamseyError) as exc:
            detail, status = f"{type(exc).__name__}: {exc}", FAIL
        out.append(CheckResult(name, status, detail, time.perf_counter() - t))
    return out
