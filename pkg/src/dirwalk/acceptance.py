"""Desk-scale acceptance suite.

Each criterion is a function returning a :class:`Criterion`; ``run_all``
executes a selection and ``format_table`` renders one line per criterion.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

from .characters import CharacterTable, build_table, orthogonality_report
from .ensemble import (EnsembleSpec, FixedSpacing, build_many, ensemble_theory_variance,
                       normality_test, normalized)
from .lfunc import euler_split, functional_equation_residual, residue_at_one
from .residue_stats import bias_report, frequencies
from .rng import keyed_rng
from .walk import abel_identity_residual, log_grid, scaling_exponent

# Angle indices (units of 2 pi / 6) of chi(1..6) mod 7 for the six classic
# rows, with None for chi(7) = 0
TABLE_MOD7 = (
    (0, 0, 0, 0, 0, 0),
    (0, 2, 1, 4, 5, 3),
    (0, 4, 2, 2, 4, 0),
    (0, 0, 3, 0, 3, 3),
    (0, 2, 4, 4, 2, 0),
    (0, 4, 5, 2, 1, 3),
)

SMALL_PRIMES = (3, 5, 7, 11, 13)


@dataclass
class Criterion:
    id: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0
    limit_seconds: float | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lim = f" (limit {self.limit_seconds:g}s)" if self.limit_seconds else ""
        return f"[{status}] {self.id:>2} {self.name}: {_brief(self.detail)} [{self.seconds:.2f}s{lim}]"


def _brief(detail: dict) -> str:
    parts = []
    for k, v in detail.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.4g}")
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], float):
            parts.append(f"{k}=[" + ", ".join(f"{x:.4g}" for x in v) + "]")
        else:
            parts.append(f"{k}={v}")
    return "; ".join(parts)


def table_vectors(table: CharacterTable) -> set[tuple]:
    out = set()
    for c in table:
        codes = c.angle_codes
        out.add(tuple(int(codes[n]) for n in range(1, table.q)) + (None if codes[0] < 0 else int(codes[0]),))
    return out


def c1_table() -> Criterion:
    fresh = build_table.__wrapped__
    times = []
    for _ in range(5):
        t0 = time.perf_counter()
        tab = fresh(7)
        times.append(time.perf_counter() - t0)
    got = table_vectors(tab)
    want = {row + (None,) for row in TABLE_MOD7}
    best = min(times)
    ok = got == want and best < 1e-3
    return Criterion(1, "character table mod 7", ok,
                     {"match": got == want, "build_ms": best * 1e3}, best, 1e-3)


def c2_orthogonality() -> Criterion:
    worst = 0.0
    for q in SMALL_PRIMES:
        rep = orthogonality_report(build_table.__wrapped__(q))
        worst = max(worst, rep["max_residual"])
    return Criterion(2, "orthogonality", worst < 1e-12, {"max_residual": worst}, limit_seconds=1.0)


def c3_gauss() -> Criterion:
    worst = 0.0
    for q in SMALL_PRIMES:
        for c in build_table(q):
            if not c.is_principal:
                worst = max(worst, abs(abs(c.gauss_sum()) ** 2 - q))
    return Criterion(3, "Gauss sums", worst < 1e-10, {"max_abs_err": worst})


def c4_equidistribution(x: float = 1e7) -> Criterion:
    devs, band = [], None
    for c in build_table(7):
        if c.is_principal:
            continue
        f = frequencies(c, x)
        devs.append(f.max_deviation())
        band = 5 / math.sqrt(f.n_primes)
    ok = max(devs) < band
    return Criterion(4, "equidistribution", ok, {"max_dev": devs, "band": band}, limit_seconds=30)


_BIAS_CACHE: dict = {}


def _bias(q: int, x: float):
    key = (q, x)
    if key not in _BIAS_CACHE:
        _BIAS_CACHE[key] = {r["k"]: r for r in bias_report(q, x, 10, ks=[1, 2, 10])}
    return _BIAS_CACHE[key]


def c5_los_bias(x: float = 1e8) -> Criterion:
    detail, ok = {}, True
    for q in (3, 7):
        r = _bias(q, x)[1]
        u = r["uniform_diag"]
        d_ok = r["emp_diag"] < u
        s_ok = r["emp_sym_offdiag"] > 2 * u
        l_ok = abs(r["diag_resid_los"]) < abs(r["diag_resid_uniform"])
        ok &= d_ok and s_ok and l_ok
        detail[f"q{q}_diag"] = r["emp_diag"]
        detail[f"q{q}_sym"] = r["emp_sym_offdiag"]
        detail[f"q{q}_los_closer"] = l_ok
    return Criterion(5, "LOS bias direction", ok, detail, limit_seconds=600)


def c6_lag_decay(x: float = 1e8) -> Criterion:
    r = _bias(3, x)
    d2 = abs(r[2]["diag_resid_uniform"])
    d10 = abs(r[10]["diag_resid_uniform"])
    return Criterion(6, "lag decay", d2 > d10, {"deficit_k2": d2, "deficit_k10": d10}, limit_seconds=600)


def c7_block_histogram() -> Criterion:
    tab = build_table(7)
    spec = EnsembleSpec(10 ** 6, 10 ** 4, FixedSpacing(10), 2000)
    ens = build_many([tab[1]], spec)[0]
    res = normality_test(normalized(ens))
    ok = res.ks_pvalue > 0.01 and abs(res.fitted_mean) < 0.05 and 0.9 <= res.fitted_std <= 1.1
    return Criterion(7, "normalized block histogram", ok,
                     {"ks_p": res.ks_pvalue, "mean": res.fitted_mean, "std": res.fitted_std},
                     limit_seconds=300)


def c8_variance() -> Criterion:
    tab = build_table(7)
    ratios = {}
    for N in (10 ** 2, 10 ** 3, 10 ** 4):
        spec = EnsembleSpec(10 ** 6, N, FixedSpacing(10), 2000)
        for ens in build_many([tab[1], tab[3]], spec):
            ratios[f"j{ens.character.j}_N{N}"] = float(ens.blocks.var(ddof=1) / ensemble_theory_variance(ens))
    ok = all(0.9 <= v <= 1.1 for v in ratios.values())
    return Criterion(8, "block variance vs theory", ok, ratios, limit_seconds=600)


def c9_scaling() -> Criterion:
    tab = build_table(7)
    grid = log_grid(1e2, 1e5, 4)
    detail, ok = {}, True
    for c in tab:
        if c.is_principal:
            fit = scaling_exponent(c, grid, "abs")
            good = 0.99 <= fit.alpha <= 1.01
        else:
            fit = scaling_exponent(c, grid, "ensemble")
            good = 0.4 <= fit.alpha <= 0.6
        ok &= good
        detail[f"alpha_j{c.j}"] = fit.alpha
    return Criterion(9, "scaling exponent", ok, detail)


def c10_abel() -> Criterion:
    worst = 0.0
    for c in build_table(7):
        if c.is_principal:
            continue
        for sg in (0.6, 1.5):
            worst = max(worst, abel_identity_residual(c, sg, 10 ** 5))
    return Criterion(10, "Abel summation identity", worst < 1e-8, {"max_residual": worst}, limit_seconds=10)


def fe_points(seed: int = 0, n: int = 20) -> list[complex]:
    rng = keyed_rng(seed, "fe-points")
    sig = rng.uniform(0.0, 1.0, n)
    t = rng.uniform(-20.0, 20.0, n)
    return [complex(a, b) for a, b in zip(sig, t)]


def c11_functional_equation(seed: int = 0) -> Criterion:
    chars = [c for c in build_table(7) if not c.is_principal] + [build_table(3)[1]]
    worst = 0.0
    for s in fe_points(seed):
        for c in chars:
            worst = max(worst, functional_equation_residual(c, s))
    return Criterion(11, "functional equation", worst < 1e-8, {"max_residual": worst}, limit_seconds=30)


def c12_residues() -> Criterion:
    detail, ok = {}, True
    for c in build_table(7):
        r = residue_at_one(c)
        if c.is_principal:
            good = abs(r - 6 / 7) < 1e-6
        else:
            good = abs(r) < 1e-6
        ok &= good
        detail[f"j{c.j}"] = r
    return Criterion(12, "residues at s=1", ok, detail)


def c13_euler_split() -> Criterion:
    c = build_table(7)[1]
    r2 = euler_split(c, 2.0, 10 ** 5).residual
    trend = [euler_split(c, 0.8, N).residual for N in (10 ** 5, 10 ** 6, 10 ** 7)]
    mono = all(b <= a for a, b in zip(trend, trend[1:]))
    return Criterion(13, "Euler product split", r2 < 1e-6 and mono,
                     {"residual_sigma2": r2, "trend_sigma0.8": trend}, limit_seconds=300)


CRITERIA: dict[int, Callable[[], Criterion]] = {
    1: c1_table, 2: c2_orthogonality, 3: c3_gauss, 4: c4_equidistribution,
    5: c5_los_bias, 6: c6_lag_decay, 7: c7_block_histogram, 8: c8_variance, 9: c9_scaling,
    10: c10_abel, 11: c11_functional_equation, 12: c12_residues, 13: c13_euler_split,
}


def run_one(i: int) -> Criterion:
    t0 = time.perf_counter()
    res = CRITERIA[i]()
    if res.id != 1:
        res.seconds = time.perf_counter() - t0
    if res.limit_seconds is not None and res.seconds > res.limit_seconds:
        res.passed = False
        res.detail["over_time"] = True
    return res


def run_all(ids=None, echo: Callable[[str], None] | None = None) -> list[Criterion]:
    out = []
    for i in ids or sorted(CRITERIA):
        r = run_one(i)
        if echo:
            echo(r.line())
        out.append(r)
    return out


def format_table(results: list[Criterion]) -> str:
    lines = [r.line() for r in results]
    n = sum(r.passed for r in results)
    lines.append(f"{n}/{len(results)} criteria passed")
    return "\n".join(lines)
