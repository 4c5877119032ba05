"""Partial sums C_n of character values over consecutive primes.

Prefix sums are formed from exact per-angle integer counts; the float result
at each n is a dot product of at most phi terms, so there is no drift with n.
Sums with non-integer weights (the Abel check) use Neumaier summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import stats

from . import kernels
from .characters import Character
from .errors import DomainError, InsufficientGrid, PrincipalNotSupported
from .primes import PrimeSieve, default_sieve
from .sources import MODES, as_source

LOG_FLOOR = 1e-9
MIN_GRID = 8
_ROWS = 1 << 22


@dataclass(frozen=True, eq=False)
class WalkSeries:
    character: object
    mode: str
    start: int
    n: np.ndarray       # walk lengths at which C is reported (1-based)
    values: np.ndarray  # C_n at those lengths

    @property
    def partials(self) -> np.ndarray:
        return self.values

    @property
    def final(self):
        if len(self.values) == 0:
            return 0.0
        return self.values[-1]

    def __len__(self):
        return len(self.n)


def _iter_prefix(source, start: int, N: int, weights: np.ndarray) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """(n, C_n) chunk by chunk for n = 1..N."""
    nsym = len(weights)
    rows = max(1, _ROWS // nsym)
    carry = np.zeros(nsym, dtype=np.int64)
    n0 = 0
    for chunk in source.chunks(start, N):
        for a in range(0, len(chunk), rows):
            codes = chunk[a:a + rows]
            onehot = np.zeros((len(codes), nsym), dtype=np.int64)
            ok = np.flatnonzero(codes >= 0)
            onehot[ok, codes[ok]] = 1
            cum = np.cumsum(onehot, axis=0)
            cum += carry
            carry = cum[-1].copy()
            n = np.arange(n0 + 1, n0 + len(codes) + 1)
            n0 += len(codes)
            yield n, cum @ weights


def _checkpoint_values(source, start: int, checkpoints: np.ndarray, weights: np.ndarray) -> np.ndarray:
    nsym = len(weights)
    nc = len(checkpoints)
    counts = np.zeros((nc, nsym), dtype=np.int64)
    n0 = 0
    last = int(checkpoints[-1])
    for chunk in source.chunks(start, last):
        n = np.arange(n0 + 1, n0 + len(chunk) + 1)
        n0 += len(chunk)
        slot = np.searchsorted(checkpoints, n, side="left")
        ok = chunk >= 0
        counts += np.bincount(slot[ok] * nsym + chunk[ok], minlength=nc * nsym).reshape(nc, nsym)
    return np.cumsum(counts, axis=0) @ weights


def walk(char, N: int, start: int = 1, mode: str = "cos", checkpoints: Sequence[int] | None = None,
         sieve: PrimeSieve | None = None) -> WalkSeries:
    """C_n = sum of chi(p_k) projections for k = start .. start + n - 1.

    With ``checkpoints`` only those n are kept (memory independent of N);
    otherwise every n = 1..N is returned.
    """
    if N < 0:
        raise DomainError("N must be >= 0")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    src = as_source(char, sieve)
    w = src.weights(mode)
    dtype = complex if mode == "complex" else float
    if N == 0:
        return WalkSeries(char, mode, start, np.empty(0, dtype=np.int64), np.empty(0, dtype=dtype))
    if checkpoints is not None:
        cps = np.unique(np.asarray(checkpoints, dtype=np.int64))
        if len(cps) == 0:
            return WalkSeries(char, mode, start, cps, np.empty(0, dtype=dtype))
        if cps[0] < 1 or cps[-1] > N:
            raise DomainError("checkpoints must lie in 1..N")
        return WalkSeries(char, mode, start, cps, _checkpoint_values(src, start, cps, w))
    ns, vals = [], []
    for n, v in _iter_prefix(src, start, N, w):
        ns.append(n)
        vals.append(v)
    return WalkSeries(char, mode, start, np.concatenate(ns), np.concatenate(vals))


def abel_identity_residual(char: Character, sigma: float, N: int,
                           sieve: PrimeSieve | None = None) -> float:
    """|sum c_n p_n^-s - [sum_{n<N} C(p_n)(p_n^-s - p_{n+1}^-s) + C(p_N) p_N^-s]|."""
    if sigma <= 0 or N < 2:
        raise DomainError("need sigma > 0 and N >= 2")
    sv = sieve or default_sieve()
    p = sv.primes_by_index(1, N).astype(np.float64)
    series = walk(char, N, 1, "cos", sieve=sv).values
    c = np.diff(series, prepend=0.0)
    w = p ** (-float(sigma))
    direct = kernels.neumaier_sum(c * w)
    summed = kernels.neumaier_sum(np.append(series[:-1] * (w[:-1] - w[1:]), series[-1] * w[-1]))
    return abs(direct - summed)


@dataclass(frozen=True, eq=False)
class ScalingFit:
    alpha: float
    ci_half_width: float
    n_grid: np.ndarray
    method: str
    intercept: float = 0.0
    y: np.ndarray = field(default_factory=lambda: np.empty(0))
    residuals: np.ndarray = field(default_factory=lambda: np.empty(0))
    r2: float = math.nan
    extra: dict = field(default_factory=dict)


def log_grid(lo: float, hi: float, per_decade: int = 4) -> np.ndarray:
    """Integers log-spaced from lo to hi inclusive."""
    k = int(round(math.log10(hi / lo) * per_decade))
    return np.unique(np.round(np.logspace(math.log10(lo), math.log10(hi), k + 1)).astype(np.int64))


def _fit(n_grid, y, method, extra=None) -> ScalingFit:
    x = np.log(n_grid.astype(float))
    ly = np.log(y)
    res = stats.linregress(x, ly)
    tcrit = stats.t.ppf(0.975, len(x) - 2)
    resid = ly - (res.intercept + res.slope * x)
    return ScalingFit(float(res.slope), float(tcrit * res.stderr), n_grid, method,
                      float(res.intercept), y, resid, float(res.rvalue ** 2), extra or {})


def _check_grid(n_grid) -> np.ndarray:
    g = np.asarray(n_grid, dtype=np.int64)
    if len(g) < MIN_GRID:
        raise InsufficientGrid(f"need at least {MIN_GRID} grid points, got {len(g)}")
    if (np.diff(g) <= 0).any() or g[0] < 1:
        raise DomainError("grid must be strictly increasing positive integers")
    return g


def scaling_exponent(char, n_grid: Sequence[int], method: str = "ensemble", *, start: int = 1,
                     n1: int = 10 ** 6, spacing: int = 10, m_blocks: int = 2000,
                     max_span: int = 6 * 10 ** 7, sieve: PrimeSieve | None = None) -> ScalingFit:
    """Slope of log-size against log N.

    ``method="abs"``: one trajectory from ``start``; size at grid point N_i is
    max |C_n| over the window (N_{i-1}, N_i], floored at 1e-9.
    ``method="ensemble"``: sample std of block sums of length N (see
    :func:`dirwalk.ensemble.std_profile`).
    """
    g = _check_grid(n_grid)
    src = as_source(char, sieve)
    if method == "abs":
        w = src.weights("cos")
        env = np.zeros(len(g))
        for n, v in _iter_prefix(src, start, int(g[-1]), w):
            slot = np.searchsorted(g, n, side="left")
            np.maximum.at(env, slot, np.abs(v))
        return _fit(g, np.maximum(env, LOG_FLOOR), "abs")
    if method == "ensemble":
        if getattr(src, "is_principal", False):
            raise PrincipalNotSupported("block sums of the principal character have zero spread")
        from .ensemble import std_profile
        prof = std_profile(src, g, n1=n1, spacing=spacing, m_blocks=m_blocks, max_span=max_span)
        return _fit(g, prof["std"], "ensemble", {"m_blocks": prof["m_blocks"], "n1": n1})
    raise ValueError("method must be 'abs' or 'ensemble'")
