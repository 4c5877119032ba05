"""Residues of primes mod q: single-class frequencies, lag-k pair counts and
the Lemke Oliver–Soundararajan (LOS) predictions for the latter.

Counting convention: x is a strict cutoff, p < x, so every denominator is
pi(x).  Pair (p_n, p_{n+k}) is counted when p_n < x even if p_{n+k} >= x.
Pairs touching the prime q (residue 0) are dropped and tallied separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .characters import Character, Modulus
from .errors import DomainError
from .primes import MAX_PRIME, PrimeSieve, default_sieve


def _modulus(q) -> int:
    return q.q if isinstance(q, Modulus) else Modulus(int(q)).q


def _cutoff(x) -> int:
    """Smallest integer c with {p < x} = {p < c}."""
    return int(math.ceil(x))


@dataclass(frozen=True, eq=False)
class FrequencyVector:
    character: Character
    x: float
    freqs: np.ndarray  # freqs[i]: share of p < x with chi(p) = exp(2 pi i i / r)
    n_primes: int
    counts: np.ndarray = field(repr=False, default=None)

    @property
    def r(self) -> int:
        return len(self.freqs)

    def max_deviation(self) -> float:
        return float(np.abs(self.freqs - 1.0 / self.r).max())


def frequencies(char: Character, x: float, sieve: PrimeSieve | None = None) -> FrequencyVector:
    """Share of primes below x in each of the r value classes of chi."""
    q = char.q
    if x < q:
        raise DomainError("need x >= q")
    sv = sieve or default_sieve()
    im = char.table.index_map.astype(np.int64)
    per_log = np.zeros(char.phi, dtype=np.int64)
    n = 0
    for _, arr in sv.segments(2, _cutoff(x)):
        codes = im[(arr % np.uint64(q)).astype(np.intp)]
        per_log += np.bincount(codes[codes >= 0], minlength=char.phi)
        n += len(arr)
    r = char.order()
    step = char.phi // r
    counts = np.zeros(r, dtype=np.int64)
    for l, c in enumerate(per_log):
        counts[(char.j * l % char.phi) // step] += c
    return FrequencyVector(char, float(x), counts / n, n, counts)


@dataclass(frozen=True, eq=False)
class PairCorrMatrix:
    """counts[a-1, b-1] = #{n : p_n < x, p_n = a, p_{n+k} = b mod q}."""

    q: int
    k: int
    x: float
    counts: np.ndarray
    n_primes: int
    dropped_pairs: int  # pairs with p_n = q or p_{n+k} = q

    @property
    def freqs(self) -> np.ndarray:
        return self.counts / self.n_primes

    @property
    def phi(self) -> int:
        return self.q - 1

    def diag_mean(self) -> float:
        return float(np.diag(self.freqs).mean())

    def sym_offdiag_mean(self) -> float:
        """Mean of f_ab + f_ba over unordered a != b."""
        f = self.freqs
        iu = np.triu_indices(self.phi, 1)
        return float((f + f.T)[iu].mean())

    def offdiag_mean(self) -> float:
        f = self.freqs
        return float(f[~np.eye(self.phi, dtype=bool)].mean())


def pair_counts_multi(q, ks: Sequence[int], x: float,
                      sieve: PrimeSieve | None = None) -> dict[int, PairCorrMatrix]:
    """Pair matrices for several lags from one pass over the primes."""
    q = _modulus(q)
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise DomainError("lags must be >= 1")
    kmax = ks[-1]
    sv = sieve or default_sieve()
    full = {k: np.zeros((q, q), dtype=np.int64) for k in ks}
    carry = np.empty(0, dtype=np.int16)
    n = 0

    def absorb(new: np.ndarray, first_limit: int | None):
        # pairs whose second member lies in `new`, restricted to first members
        # with index < first_limit (relative to buf) when given
        buf = np.concatenate([carry, new])
        for k in ks:
            lo = max(len(carry) - k, 0)
            hi = len(buf) - k
            if first_limit is not None:
                hi = min(hi, first_limit)
            if hi > lo:
                full[k] += kernels.pair_counts(buf[lo:], k, q, hi - lo)
        return buf[-kmax:] if len(buf) > kmax else buf

    for _, arr in sv.segments(2, _cutoff(x)):
        if len(arr) == 0:
            continue
        carry = absorb((arr % np.uint64(q)).astype(np.int16), None)
        n += len(arr)
    if n <= kmax:
        raise DomainError("need pi(x) > k")
    # the k primes after the cutoff complete the last pairs
    extra = []
    got = 0
    for _, arr in sv.segments(_cutoff(x), MAX_PRIME):
        extra.append(arr[:kmax - got])
        got += len(extra[-1])
        if got == kmax:
            break
    tail = (np.concatenate(extra) % np.uint64(q)).astype(np.int16)
    absorb(tail, len(carry))
    out = {}
    for k in ks:
        c = full[k][1:, 1:].copy()
        out[k] = PairCorrMatrix(q, k, float(x), c, n, n - int(c.sum()))
    return out


def pair_counts(q, k: int, x: float, sieve: PrimeSieve | None = None) -> PairCorrMatrix:
    return pair_counts_multi(q, [k], x, sieve)[k]


@dataclass(frozen=True)
class LosPrediction:
    q: int
    k: int
    x: float
    diag: float
    sym_offdiag: float
    offdiag: float | None = None  # per ordered pair; only for k >= 2

    @property
    def phi(self) -> int:
        return self.q - 1

    def matrix(self) -> np.ndarray:
        """phi x phi predicted f_ab; for k = 1 the symmetric sum is split evenly."""
        off = self.offdiag if self.offdiag is not None else self.sym_offdiag / 2
        m = np.full((self.phi, self.phi), off)
        np.fill_diagonal(m, self.diag)
        return m


def los_predicted(q, k: int, x: float) -> LosPrediction:
    """LOS leading-order pair densities, remainder terms dropped."""
    q = _modulus(q)
    if x <= math.e:
        raise DomainError("x must exceed e")
    if k < 1:
        raise DomainError("k must be >= 1")
    phi = q - 1
    L = math.log(x)
    ll = math.log(L)
    c = math.log(q / (2 * math.pi))
    u = 1.0 / phi ** 2
    if k == 1:
        sym = 2 * u * (1 + ll / (2 * L) - c / (2 * L))
        diag = u * (1 - (phi - 1) / 2 * ll / L + (phi - 1) * c / (2 * L))
        return LosPrediction(q, k, float(x), diag, sym)
    off = u * (1 + 1 / (2 * (k - 1) * L))
    diag = u * (1 - (phi - 1) / (2 * (k - 1) * L))
    return LosPrediction(q, k, float(x), diag, 2 * off, off)


def markov_gap(m1: PairCorrMatrix, mk: PairCorrMatrix) -> float:
    """max |f_k - diag(f) P^k| with P the lag-1 transition matrix; 0 for a Markov chain."""
    f1 = m1.freqs
    row = f1.sum(axis=1)
    P = f1 / row[:, None]
    pred = row[:, None] * np.linalg.matrix_power(P, mk.k)
    return float(np.abs(mk.freqs - pred).max())


def bias_report(q, x: float, k_max: int, sieve: PrimeSieve | None = None,
                ks: Iterable[int] | None = None) -> list[dict]:
    """Empirical vs LOS vs uniform pair statistics for each lag."""
    q = _modulus(q)
    ks = sorted(set(ks)) if ks is not None else list(range(1, k_max + 1))
    mats = pair_counts_multi(q, sorted(set(ks) | {1}), x, sieve)
    phi = q - 1
    u = 1.0 / phi ** 2
    rows = []
    for k in ks:
        m = mats[k]
        los = los_predicted(q, k, x)
        ed, es = m.diag_mean(), m.sym_offdiag_mean()
        rows.append({
            "k": k,
            "emp_diag": ed,
            "emp_sym_offdiag": es,
            "los_diag": los.diag,
            "los_sym_offdiag": los.sym_offdiag,
            "uniform_diag": u,
            "uniform_sym_offdiag": 2 * u,
            "diag_resid_los": ed - los.diag,
            "diag_resid_uniform": ed - u,
            "sym_resid_los": es - los.sym_offdiag,
            "sym_resid_uniform": es - 2 * u,
            "markov_gap": markov_gap(mats[1], m) if k > 1 else 0.0,
            "n_primes": m.n_primes,
            "dropped_pairs": m.dropped_pairs,
        })
    return rows


def pair_rows(m: PairCorrMatrix, los: LosPrediction | None = None) -> list[dict]:
    pred = los.matrix() if los is not None else None
    f = m.freqs
    out = []
    for a in range(1, m.q):
        for b in range(1, m.q):
            fe = float(f[a - 1, b - 1])
            fl = float(pred[a - 1, b - 1]) if pred is not None else math.nan
            out.append({"a": a, "b": b, "count": int(m.counts[a - 1, b - 1]),
                        "f_emp": fe, "f_los": fl, "residual": fe - fl})
    return out


def write_pairs_csv(path_or_file, m: PairCorrMatrix, los: LosPrediction | None = None) -> None:
    from .io import write_csv
    write_csv(path_or_file, ["a", "b", "count", "f_emp", "f_los", "residual"], pair_rows(m, los))
