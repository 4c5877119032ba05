"""Ensembles of block sums C_N(s) over disjoint, separated index intervals."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import special, stats

from . import kernels
from .characters import Character
from .errors import DomainError, PrincipalNotSupported, SpecInvalid
from .primes import PrimeSieve
from .rng import keyed_rng
from .sources import as_source

EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class FixedSpacing:
    d: int

    def gaps(self, m: int, seed: int) -> np.ndarray:
        return np.full(max(m - 1, 0), self.d, dtype=np.int64)

    @property
    def min(self):
        return self.d

    @property
    def max(self):
        return self.d

    def __str__(self):
        return f"fixed:{self.d}"


@dataclass(frozen=True)
class RandomSpacing:
    lo: int
    hi: int

    def gaps(self, m: int, seed: int) -> np.ndarray:
        # one keyed stream per gap: block i's position never depends on scheduling
        return np.array([keyed_rng(seed, "spacing", i).integers(self.lo, self.hi + 1)
                         for i in range(max(m - 1, 0))], dtype=np.int64)

    @property
    def min(self):
        return self.lo

    @property
    def max(self):
        return self.hi

    def __str__(self):
        return f"rand:{self.lo}:{self.hi}"


def parse_spacing(text: str):
    parts = text.split(":")
    try:
        if parts[0] == "fixed" and len(parts) == 2:
            return FixedSpacing(int(parts[1]))
        if parts[0] == "rand" and len(parts) == 3:
            return RandomSpacing(int(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise SpecInvalid(f"bad spacing {text!r}; use fixed:<D> or rand:<lo>:<hi>")


@dataclass(frozen=True)
class EnsembleSpec:
    n1: int
    block_len: int
    spacing: FixedSpacing | RandomSpacing = FixedSpacing(10)
    m_blocks: int = 2000
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.spacing, int):
            object.__setattr__(self, "spacing", FixedSpacing(self.spacing))
        if self.n1 < 1 or self.block_len < 1 or self.m_blocks < 1:
            raise SpecInvalid("n1, block_len and m_blocks must be positive")
        if self.spacing.min < 0 or self.spacing.max < self.spacing.min:
            raise SpecInvalid(f"spacing {self.spacing} would overlap blocks")

    def starts(self) -> np.ndarray:
        gaps = self.spacing.gaps(self.m_blocks, self.seed)
        steps = np.concatenate([[0], np.cumsum(self.block_len + gaps)])
        return self.n1 + steps

    @property
    def horizon(self) -> int:
        """N2: every block index lies below this."""
        return self.n1 + self.m_blocks * (self.block_len + self.spacing.max)


@dataclass(frozen=True, eq=False)
class BlockEnsemble:
    spec: EnsembleSpec
    character: object
    blocks: np.ndarray
    starts: np.ndarray
    p_blocks: np.ndarray  # the prime at each block start
    counts: np.ndarray = field(repr=False)
    diagnostics: dict = field(default_factory=dict)

    @property
    def p_start(self) -> int:
        return int(self.p_blocks[0])

    def __len__(self):
        return len(self.blocks)


def _stream_block_counts(src, starts: np.ndarray, length: int) -> np.ndarray:
    """Code histograms for blocks [starts[i], starts[i] + length), one pass."""
    first = int(starts[0])
    ends = starts + length
    total = int(ends[-1]) - first
    counts = np.zeros((len(starts), src.nsym), dtype=np.int64)
    g0 = first
    for chunk in src.chunks(first, total):
        g1 = g0 + len(chunk)
        i0 = np.searchsorted(ends, g0, side="right")
        i1 = np.searchsorted(starts, g1, side="left")
        if i1 > i0:
            ls = np.clip(starts[i0:i1] - g0, 0, len(chunk)).astype(np.int64)
            le = np.clip(ends[i0:i1] - g0, 0, len(chunk)).astype(np.int64)
            counts[i0:i1] += kernels.block_counts(chunk, ls, le, src.nsym)
        g0 = g1
    return counts


def build(char, spec: EnsembleSpec, sieve: PrimeSieve | None = None) -> BlockEnsemble:
    return build_many([char], spec, sieve)[0]


def build_many(chars: Sequence, spec: EnsembleSpec, sieve: PrimeSieve | None = None) -> list[BlockEnsemble]:
    """Ensembles for several characters of one modulus from a single pass."""
    srcs = [as_source(c, sieve) for c in chars]
    if isinstance(chars[0], Character) and len({c.q for c in chars}) != 1:
        raise SpecInvalid("build_many needs characters of one modulus")
    starts = spec.starts()
    counts = _stream_block_counts(srcs[0], starts, spec.block_len)
    p_blocks = srcs[0].primes_at(starts)
    p_first, p_last = float(p_blocks[0]), float(p_blocks[-1])
    diag = {"p_first_start": int(p_first), "p_last_start": int(p_last),
            "log_p_ratio": math.log(p_last) / math.log(p_first)}
    out = []
    for c, src in zip(chars, srcs):
        blocks = counts @ src.weights("cos")
        out.append(BlockEnsemble(spec, c, blocks, starts, p_blocks, counts, diag))
    return out


def std_profile(src, n_grid: Sequence[int], n1: int = 10 ** 6, spacing: int = 10,
                m_blocks: int = 2000, max_span: int = 6 * 10 ** 7) -> dict:
    """Sample std of block sums for each N in the grid, all starting at n1.

    The block count at each N is capped so the index span stays within
    ``max_span``; the codes for the longest span are fetched once.
    """
    src = as_source(src)
    grid = np.asarray(n_grid, dtype=np.int64)
    ms = np.minimum(m_blocks, max_span // (grid + spacing)).astype(np.int64)
    if (ms < 2).any():
        raise SpecInvalid("max_span too small for the largest block length")
    need = int((ms * (grid + spacing)).max())
    codes = np.concatenate(list(src.chunks(n1, need)))
    w = src.weights("cos")
    stds, means = [], []
    for N, M in zip(grid, ms):
        local = np.arange(M, dtype=np.int64) * (N + spacing)
        cnt = kernels.block_counts(codes, local, local + N, src.nsym)
        blocks = cnt @ w
        stds.append(blocks.std(ddof=1))
        means.append(blocks.mean())
    return {"n": grid, "std": np.array(stds), "mean": np.array(means), "m_blocks": ms}


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: float
    skew: float
    excess_kurtosis: float


def moments(ens: BlockEnsemble | np.ndarray) -> Moments:
    x = np.asarray(getattr(ens, "blocks", ens), dtype=float)
    if len(x) < 2:
        raise DomainError("need at least two blocks")
    var = float(x.var(ddof=1))
    if var == 0.0:
        return Moments(float(x.mean()), 0.0, math.nan, math.nan)
    return Moments(float(x.mean()), var, float(stats.skew(x, bias=False)),
                   float(stats.kurtosis(x, fisher=True, bias=False)))


def harmonic(n: int) -> float:
    """H_n = sum_{m=1}^n 1/m."""
    if n < 0:
        raise DomainError("n must be >= 0")
    if n <= 100_000:
        return math.fsum(1.0 / m for m in range(1, n + 1))
    n2 = float(n) * n
    return math.log(n) + EULER_GAMMA + 1 / (2 * n) - 1 / (12 * n2) + 1 / (120 * n2 * n2)


def harmonic_exact(n: int) -> Fraction:
    return sum((Fraction(1, m) for m in range(1, n + 1)), Fraction(0))


@dataclass(frozen=True)
class VarianceTheory:
    lam: float
    rho: float
    b2: float
    sigma2: float
    N: int
    p_start: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def theory_lambda_rho(N: int, p_start: float, q: int) -> tuple[float, float]:
    if N < 3:
        raise DomainError("block length must be >= 3")
    if p_start <= math.e:
        raise DomainError("p_start must exceed e so that log log p > 0")
    L = math.log(p_start)
    H = harmonic(N - 2)
    lam = 1.0 + (1.0 - H) / L - math.log(L) / L
    rho = (math.log(q * L / (2 * math.pi * math.e ** 2)) + H) / L
    return lam, rho


def theory_variance(char: Character, N: int, p_start: float) -> VarianceTheory:
    """sigma_N^2 = b^2 (N lambda + rho) for blocks of length N near prime p_start."""
    b2 = char.cos_variance()
    lam, rho = theory_lambda_rho(N, p_start, char.q)
    return VarianceTheory(lam, rho, b2, b2 * (N * lam + rho), N, float(p_start))


def block_sigma2(ens: BlockEnsemble, p_mode: str = "block") -> np.ndarray:
    """Predicted variance of each block.

    ``p_mode="block"`` evaluates the formula at each block's own starting
    prime; ``"first"`` uses the first block's prime for all of them.  At desk
    scale log p drifts noticeably across a wide ensemble, so only the local
    form tracks the data once M * N is comparable to n1.
    """
    char = ens.character
    if not isinstance(char, Character):
        raise DomainError("theory needs a character-backed ensemble")
    if char.is_principal:
        raise PrincipalNotSupported("b^2 is undefined for the principal character")
    if p_mode == "first":
        ps = np.full(len(ens.blocks), float(ens.p_blocks[0]))
    elif p_mode == "block":
        ps = ens.p_blocks.astype(float)
    else:
        raise ValueError("p_mode must be 'block' or 'first'")
    N = ens.spec.block_len
    cache = {}
    out = np.empty(len(ps))
    for i, p in enumerate(ps):
        if p not in cache:
            cache[p] = theory_variance(char, N, p).sigma2
        out[i] = cache[p]
    if (out <= 0).any():
        raise DomainError("theoretical variance is not positive")
    return out


def ensemble_theory_variance(ens: BlockEnsemble, p_mode: str = "block") -> float:
    """Ensemble-average prediction: mean of the per-block variances."""
    return float(np.mean(block_sigma2(ens, p_mode)))


def normalized(ens: BlockEnsemble, p_mode: str = "block") -> np.ndarray:
    """blocks[i] / sigma_N at the block's start (see :func:`block_sigma2`)."""
    return ens.blocks / np.sqrt(block_sigma2(ens, p_mode))


def normal_cdf(x):
    return 0.5 * special.erfc(-np.asarray(x, dtype=float) / math.sqrt(2.0))


def normal_two_sided_tail(d: float) -> float:
    """Pr[|Z| > d] for a standard normal Z."""
    return float(special.erfc(d / math.sqrt(2.0)))


@dataclass(frozen=True)
class NormalityResult:
    ks_statistic: float
    ks_pvalue: float
    fitted_mean: float
    fitted_std: float
    n: int


def normality_test(values) -> NormalityResult:
    """One-sample KS against N(0, 1) plus maximum-likelihood normal fit."""
    x = np.sort(np.asarray(values, dtype=float))
    n = len(x)
    if n < 1:
        raise DomainError("empty sample")
    ks = stats.kstest(x, "norm")
    return NormalityResult(float(ks.statistic), float(ks.pvalue), float(x.mean()), float(x.std()), n)


def histogram(values, bins: int = 40) -> dict:
    """Histogram with the expected N(0,1) count per bin alongside."""
    x = np.asarray(values, dtype=float)
    counts, edges = np.histogram(x, bins=bins)
    centers = 0.5 * (edges[1:] + edges[:-1])
    width = np.diff(edges)
    ref = len(x) * width * np.exp(-centers ** 2 / 2) / math.sqrt(2 * math.pi)
    return {"bin_center": centers, "count": counts, "normal_pdf_reference": ref}
