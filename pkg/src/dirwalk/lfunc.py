"""Dirichlet L-functions through Hurwitz zeta, plus three consistency checks:
the prime (Euler) split of log L, the functional equation, and the residue
at s = 1.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from . import kernels
from .characters import Character, _root
from .errors import BranchAmbiguity, DomainError, GammaPole, PoleAt1
from .primes import PrimeSieve, default_sieve, log_codes

DEFAULT_TOL = 1e-12
EM_ORDER = 8
T_MAX = 50.0


@dataclass(frozen=True)
class ComplexPoint:
    sigma: float
    t: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and math.isfinite(self.t)):
            raise DomainError("s must be finite")

    @property
    def s(self) -> complex:
        return complex(self.sigma, self.t)

    @classmethod
    def parse(cls, text: str) -> "ComplexPoint":
        parts = text.split(",")
        if len(parts) == 1:
            return cls(float(parts[0]))
        if len(parts) == 2:
            return cls(float(parts[0]), float(parts[1]))
        raise ValueError(f"expected sigma[,t], got {text!r}")


def _as_s(s) -> complex:
    if isinstance(s, ComplexPoint):
        return s.s
    return complex(s)


# Lanczos coefficients, g = 7, n = 9
_LANCZOS_G = 7
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def complex_gamma(z) -> complex:
    """Gamma(z) for complex z, Lanczos with reflection for Re z < 1/2."""
    z = complex(z)
    if z.real <= 0.5 and abs(z.imag) < 1e-12 and abs(z.real - round(z.real)) < 1e-12:
        raise GammaPole(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * complex_gamma(1 - z))
    z -= 1
    x = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        x += _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


@lru_cache(maxsize=None)
def _bernoulli_coeffs(order: int) -> tuple[float, ...]:
    """B_{2j} / (2j)! for j = 1 .. order + 1."""
    b = special.bernoulli(2 * order + 2)
    return tuple(b[2 * j] / math.factorial(2 * j) for j in range(1, order + 2))


def _em_tail(s: complex, x: float, order: int) -> tuple[complex, float]:
    """Bernoulli corrections at x and the magnitude of the first omitted term."""
    coef = _bernoulli_coeffs(order)
    total = 0j
    poch = s  # s (s+1) ... (s + 2j - 2)
    xp = x ** (-s - 1)
    for j in range(order):
        total += coef[j] * poch * xp
        poch *= (s + 2 * j + 1) * (s + 2 * j + 2)
        xp /= x * x
    return total, abs(coef[order] * poch * xp)


def _choose_cutoff(s: complex, a: float, tol: float, order: int) -> int:
    K = max(10, int(math.ceil(abs(s))))
    while True:
        _, err = _em_tail(s, K + a, order)
        if err < tol or K > 1 << 20:
            return K
        K *= 2


def _hurwitz_parts(s: complex, a: float, K: int, order: int) -> tuple[complex, float, float]:
    """ζ(s, a) = regular + (K+a)^(1-s) / (s-1); returns (regular, log(K+a), err)."""
    m = np.arange(K, dtype=np.float64) + a
    terms = np.exp(-s * np.log(m))
    direct = complex(kernels.neumaier_sum(terms.real), kernels.neumaier_sum(terms.imag))
    x = K + a
    corr, err = _em_tail(s, x, order)
    return direct + 0.5 * x ** (-s) + corr, math.log(x), err


def _pole_factor(s: complex, u: float) -> complex:
    """exp((1-s) u) / (s-1) minus its s -> 1 singularity 1/(s-1), i.e. -u * expm1(z)/z."""
    z = (1 - s) * u
    if abs(z) < 1e-4:
        e = 1 + z / 2 + z * z / 6 + z ** 3 / 24
    else:
        e = (cmath.exp(z) - 1) / z
    return -u * e


def hurwitz_zeta(s, a: float, tol: float = DEFAULT_TOL, order: int = EM_ORDER) -> complex:
    """ζ(s, a) = sum_{m >= 0} (m + a)^-s by Euler–Maclaurin, for a in (0, 1]."""
    s = _as_s(s)
    if not 0 < a <= 1:
        raise DomainError("a must lie in (0, 1]")
    if abs(s - 1) < 1e-8:
        raise PoleAt1("ζ(s, a) has a pole at s = 1")
    K = _choose_cutoff(s, a, tol, order)
    reg, u, _ = _hurwitz_parts(s, a, K, order)
    return reg + cmath.exp((1 - s) * u) / (s - 1)


def l_eval(char: Character, s, tol: float = DEFAULT_TOL, order: int = EM_ORDER,
           with_error: bool = False):
    """L(s, chi) = q^-s sum_r chi(r) ζ(s, r/q).

    For non-principal chi the 1/(s-1) parts cancel because sum chi(r) = 0;
    they are dropped before combining, so s = 1 is a regular point.
    """
    s = _as_s(s)
    q = char.q
    if char.is_principal and abs(s - 1) < 1e-8:
        raise PoleAt1("the principal L-function has a pole at s = 1")
    K = max(_choose_cutoff(s, r / q, tol, order) for r in (1, q))
    vals = char.values()
    total = 0j
    err = 0.0
    for r in range(1, q):
        c = vals[r - 1]
        reg, u, e = _hurwitz_parts(s, r / q, K, order)
        if char.is_principal:
            total += c * (reg + cmath.exp((1 - s) * u) / (s - 1))
        else:
            total += c * (reg + _pole_factor(s, u))
        err += e
    scale = cmath.exp(-s * math.log(q))
    out = scale * total
    if with_error:
        return out, abs(scale) * err
    return out


class LFuncEvaluator:
    """Immutable bundle of a character and accuracy settings."""

    def __init__(self, character: Character, tol: float = DEFAULT_TOL,
                 euler_maclaurin_order: int = EM_ORDER, truncation: int | None = None):
        self.character = character
        self.tol = tol
        self.euler_maclaurin_order = euler_maclaurin_order
        self.truncation = truncation

    def __call__(self, s) -> complex:
        return self.value(s)[0]

    def value(self, s) -> tuple[complex, float]:
        s = _as_s(s)
        if abs(s.imag) > T_MAX:
            raise DomainError(f"|t| above {T_MAX} is out of range")
        return l_eval(self.character, s, self.tol, self.euler_maclaurin_order, with_error=True)

    def functional_equation_residual(self, s) -> float:
        return functional_equation_residual(self.character, s, self.tol)

    def residue_at_one(self) -> float:
        return residue_at_one(self.character, self.tol)


def fe_factor(char: Character, s, g: complex | None = None, halved: bool = False) -> complex:
    """Factor F(s) with L(1-s, chi) = F(s) L(s, conj chi).

    F(s) = 2 i^-a q^(s-1) Γ(s) (2π)^-s G(chi) trig(πs/2), trig = cos for even
    chi (a = 0) and sin for odd chi.  ``halved`` drops the leading 2.
    """
    s = _as_s(s)
    a = char.parity()
    if g is None:
        g = char.gauss_sum()
    trig = cmath.cos(math.pi * s / 2) if a == 0 else cmath.sin(math.pi * s / 2)
    f = (1j) ** (-a) * cmath.exp((s - 1) * math.log(char.q)) * complex_gamma(s) \
        * cmath.exp(-s * math.log(2 * math.pi)) * g * trig
    return f if halved else 2 * f


def functional_equation_residual(char: Character, s, tol: float = DEFAULT_TOL,
                                 g: complex | None = None, halved: bool = False) -> float:
    """|L(1-s, chi) - F(s) L(s, conj chi)| (see :func:`fe_factor`)."""
    if char.is_principal:
        raise DomainError("the functional equation here is for primitive (non-principal) characters")
    s = _as_s(s)
    lhs = l_eval(char, 1 - s, tol)
    rhs = fe_factor(char, s, g, halved) * l_eval(char.conj(), s, tol)
    return abs(lhs - rhs)


def residue_at_one(char: Character, tol: float = DEFAULT_TOL) -> float:
    """lim (s-1) L(s, chi) from h = 1e-2, 1e-3, 1e-4 with Richardson extrapolation."""
    hs = (1e-2, 1e-3, 1e-4)
    f = [h * l_eval(char, 1 + h, tol).real for h in hs]
    # f(h) = R + c1 h + c2 h^2 + ...; steps shrink by 10
    r1 = [(10 * f[i + 1] - f[i]) / 9 for i in range(2)]
    return (100 * r1[1] - r1[0]) / 99


@dataclass(frozen=True)
class EulerSplit:
    X: complex
    R: complex
    log_l: complex
    N: int
    p_N: int
    s: complex

    @property
    def residual(self) -> float:
        return abs(self.X + self.R - self.log_l)


def _csum(z: np.ndarray) -> complex:
    return complex(kernels.neumaier_sum(z.real), kernels.neumaier_sum(z.imag))


def log_l_tracked(char: Character, s, tol: float = DEFAULT_TOL, steps: int = 64) -> complex:
    """log L(s, chi) continued along the horizontal path from 3 + it."""
    s = _as_s(s)
    start = complex(3.0, s.imag)
    path = np.linspace(start.real, s.real, steps + 1) if s.real != 3.0 else np.array([3.0])
    prev = l_eval(char, start, tol)
    if abs(prev) == 0:
        raise BranchAmbiguity("L vanishes at the path start")
    arg = cmath.phase(prev)
    for sig in path[1:]:
        cur = l_eval(char, complex(sig, s.imag), tol)
        if cur == 0:
            raise BranchAmbiguity(f"L vanishes on the path at sigma={sig}")
        d = cmath.phase(cur / prev)
        if abs(d) > math.pi / 2:
            raise BranchAmbiguity(f"argument jumped by {d:.3f} near sigma={sig}")
        arg += d
        prev = cur
    return complex(math.log(abs(prev)), arg)


def euler_split(char: Character, s, N: int, tol: float = 1e-18,
                sieve: PrimeSieve | None = None) -> EulerSplit:
    """X_N = sum_{n<=N} chi(p_n) p_n^-s and the prime-power remainder R_N.

    R_N keeps powers m >= 2 until chi(p)^m / (m p^(m sigma)) drops below tol.
    """
    s = _as_s(s)
    if char.is_principal:
        raise DomainError("the principal L-function has a pole at s = 1; no split")
    if s.real <= 0.5:
        raise DomainError("the split needs sigma > 1/2")
    if N < 1:
        raise DomainError("N must be >= 1")
    sv = sieve or default_sieve()
    p = sv.primes_by_index(1, N)
    codes = log_codes(char.table, 1, N, sv)
    keep = codes >= 0
    p, codes = p[keep], codes[keep].astype(np.int64)
    logp = np.log(p.astype(np.float64))
    phi = char.phi
    roots = np.array([_root(t, phi) for t in range(phi)])
    ang = (codes * char.j) % phi
    X = _csum(roots[ang] * np.exp(-s * logp))
    R = 0j
    m = 2
    sig = s.real
    while True:
        live = -m * sig * logp - math.log(m) > math.log(tol)
        if not live.any():
            break
        idx = np.flatnonzero(live)
        R += _csum(roots[(m * ang[idx]) % phi] * np.exp(-m * s * logp[idx]) / m)
        m += 1
    return EulerSplit(X, R, log_l_tracked(char, s), N, int(sv.nth_prime(N)), s)


def euler_tail_bound(sigma: float, p_N: float) -> float:
    """Upper bound on |log L - X_N - R_N| for sigma > 1.

    Uses pi(x) < 1.26 x / log x: sum_{p > y} p^-sigma <= 1.26 sigma
    int_y^inf x^-sigma / log x dx, plus the same bound at 2 sigma for powers.
    """
    if sigma <= 1:
        raise DomainError("tail bound needs sigma > 1")

    def one(sg):
        u0 = math.log(p_N)
        val, _ = integrate.quad(lambda u: math.exp((1 - sg) * (u - u0)) / u, u0, math.inf)
        return 1.26 * sg * math.exp((1 - sg) * u0) * val

    return one(sigma) + 2 * one(2 * sigma)
