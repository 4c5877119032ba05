"""Dirichlet characters modulo a prime, held as exact angle indices.

A character value is either zero or a root of unity ``exp(2*pi*i*t/phi)``;
only the integer ``t`` (mod ``phi``) is stored.  Products, powers and sums of
equal roots stay exact; floats appear only when a value leaves this module.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import NotPrime, PrincipalNotSupported

# Witnesses that make Miller-Rabin deterministic below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def smallest_primitive_root(q: int) -> int:
    phi = q - 1
    factors = _prime_factors(phi)
    for g in range(2, q):
        if all(pow(g, phi // f, q) != 1 for f in factors):
            return g
    raise AssertionError(f"no primitive root mod prime {q}")


class Kind(enum.Enum):
    ZERO = "zero"
    ROOT = "root"


@dataclass(frozen=True)
class UnitValue:
    """Zero, or the root of unity exp(2 pi i t / phi)."""

    kind: Kind
    t: int
    phi: int

    @classmethod
    def zero(cls, phi: int) -> "UnitValue":
        return cls(Kind.ZERO, 0, phi)

    @classmethod
    def root(cls, t: int, phi: int) -> "UnitValue":
        return cls(Kind.ROOT, t % phi, phi)

    @property
    def is_zero(self) -> bool:
        return self.kind is Kind.ZERO

    def __mul__(self, other: "UnitValue") -> "UnitValue":
        if self.phi != other.phi:
            raise ValueError("values from different moduli")
        if self.is_zero or other.is_zero:
            return UnitValue.zero(self.phi)
        return UnitValue.root(self.t + other.t, self.phi)

    def __pow__(self, n: int) -> "UnitValue":
        if self.is_zero:
            return self if n > 0 else UnitValue.root(0, self.phi)
        return UnitValue.root(self.t * n, self.phi)

    def conjugate(self) -> "UnitValue":
        return self if self.is_zero else UnitValue.root(-self.t, self.phi)

    @property
    def angle(self) -> float:
        """Angle in [0, 2 pi); nan for zero."""
        if self.is_zero:
            return math.nan
        return 2 * math.pi * self.t / self.phi

    def __complex__(self) -> complex:
        return _root(self.t, self.phi) if not self.is_zero else 0j


_H = math.sqrt(3) / 2
# cos/sin at k twelfths of a turn, correctly rounded
_TWELFTHS = [(1.0, 0.0), (_H, 0.5), (0.5, _H), (0.0, 1.0), (-0.5, _H), (-_H, 0.5),
             (-1.0, 0.0), (-_H, -0.5), (-0.5, -_H), (0.0, -1.0), (0.5, -_H), (_H, -0.5)]


def _root(t: int, n: int) -> complex:
    """exp(2 pi i t / n), correctly rounded at multiples of a twelfth turn."""
    t %= n
    if (12 * t) % n == 0:
        return complex(*_TWELFTHS[12 * t // n])
    a = 2 * math.pi * t / n
    return complex(math.cos(a), math.sin(a))


def unit_cos(n: int) -> np.ndarray:
    """cos(2 pi t / n) for t = 0..n-1."""
    return np.array([_root(t, n).real for t in range(n)])


def unit_sin(n: int) -> np.ndarray:
    return np.array([_root(t, n).imag for t in range(n)])


@dataclass(frozen=True)
class Modulus:
    q: int
    phi: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or not is_prime(int(self.q)):
            raise NotPrime(f"modulus {self.q!r} is not prime")
        if self.q == 2:
            raise NotPrime("q = 2 has only the principal character")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "phi", self.q - 1)


@dataclass(frozen=True, eq=False)
class CharacterTable:
    """Discrete logarithms base the smallest primitive root of a prime q."""

    modulus: Modulus
    primitive_root: int
    index_map: np.ndarray  # index_map[m] = log_g(m); -1 at m = 0

    @property
    def q(self) -> int:
        return self.modulus.q

    @property
    def phi(self) -> int:
        return self.modulus.phi

    def __len__(self) -> int:
        return self.phi

    def __iter__(self):
        return (self[j] for j in range(self.phi))

    def __getitem__(self, j: int) -> "Character":
        if not 0 <= j < self.phi:
            raise IndexError(f"character label {j} outside 0..{self.phi - 1}")
        return Character(self, int(j))

    def __eq__(self, other):
        return isinstance(other, CharacterTable) and other.q == self.q

    def __hash__(self):
        return hash(("CharacterTable", self.q))

    @property
    def principal(self) -> "Character":
        return self[0]

    def orthogonality_report(self) -> dict:
        return orthogonality_report(self)


@lru_cache(maxsize=64)
def build_table(q: int) -> CharacterTable:
    mod = Modulus(q)
    g = smallest_primitive_root(mod.q)
    index_map = np.full(mod.q, -1, dtype=np.int64)
    x = 1
    for e in range(mod.phi):
        index_map[x] = e
        x = x * g % mod.q
    assert (index_map[1:] >= 0).all(), "g does not generate the unit group"
    index_map.setflags(write=False)
    return CharacterTable(mod, g, index_map)


@dataclass(frozen=True)
class Character:
    """The character chi_j(g^e) = exp(2 pi i j e / phi)."""

    table: CharacterTable
    j: int

    @property
    def q(self) -> int:
        return self.table.q

    @property
    def phi(self) -> int:
        return self.table.phi

    @property
    def is_principal(self) -> bool:
        return self.j == 0

    @property
    def is_real(self) -> bool:
        return (2 * self.j) % self.phi == 0

    def __call__(self, m: int) -> UnitValue:
        return self.eval(m)

    def eval(self, m: int) -> UnitValue:
        e = int(self.table.index_map[int(m) % self.q])
        if e < 0:
            return UnitValue.zero(self.phi)
        return UnitValue.root(self.j * e, self.phi)

    @cached_property
    def angle_codes(self) -> np.ndarray:
        """Angle index of chi(m) for m = 0..q-1, with -1 marking zero."""
        im = self.table.index_map
        codes = np.where(im < 0, -1, (self.j * im) % self.phi)
        codes.setflags(write=False)
        return codes

    def values(self) -> np.ndarray:
        """Complex values chi(1..q)."""
        return np.array([complex(self.eval(m)) for m in range(1, self.q + 1)])

    def order(self) -> int:
        return self.phi // math.gcd(self.j, self.phi)

    def parity(self) -> int:
        """0 for even (chi(-1) = 1), 1 for odd (chi(-1) = -1)."""
        t = self.eval(self.q - 1).t
        assert t in (0, self.phi // 2)
        return 0 if t == 0 else 1

    def conj(self) -> "Character":
        return self.table[(-self.j) % self.phi]

    def gauss_sum(self) -> complex:
        # chi(m) e(m/q) = exp(2 pi i u / (phi q)) with u = t q + m phi exact
        n = self.phi * self.q
        counts = np.zeros(n, dtype=np.int64)
        for m in range(1, self.q):
            t = int(self.angle_codes[m])
            counts[(t * self.q + m * self.phi) % n] += 1
        idx = np.flatnonzero(counts)
        re = math.fsum(counts[u] * _root(int(u), n).real for u in idx)
        im = math.fsum(counts[u] * _root(int(u), n).imag for u in idx)
        return complex(re, im)

    def cos_variance(self) -> float:
        """Mean of cos^2 over the distinct values of the character."""
        if self.is_principal:
            raise PrincipalNotSupported("cosine variance needs a non-principal character")
        r = self.order()
        step = self.phi // r
        return math.fsum(_root(k * step, self.phi).real ** 2 for k in range(r)) / r

    def label(self) -> str:
        return f"chi[q={self.q}, j={self.j}]"


def orthogonality_report(table: CharacterTable) -> dict:
    """Max deviation of both orthogonality sums from phi * delta.

    Residues run over 1..q-1 in the sum over characters (both sides vanish
    identically when q divides k or l), and m over 1..q in the sum over m.
    """
    q, phi = table.q, table.phi
    im = table.index_map
    cos_t, sin_t = unit_cos(phi), unit_sin(phi)

    def exact_sum(ts) -> complex:
        cnt = np.bincount(np.asarray(ts, dtype=np.int64) % phi, minlength=phi)
        return complex(math.fsum(cnt * cos_t), math.fsum(cnt * sin_t))

    js = np.arange(phi)
    over_chars = 0.0
    for k in range(1, q):
        for l in range(1, q):
            s = exact_sum(js * (im[k] - im[l]))
            expected = phi if k == l else 0
            over_chars = max(over_chars, abs(s - expected))
    ms = np.arange(1, q)
    over_m = 0.0
    for r in range(phi):
        for s_ in range(phi):
            s = exact_sum((r - s_) * im[ms])
            expected = phi if r == s_ else 0
            over_m = max(over_m, abs(s - expected))
    return {"q": q, "max_residual_over_characters": over_chars,
            "max_residual_over_residues": over_m,
            "max_residual": max(over_chars, over_m)}


# Conventional row labels chi_1..chi_6 of the classic mod-7 table, mapped to
# exponent labels against primitive root 3.
MOD7_CLASSIC_TO_J = {1: 0, 2: 1, 3: 2, 4: 3, 5: 4, 6: 5}


def classic_mod7(i: int) -> Character:
    """The character printed as chi_i in the classic mod-7 table."""
    return build_table(7)[MOD7_CLASSIC_TO_J[i]]
