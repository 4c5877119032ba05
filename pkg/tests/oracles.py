"""Independent reference implementations used only by the tests."""

import cmath
import itertools
import math

import numpy as np

# Characters mod 7 as printed in the classic table, in units of pi/3 for
# n = 1..6 (chi(7) = 0).  Row i is the classic chi_{i+1}.
CLASSIC_MOD7 = [
    [0, 0, 0, 0, 0, 0],
    [0, 2, 1, 4, 5, 3],
    [0, 4, 2, 2, 4, 0],
    [0, 0, 3, 0, 3, 3],
    [0, 2, 4, 4, 2, 0],
    [0, 4, 5, 2, 1, 3],
]


def trial_division_primes(n):
    out = []
    for m in range(2, n):
        if all(m % p for p in out if p * p <= m):
            out.append(m)
    return out


def simple_sieve(n):
    flags = np.ones(n, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n - 1) + 1):
        if flags[p]:
            flags[p * p::p] = False
    return np.flatnonzero(flags)


def brute_characters(q):
    """All multiplicative maps (Z/q)* -> phi-th roots, as angle-index tuples for m = 1..q-1."""
    phi = q - 1
    found = []
    for vec in itertools.product(range(phi), repeat=phi):
        if vec[0] != 0:
            continue
        ok = True
        for a in range(1, q):
            for b in range(a, q):
                if (vec[a - 1] + vec[b - 1]) % phi != vec[a * b % q - 1]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            found.append(vec)
    return found


def chi_direct(q, vec, m):
    """Character value from an angle-index vector, 0 when q | m."""
    if m % q == 0:
        return 0j
    return cmath.exp(2j * math.pi * vec[m % q - 1] / (q - 1))


def dirichlet_series(q, vec, s, terms):
    m = np.arange(1, terms + 1)
    vals = np.array([chi_direct(q, vec, int(k)) for k in range(q)])
    return complex(np.sum(vals[m % q] * np.exp(-s * np.log(m))))


def walk_direct(values, primes):
    return np.cumsum([values(p) for p in primes])
