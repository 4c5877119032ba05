# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. Signatures mirror ``dirwalk._fallback`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.string cimport memcpy, memset
from libc.stdint cimport int16_t, int64_t, uint8_t, uint32_t, uint64_t

cnp.import_array()

BACKEND = "cython"

# odd primes handled by the pre-sieve pattern
DEF WHEEL_PERIOD = 15015  # 3*5*7*11*13, period of the pattern in odd-index space
cdef uint32_t[5] _WHEEL_PRIMES = [3, 5, 7, 11, 13]


cdef bytes _build_wheel():
    cdef uint8_t[:] pat = np.ones(WHEEL_PERIOD, dtype=np.uint8)
    cdef Py_ssize_t i
    cdef uint32_t p
    for p in _WHEEL_PRIMES:
        # odd index i represents 2*i + 1; multiples of p hit i = (p-1)/2 + p*k
        i = (p - 1) // 2
        while i < WHEEL_PERIOD:
            pat[i] = 0
            i += p
    return bytes(pat)


cdef bytes _WHEEL = _build_wheel()


def sieve_segment(uint64_t lo, uint64_t hi, const uint32_t[:] base):
    """Primes in [lo, hi) as uint64, given all odd primes up to sqrt(hi)."""
    cdef uint64_t odd_lo, p, start, j
    cdef Py_ssize_t n_odd, i, k, off, chunk, nb = base.shape[0]
    cdef const uint8_t* wheel = _WHEEL
    out_small = []
    if hi <= lo:
        return np.empty(0, dtype=np.uint64)
    if lo <= 2 < hi:
        out_small.append(2)
    # small primes the pattern would erase
    for p in _WHEEL_PRIMES:
        if lo <= p < hi:
            out_small.append(p)
    odd_lo = lo | 1
    if odd_lo >= hi:
        return np.array(out_small, dtype=np.uint64)
    n_odd = <Py_ssize_t>((hi - odd_lo + 1) // 2)
    seg_arr = np.empty(n_odd, dtype=np.uint8)
    cdef uint8_t[::1] seg = seg_arr

    # tile the pattern: odd_lo = 2*i0 + 1
    off = <Py_ssize_t>(((odd_lo - 1) // 2) % WHEEL_PERIOD)
    i = 0
    while i < n_odd:
        chunk = WHEEL_PERIOD - off
        if chunk > n_odd - i:
            chunk = n_odd - i
        memcpy(&seg[i], wheel + off, chunk)
        i += chunk
        off = 0

    cdef Py_ssize_t count = 0
    with nogil:
        for k in range(nb):
            p = base[k]
            if p <= 13:
                continue
            if p * p >= hi:
                break
            start = p * p
            if start < odd_lo:
                start = ((odd_lo + p - 1) // p) * p
                if (start & 1) == 0:
                    start += p
            j = (start - odd_lo) >> 1
            while j < <uint64_t>n_odd:
                seg[j] = 0
                j += p
        if odd_lo == 1:
            seg[0] = 0
        for i in range(n_odd):
            count += seg[i]
    res = np.empty(count + len(out_small), dtype=np.uint64)
    cdef uint64_t[::1] r = res
    cdef Py_ssize_t w = 0
    for v in out_small:
        r[w] = v
        w += 1
    for i in range(n_odd):
        if seg[i]:
            r[w] = odd_lo + 2 * <uint64_t>i
            w += 1
    if out_small:
        res.sort()
    return res


def block_counts(const int16_t[:] codes, const int64_t[:] starts, const int64_t[:] ends, int nsym):
    """Histogram of non-negative codes in each [starts[b], ends[b]); negatives skipped."""
    cdef Py_ssize_t m = starts.shape[0], b, i, n = codes.shape[0]
    cdef int16_t c
    out = np.zeros((m, nsym), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    for b in range(m):
        if starts[b] < 0 or ends[b] > n or ends[b] < starts[b]:
            raise IndexError("block outside code array")
    with nogil:
        for b in range(m):
            for i in range(starts[b], ends[b]):
                c = codes[i]
                if c >= 0:
                    o[b, c] += 1
    return out


def pair_counts(const int16_t[:] res, int k, int q, Py_ssize_t n_first):
    """Counts of (res[i], res[i+k]) for i < n_first, skipping zero residues."""
    out = np.zeros((q, q), dtype=np.int64)
    cdef int64_t[:, ::1] o = out
    cdef Py_ssize_t i
    cdef int16_t a, b
    if n_first + k > res.shape[0]:
        raise IndexError("not enough trailing residues")
    for i in range(n_first):
        a = res[i]
        b = res[i + k]
        if a > 0 and b > 0:
            o[a, b] += 1
    return out


def neumaier_sum(const double[:] x):
    cdef double s = 0.0, c = 0.0, t, v
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
    return s + c


def neumaier_cumsum(const double[:] x):
    out = np.empty(x.shape[0], dtype=np.float64)
    cdef double[::1] o = out
    cdef double s = 0.0, c = 0.0, t, v
    cdef Py_ssize_t i
    for i in range(x.shape[0]):
        v = x[i]
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        o[i] = s + c
    return out
