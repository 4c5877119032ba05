"""Numpy implementations of the hot loops, used when the extension is absent."""

import math

import numpy as np

BACKEND = "numpy"

_WHEEL_PRIMES = (3, 5, 7, 11, 13)
_WHEEL_PERIOD = 15015


def _build_wheel():
    pat = np.ones(_WHEEL_PERIOD, dtype=bool)
    for p in _WHEEL_PRIMES:
        pat[(p - 1) // 2::p] = False
    return pat


_WHEEL = _build_wheel()


def sieve_segment(lo, hi, base):
    """Primes in [lo, hi) as uint64, given all odd primes up to sqrt(hi)."""
    lo, hi = int(lo), int(hi)
    if hi <= lo:
        return np.empty(0, dtype=np.uint64)
    small = [p for p in (2,) + _WHEEL_PRIMES if lo <= p < hi]
    odd_lo = lo | 1
    if odd_lo >= hi:
        return np.array(small, dtype=np.uint64)
    n_odd = (hi - odd_lo + 1) // 2
    off = ((odd_lo - 1) // 2) % _WHEEL_PERIOD
    reps = (off + n_odd) // _WHEEL_PERIOD + 1
    seg = np.tile(_WHEEL, reps)[off:off + n_odd].copy()
    for p in np.asarray(base, dtype=np.int64):
        p = int(p)
        if p <= 13:
            continue
        if p * p >= hi:
            break
        start = p * p
        if start < odd_lo:
            start = -(-odd_lo // p) * p
            if start % 2 == 0:
                start += p
        seg[(start - odd_lo) // 2::p] = False
    if odd_lo == 1:
        seg[0] = False
    odd = odd_lo + 2 * np.flatnonzero(seg).astype(np.uint64)
    if small:
        return np.concatenate([np.array(small, dtype=np.uint64), odd])
    return odd


def block_counts(codes, starts, ends, nsym):
    """Histogram of non-negative codes in each [starts[b], ends[b]); negatives skipped."""
    codes = np.asarray(codes)
    starts = np.asarray(starts, dtype=np.int64)
    ends = np.asarray(ends, dtype=np.int64)
    if len(starts) and (starts.min() < 0 or ends.max() > len(codes) or (ends < starts).any()):
        raise IndexError("block outside code array")
    out = np.zeros((len(starts), nsym), dtype=np.int64)
    for b, (s, e) in enumerate(zip(starts, ends)):
        blk = codes[s:e]
        out[b] = np.bincount(blk[blk >= 0], minlength=nsym)[:nsym]
    return out


def pair_counts(res, k, q, n_first):
    """Counts of (res[i], res[i+k]) for i < n_first, skipping zero residues."""
    res = np.asarray(res, dtype=np.int64)
    if n_first + k > len(res):
        raise IndexError("not enough trailing residues")
    a = res[:n_first]
    b = res[k:k + n_first]
    keep = (a > 0) & (b > 0)
    flat = np.bincount(a[keep] * q + b[keep], minlength=q * q)
    return flat.reshape(q, q).astype(np.int64)


def neumaier_sum(x):
    return math.fsum(np.asarray(x, dtype=np.float64).tolist())


def neumaier_cumsum(x):
    out = np.empty(len(x), dtype=np.float64)
    s = c = 0.0
    for i, v in enumerate(np.asarray(x, dtype=np.float64).tolist()):
        t = s + v
        if abs(s) >= abs(v):
            c += (s - t) + v
        else:
            c += (v - t) + s
        s = t
        out[i] = s + c
    return out
