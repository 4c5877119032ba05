"""Segmented prime generation and index-addressed residue streams."""

from __future__ import annotations

import math
import os
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterator

import numpy as np
from scipy import integrate

from . import kernels
from .characters import Character, CharacterTable, UnitValue
from .errors import BudgetExceeded, DomainError

DEFAULT_SEGMENT = 1 << 22
MAX_SEGMENT = 1 << 27
MAX_PRIME = 10 ** 11
CACHE_ENV = "DIRWALK_CACHE_DIR"

_CACHE_MAGIC = b"DWPRIMES"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<8sIIQQQ")


@lru_cache(maxsize=8)
def base_primes(limit: int) -> np.ndarray:
    """Odd primes <= limit as uint32 (the sieving primes for segments)."""
    limit = max(int(limit), 3)
    s = np.ones(limit + 1, dtype=bool)
    s[:2] = False
    s[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if s[i]:
            s[i * i::2 * i] = False
    out = np.flatnonzero(s)[1:].astype(np.uint32)
    out.setflags(write=False)
    return out


class SegmentCache:
    """Sieved segments on disk: versioned header, then little-endian u64 primes."""

    def __init__(self, root):
        self.root = Path(root)

    def path(self, lo: int, hi: int) -> Path:
        return self.root / f"seg_{lo:015d}_{hi:015d}.u64"

    def load(self, lo: int, hi: int) -> np.ndarray | None:
        p = self.path(lo, hi)
        try:
            raw = p.read_bytes()
        except FileNotFoundError:
            return None
        if len(raw) < _CACHE_HEADER.size:
            return None
        magic, version, _, flo, fhi, count = _CACHE_HEADER.unpack_from(raw)
        if magic != _CACHE_MAGIC or version != _CACHE_VERSION or (flo, fhi) != (lo, hi):
            return None
        body = np.frombuffer(raw, dtype="<u8", offset=_CACHE_HEADER.size)
        if len(body) != count:
            return None
        return body.astype(np.uint64)

    def store(self, lo: int, hi: int, primes: np.ndarray) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        p = self.path(lo, hi)
        tmp = p.with_suffix(f".tmp{os.getpid()}")
        with open(tmp, "wb") as fh:
            fh.write(_CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, 0, lo, hi, len(primes)))
            fh.write(np.asarray(primes, dtype="<u8").tobytes())
        os.replace(tmp, p)


def default_cache() -> SegmentCache | None:
    root = os.environ.get(CACHE_ENV)
    return SegmentCache(root) if root else None


class PrimeSieve:
    """Segmented sieve over aligned segments [k*S, (k+1)*S).

    Remembers the prime count below every segment boundary it has passed, so
    index-addressed streams resume without re-counting from 2.
    """

    def __init__(self, segment_size: int = DEFAULT_SEGMENT, max_segment: int = MAX_SEGMENT,
                 cache: SegmentCache | None = None, threads: int = 1):
        if segment_size > max_segment:
            raise BudgetExceeded(f"segment of {segment_size} exceeds budget {max_segment}")
        self.segment_size = int(segment_size)
        self.cache = cache
        self.threads = max(1, int(threads))
        self._pi_at = {0: 0}  # boundary -> #primes below it

    def _sieve(self, lo: int, hi: int) -> np.ndarray:
        if hi > MAX_PRIME:
            raise BudgetExceeded(f"primes beyond {MAX_PRIME:.0e} are out of budget")
        if self.cache is not None:
            hit = self.cache.load(lo, hi)
            if hit is not None:
                return hit
        base = base_primes(math.isqrt(max(hi - 1, 4)) + 1)
        primes = kernels.sieve_segment(lo, hi, base)
        if self.cache is not None:
            self.cache.store(lo, hi, primes)
        return primes

    def segments(self, lo: int, hi: int) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (aligned segment start, primes in [max(lo, s), min(hi, e)))."""
        lo, hi = max(int(lo), 0), int(hi)
        S = self.segment_size
        starts = range(lo - lo % S, hi, S)

        def work(s):
            return self._sieve(s, s + S)

        def clip(s, arr):
            if s < lo or s + S > hi:
                arr = arr[(arr >= lo) & (arr < hi)]
            return arr

        if self.threads > 1:
            batch = 2 * self.threads
            with ThreadPoolExecutor(self.threads) as ex:
                for i in range(0, len(starts), batch):
                    group = starts[i:i + batch]
                    # map keeps ascending order
                    for s, arr in zip(group, ex.map(work, group)):
                        self._note(s, arr)
                        yield s, clip(s, arr)
        else:
            for s in starts:
                arr = work(s)
                self._note(s, arr)
                yield s, clip(s, arr)

    def _note(self, s: int, arr: np.ndarray) -> None:
        below = self._pi_at.get(s)
        if below is not None:
            self._pi_at[s + self.segment_size] = below + len(arr)

    def primes_in(self, lo: int, hi: int) -> np.ndarray:
        if lo >= hi:
            raise DomainError(f"empty range [{lo}, {hi})")
        parts = [a for _, a in self.segments(lo, hi)]
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)

    def _resume_point(self, n: int) -> tuple[int, int]:
        """Largest known boundary with fewer than n primes below it."""
        best = (0, 0)
        for b, c in self._pi_at.items():
            if c is not None and c < n and b > best[0]:
                best = (b, c)
        return best

    def count_below(self, x: int) -> int:
        """Number of primes < x."""
        x = int(x)
        S = self.segment_size
        b0 = x - x % S
        known = [(b, c) for b, c in self._pi_at.items() if c is not None and b <= b0]
        b, c = max(known)
        for s, arr in self.segments(b, x):
            c += len(arr)
        return c

    def iter_index_chunks(self, start_index: int, count: int) -> Iterator[np.ndarray]:
        """Primes p_start .. p_{start+count-1} (1-based, p_1 = 2), chunk by chunk."""
        if start_index < 1:
            raise DomainError("prime indices start at 1")
        if count <= 0:
            return
        lo_b, below = self._resume_point(start_index)
        want = count
        n = below  # index of the last prime before the current segment
        for s, arr in self.segments(lo_b, MAX_PRIME):
            seg_first = n + 1
            n += len(arr)
            if n < start_index:
                continue
            a = max(start_index - seg_first, 0)
            chunk = arr[a:a + want]
            want -= len(chunk)
            yield chunk
            if want == 0:
                return

    def nth_prime(self, n: int) -> int:
        if n < 1:
            raise DomainError("n must be >= 1")
        return int(next(self.iter_index_chunks(n, 1))[0])

    def primes_at(self, indices) -> np.ndarray:
        """p_n for each n in a non-decreasing index sequence, in one pass."""
        idx = np.asarray(indices, dtype=np.int64)
        if len(idx) == 0:
            return np.empty(0, dtype=np.uint64)
        if (np.diff(idx) < 0).any():
            raise DomainError("indices must be non-decreasing")
        first = int(idx[0])
        out = np.empty(len(idx), dtype=np.uint64)
        g0 = first
        done = 0
        for chunk in self.iter_index_chunks(first, int(idx[-1]) - first + 1):
            g1 = g0 + len(chunk)
            hi = np.searchsorted(idx, g1, side="left")
            out[done:hi] = chunk[idx[done:hi] - g0]
            done = hi
            g0 = g1
        return out

    def primes_by_index(self, start_index: int, count: int) -> np.ndarray:
        parts = list(self.iter_index_chunks(start_index, count))
        return np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)


_DEFAULT: PrimeSieve | None = None


def default_sieve() -> PrimeSieve:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = PrimeSieve(cache=default_cache())
    return _DEFAULT


def set_default_sieve(sieve: PrimeSieve) -> None:
    global _DEFAULT
    _DEFAULT = sieve


def primes_in(lo: int, hi: int, sieve: PrimeSieve | None = None) -> np.ndarray:
    """Ascending primes in [lo, hi)."""
    return (sieve or default_sieve()).primes_in(lo, hi)


def nth_prime(n: int, sieve: PrimeSieve | None = None) -> int:
    return (sieve or default_sieve()).nth_prime(n)


def pi(x: float, sieve: PrimeSieve | None = None) -> int:
    """Number of primes strictly below x."""
    if x < 0:
        raise DomainError("x must be >= 0")
    return (sieve or default_sieve()).count_below(math.ceil(x))


def li(x: float) -> float:
    """Offset logarithmic integral, the integral of 1/log t from 2 to x."""
    if x < 2:
        raise DomainError("li is defined here for x >= 2")
    if x == 2:
        return 0.0
    # substitute t = e^u: integrand e^u / u is smooth on [log 2, log x]
    val, _ = integrate.quad(lambda u: math.exp(u) / u, math.log(2.0), math.log(x),
                            epsabs=0.0, epsrel=1e-13, limit=200)
    return val


# --- residue / angle streams -------------------------------------------------

STREAM_CHUNK = 1 << 20


def iter_log_codes(table: CharacterTable, start_index: int, count: int,
                   sieve: PrimeSieve | None = None) -> Iterator[np.ndarray]:
    """Discrete logs of p_n mod q (int16, -1 at p = q), chunk by chunk."""
    if table.q >= 1 << 15:
        raise BudgetExceeded("residue streams store codes as int16; q must be < 32768")
    im = table.index_map.astype(np.int16)
    for arr in (sieve or default_sieve()).iter_index_chunks(start_index, count):
        yield im[(arr % np.uint64(table.q)).astype(np.intp)]


def iter_residues(q: int, start_index: int, count: int,
                  sieve: PrimeSieve | None = None) -> Iterator[np.ndarray]:
    """p_n mod q as int16, chunk by chunk."""
    for arr in (sieve or default_sieve()).iter_index_chunks(start_index, count):
        yield (arr % np.uint64(q)).astype(np.int16)


def log_codes_to_angles(codes: np.ndarray, char: Character) -> np.ndarray:
    out = (codes.astype(np.int64) * char.j) % char.phi
    out[codes < 0] = -1
    return out.astype(np.int16)


def iter_angle_codes(char: Character, start_index: int, count: int,
                     sieve: PrimeSieve | None = None) -> Iterator[np.ndarray]:
    for codes in iter_log_codes(char.table, start_index, count, sieve):
        yield log_codes_to_angles(codes, char)


def log_codes(table: CharacterTable, start_index: int, count: int,
              sieve: PrimeSieve | None = None) -> np.ndarray:
    parts = list(iter_log_codes(table, start_index, count, sieve))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.int16)


@dataclass(frozen=True, eq=False)
class AngleStream:
    """Angle indices of chi(p_n) for n = start_index .. start_index + count - 1."""

    character: Character
    start_index: int
    count: int
    codes: np.ndarray  # int16 angle index, -1 where chi(p) = 0

    def __len__(self):
        return self.count

    @property
    def values(self) -> list[UnitValue]:
        phi = self.character.phi
        return [UnitValue.zero(phi) if c < 0 else UnitValue.root(int(c), phi) for c in self.codes]

    def cos(self) -> np.ndarray:
        from .characters import unit_cos
        c = unit_cos(self.character.phi)[np.maximum(self.codes, 0)]
        c[self.codes < 0] = 0.0
        return c


def angle_stream(char: Character, start_index: int, count: int,
                 sieve: PrimeSieve | None = None) -> AngleStream:
    if start_index < 1 or count < 0:
        raise DomainError("need start_index >= 1 and count >= 0")
    parts = list(iter_angle_codes(char, start_index, count, sieve))
    codes = np.concatenate(parts) if parts else np.empty(0, dtype=np.int16)
    codes.setflags(write=False)
    return AngleStream(char, start_index, count, codes)
