"""Step sources for walks and ensembles.

A source emits integer codes along the prime index and maps each code to a
step value.  For a character the code is the discrete log of p_n mod q, so one
pass over the primes serves every character of the same modulus.
"""

from __future__ import annotations

from typing import Iterator

import numpy as np

from .characters import Character, _root
from .primes import PrimeSieve, default_sieve, iter_log_codes
from .rng import keyed_rng

MODES = ("cos", "sin", "complex")


class CharacterSource:
    def __init__(self, char: Character, sieve: PrimeSieve | None = None):
        self.char = char
        self.sieve = sieve
        self.nsym = char.phi

    @property
    def is_principal(self) -> bool:
        return self.char.is_principal

    def chunks(self, start_index: int, count: int) -> Iterator[np.ndarray]:
        return iter_log_codes(self.char.table, start_index, count, self.sieve)

    def weights(self, mode: str = "cos") -> np.ndarray:
        return character_weights(self.char, mode)

    def primes_at(self, indices) -> np.ndarray:
        return (self.sieve or default_sieve()).primes_at(indices)

    def describe(self) -> dict:
        return {"kind": "character", "q": self.char.q, "j": self.char.j}


def character_weights(char: Character, mode: str = "cos") -> np.ndarray:
    """Step value for each discrete-log code: chi(g^l) projected per mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    vals = [_root(char.j * l, char.phi) for l in range(char.phi)]
    if mode == "cos":
        return np.array([v.real for v in vals])
    if mode == "sin":
        return np.array([v.imag for v in vals])
    return np.array(vals)


class IIDSource:
    """Independent uniform draws over ``nsym`` equally spaced unit roots.

    ``nsym = 2`` gives i.i.d. +-1 steps.  Draws are generated in aligned
    blocks keyed by block number, so any index window is reproducible.
    """

    BLOCK = 1 << 16
    is_principal = False

    def __init__(self, nsym: int = 2, seed: int = 0):
        self.nsym = int(nsym)
        self.seed = int(seed)

    def _block(self, b: int) -> np.ndarray:
        rng = keyed_rng(self.seed, "iid-steps", b)
        return rng.integers(0, self.nsym, self.BLOCK, dtype=np.int16)

    def chunks(self, start_index: int, count: int) -> Iterator[np.ndarray]:
        i0 = start_index - 1
        i1 = i0 + count
        for b in range(i0 // self.BLOCK, (i1 - 1) // self.BLOCK + 1 if count > 0 else 0):
            blk = self._block(b)
            lo = max(i0 - b * self.BLOCK, 0)
            hi = min(i1 - b * self.BLOCK, self.BLOCK)
            yield blk[lo:hi]

    def weights(self, mode: str = "cos") -> np.ndarray:
        vals = [_root(t, self.nsym) for t in range(self.nsym)]
        if mode == "cos":
            return np.array([v.real for v in vals])
        if mode == "sin":
            return np.array([v.imag for v in vals])
        return np.array(vals)

    def primes_at(self, indices) -> np.ndarray:
        return default_sieve().primes_at(indices)

    def describe(self) -> dict:
        return {"kind": "iid", "nsym": self.nsym, "seed": self.seed}


def as_source(obj, sieve: PrimeSieve | None = None):
    if isinstance(obj, Character):
        return CharacterSource(obj, sieve)
    return obj
