"""Counter-based random streams keyed by (seed, purpose, index).

Any sub-result can be regenerated in isolation: the stream for block 17 of
an ensemble does not depend on how many blocks came before it.
"""

import zlib

import numpy as np


def keyed_rng(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed) & (2 ** 64 - 1), zlib.crc32(tag.encode()), int(index)])
    key = ss.generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
