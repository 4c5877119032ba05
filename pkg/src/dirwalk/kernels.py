"""Backend selection for the hot loops.

The compiled extension is used when it imports; ``DIRWALK_PURE=1`` forces the
numpy fallback (used by the equivalence tests and the benchmark).
"""

import os

from . import _fallback

if os.environ.get("DIRWALK_PURE", "") not in ("", "0"):
    _impl = _fallback
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _fallback

BACKEND = _impl.BACKEND
sieve_segment = _impl.sieve_segment
block_counts = _impl.block_counts
pair_counts = _impl.pair_counts
neumaier_sum = _impl.neumaier_sum
neumaier_cumsum = _impl.neumaier_cumsum


def backends():
    """All importable backends keyed by name."""
    out = {"numpy": _fallback}
    try:
        from . import _kernels
        out["cython"] = _kernels
    except ImportError:
        pass
    return out
