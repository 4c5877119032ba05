import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from dirwalk import _fallback, kernels
from dirwalk.primes import base_primes

from oracles import simple_sieve

BACKENDS = kernels.backends()
needs_ext = pytest.mark.skipif("cython" not in BACKENDS, reason="extension not built")
REF = simple_sieve(1 << 20)


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("lo,hi", [(0, 100), (2, 3), (10, 11), (13, 14), (0, 1 << 20), (999_983, 1 << 20), (1, 2)])
def test_sieve_segment_reference(name, lo, hi):
    k = BACKENDS[name]
    got = k.sieve_segment(lo, hi, base_primes(math.isqrt(hi) + 1))
    assert got.dtype == np.uint64
    assert got.tolist() == REF[(REF >= lo) & (REF < hi)].tolist()


@needs_ext
@given(st.integers(0, 10 ** 12), st.integers(1, 50_000))
def test_sieve_backends_agree(lo, width):
    hi = lo + width
    base = base_primes(math.isqrt(hi) + 1)
    a = BACKENDS["cython"].sieve_segment(lo, hi, base)
    b = _fallback.sieve_segment(lo, hi, base)
    assert np.array_equal(a, b)


@needs_ext
@given(hnp.arrays(np.int16, st.integers(1, 400), elements=st.integers(-1, 5)), st.data())
def test_block_counts_agree(codes, data):
    n = len(codes)
    m = data.draw(st.integers(0, 10))
    s = np.array(sorted(data.draw(st.lists(st.integers(0, n), min_size=m, max_size=m))), dtype=np.int64)
    e = np.minimum(s + data.draw(st.integers(0, n)), n).astype(np.int64)
    a = BACKENDS["cython"].block_counts(codes, s, e, 6)
    b = _fallback.block_counts(codes, s, e, 6)
    assert np.array_equal(a, b)
    for i in range(m):
        blk = codes[s[i]:e[i]]
        assert a[i].sum() == (blk >= 0).sum()


@needs_ext
@given(hnp.arrays(np.int16, st.integers(2, 500), elements=st.integers(0, 6)), st.integers(1, 5))
def test_pair_counts_agree(res, k):
    if len(res) <= k:
        return
    nf = len(res) - k
    a = BACKENDS["cython"].pair_counts(res, k, 7, nf)
    b = _fallback.pair_counts(res, k, 7, nf)
    assert np.array_equal(a, b)
    assert a[0].sum() == 0 and a[:, 0].sum() == 0


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_neumaier_beats_naive(name):
    k = BACKENDS[name]
    x = np.array([1.0, 1e100, 1.0, -1e100] * 1000)
    assert k.neumaier_sum(x) == 2000.0
    cs = k.neumaier_cumsum(x)
    assert cs[-1] == 2000.0
    assert cs[3] == 2.0


@needs_ext
@given(hnp.arrays(np.float64, st.integers(0, 300), elements=st.floats(-1e6, 1e6)))
def test_neumaier_agree(x):
    a = BACKENDS["cython"].neumaier_cumsum(x)
    b = _fallback.neumaier_cumsum(x)
    assert np.allclose(a, b, rtol=1e-15, atol=1e-9)
    assert BACKENDS["cython"].neumaier_sum(x) == pytest.approx(math.fsum(x), abs=1e-9)


def test_pure_env_selects_fallback():
    code = "from dirwalk import kernels; print(kernels.BACKEND)"
    env = dict(os.environ, DIRWALK_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
