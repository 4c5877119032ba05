import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirwalk import primes as P
from dirwalk.characters import build_table, classic_mod7
from dirwalk.errors import BudgetExceeded, DomainError
from dirwalk.primes import PrimeSieve, SegmentCache, angle_stream, li, nth_prime, pi, primes_in

from oracles import simple_sieve, trial_division_primes

REF = simple_sieve(2 * 10 ** 6)


def test_primes_in_examples():
    assert primes_in(2, 11).tolist() == [2, 3, 5, 7]
    assert primes_in(2, 3).tolist() == [2]
    assert primes_in(0, 30).tolist() == trial_division_primes(30)
    assert len(primes_in(2, 10 ** 6)) == 78498


def test_empty_range_rejected():
    with pytest.raises(DomainError):
        primes_in(10, 10)


def test_matches_reference_sieve(fresh_sieve):
    assert np.array_equal(fresh_sieve.primes_in(2, 2 * 10 ** 6), REF)


@given(st.integers(0, 2 * 10 ** 6 - 2), st.integers(1, 300_000))
def test_arbitrary_window(lo, width):
    hi = min(lo + width, 2 * 10 ** 6)
    if hi <= lo:
        return
    want = REF[(REF >= lo) & (REF < hi)]
    assert np.array_equal(primes_in(lo, hi), want)


@given(st.integers(2, 10 ** 6), st.integers(1, 10 ** 5), st.integers(1, 10 ** 5))
def test_adjacent_ranges_concatenate(a, w1, w2):
    b, c = a + w1, a + w1 + w2
    both = np.concatenate([primes_in(a, b), primes_in(b, c)])
    assert np.array_equal(both, primes_in(a, c))


def test_nth_prime_examples():
    assert nth_prime(1) == 2
    assert nth_prime(4) == 7
    assert nth_prime(10 ** 6) == 15485863
    with pytest.raises(DomainError):
        nth_prime(0)


@given(st.integers(1, 140_000))
def test_pi_inverts_nth_prime(n):
    assert pi(nth_prime(n) + 1) == n
    assert nth_prime(n) == REF[n - 1]


def test_pi_examples():
    assert pi(10) == 4
    assert pi(2) == 0
    assert pi(3) == 1
    assert pi(2.5) == 1
    assert pi(0) == 0
    assert pi(10 ** 6) == 78498


def test_li():
    assert li(2) == 0
    assert li(10) == pytest.approx(5.120435724669807, rel=1e-10)
    from scipy.special import expi
    for x in (3.0, 100.0, 1e5, 1e9):
        assert li(x) == pytest.approx(expi(math.log(x)) - expi(math.log(2)), rel=1e-10)
    r = li(1e6) / pi(1e6)
    assert 1.0 < r < 1.1
    with pytest.raises(DomainError):
        li(1.5)


def test_primes_at_and_by_index():
    idx = [1, 2, 2, 5, 1000, 99_999, 100_000]
    assert P.default_sieve().primes_at(idx).tolist() == [int(REF[i - 1]) for i in idx]
    assert P.default_sieve().primes_by_index(50, 10).tolist() == REF[49:59].tolist()
    with pytest.raises(DomainError):
        P.default_sieve().primes_at([5, 3])


def test_small_segments_and_threads_agree():
    a = PrimeSieve(segment_size=1 << 12).primes_in(1, 300_000)
    b = PrimeSieve(segment_size=1 << 14, threads=3).primes_in(1, 300_000)
    assert np.array_equal(a, b)
    assert np.array_equal(a, REF[REF < 300_000])


def test_index_streams_resume():
    sv = PrimeSieve(segment_size=1 << 12)
    first = sv.primes_by_index(1, 20_000)
    again = sv.primes_by_index(15_000, 5_000)
    assert np.array_equal(first[14_999:19_999], again)
    fresh = PrimeSieve(segment_size=1 << 12).primes_by_index(15_000, 5_000)
    assert np.array_equal(fresh, again)


def test_budget():
    with pytest.raises(BudgetExceeded):
        PrimeSieve(segment_size=1 << 28)
    with pytest.raises(BudgetExceeded):
        PrimeSieve().primes_in(10 ** 11, 10 ** 11 + 100)


def test_segment_cache_roundtrip(tmp_path, monkeypatch):
    cache = SegmentCache(tmp_path)
    sv = PrimeSieve(segment_size=1 << 14, cache=cache)
    a = sv.primes_in(2, 100_000)
    files = list(tmp_path.iterdir())
    assert files
    raw = files[0].read_bytes()
    assert raw[:8] == b"DWPRIMES"
    b = PrimeSieve(segment_size=1 << 14, cache=cache).primes_in(2, 100_000)
    assert np.array_equal(a, b)
    # a damaged file is ignored and rewritten
    files[0].write_bytes(raw[:20])
    c = PrimeSieve(segment_size=1 << 14, cache=cache).primes_in(2, 100_000)
    assert np.array_equal(a, c)
    monkeypatch.setenv(P.CACHE_ENV, str(tmp_path))
    assert P.default_cache() is not None


def test_angle_stream_examples():
    s = angle_stream(classic_mod7(4), 1, 5)
    assert s.codes.tolist() == [0, 3, 3, -1, 0]
    assert s.cos().tolist() == [1.0, -1.0, -1.0, 0.0, 1.0]
    assert s.values[3].is_zero
    p = angle_stream(build_table(7)[0], 1, 3)
    assert p.cos().tolist() == [1.0, 1.0, 1.0]
    one = angle_stream(classic_mod7(2), 1, 1)
    assert one.values[0].angle == pytest.approx(2 * math.pi / 3)


@given(st.integers(1, 200_000), st.integers(0, 3000))
def test_angle_stream_restart(start, count):
    c = build_table(7)[1]
    full = angle_stream(c, 1, start + count - 1).codes
    part = angle_stream(c, start, count).codes
    assert np.array_equal(full[start - 1:], part)
    assert (part < 0).sum() <= 1


def test_angle_stream_matches_eval():
    c = build_table(11)[3]
    s = angle_stream(c, 1000, 500)
    ps = REF[999:1499]
    for code, p in zip(s.codes, ps):
        v = c(int(p))
        assert (code == -1) == v.is_zero
        if code >= 0:
            assert code == v.t
