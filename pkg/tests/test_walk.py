import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dirwalk.characters import build_table, classic_mod7
from dirwalk.errors import DomainError, InsufficientGrid, PrincipalNotSupported
from dirwalk.primes import angle_stream, default_sieve
from dirwalk.sources import IIDSource
from dirwalk.walk import LOG_FLOOR, abel_identity_residual, log_grid, scaling_exponent, walk

TAB = build_table(7)
nonprincipal = st.sampled_from([1, 2, 3, 4, 5])


def test_hand_example():
    ws = walk(classic_mod7(4), 5)
    assert ws.values.tolist() == [1.0, 0.0, -1.0, -1.0, 0.0]
    assert ws.final == 0.0


def test_empty():
    ws = walk(TAB[1], 0)
    assert len(ws) == 0 and ws.final == 0.0


def test_principal_linear():
    # p = 7 is the only zero; past it the walk gains exactly 1 per step
    ws = walk(TAB[0], 1000, start=5)
    assert np.array_equal(ws.values, np.arange(1, 1001, dtype=float))
    full = walk(TAB[0], 100)
    assert full.final == 99.0


def test_matches_direct_sum():
    c = TAB[1]
    s = angle_stream(c, 300, 5000)
    ws = walk(c, 5000, start=300)
    assert np.allclose(ws.values, np.cumsum(s.cos()), atol=1e-9)


@given(nonprincipal, st.integers(1, 4000), st.integers(1, 10 ** 5))
def test_step_bounds(j, N, start):
    ws = walk(TAB[j], N, start=start)
    d = np.diff(ws.values, prepend=0.0)
    assert np.all(np.abs(d) <= 1.0)
    assert np.all(np.abs(ws.values) <= np.arange(1, N + 1))
    wc = walk(TAB[j], N, start=start, mode="complex")
    assert np.all(np.abs(np.diff(wc.values, prepend=0)) <= 1.0 + 1e-12)


@given(nonprincipal, st.integers(1, 3000))
def test_conjugate_symmetry(j, N):
    c, cc = TAB[j], TAB[j].conj()
    assert np.allclose(walk(c, N).values, walk(cc, N).values, atol=1e-12)
    assert np.allclose(walk(c, N, mode="sin").values, -walk(cc, N, mode="sin").values, atol=1e-12)


@given(nonprincipal, st.integers(1, 5000), st.data())
def test_restart_consistency(j, N, data):
    n = data.draw(st.integers(1, N))
    full = walk(TAB[j], N).values
    assert full[n - 1] == pytest.approx(walk(TAB[j], n).final, abs=1e-9)


@given(nonprincipal, st.lists(st.integers(1, 20_000), min_size=1, max_size=20))
def test_checkpoints_agree_with_full(j, cps):
    full = walk(TAB[j], 20_000).values
    ws = walk(TAB[j], 20_000, checkpoints=cps)
    assert ws.n.tolist() == sorted(set(cps))
    assert np.allclose(ws.values, full[ws.n - 1], atol=1e-9)


def test_checkpoint_bounds():
    with pytest.raises(DomainError):
        walk(TAB[1], 10, checkpoints=[11])
    with pytest.raises(DomainError):
        walk(TAB[1], -1)
    with pytest.raises(ValueError):
        walk(TAB[1], 10, mode="tan")


def test_long_walk_exact_counts():
    # cos takes values in {1, 1/2, -1/2, -1}: every partial is a multiple of 1/2
    ws = walk(TAB[1], 2 * 10 ** 6, checkpoints=[10 ** 6, 2 * 10 ** 6])
    assert np.all(2 * ws.values == np.round(2 * ws.values))


@pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
def test_abel_identity(j):
    assert abel_identity_residual(TAB[j], 1.5, 10 ** 4) < 1e-8
    assert abel_identity_residual(TAB[j], 0.6, 10 ** 5) < 1e-7


def test_abel_principal_sigma2():
    p = default_sieve().primes_by_index(1, 100).astype(float)
    direct = math.fsum(p ** -2.0) - 7.0 ** -2
    assert abel_identity_residual(TAB[0], 2.0, 100) < 1e-15
    # both sides equal the partial prime zeta sum (minus the p = 7 term)
    ws = walk(TAB[0], 100).values
    c = np.diff(ws, prepend=0.0)
    assert math.fsum(c * p ** -2.0) == pytest.approx(direct, rel=1e-15)


def test_abel_residual_is_rounding_not_growth():
    r1 = abel_identity_residual(TAB[1], 0.6, 10 ** 4)
    r2 = abel_identity_residual(TAB[1], 0.6, 10 ** 5)
    assert r2 < 1e-12 * 10 ** 5 and r1 < 1e-12 * 10 ** 4


def test_abel_domain():
    with pytest.raises(DomainError):
        abel_identity_residual(TAB[1], 0.0, 10)
    with pytest.raises(DomainError):
        abel_identity_residual(TAB[1], 1.0, 1)


def test_log_grid():
    g = log_grid(1e2, 1e5, 2)
    assert g.tolist() == [100, 316, 1000, 3162, 10000, 31623, 100000]
    assert len(log_grid(1e2, 1e5, 4)) == 13


def test_insufficient_grid():
    with pytest.raises(InsufficientGrid):
        scaling_exponent(TAB[1], log_grid(1e2, 1e5, 2))


def test_principal_abs_exponent():
    fit = scaling_exponent(TAB[0], log_grid(1e2, 1e5, 4), "abs")
    assert 0.99 <= fit.alpha <= 1.01
    assert fit.method == "abs" and len(fit.residuals) == 13


def test_principal_ensemble_rejected():
    with pytest.raises(PrincipalNotSupported):
        scaling_exponent(TAB[0], log_grid(1e2, 1e4, 4), "ensemble")


def test_iid_exponent():
    fit = scaling_exponent(IIDSource(2, seed=7), log_grid(1e2, 1e5, 4), "ensemble", max_span=2 * 10 ** 7)
    assert abs(fit.alpha - 0.5) < 0.03


def test_abs_floor():
    # windows where C_n is identically zero are floored, not -inf
    fit = scaling_exponent(TAB[3], log_grid(1, 100, 4), "abs")
    assert np.all(fit.y >= LOG_FLOOR)
    assert math.isfinite(fit.alpha)


def test_chi2_exponent_quarter_decade_grid():
    fit = scaling_exponent(TAB[1], log_grid(1e2, 1e5, 4), "ensemble")
    assert 0.4 <= fit.alpha <= 0.6
    assert fit.ci_half_width < 0.05
