import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mswso.discrete import (CoeffSeq, RegimeError, ZVec, apply, block_status, discrete_annulus,
                            finite_section, fredholm_probe, index_of, kernel_vector, ladder_signature,
                            range_residual, right_inverse_apply, right_inverse_bound, shoot_solve,
                            sigma_min, singular_values, verify_block, window_residual)
from mswso.errors import ValidationError
from mswso.verdicts import Status

UP = CoeffSeq.step(1.0, 2.0)    # a(k) = 1 for k < 0, 2 for k >= 0
DOWN = CoeffSeq.step(2.0, 1.0)


def _dense_sigma(seq, lam, N):
    return np.linalg.svd(finite_section(seq, lam, N).dense(), compute_uv=False)


def test_coeff_seq_validation():
    with pytest.raises(ValidationError):
        CoeffSeq(np.ones(4), 1.0, 1.0)
    with pytest.raises(ValidationError):
        CoeffSeq(np.array([1.0, 0.0, 1.0]), 1.0, 1.0)
    with pytest.raises(ValidationError):
        CoeffSeq(np.ones(3), 0.0, 1.0)
    assert UP(-1) == 1.0 and UP(0) == 2.0 and UP(-1000) == 1.0 and UP(1000) == 2.0


def test_discrete_annulus():
    assert (discrete_annulus(UP).r, discrete_annulus(UP).R) == (1.0, 2.0)
    a = discrete_annulus(CoeffSeq.step(3.0, 3.0))
    assert (a.r, a.R) == (3.0, 3.0)
    assert discrete_annulus(DOWN) == discrete_annulus(UP)


def test_annulus_matches_windowed_geometric_means():
    vals = np.abs(UP.on(-500, 500))
    logs = np.log(vals)
    means = [np.exp(np.mean(logs[i:i + 100])) for i in range(0, 900)]
    assert min(means) == pytest.approx(1.0) and max(means) == pytest.approx(2.0)


# -- kernel vectors --------------------------------------------------------------

def test_kernel_vector_example():
    u = kernel_vector(UP, 1.5)
    assert u[0] == 1.0
    assert u[1] == pytest.approx(0.75) and u[2] == pytest.approx(0.5625)
    assert u[-1] == pytest.approx(1 / 1.5) and u[-2] == pytest.approx((1 / 1.5) ** 2)
    res = apply(UP, 1.5, u)
    assert np.max(np.abs(res.values[1:-1])) < 1e-15


def test_single_small_singular_value_in_right_regime():
    s = _dense_sigma(UP, 1.5, 200)
    assert np.sum(s < 1e-8) == 1


def test_no_kernel_outside_right_regime():
    assert kernel_vector(UP, 0.5) is None
    assert kernel_vector(UP, 2.5) is None
    assert kernel_vector(DOWN, 1.5) is None
    # interior probe: no localized null vector below r
    ker, coker, _ = fredholm_probe(finite_section(UP, 0.5, 100))
    assert ker == 0 and coker == 0


def test_kernel_vector_rejects_circle():
    with pytest.raises(RegimeError):
        kernel_vector(UP, 2.0)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.3, 5), min_size=11, max_size=11), st.floats(0.1, 0.9), st.floats(1.1, 4))
def test_kernel_decay(vals, am, ratio):
    seq = CoeffSeq(np.array(vals), am, am * ratio * ratio)
    lam = am * ratio
    u = kernel_vector(seq, lam)
    q_plus, q_minus = abs(lam / seq.a_plus), abs(seq.a_minus / lam)
    for k in range(seq.K + 1, u.stop - 1):
        assert abs(u[k + 1]) <= q_plus * abs(u[k]) * (1 + 1e-12)
    for k in range(u.start + 1, -seq.K):
        assert abs(u[k - 1]) <= q_minus * abs(u[k]) * (1 + 1e-12)


# -- right inverse ---------------------------------------------------------------

def test_right_inverse_example():
    u = right_inverse_apply(UP, 1.5, ZVec.delta(0))
    assert (u[1], u[2], u[3]) == (0.5, 0.375, 0.28125)
    assert all(u[k] == 0 for k in range(-5, 1))
    assert window_residual(UP, 1.5, u, ZVec.delta(0)) < 1e-14


def test_right_inverse_of_zero():
    u = right_inverse_apply(UP, 1.5, ZVec(np.zeros(5), -2))
    assert np.all(u.values == 0)


def test_right_inverse_differs_by_kernel_multiple():
    rng = np.random.default_rng(7)
    v = ZVec(rng.standard_normal(9), -4)
    u = right_inverse_apply(UP, 1.5, apply(UP, 1.5, v))
    kv = kernel_vector(UP, 1.5)
    lo, hi = min(u.start, kv.start), max(u.stop, kv.stop)
    d = u.on(lo, hi) - v.on(lo, hi)
    k = kv.on(lo, hi)
    c = np.vdot(k, d) / np.vdot(k, k)
    assert np.max(np.abs(d - c * k)) < 1e-12


def test_right_inverse_bound_value():
    assert right_inverse_bound(UP, 1.5) == pytest.approx(2.0)


def test_right_inverse_regime_check():
    with pytest.raises(RegimeError):
        right_inverse_apply(DOWN, 1.5, ZVec.delta(0))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=1, max_size=30), st.integers(-15, 15),
       st.floats(1.05, 1.95), st.floats(0, 6.3))
def test_right_inverse_contract(fvals, start, mod, phase):
    lam = mod * np.exp(1j * phase)
    f = ZVec(np.array(fvals, dtype=complex), start)
    u = right_inverse_apply(UP, lam, f)
    assert window_residual(UP, lam, u, f) <= 1e-12 * (1 + f.norm(np.inf))
    assert u.norm() <= right_inverse_bound(UP, lam) * f.norm() * (1 + 1e-12) + 1e-300


# -- shooting --------------------------------------------------------------------

def test_shoot_recovers_delta():
    v = ZVec.delta(0)
    u, mismatch = shoot_solve(DOWN, 1.5, apply(DOWN, 1.5, v))
    assert mismatch < 1e-10
    assert np.linalg.norm(u.on(-400, 400) - v.on(-400, 400)) < 1e-8


def test_shoot_mismatch_for_delta_rhs():
    for N in (50, 100, 200, 400):
        _, mismatch = shoot_solve(DOWN, 1.5, ZVec.delta(0), N=N)
        assert mismatch > 1e-2


def test_delta_is_far_from_range():
    # least-squares distance from delta_0 to the image of a finite section
    dists = [range_residual(DOWN, 1.5, ZVec.delta(0), N) for N in (50, 100, 200)]
    assert min(dists) > 1e-2
    assert max(dists) - min(dists) < 1e-10


def test_shoot_zero():
    u, mismatch = shoot_solve(DOWN, 1.5, ZVec(np.zeros(3), -1))
    assert mismatch == 0 and np.all(u.values == 0)


# -- finite sections -------------------------------------------------------------

def test_finite_section_layout():
    M = finite_section(UP, 1.5, 4).dense()
    assert M.shape == (9, 9)
    assert np.all(np.diag(M) == -1.5)
    assert list(np.diag(M, 1).real) == [1, 1, 1, 1, 2, 2, 2, 2]
    with pytest.raises(ValidationError):
        finite_section(UP, 1.5, 3)


@pytest.mark.parametrize("lam", [3.0, 2.0, 1.5, 0.5, 1.5j, 2.5 + 0.3j])
def test_sigma_min_matches_dense_svd(lam):
    for N in (20, 60):
        s = _dense_sigma(UP, lam, N)
        sec = finite_section(UP, lam, N)
        assert sigma_min(sec) == pytest.approx(s[-1], rel=1e-8, abs=1e-300)
        assert np.array_equal(singular_values(sec), s[::-1])


def test_sigma_min_bounded_outside():
    for N in (50, 100, 200):
        assert sigma_min(finite_section(UP, 3.0, N)) >= 0.9


def test_sigma_min_decays_on_circle():
    vals = [sigma_min(finite_section(UP, 2.0, N)) for N in (50, 100, 200, 400)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 0.2 * vals[0]


def test_second_singular_value_bounded_in_right_regime():
    # the truncated kernel vector leaves sigma_min ~ 0.75**N
    for N in (100, 200):
        s = np.sort(_dense_sigma(UP, 1.5, N))
        assert s[0] < 1e-8 and s[1] > 0.1


@pytest.mark.parametrize("lam", [3.0, 2.0, 1.5])
def test_sigma_min_non_increasing_in_n(lam):
    vals = [sigma_min(finite_section(UP, lam, N)) for N in (10, 20, 50, 100, 200)]
    assert all(b <= a * (1 + 1e-9) for a, b in zip(vals, vals[1:]))


def test_index_examples():
    assert index_of(UP, 1.5) == 1
    assert index_of(DOWN, 1.5) == -1
    assert index_of(UP, 2.5) == 0 and index_of(UP, 0.5) == 0
    with pytest.raises(RegimeError):
        index_of(UP, 2.0)
    with pytest.raises(RegimeError):
        index_of(UP, 0.0)


@pytest.mark.parametrize("seq, lam, expected", [(UP, 1.5, 1), (DOWN, 1.5, -1), (UP, 2.5, 0), (UP, 0.5, 0)])
def test_index_matches_finite_section_counts(seq, lam, expected):
    ker, coker, _ = fredholm_probe(finite_section(seq, lam, 200))
    assert ker - coker == expected


@settings(max_examples=200, deadline=None)
@given(st.floats(0.2, 4), st.floats(0.2, 4), st.floats(0.05, 5))
def test_index_constant_on_subrings(am, ap, lm):
    seq = CoeffSeq.step(am, ap)
    lo, hi = sorted((am, ap))
    if min(abs(lm - am), abs(lm - ap)) < 1e-6:
        return
    region = 0 if lm < lo else 1 if lm < hi else 2
    probe = [lo / 2, (lo + hi) / 2, hi * 2][region]
    assert index_of(seq, lm) == index_of(seq, probe)


def test_ladder_signatures():
    assert ladder_signature([1.0, 0.99, 0.98, 0.98]) == "bounded_below"
    assert ladder_signature([0.06, 0.03, 0.015, 0.0078]) == "nonclosed"
    assert ladder_signature([0.06, 0.03, 0.026, 0.025]) == "gray"


@pytest.mark.parametrize("seq, lam, predicted", [
    (CoeffSeq.step(1.0, 2.0), 1.5, Status.RIGHT_INVERTIBLE),
    (CoeffSeq.step(3.0, 2.0), 2.5, Status.LEFT_INVERTIBLE),
    (CoeffSeq.step(1.0, 2.0), 2.0, Status.ON_CIRCLE),
    (CoeffSeq.step(1.0, 2.0), 3.0, Status.OUTSIDE_SPECTRUM),
    (CoeffSeq.step(1.0, 2.0), 0.5, Status.OUTSIDE_SPECTRUM),
])
def test_verify_block_agrees(seq, lam, predicted):
    rep = verify_block(seq, lam, predicted)
    assert rep.agreement, rep.diagnostics
    assert block_status(seq, lam) is predicted


def test_verify_block_detects_wrong_prediction():
    rep = verify_block(CoeffSeq.step(1.0, 2.0), 1.5, Status.LEFT_INVERTIBLE)
    assert not rep.agreement and rep.diagnostics


def test_oracle_report_serialization():
    rep = verify_block(CoeffSeq.step(1.0, 2.0), 1.5, Status.RIGHT_INVERTIBLE, truncations=(100, 200))
    d = rep.to_dict()
    assert d["observed"]["index_estimate"] == 1 and d["agreement"]
    assert rep.ladder_csv().splitlines()[:2] == ["# mswso-ladder v1", "N,sigma_min,second_smallest"]
