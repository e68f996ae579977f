import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kober.errors import DomainError, ProposalDomainError, TailDivergence
from kober.matrix_ops import (
    ChainSpec,
    MatrixOpParams,
    MCConfig,
    det_power_times_exp,
    exp_neg_trace,
    matrix_callback,
    wishart_density,
)
from kober.mtransform import (
    MPoint,
    gamma_ratio_first,
    gamma_ratio_second,
    mellin_numeric_1d,
    mtransform_mc,
    mtransform_mc_operator,
    mtransform_quadrature,
    operator_curve_1d,
    verify_transform,
)
from kober.scalar_ops import callback, exp_decay, power_times_exp

# frozen reference values
SQRT_PI = 1.7724538509055159  # Mellin transform of e^-x at s = 1/2


# ---------------------------------------------------------------------------
# numerical Mellin transform


def test_mellin_exp_integer_moment():
    np.testing.assert_allclose(mellin_numeric_1d(exp_decay(1.0), 3.0), 2.0, rtol=1e-11)


def test_mellin_exp_half_moment():
    np.testing.assert_allclose(
        mellin_numeric_1d(exp_decay(1.0), 0.5), SQRT_PI, rtol=1e-11
    )


def test_mellin_indicator():
    ind = callback(
        lambda v: np.where(np.asarray(v) <= 1.0, 1.0, 0.0),
        tail=("compact", 0.0, 1.0),
    )
    np.testing.assert_allclose(mellin_numeric_1d(ind, 2.0), 0.5, rtol=1e-12)


def test_mellin_power_decay_tail():
    # int x^(s-1) (1+x)^-3 dx = B(s, 3-s)
    f = callback(lambda v: (1.0 + np.asarray(v)) ** -3.0, tail=("power", 3.0))
    for s in (0.4, 1.2, 2.3):
        want = math.gamma(s) * math.gamma(3.0 - s) / math.gamma(3.0)
        np.testing.assert_allclose(mellin_numeric_1d(f, s), want, rtol=1e-9)


@settings(deadline=None, max_examples=25)
@given(
    st.floats(-0.4, 2.0),
    st.floats(0.4, 3.0),
    st.floats(0.2, 2.5),
)
def test_mellin_matches_closed_form(lam, rate, s):
    if s + lam < 0.1:
        return
    f = power_times_exp(lam, rate)
    want = math.gamma(s + lam) * rate ** -(s + lam)
    np.testing.assert_allclose(mellin_numeric_1d(f, s), want, rtol=1e-9)


def test_mellin_domain_and_tail_errors():
    with pytest.raises(DomainError):
        mellin_numeric_1d(power_times_exp(0.5, 1.0), -0.5)
    with pytest.raises(TailDivergence):
        mellin_numeric_1d(
            callback(lambda v: (1.0 + np.asarray(v)) ** -2.0, tail=("power", 2.0)), 2.5
        )
    with pytest.raises(TailDivergence):
        mellin_numeric_1d(callback(lambda v: np.ones(np.shape(v))), 1.0)


# ---------------------------------------------------------------------------
# transform points and gamma ratios


def test_mpoint_broadcast_and_length():
    prm = MatrixOpParams("second", 1, 2, ((1.5, 0.7), (2.2, 1.1)))
    val = gamma_ratio_second(prm, 1.3)
    want = gamma_ratio_second(prm, (1.3, 1.3))
    assert val == want
    with pytest.raises(DomainError):
        gamma_ratio_second(prm, (1.0, 1.0, 1.0))


@settings(deadline=None, max_examples=40)
@given(st.floats(0.2, 3.0), st.floats(0.1, 2.5), st.floats(0.05, 2.5))
def test_gamma_ratios_reduce_to_scalar_gammas(zeta, alpha, s):
    second = MatrixOpParams("second", 1, 1, ((zeta, alpha),))
    np.testing.assert_allclose(
        gamma_ratio_second(second, s),
        math.gamma(zeta + s) / math.gamma(zeta + s + alpha),
        rtol=1e-12,
    )
    if s < zeta + 1.0 - 1e-6:
        first = MatrixOpParams("first", 1, 1, ((zeta, alpha),))
        np.testing.assert_allclose(
            gamma_ratio_first(first, s),
            math.gamma(zeta + 1.0 - s) / math.gamma(zeta + 1.0 - s + alpha),
            rtol=1e-12,
        )


def test_domain_bounds_raise():
    first = MatrixOpParams("first", 2, 1, ((1.5, 0.7),))
    with pytest.raises(DomainError):
        gamma_ratio_first(first, 2.5)  # s >= zeta + 1
    second = MatrixOpParams("second", 2, 1, ((0.8, 0.7),))
    with pytest.raises(DomainError):
        gamma_ratio_second(second, -0.4)  # zeta + s <= (p-1)/2
    with pytest.raises(DomainError):
        gamma_ratio_second(first, 1.0)  # wrong kind


# ---------------------------------------------------------------------------
# p = 1 quadrature routes against the closed form


SECOND_1 = MatrixOpParams("second", 1, 1, ((1.5, 0.7),))
FIRST_1 = MatrixOpParams("first", 1, 1, ((1.5, 0.7),))


def test_second_kind_curve_route_k1():
    g = operator_curve_1d("second", 1.5, 0.7, exp_decay(1.0))
    for s in (0.6, 1.3, 2.2):
        want = gamma_ratio_second(SECOND_1, s) * math.gamma(s)
        np.testing.assert_allclose(mellin_numeric_1d(g, s), want, rtol=1e-9)


def test_first_kind_curve_route_k1():
    g = operator_curve_1d("first", 1.5, 0.7, exp_decay(1.0))
    for s in (0.6, 1.3, 2.2):
        want = gamma_ratio_first(FIRST_1, s) * math.gamma(s)
        np.testing.assert_allclose(mellin_numeric_1d(g, s), want, rtol=1e-9)


def test_tensor_route_matches_curve_route_k1():
    f = exp_neg_trace(1, 1)
    for prm in (SECOND_1, FIRST_1):
        for s in (0.8, 1.7):
            val, delta = mtransform_quadrature(prm, f, s)
            curve = mellin_numeric_1d(
                operator_curve_1d(prm.kind, 1.5, 0.7, exp_decay(1.0)), s
            )
            np.testing.assert_allclose(val, curve, rtol=1e-8)
            assert delta < 1e-6 * abs(val)


def test_tensor_route_wishart_slot():
    # rate-1/2 slot function exercises the decay horizon handling
    f = wishart_density(1, 3.0, 1)
    prm = MatrixOpParams("first", 1, 1, ((1.9, 0.8),))
    s = 1.4
    val, _ = mtransform_quadrature(prm, f, s)
    want = gamma_ratio_first(prm, s) * f.mellin((s,))
    np.testing.assert_allclose(val, want, rtol=1e-10)


def test_tensor_route_k2_separable():
    prm2 = MatrixOpParams("second", 1, 2, ((1.5, 0.7), (2.2, 1.1)))
    prm1 = MatrixOpParams("first", 1, 2, ((1.5, 0.7), (2.2, 1.1)))
    f = exp_neg_trace(1, 2)
    s = (1.3, 0.8)
    for prm, ratio_fn in ((prm2, gamma_ratio_second), (prm1, gamma_ratio_first)):
        want = ratio_fn(prm, s) * math.gamma(s[0]) * math.gamma(s[1])
        val, delta = mtransform_quadrature(prm, f, s)
        np.testing.assert_allclose(val, want, rtol=1e-8)
        assert delta < 1e-6 * abs(val)


def test_tensor_route_k2_joint_not_separable():
    # f(v1, v2) = (v1 + v2) e^(-v1-v2) has transform
    # Gamma(s1+1) Gamma(s2) + Gamma(s1) Gamma(s2+1)
    def fn(v1, v2):
        x1 = v1[..., 0, 0]
        x2 = v2[..., 0, 0]
        return (x1 + x2) * np.exp(-x1 - x2)

    f = matrix_callback(1, fn, k=2)
    prm = MatrixOpParams("second", 1, 2, ((1.6, 0.9), (2.1, 0.6)))
    s = (1.2, 0.9)
    want = gamma_ratio_second(prm, s) * (
        math.gamma(s[0] + 1.0) * math.gamma(s[1])
        + math.gamma(s[0]) * math.gamma(s[1] + 1.0)
    )
    axes = [exp_decay(1.0), exp_decay(1.0)]
    val, delta = mtransform_quadrature(prm, f, s, axes=axes)
    np.testing.assert_allclose(val, want, rtol=1e-8)
    assert delta < 1e-6 * abs(val)


def test_narrow_bump_recovers_kernel_transform():
    # a unit-mass bump at 1 turns the operator output into the kernel's own
    # transform, up to the bump width
    delta = 0.02

    def bump(v):
        # cos^2 half-angle form stays exact at the support edge
        v = np.asarray(v, dtype=float)
        inside = np.abs(v - 1.0) < delta
        out = np.zeros(v.shape)
        out[inside] = np.cos(math.pi * (v[inside] - 1.0) / (2.0 * delta)) ** 2 / delta
        return out

    f = callback(bump, tail=("compact", 1.0 - delta, 1.0 + delta))
    g = operator_curve_1d("second", 1.6, 0.8, f)
    prm = MatrixOpParams("second", 1, 1, ((1.6, 0.8),))
    for s in (0.7, 1.5, 2.4):
        lhs = mellin_numeric_1d(g, s)
        np.testing.assert_allclose(lhs, gamma_ratio_second(prm, s), rtol=1e-2)


# ---------------------------------------------------------------------------
# the verification driver


def test_verify_second_kind_quadrature_grid():
    f = exp_neg_trace(1, 1)
    reports = verify_transform("second", SECOND_1, f, [0.6, 0.9, 1.3, 1.8, 2.4])
    assert [r.status for r in reports] == ["pass"] * 5
    assert all(abs(r.ratio - 1.0) < 1e-6 for r in reports)


def test_verify_first_kind_domain_enforced():
    f = exp_neg_trace(1, 1)
    reports = verify_transform("first", FIRST_1, f, [0.4, 1.2, 2.0, 2.6])
    assert [r.status for r in reports] == ["pass", "pass", "pass", "domain-error"]
    assert "zeta + 1" in reports[-1].note


def test_verify_kind_mismatch_raises():
    with pytest.raises(DomainError):
        verify_transform("first", SECOND_1, exp_neg_trace(1, 1), [1.0])


def test_verify_family_without_closed_form():
    f = matrix_callback(1, lambda v: np.exp(-v[..., 0, 0]), k=1)
    reports = verify_transform("second", SECOND_1, f, [1.0])
    assert reports[0].status == "domain-error"
    assert "closed-form" in reports[0].note


def test_verify_mc_path_p2():
    prm = MatrixOpParams("second", 2, 1, ((1.8, 0.9),))
    f = exp_neg_trace(2, 1)
    mc = MCConfig(n_samples=60000, seed=11, n_streams=6)
    reports = verify_transform("second", prm, f, [1.2, 1.9], mc)
    assert [r.status for r in reports] == ["pass", "pass"]
    assert all(r.se is not None and r.se > 0 for r in reports)


# ---------------------------------------------------------------------------
# Monte Carlo transform routes at p = 2


def test_density_route_matches_closed_form_p2():
    prm = MatrixOpParams("first", 2, 1, ((2.1, 0.7),))
    f = exp_neg_trace(2, 1)
    s = 1.2
    want = gamma_ratio_first(prm, s) * f.mellin((s,))
    est = mtransform_mc(prm, f, s, MCConfig(n_samples=100000, seed=5, n_streams=8))
    assert abs(est.value - want) < 3.0 * est.se


def test_operator_route_agrees_with_density_route():
    # the importance-sampled operator transform and the density-mode moment
    # are independent estimates of the same number
    prm = MatrixOpParams("second", 2, 1, ((1.8, 0.9),))
    f = exp_neg_trace(2, 1)
    s = 1.6
    mc = MCConfig(n_samples=100000, seed=29, n_streams=8)
    a = mtransform_mc(prm, f, s, mc)
    b = mtransform_mc_operator(prm, f, s, MCConfig(n_samples=100000, seed=31, n_streams=8))
    assert abs(a.value - b.value) < 3.0 * math.hypot(a.se, b.se)


def test_operator_route_refuses_first_kind():
    # the first-kind output has power tails, so the importance-sampled
    # route would have unbounded weight variance; it must refuse cleanly
    prm = MatrixOpParams("first", 2, 1, ((2.1, 0.7),))
    f = exp_neg_trace(2, 1)
    with pytest.raises(ProposalDomainError, match="second kind only"):
        mtransform_mc_operator(prm, f, 1.2, MCConfig(n_samples=1000, seed=0))


def test_density_route_with_chain_shapes():
    # chain-derived second shapes replace the operator orders slot by slot
    chain = ChainSpec("gamma_3_5", zeta=(1.5, 2.0, 1.1))
    shapes = (3.1, 1.1)
    prm = MatrixOpParams("second", 1, 2, ((1.5, 0.9), (2.0, 0.9)))
    f = exp_neg_trace(1, 2)
    s = (1.4, 0.9)
    want = math.gamma(s[0]) * math.gamma(s[1])
    for zeta, sj, b in zip((1.5, 2.0), s, shapes):
        want *= math.gamma(zeta + sj) / math.gamma(zeta + sj + b)
    est = mtransform_mc(
        prm, f, s, MCConfig(n_samples=400000, seed=3, n_streams=16), chain=chain
    )
    assert abs(est.value - want) < 4.0 * est.se
    np.testing.assert_allclose(est.value, want, rtol=0.02)


def test_mc_route_needs_a_sampler():
    from kober.matrix_ops import det_power

    with pytest.raises(DomainError):
        mtransform_mc(SECOND_1, det_power(1, (-2.0,)), 1.0)


# ---------------------------------------------------------------------------
# mixed slot families through the full identity


def test_verify_mixed_family_grid():
    f = det_power_times_exp(1, (1.6, 2.3), 2)
    prm = MatrixOpParams("second", 1, 2, ((2.8, 0.9), (2.6, 0.5)))
    reports = verify_transform("second", prm, f, [(1.3, 0.8), (0.9, 1.6)])
    assert [r.status for r in reports] == ["pass", "pass"]
