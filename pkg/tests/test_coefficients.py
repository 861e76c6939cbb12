"""Closed-form coefficient tests.

High-precision oracle values were computed with mpmath (40+ digits) and
frozen below; a live mpmath cross-check covers a dense grid on top of
the frozen spot values.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwm_meanfield.coefficients import (
    MomentPair,
    ScalingParams,
    acc_rate,
    argmax_h,
    gamma_coef,
    gamma_value,
    gaussian_exp_cross,
    gaussian_exp_first,
    gaussian_exp_second,
    gee_coef,
    gee_gaussian_smoothing,
    gee_value,
    h_of_l,
    log_normal_cdf,
    mc_gaussian_exp_cross,
    mc_gaussian_exp_first,
    mc_gaussian_exp_second,
    mc_gee_smoothing,
    normal_cdf,
)

mp.mp.dps = 50

# frozen mpmath oracles
PHI_M119 = 0.11702319602310871878
LOG_PHI_M40 = -804.60844201375378817
LOG_PHI_5 = -2.8665161296376359338e-07
GAMMA_11_238 = 1.3257323831065940533
ACC_11_238 = 0.23404639204621743756
EXP_SECOND_010 = 0.76157829186512337168
ARGMAX_H_I1 = 2.3812024966855406163


def mp_ncdf(x):
    return mp.erfc(-mp.mpf(x) / mp.sqrt(2)) / 2


def mp_log_ncdf(x):
    x = mp.mpf(x)
    if x >= 0:
        return mp.log1p(-mp_ncdf(-x))
    return mp.log(mp_ncdf(x))


class TestNormalCdf:
    def test_spot_values(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_cdf(-1.19) == pytest.approx(PHI_M119, rel=1e-14)
        assert abs(normal_cdf(40.0) - 1.0) <= 1e-15
        assert normal_cdf(-40.0) == 0.0  # graceful underflow

    def test_relative_error_against_mpmath(self):
        for x in np.linspace(-8.0, 8.0, 321):
            got = normal_cdf(float(x))
            want = mp_ncdf(repr(float(x)))
            assert abs(got - want) / want <= 1e-14, x

    @given(st.floats(-8.0, 8.0))
    def test_symmetry(self, x):
        assert normal_cdf(x) + normal_cdf(-x) == pytest.approx(1.0, abs=1e-15)

    def test_vectorized_matches_scalar(self):
        xs = np.linspace(-30, 10, 101)
        vec = normal_cdf(xs)
        assert vec.shape == xs.shape
        for x, v in zip(xs, vec):
            assert v == normal_cdf(float(x))


class TestLogNormalCdf:
    def test_spot_values(self):
        assert log_normal_cdf(0.0) == pytest.approx(-math.log(2.0), rel=1e-15)
        assert log_normal_cdf(-40.0) == pytest.approx(LOG_PHI_M40, rel=1e-13)
        assert log_normal_cdf(5.0) == pytest.approx(LOG_PHI_5, rel=1e-12)

    def test_deep_tail_grid_against_mpmath(self):
        for x in [-300.0, -100.0, -40.0, -12.0, -8.5, -8.0, -3.0, -1.0, 0.5, 3.0, 8.0, 20.0]:
            got = log_normal_cdf(x)
            want = float(mp_log_ncdf(repr(x)))
            assert got == pytest.approx(want, rel=1e-12), x

    def test_exp_roundtrip_in_moderate_range(self):
        # exp(c + log Phi(x)) stays accurate when the sum is moderate
        x, c = -40.0, 810.0
        want = float(mp.e ** (mp.mpf(c) + mp_log_ncdf(x)))
        assert math.exp(c + log_normal_cdf(x)) == pytest.approx(want, rel=1e-12)


class TestGammaGee:
    def test_paper_branch_values(self):
        assert gamma_coef(MomentPair(math.inf, 3.0), ScalingParams(1.0)) == 0.5
        assert gamma_coef(MomentPair(0.0, -1.0), ScalingParams(2.0)) == 4.0
        assert gamma_coef(MomentPair(1.0, 1.0), ScalingParams(2.38)) == pytest.approx(
            GAMMA_11_238, rel=1e-13)
        assert gee_coef(MomentPair(math.inf, -2.0), ScalingParams(1.5)) == 0.0
        assert gee_coef(MomentPair(0.0, 0.0), ScalingParams(1.0)) == 0.0
        assert gee_coef(MomentPair(1.0, 1.0), ScalingParams(2.38)) == pytest.approx(
            GAMMA_11_238 / 2.0, rel=1e-13)

    def test_acc_rate_values(self):
        assert acc_rate(MomentPair(1.0, 1.0), ScalingParams(2.38)) == pytest.approx(
            ACC_11_238, rel=1e-13)
        assert acc_rate(MomentPair(math.inf, 7.0), ScalingParams(0.7)) == pytest.approx(0.5)
        assert acc_rate(MomentPair(0.0, -5.0), ScalingParams(3.0)) == 1.0

    @given(
        a=st.one_of(st.just(0.0), st.just(math.inf), st.floats(1e-8, 1e6)),
        b=st.floats(-50.0, 50.0),
        l=st.sampled_from([0.5, 1.0, 2.38, 5.0]),
    )
    @settings(max_examples=300)
    def test_bound_chain(self, a, b, l):
        gam = gamma_value(a, b, l)
        gee = gee_value(a, b, l)
        assert -1e-12 <= gee <= gam + 1e-12
        assert gam <= l * l + 1e-12

    @given(
        l=st.floats(0.3, 5.0),
        big_i=st.floats(0.05, 9.0),
    )
    @settings(max_examples=200)
    def test_stationary_identity(self, l, big_i):
        h = h_of_l(l, big_i)
        assert gamma_value(big_i, big_i, l) == pytest.approx(h, abs=1e-12)
        assert 2.0 * gee_value(big_i, big_i, l) == pytest.approx(h, abs=1e-12)

    def test_gamma_monotone_in_b(self):
        for a in (1e-6, 0.1, 1.0, 10.0, 1e4):
            for l in (0.5, 2.38):
                bs = np.linspace(-30.0, 30.0, 400)
                vals = gamma_value(a, bs, l)
                assert np.all(np.diff(vals) <= 1e-12), (a, l)

    def test_positivity_floor_on_compact_b(self):
        a_grid = np.concatenate([[0.0, math.inf], np.logspace(-8, 6, 60)])
        for l in (0.5, 2.38):
            vals = [gamma_value(float(a), b, l)
                    for a in a_grid for b in np.linspace(-2.0, 2.0, 21)]
            assert min(vals) > 0.0

    def test_gee_tail_bound(self):
        # sqrt(a) * gee(a, b) <= max(l^2 sqrt(b+), 2 l / sqrt(2 pi))
        for l in (0.5, 1.0, 2.38, 5.0):
            for a in np.logspace(-6, 6, 40):
                for b in np.linspace(-50.0, 50.0, 41):
                    bound = max(l * l * math.sqrt(max(b, 0.0)), 2.0 * l / math.sqrt(2 * math.pi))
                    assert math.sqrt(a) * gee_value(float(a), float(b), l) <= bound + 1e-10

    def test_gee_discontinuous_at_origin_gamma_continuous(self):
        for l in (1.0, 2.38):
            assert gee_value(0.0, 0.0, l) == 0.0
            assert gee_value(0.0, 1e-12, l) == pytest.approx(l * l, rel=1e-9)
            assert gamma_value(0.0, 1e-12, l) == pytest.approx(l * l, abs=1e-9)
            assert gamma_value(0.0, -1e-12, l) == pytest.approx(l * l, abs=1e-9)
            # approach along a -> 0+ with b = 0 as well
            assert gamma_value(1e-18, 0.0, l) == pytest.approx(l * l, rel=1e-6)

    def test_denormal_a_behaves(self):
        for l in (1.0, 2.38):
            assert gamma_value(1e-310, 5.0, l) == pytest.approx(gamma_value(0.0, 5.0, l))
            assert np.isfinite(gee_value(1e-310, -3.0, l))
            assert gee_value(1e-310, -3.0, l) >= 0.0

    def test_log_switch_matches_direct_branch(self):
        # values just below and above the exp(30) switch agree through continuity in a
        l = 1.0
        b = -58.0
        near = [gamma_value(a, b, l) for a in (1.9, 2.0, 2.1)]
        assert np.all(np.diff(near) <= 0.0) or max(near) - min(near) < 1e-9

    def test_moment_pair_validation(self):
        with pytest.raises(ValueError):
            MomentPair(-1.0, 0.0)
        with pytest.raises(ValueError):
            MomentPair(1.0, math.inf)
        with pytest.raises(ValueError):
            ScalingParams(0.0)


class TestHofL:
    def test_spot_and_limits(self):
        assert h_of_l(2.38, 1.0) == pytest.approx(GAMMA_11_238, rel=1e-13)
        assert h_of_l(1e-8, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_argmax_golden_section(self):
        assert argmax_h(1.0) == pytest.approx(ARGMAX_H_I1, abs=1e-4)
        assert abs(argmax_h(1.0) - 2.38) <= 0.01
        # l* = 2.38 / sqrt(I) scaling
        for big_i in (0.25, 4.0):
            assert argmax_h(big_i) == pytest.approx(ARGMAX_H_I1 / math.sqrt(big_i), rel=1e-3)


class TestGaussianExpectations:
    def test_first_trivial_and_odd(self):
        sp = ScalingParams(1.0)
        assert gaussian_exp_first(0.0, 1.0, -0.3, sp) == 0.0
        v = gaussian_exp_first(0.5, 0.5, 0.0, sp)
        assert gaussian_exp_first(-0.5, 0.5, 0.0, sp) == pytest.approx(-v, rel=1e-13)

    def test_first_l_invariance_and_direct_form(self):
        alpha, beta, gamma = 0.7, -0.4, 0.2
        vals = [gaussian_exp_first(alpha, beta, gamma, ScalingParams(l)) for l in (0.5, 1.0, 2.38)]
        s2 = alpha**2 + beta**2
        direct = alpha * math.exp(gamma + s2 / 2) * normal_cdf(-(gamma + s2) / math.sqrt(s2))
        for v in vals:
            assert v == pytest.approx(direct, rel=1e-12)

    def test_second_spot_values(self):
        assert gaussian_exp_second(0.0, 1.0, 0.0) == pytest.approx(EXP_SECOND_010, rel=1e-13)
        # min saturates at 1 for huge gamma: E[G^2] = 1
        assert gaussian_exp_second(0.1, 0.1, 50.0) == pytest.approx(1.0, rel=1e-12)
        with pytest.raises(ValueError):
            gaussian_exp_second(0.0, 0.0, 1.0)

    def test_cross_trivial_zeros_and_sign(self):
        assert gaussian_exp_cross(0.0, 0.2, 0.5, 0.1) == 0.0
        v = gaussian_exp_cross(0.3, 0.2, 0.3, 0.1)
        assert gaussian_exp_cross(0.3, 0.2, -0.3, 0.1) == pytest.approx(-v, rel=1e-13)
        with pytest.raises(ValueError):
            gaussian_exp_cross(0.0, 0.0, 0.0, 1.0)

    def test_smoothing_reductions(self):
        sp = ScalingParams(1.0)
        assert gee_gaussian_smoothing(1.3, 0.0, 0.4, sp) == gee_value(1.3, 0.4, 1.0)
        assert gee_gaussian_smoothing(1.0, 1.0, 0.5, sp) == gee_value(1.25, 0.5, 1.0)
        with pytest.raises(ValueError):
            gee_gaussian_smoothing(math.inf, 1.0, 0.0, sp)

    # small-sample MC agreement; the full 1e7-sample suite runs in acceptance
    def test_first_vs_mc(self):
        est = mc_gaussian_exp_first(0.5, 0.5, 0.0, n_samples=400_000, seed=11)
        closed = gaussian_exp_first(0.5, 0.5, 0.0, ScalingParams(1.0))
        assert abs(est.z_score(closed)) <= 4.0

    def test_second_vs_mc(self):
        est = mc_gaussian_exp_second(0.3, 0.4, -0.2, n_samples=400_000, seed=12)
        assert abs(est.z_score(gaussian_exp_second(0.3, 0.4, -0.2))) <= 4.0

    def test_cross_vs_mc(self):
        est = mc_gaussian_exp_cross(0.3, 0.2, 0.3, 0.1, n_samples=400_000, seed=13)
        assert abs(est.z_score(gaussian_exp_cross(0.3, 0.2, 0.3, 0.1))) <= 4.0

    def test_smoothing_vs_mc(self):
        est = mc_gee_smoothing(0.5, 2.0, -1.0, 1.0, n_samples=200_000, seed=14)
        closed = gee_gaussian_smoothing(0.5, 2.0, -1.0, ScalingParams(1.0))
        assert abs(est.z_score(closed)) <= 4.0

    def test_mc_streams_are_deterministic_and_distinct(self):
        e1 = mc_gaussian_exp_first(0.5, 0.5, 0.0, n_samples=10_000, seed=3, stream=5)
        e2 = mc_gaussian_exp_first(0.5, 0.5, 0.0, n_samples=10_000, seed=3, stream=5)
        e3 = mc_gaussian_exp_first(0.5, 0.5, 0.0, n_samples=10_000, seed=3, stream=6)
        assert e1 == e2
        assert e1.mean != e3.mean

    def test_saturated_min_zero_variance_counts_as_agreement(self):
        # min(e^x, 1) == 1 for every draw: the odd payload G*1 averages to an
        # exact antithetic zero with zero SE while the closed form is ~1e-46
        est = mc_gaussian_exp_first(0.05, 0.05, 2.0, n_samples=50_000, seed=4)
        assert est.mean == 0.0 and est.se == 0.0
        closed = gaussian_exp_first(0.05, 0.05, 2.0, ScalingParams(1.0))
        assert 0.0 < closed < 1e-40
        assert est.z_score(closed) == 0.0
        # a genuine discrepancy still reads as infinite sigmas
        assert est.z_score(0.5) == math.inf
