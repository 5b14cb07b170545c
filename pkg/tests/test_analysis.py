"""Closed-form prediction layer: Q function, update probability, step
moments, printed-constant and quadrature excess-MSE forms, tracking
increment, convexity and stability checks."""

import math

import numpy as np
import pytest
from scipy import integrate

from smccm import analysis as ana
from smccm.errors import PredictedInstabilityError


class TestQFunction:
    def test_half_at_zero(self):
        assert ana.q_function(0.0) == pytest.approx(0.5, abs=1e-15)

    def test_symmetry_identity(self):
        for x in [0.1, 0.7, 1.9, 3.5]:
            assert ana.q_function(x) + ana.q_function(-x) == pytest.approx(1.0, abs=1e-14)

    def test_against_quadrature_oracle(self):
        for x in [0.25, 1.0, 2.0, 4.0]:
            ref, _ = integrate.quad(lambda t: math.exp(-t * t / 2) / math.sqrt(2 * math.pi),
                                    x, np.inf)
            assert ana.q_function(x) == pytest.approx(ref, abs=1e-12)
        assert ana.q_function(1.0) == pytest.approx(0.158655, abs=1e-6)


class TestProbUpdate:
    def test_extremes(self):
        assert ana.prob_update(0.0, 1.0) == pytest.approx(1.0, abs=1e-15)
        assert ana.prob_update(50.0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_reference_value(self):
        assert ana.prob_update(1.0, 1.0) == pytest.approx(2 * 0.15865525393145707, rel=1e-9)

    def test_monotone_in_bound(self):
        vals = [ana.prob_update(g, 0.8) for g in np.linspace(0.0, 3.0, 20)]
        assert all(a >= b - 1e-15 for a, b in zip(vals, vals[1:]))

    def test_invalid_sigma(self):
        with pytest.raises(ValueError):
            ana.prob_update(0.5, 0.0)


class TestStepMoments:
    def test_collapse_at_full_update(self):
        m = ana.step_moments(0.7, 1.0, (1.0, 1.0), (8.0, 64.0))
        assert m.mean_mu == pytest.approx(0.7)
        assert m.mean_mu2 == pytest.approx(0.7)

    def test_no_update_closed_form(self):
        m = ana.step_moments(1.0, 0.0, (2.0, 4.0), (4.0, 16.0))
        assert m.mean_mu == pytest.approx(0.5)
        assert m.mean_mu2 == pytest.approx(0.25)

    def test_nonnegative(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m = ana.step_moments(0.1 + rng.random(), rng.random(),
                                 (rng.random(), rng.random()),
                                 (0.5 + rng.random(), 0.5 + rng.random()))
            assert m.mean_mu >= 0.0 and m.mean_mu2 >= 0.0

    def test_invalid_gamma(self):
        with pytest.raises(ValueError):
            ana.step_moments(0.0, 0.5, (1.0, 1.0), (1.0, 1.0))


class TestPrintedExcessMse:
    def test_constants_pinned_at_reference_triples(self):
        # Freeze the printed A and B polynomials at reference variance
        # triples so any future "correction" is a deliberate change.
        a0, b0 = ana._printed_constants(ana.NoisePartition(0.0, 0.0, 0.0))
        assert a0 == pytest.approx(3.0, abs=1e-15)
        assert b0 == pytest.approx(2.0, abs=1e-15)
        a1, b1 = ana._printed_constants(ana.NoisePartition(0.04, 0.01, 0.02))
        assert a1 == pytest.approx(3.0242999999999998, rel=1e-12)
        assert b1 == pytest.approx(2.386235, rel=1e-12)
        a2, b2 = ana._printed_constants(ana.NoisePartition(1.0, 1.0, 1.0))
        assert a2 == pytest.approx(30.0, rel=1e-12)
        assert b2 == pytest.approx(41.0, rel=1e-12)

    def test_zero_variance_limit_is_unstable(self):
        # all variances -> 0: B -> 2, A -> 3, denominator negative
        m = ana.StepMoments(mean_mu=1e-3, mean_mu2=1e-6, p_up=0.1)
        with pytest.raises(PredictedInstabilityError):
            ana.excess_mse_steady(m, 8.0, ana.NoisePartition(0.0, 0.0, 0.0))

    def test_vanishing_step_limit(self):
        part = ana.NoisePartition(0.3, 0.2, 0.1)
        xi = None
        for mu2 in [1e-6, 1e-8, 1e-10]:
            m = ana.StepMoments(mean_mu=1e-2, mean_mu2=mu2, p_up=0.1)
            nxt = ana.excess_mse_steady(m, 8.0, part)
            assert nxt >= 0.0
            if xi is not None:
                assert nxt < xi
            xi = nxt
        assert xi < 1e-6

    def test_tracking_reduces_to_steady(self):
        part = ana.NoisePartition(0.3, 0.2, 0.1)
        m = ana.StepMoments(mean_mu=1e-2, mean_mu2=1e-7, p_up=0.1)
        assert ana.excess_mse_tracking(m, 8.0, part, 0.0) == ana.excess_mse_steady(m, 8.0, part)

    def test_tracking_monotone_in_trace(self):
        part = ana.NoisePartition(0.3, 0.2, 0.1)
        m = ana.StepMoments(mean_mu=1e-2, mean_mu2=1e-7, p_up=0.1)
        vals = [ana.excess_mse_tracking(m, 8.0, part, tq) for tq in [0.0, 1e-6, 1e-5, 1e-4]]
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestQuadratureExcessMse:
    def test_positive_and_finite(self):
        xi = ana.sm_excess_mse_steady(0.65, desired_power=0.95, residual_power=0.05)
        assert 0.0 < xi < 1.0

    def test_monte_carlo_oracle(self):
        # direct Monte Carlo evaluation of the two strip integrals against
        # the quadrature on the Rice output model
        rng = np.random.default_rng(1)
        gamma, lam, sig2 = 0.65, 0.9, 0.08
        n = 400_000
        z = np.sqrt(lam) + (rng.standard_normal(n) + 1j * rng.standard_normal(n)) * np.sqrt(sig2 / 2)
        az = np.abs(z)
        hi, lo = np.sqrt(1 + gamma), np.sqrt(1 - gamma)
        up = az >= hi
        dn = az <= lo
        num_mc = np.mean(np.where(up, (az - hi) ** 2, 0.0) + np.where(dn, (az - lo) ** 2, 0.0))
        den_mc = np.mean(np.where(up, 1 - hi / (2 * az), 0.0)
                         + np.where(dn, 1 - lo / (2 * az), 0.0))
        xi_mc = num_mc / den_mc
        xi = ana.sm_excess_mse_steady(gamma, lam, sig2)
        assert xi == pytest.approx(xi_mc, rel=0.02)
        pup = ana.sm_update_probability(gamma, lam, sig2)
        assert pup == pytest.approx(np.mean(up | dn), rel=0.02)

    def test_tracking_adds_scaled_trace(self):
        base = ana.sm_excess_mse_steady(0.65, 0.95, 0.05)
        with_q = ana.sm_excess_mse_tracking(0.65, 0.95, 0.05, u2=8.0, trace_q=1e-5)
        assert with_q > base
        assert ana.sm_excess_mse_tracking(0.65, 0.95, 0.05, u2=8.0, trace_q=0.0) \
            == pytest.approx(base, rel=1e-12)

    def test_bound_one_drops_lower_strip(self):
        # gamma >= 1: the lower boundary vanishes, only upper updates remain
        xi = ana.sm_excess_mse_steady(1.2, 0.9, 0.05)
        assert xi > 0.0


class TestJakesTrace:
    def test_static_zero(self):
        assert ana.jakes_trace_q(0.0, 1.7) == 0.0

    def test_small_argument_series(self):
        for fd in [1e-5, 1e-4, 1e-3]:
            expect = (2 * np.pi * fd) ** 2 / 2  # 2(1-J0(x)) ~ x^2/2
            assert ana.jakes_trace_q(fd, 1.0) == pytest.approx(expect, rel=1e-4)

    def test_reference_value(self):
        assert ana.jakes_trace_q(0.001, 1.0) == pytest.approx(1.97e-5, rel=1e-2)

    def test_scales_with_filter_energy(self):
        assert ana.jakes_trace_q(1e-3, 2.0) == pytest.approx(2 * ana.jakes_trace_q(1e-3, 1.0))


def _fd_hessian(fun, t_bar, eps=1e-5):
    """Real-parameterised finite-difference Hessian of a scalar function
    of a complex vector."""
    x0 = np.concatenate([t_bar.real, t_bar.imag])
    n = x0.size

    def as_complex(x):
        return x[:n // 2] + 1j * x[n // 2:]

    hess = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for si, sj, sign in [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]:
                x = x0.copy()
                x[i] += si * eps
                x[j] += sj * eps
                hess[i, j] += sign * fun(as_complex(x))
    return hess / (4 * eps * eps)


class TestConvexity:
    def test_direct_values(self):
        d, convex = ana.convexity_condition(1.0, 1.0, 1.0)
        assert d == pytest.approx(1.0) and convex
        d, convex = ana.convexity_condition(0.4, 1.0, 1.0)
        assert d == pytest.approx(0.16) and not convex

    def test_threshold(self):
        assert ana.convexity_condition(1.0, 0.5, 1.0)[1]  # D = 0.25 inclusive
        assert not ana.convexity_condition(1.0, 0.499, 1.0)[1]

    def test_agrees_with_hessian_oracle(self):
        # finite-difference Hessian of the transformed cost on 3-user toys
        # agrees with the D >= 1/4 verdict for D outside the boundary band
        rng = np.random.default_rng(2)
        agree = 0
        total = 0
        for _ in range(100):
            d_val = rng.choice([rng.uniform(0.02, 0.2), rng.uniform(0.3, 1.6)])
            t_bar = 0.1 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
            hess = _fd_hessian(lambda t: ana.transformed_cm_cost(d_val, t), t_bar)
            psd = np.linalg.eigvalsh(0.5 * (hess + hess.T)).min() >= -1e-6
            expected = d_val >= 0.25
            agree += int(psd == expected)
            total += 1
        assert agree == total


class TestStabilityBound:
    def test_identity(self):
        assert ana.stability_bound(np.eye(3)) == pytest.approx(2.0)

    def test_dominant_eigenvalue(self):
        assert ana.stability_bound(np.diag([4.0, 1.0])) == pytest.approx(0.5)

    def test_zero_matrix_sentinel(self):
        assert ana.stability_bound(np.zeros((4, 4))) == math.inf

    def test_random_against_eig_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            mat = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
            import scipy.linalg as sla

            ref = float(np.min(2.0 / np.abs(sla.eigvals(mat))))
            assert ana.stability_bound(mat) == pytest.approx(ref, rel=1e-8)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            ana.stability_bound(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestCompare:
    def test_equal_zero_db(self):
        assert ana.compare_db(1.0, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_ratio_two(self):
        assert ana.compare_db(1.0, 2.0) == pytest.approx(3.0103, abs=1e-4)

    def test_invalid(self):
        with pytest.raises(ValueError):
            ana.compare_db(0.0, 1.0)
