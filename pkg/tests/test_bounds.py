"""Time-varying bound recursions and the interference/amplitude trackers."""

import numpy as np
import pytest

from smccm import bounds as bnd


def _state(**kw):
    defaults = dict(gamma=0.0, alpha=8.0, beta=0.95, tau=0.35, sigma2=0.01)
    defaults.update(kw)
    return bnd.BoundState(**defaults)


class TestPdb:
    def test_single_step_value(self):
        # gamma' = 0.95 * sqrt(8 * 1 * 0.01) from gamma = 0
        s = _state()
        w = np.array([1.0 + 0j])
        bnd.pdb_update(s, w)
        assert s.gamma == pytest.approx(0.95 * np.sqrt(0.08), rel=1e-12)
        assert s.gamma == pytest.approx(0.2687, abs=5e-5)

    def test_fixed_point_and_rate(self):
        s = _state(beta=0.2)
        w = np.sqrt(0.5) * np.ones(2, dtype=np.complex128)
        target = np.sqrt(8.0 * 1.0 * 0.01)
        prev_err = abs(s.gamma - target)
        for _ in range(100):
            bnd.pdb_update(s, w)
            err = abs(s.gamma - target)
            assert err <= (1 - s.beta) * prev_err + 1e-15
            prev_err = err
        assert s.gamma == pytest.approx(target, rel=1e-6)

    def test_error_halves_at_geometric_rate(self):
        beta = 0.1
        steps = int(np.ceil(np.log(0.5) / np.log(1 - beta)))
        s = _state(beta=beta, sigma2=0.0, gamma=1.0)
        w = np.ones(3, dtype=np.complex128)
        for _ in range(steps):
            bnd.pdb_update(s, w)  # target 0: error is gamma itself
        assert s.gamma <= 0.5 + 1e-12

    def test_zero_noise_decays_to_zero(self):
        s = _state(sigma2=0.0, gamma=0.7)
        w = np.ones(4, dtype=np.complex128)
        for _ in range(400):
            bnd.pdb_update(s, w)
        assert s.gamma < 1e-12


class TestPidb:
    def test_reduces_to_pdb_when_tau_zero(self):
        w = np.array([0.5 + 2j, -1j])
        a = _state(tau=0.0, gamma=0.3)
        b = _state(tau=0.35, gamma=0.3)
        pdb_ref = _state(gamma=0.3)
        for _ in range(10):
            bnd.pidb_update(a, w)
            bnd.pidb_update(b, w)
            bnd.pdb_update(pdb_ref, w)
        assert a.gamma == pytest.approx(pdb_ref.gamma, rel=1e-14)
        assert b.gamma == pytest.approx(pdb_ref.gamma, rel=1e-14)  # v_hat is 0

    def test_fixed_point_with_interference(self):
        s = _state(beta=0.3, v_hat=1.0)
        w = np.array([1.0 + 0j])
        target = np.sqrt(0.35) * 1.0 + np.sqrt(0.08)
        for _ in range(200):
            bnd.pidb_update(s, w)
        assert s.gamma == pytest.approx(target, rel=1e-9)
        assert target == pytest.approx(0.8744, abs=2e-4)

    def test_dominates_pdb_pointwise(self):
        rng = np.random.default_rng(0)
        a = _state(tau=0.35)
        b = _state(tau=0.35)
        w = np.ones(2, dtype=np.complex128)
        for _ in range(200):
            d = complex(rng.standard_normal(), rng.standard_normal())
            bnd.track_interference(a, d)
            bnd.track_interference(b, d)
            bnd.pidb_update(a, w)
            bnd.pdb_update(b, w)
            assert a.gamma >= b.gamma - 1e-15


class TestInterferenceTracking:
    def test_rake_output(self):
        f = np.array([1.0, -1j]) / np.sqrt(2)
        r = np.array([2.0, -2j])
        # f^H r = (2 + 1j * (-2j)) / sqrt(2) = 4/sqrt(2)
        assert bnd.rake_output(f, r) == pytest.approx(4 / np.sqrt(2))
        assert bnd.rake_output(f, np.zeros(2)) == 0.0

    def test_residual_cases(self):
        b = (1 + 1j) / np.sqrt(2)
        x = 2.0 * b
        assert bnd.interference_residual(x, 2.0, b) == pytest.approx(0.0)
        assert bnd.interference_residual(x, 0.0, b) == x

    def test_tracker_single_step(self):
        s = _state()
        bnd.track_interference(s, np.sqrt(2.0))  # |d|^2 = 2
        assert s.v_hat == pytest.approx(1.9, rel=1e-12)

    def test_tracker_fixed_point_and_decay(self):
        s = _state(beta=0.25)
        for _ in range(200):
            bnd.track_interference(s, 2.0 + 0j)
        assert s.v_hat == pytest.approx(4.0, rel=1e-9)
        for _ in range(400):
            bnd.track_interference(s, 0.0)
        assert s.v_hat < 1e-12

    def test_convex_hull_property(self):
        # every recursion output stays within the historical innovation range
        rng = np.random.default_rng(1)
        s = _state(beta=0.4)
        vals = []
        for _ in range(500):
            d = 2.0 * rng.random()
            vals.append(abs(d) ** 2)
            bnd.track_interference(s, d)
            assert 0.0 <= s.v_hat <= max(vals) + 1e-12


class TestAmplitude:
    def test_power_mode_noise_free_chain(self):
        # |x| = A constant with v_hat pinned at zero: a_hat converges to A
        s = _state(beta=0.3, amplitude_mode="power")
        for _ in range(200):
            bnd.amplitude_update(s, 2.5 + 0j)
        assert s.a_hat == pytest.approx(2.5, rel=1e-9)
        assert s.q2 == pytest.approx(6.25, rel=1e-9)

    def test_magnitude_mode_noise_free_chain(self):
        s = _state(beta=0.3, amplitude_mode="magnitude")
        for _ in range(200):
            bnd.amplitude_update(s, 1.5j)
        assert s.q == pytest.approx(1.5, rel=1e-9)
        assert s.a_hat == pytest.approx(1.5, rel=1e-9)

    def test_floor_when_interference_dominates(self):
        s = _state(beta=0.3, amplitude_mode="magnitude", a_hat=1.0, v_hat=9.0)
        for _ in range(300):
            bnd.amplitude_update(s, 1.0 + 0j)  # q -> 1 while sqrt(v) = 3
        assert s.a_hat == pytest.approx(0.0, abs=1e-9)

    def test_power_mode_floor(self):
        s = _state(beta=0.3, amplitude_mode="power", a_hat=1.0, v_hat=9.0)
        for _ in range(300):
            bnd.amplitude_update(s, 1.0 + 0j)
        assert s.a_hat == pytest.approx(0.0, abs=1e-9)

    def test_literal_recursions_forms(self):
        # unweighted innovations: q* = E|x|/beta
        s = _state(beta=0.95, amplitude_mode="magnitude", literal_recursions=True)
        for _ in range(400):
            bnd.amplitude_update(s, 1.0 + 0j)
        assert s.q == pytest.approx(1.0 / 0.95, rel=1e-9)
        assert s.a_hat == pytest.approx(1.0 / 0.95**2, rel=1e-6)

    def test_unknown_mode_rejected(self):
        s = _state(amplitude_mode="nope")
        with pytest.raises(ValueError):
            bnd.amplitude_update(s, 1.0)

    def test_bootstrap_breaks_tie(self):
        s = _state(amplitude_mode="power")
        bnd.bootstrap_amplitude(s, 2.0 + 0j)
        assert s.a_hat == 2.0
        assert s.q2 == 4.0

    def test_closed_loop_tracks_amplitude(self):
        # full tracker loop on a synthetic matched-filter stream: desired
        # QPSK at amplitude A plus circular interference of power v
        rng = np.random.default_rng(2)
        amp, v_true = 1.3, 0.15
        s = _state(beta=0.05, amplitude_mode="power")
        first = True
        a_tail = []
        v_tail = []
        for i in range(4000):
            b = (rng.integers(0, 2) * 2 - 1 + 1j * (rng.integers(0, 2) * 2 - 1)) / np.sqrt(2)
            iota = complex(rng.standard_normal(), rng.standard_normal()) * np.sqrt(v_true / 2)
            x = amp * b + iota
            if first:
                bnd.bootstrap_amplitude(s, x)
                first = False
            d = bnd.interference_residual(x, s.a_hat, b)
            bnd.track_interference(s, d)
            bnd.amplitude_update(s, x)
            if i > 2000:
                a_tail.append(s.a_hat)
                v_tail.append(s.v_hat)
        assert np.mean(a_tail) == pytest.approx(amp, rel=0.05)
        assert np.mean(v_tail) == pytest.approx(v_true, rel=0.25)
