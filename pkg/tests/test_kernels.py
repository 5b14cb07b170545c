"""Numerical parity between the compiled kernels and the pure-numpy
fallback, plus backend selection plumbing."""

import numpy as np
import pytest

from smccm._kernels import available_backends

BACKENDS = available_backends()
needs_both = pytest.mark.skipif(len(BACKENDS) < 2,
                                reason="compiled kernels not built")


def _rand_cvec(rng, m):
    return rng.standard_normal(m) + 1j * rng.standard_normal(m)


def _rand_pd(rng, m):
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return (a @ a.conj().T) / m + np.eye(m)


@needs_both
class TestParity:
    def test_sg_step_stream(self):
        rng = np.random.default_rng(0)
        m = 16
        p = _rand_cvec(rng, m)
        states = {name: (1.0 * p / np.vdot(p, p).real) for name in BACKENDS}
        for i in range(400):
            r = _rand_cvec(rng, m)
            mu_override = 1e-3 if i % 7 == 0 else -1.0
            outs = {}
            for name, mod in BACKENDS.items():
                w = states[name]
                outs[name] = mod.sg_step(w, p, r, 0.65, 1.0, mu_override)
            a, b = outs["python"], outs["compiled"]
            assert a[3] == b[3]
            assert a[0] == pytest.approx(b[0], rel=1e-12, abs=1e-12)
            assert a[2] == pytest.approx(b[2], rel=1e-10, abs=1e-15)
            assert np.allclose(states["python"], states["compiled"], rtol=1e-10, atol=1e-12)

    def test_rls_step_stream(self):
        rng = np.random.default_rng(1)
        m = 10
        p = _rand_cvec(rng, m)
        init_w = 1.0 * p / np.vdot(p, p).real
        st = {}
        for name in BACKENDS:
            st[name] = dict(w=init_w.copy(), r_inv=np.eye(m, dtype=np.complex128) / 0.01,
                            d_hat=np.zeros(m, dtype=np.complex128))
        for i in range(300):
            r = _rand_cvec(rng, m)
            lam_override = 1.0 if i % 11 == 0 else -1.0
            outs = {}
            for name, mod in BACKENDS.items():
                s = st[name]
                outs[name] = mod.rls_step(s["w"], p, s["r_inv"], s["d_hat"], r,
                                          0.5, 1.0, lam_override, 0.999, 2.0)
            a, b = outs["python"], outs["compiled"]
            # state feedback compounds the BLAS-vs-loop rounding difference,
            # so the tolerance is looser than for the one-shot kernels
            assert a[3] == b[3]
            assert a[2] == pytest.approx(b[2], rel=1e-6, abs=1e-12)
            assert np.allclose(st["python"]["w"], st["compiled"]["w"], rtol=1e-6, atol=1e-9)
            assert np.allclose(st["python"]["r_inv"], st["compiled"]["r_inv"],
                               rtol=1e-6, atol=1e-9)

    def test_clarke_step(self):
        rng = np.random.default_rng(2)
        phases = rng.uniform(0, 2 * np.pi, (6, 32))
        rates = rng.uniform(-1e-3, 1e-3, (6, 32))
        outs = {}
        for name, mod in BACKENDS.items():
            ph = phases.copy()
            out = np.zeros(6, dtype=np.complex128)
            for _ in range(50):
                mod.clarke_step(ph, rates, out)
            outs[name] = (ph, out.copy())
        assert np.allclose(outs["python"][0], outs["compiled"][0], rtol=1e-12)
        assert np.allclose(outs["python"][1], outs["compiled"][1], rtol=1e-10, atol=1e-12)

    def test_spread_channels(self):
        rng = np.random.default_rng(3)
        mats = rng.standard_normal((5, 3, 20, 4))
        taps = rng.standard_normal((5, 4)) + 1j * rng.standard_normal((5, 4))
        outs = {}
        for name, mod in BACKENDS.items():
            out = np.zeros((5, 3, 20), dtype=np.complex128)
            mod.spread_channels(np.ascontiguousarray(mats), np.ascontiguousarray(taps), out)
            outs[name] = out
        assert np.allclose(outs["python"], outs["compiled"], rtol=1e-12, atol=1e-14)


class TestSelection:
    def test_backend_name_exposed(self):
        import smccm

        assert smccm.BACKEND_NAME in ("python", "compiled")

    def test_env_override_python(self):
        import subprocess
        import sys

        out = subprocess.run(
            [sys.executable, "-c", "import smccm; print(smccm.BACKEND_NAME)"],
            env={"SMCCM_BACKEND": "py", "PATH": "/usr/bin:/bin"},
            capture_output=True, text=True)
        assert out.stdout.strip() == "python"

    def test_trial_parity_across_backends(self):
        # full-trial agreement between backends on a short blind run
        import json
        import subprocess
        import sys

        script = ("import json, numpy as np\n"
                  "from smccm import harness as h\n"
                  "s = h.static_scenario(n_users=4, duration=120, trials=1, seed=42)\n"
                  "tr = h.run_trial(s, h.ReceiverConfig(), 0)\n"
                  "print(json.dumps([tr.records['mse'].sum(), tr.records['gamma'][-1],"
                  " float(tr.updates)]))\n")
        vals = {}
        for backend in ("py", "c"):
            out = subprocess.run([sys.executable, "-c", script],
                                 env={"SMCCM_BACKEND": backend, "PATH": "/usr/bin:/bin"},
                                 capture_output=True, text=True)
            if out.returncode != 0:
                pytest.skip(f"backend {backend} unavailable: {out.stderr[-200:]}")
            vals[backend] = json.loads(out.stdout.strip())
        assert vals["py"][0] == pytest.approx(vals["c"][0], rel=1e-6)
        assert vals["py"][1] == pytest.approx(vals["c"][1], rel=1e-8)
        assert vals["py"][2] == vals["c"][2]
