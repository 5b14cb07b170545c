"""Command-line interface.

    smccm simulate <config.yaml>   run the Monte Carlo experiment and emit
                                   CSV tables / SVG plots
    smccm analyze  <config.yaml>   closed-form predictions only (no
                                   simulation)
    smccm sweep    <config.yaml> --param section.key --values a,b,c
                                   grid over one configuration parameter

Common flags: --seed, --trials, --threads, --out. Exit codes: 0 success,
1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import analysis, cdma, harness, output
from .config import _ATTR, ExperimentConfig, load_config
from .errors import ConfigurationError, NumericalError


def _steady_metrics(results, warmup: int):
    mean, half = harness.ensemble_average([tr.records for tr in results])
    n = mean["mse"].size
    steady = slice(max(warmup, 2 * n // 3), n)
    ur = harness.update_rate([(tr.updates, tr.records.size) for tr in results])
    return mean, half, {
        "mse_steady": float(np.mean(mean["mse"][steady])),
        "ber": float(np.mean(mean["ber_indicator"][warmup:])),
        "update_rate": ur,
        "v_hat_final": float(mean["v_hat"][-1]),
        "a_hat_final": float(mean["a_hat"][-1]),
        "channel_mse_final": float(mean["channel_mse"][-1]),
    }


def _simulate(cfg: ExperimentConfig, out_dir: str) -> None:
    rx = cfg.receiver_config()
    os.makedirs(out_dir, exist_ok=True)
    summary = {k: [] for k in ("ebn0_db", "mse_steady", "ber", "update_rate",
                               "v_hat_final", "a_hat_final", "channel_mse_final",
                               "trials_failed")}
    analysis_rows = {k: [] for k in ("ebn0_db", "simulated_excess_mse",
                                     "predicted_excess_mse", "diff_db", "passed")}
    per_snr_means = {}
    for j, snr in enumerate(cfg.ebn0_db):
        script = cfg.scenario_script(snr)
        results, failed = harness.run_experiment(script, rx, threads=cfg.threads,
                                                 collect_aux=cfg.analysis_enabled)
        if not results:
            raise NumericalError(f"all {script.trials} trials failed at Eb/N0 = {snr} dB")
        mean, half, stats = _steady_metrics(results, cfg.warmup)
        per_snr_means[snr] = mean
        if "csv" in cfg.formats:
            cols = {"symbol_index": np.arange(len(mean["mse"]), dtype=np.int64)}
            for name in ("mse", "ber_indicator", "updated", "gamma", "v_hat",
                         "a_hat", "channel_mse"):
                cols[name] = mean[name]
                cols[name + "_hw"] = half[name]
            output.emit_csv(cols, os.path.join(out_dir, f"records_snr{j}.csv"))
        summary["ebn0_db"].append(snr)
        summary["trials_failed"].append(failed)
        for k, v in stats.items():
            summary[k].append(v)
        if cfg.analysis_enabled:
            sim_xi = float(np.mean([tr.aux["excess_mse"] for tr in results]))
            lam = float(np.mean([tr.aux["desired_power"] for tr in results]))
            resid = float(np.mean([tr.aux["residual_power"] for tr in results]))
            u2 = float(np.mean([tr.aux["u2"] for tr in results]))
            if cfg.doppler > 0.0:
                w2 = float(np.mean([tr.aux["w_opt_norm2"] for tr in results]))
                tq = analysis.jakes_trace_q(cfg.doppler, w2)
                xi = analysis.sm_excess_mse_tracking(cfg.gamma, lam, resid, u2, tq)
            else:
                xi = analysis.sm_excess_mse_steady(cfg.gamma, lam, resid)
            rep = harness.compare_analytical(sim_xi, xi, cfg.tolerance_db)
            analysis_rows["ebn0_db"].append(snr)
            analysis_rows["simulated_excess_mse"].append(rep.simulated)
            analysis_rows["predicted_excess_mse"].append(rep.predicted)
            analysis_rows["diff_db"].append(rep.diff_db)
            analysis_rows["passed"].append(int(rep.passed))
            print(f"Eb/N0 {snr:5.1f} dB: simulated excess {rep.simulated:.4e}, "
                  f"predicted {rep.predicted:.4e}, diff {rep.diff_db:+.2f} dB "
                  f"[{'pass' if rep.passed else 'FAIL'}]")
        print(f"Eb/N0 {snr:5.1f} dB: MSE {stats['mse_steady']:.4e}  BER {stats['ber']:.3e}  "
              f"UR {stats['update_rate']:.3f}  failed trials {failed}")

    if "csv" in cfg.formats:
        output.emit_csv(summary, os.path.join(out_dir, "summary.csv"))
        if cfg.analysis_enabled:
            output.emit_csv(analysis_rows, os.path.join(out_dir, "analysis.csv"))
    if "svg" in cfg.formats:
        first = cfg.ebn0_db[0]
        sym = np.arange(cfg.duration)
        mean0 = per_snr_means[first]
        floor = 1e-12
        output.emit_plot({f"{cfg.algorithm}/{cfg.bound}": (sym, np.maximum(mean0["mse"], floor))},
                         "mse_vs_symbols", os.path.join(out_dir, "mse_vs_symbols.svg"))
        output.emit_plot({f"{cfg.algorithm}/{cfg.bound}":
                          (sym, np.maximum(mean0["ber_indicator"], floor))},
                         "ber_vs_symbols", os.path.join(out_dir, "ber_vs_symbols.svg"))
        output.emit_plot({"bound": (sym, mean0["gamma"])},
                         "bound_trace", os.path.join(out_dir, "bound_trace.svg"))
        if len(cfg.ebn0_db) > 1:
            snrs = np.asarray(summary["ebn0_db"])
            output.emit_plot({f"{cfg.algorithm}/{cfg.bound}":
                              (snrs, np.maximum(summary["mse_steady"], floor))},
                             "mse_vs_snr", os.path.join(out_dir, "mse_vs_snr.svg"))
            output.emit_plot({f"{cfg.algorithm}/{cfg.bound}":
                              (snrs, np.maximum(summary["ber"], floor))},
                             "ber_vs_snr", os.path.join(out_dir, "ber_vs_snr.svg"))


def _nominal_system(cfg: ExperimentConfig, snr_db: float):
    """Deterministic reference system for simulation-free analysis: every
    user on the average power profile with unit-phase taps."""
    codes = cdma.gold_sequences(cfg.gold_degree)
    sigma2 = cdma.noise_power_from_ebn0(snr_db)
    gains = 10.0 ** (np.asarray([-3.0 * l for l in range(cfg.n_paths)]) / 20.0)
    gains /= np.linalg.norm(gains)
    taps = np.zeros(cfg.n_taps, dtype=np.complex128)
    taps[:cfg.n_paths] = gains
    m_dim = codes.shape[1] + cfg.n_taps - 1
    cov = sigma2 * np.eye(m_dim, dtype=np.complex128)
    effs = []
    for k in range(cfg.n_users):
        for shift in (-1, 0, 1):
            e = cdma.build_constraint_matrix(codes[k], cfg.n_taps, shift) @ taps
            cov += np.outer(e, e.conj())
            if shift == 0:
                effs.append(e)
    w_opt = np.linalg.solve(cov, effs[0])
    lam = float(abs(np.vdot(w_opt, effs[0])) ** 2)
    s_noise = sigma2 * float(np.vdot(w_opt, w_opt).real)
    s_mai = float(sum(abs(np.vdot(w_opt, e)) ** 2 for e in effs[1:]))
    s_isi = 0.0
    for k in range(cfg.n_users):
        for shift in (-1, 1):
            e = cdma.build_constraint_matrix(codes[k], cfg.n_taps, shift) @ taps
            s_isi += abs(np.vdot(w_opt, e)) ** 2
    part = analysis.NoisePartition(s_mai, s_isi, s_noise)
    # projected input energy E||Pi r||^2 = tr(Pi R)
    p = effs[0]
    pr = cov @ p
    u2 = float(np.trace(cov).real - (np.vdot(p, pr).real / np.vdot(p, p).real))
    return w_opt, cov, part, lam, u2


def _analyze(cfg: ExperimentConfig, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    rows = {k: [] for k in ("ebn0_db", "gamma", "sigma_e", "p_up", "xi_quadrature",
                            "xi_tracking", "xi_printed", "stability_ceiling",
                            "convexity_d", "convex")}
    for snr in cfg.ebn0_db:
        w_opt, cov, part, lam, u2 = _nominal_system(cfg, snr)
        sig2 = part.total()
        sigma_e = float(np.sqrt(2.0 * lam * sig2 + sig2**2))
        if cfg.bound == "fixed":
            gamma = cfg.gamma
        else:
            gamma = float(np.sqrt(cfg.alpha * np.vdot(w_opt, w_opt).real
                                  * cdma.noise_power_from_ebn0(snr)))
        p_up = analysis.prob_update(gamma, sigma_e)
        xi_q = analysis.sm_excess_mse_steady(gamma, lam, sig2, self_consistent=True)
        tq = analysis.jakes_trace_q(cfg.doppler, float(np.vdot(w_opt, w_opt).real))
        xi_t = analysis.sm_excess_mse_tracking(gamma, lam, sig2 + xi_q, u2, tq)
        moments = analysis.step_moments(gamma, p_up, (1.0, 1.0), (u2, u2**2))
        try:
            xi_p = analysis.excess_mse_steady(moments, u2, part)
        except NumericalError:
            xi_p = float("nan")
        # Gaussian-moment error-dynamics matrix for the stability ceiling
        wr = cov @ w_opt
        r_ez = (np.vdot(w_opt, wr).real - 1.0) * cov + np.outer(wr, wr.conj())
        p = w_opt / np.linalg.norm(w_opt)  # direction only used for the projector scale
        proj = np.eye(cov.shape[0]) - np.outer(p, p.conj())
        ceiling = analysis.stability_bound(proj @ r_ez)
        d_val, convex = analysis.convexity_condition(cfg.nu, 1.0, 1.0)
        for key, val in (("ebn0_db", snr), ("gamma", gamma), ("sigma_e", sigma_e),
                         ("p_up", p_up), ("xi_quadrature", xi_q), ("xi_tracking", xi_t),
                         ("xi_printed", xi_p), ("stability_ceiling", ceiling),
                         ("convexity_d", d_val), ("convex", int(convex))):
            rows[key].append(val)
        print(f"Eb/N0 {snr:5.1f} dB: gamma {gamma:.3f}  P_up {p_up:.3f}  "
              f"xi {xi_q:.4e}  stability ceiling {ceiling:.3e}")
    output.emit_csv(rows, os.path.join(out_dir, "analysis.csv"))


def _sweep(cfg: ExperimentConfig, out_dir: str, param: str, values: str) -> None:
    try:
        section, key = param.split(".", 1)
        attr = _ATTR[(section, key)]
    except (ValueError, KeyError):
        raise ConfigurationError(f"unknown sweep parameter {param!r}; use section.key")
    raw = [v.strip() for v in values.split(",") if v.strip()]
    if not raw:
        raise ConfigurationError("sweep needs at least one value")
    current = getattr(cfg, attr)
    cast = type(current) if not isinstance(current, bool) else bool
    os.makedirs(out_dir, exist_ok=True)
    rows = {param: [], "mse_steady": [], "ber": [], "update_rate": []}
    for v in raw:
        val = cast(float(v)) if cast in (int, float) else v
        setattr(cfg, attr, val)
        rx = cfg.receiver_config()
        script = cfg.scenario_script(cfg.ebn0_db[0])
        results, failed = harness.run_experiment(script, rx, threads=cfg.threads)
        if not results:
            raise NumericalError(f"all trials failed at {param} = {val}")
        _, _, stats = _steady_metrics(results, cfg.warmup)
        rows[param].append(val)
        for k in ("mse_steady", "ber", "update_rate"):
            rows[k].append(stats[k])
        print(f"{param} = {val}: MSE {stats['mse_steady']:.4e}  BER {stats['ber']:.3e}  "
              f"UR {stats['update_rate']:.3f}")
    output.emit_csv(rows, os.path.join(out_dir, "sweep.csv"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smccm",
                                 description="Blind set-membership constant-modulus DS-CDMA lab")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "analyze", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("config", help="YAML configuration file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        if name == "sweep":
            sp.add_argument("--param", required=True, help="section.key to sweep")
            sp.add_argument("--values", required=True, help="comma-separated values")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not os.path.exists(args.config):
            raise ConfigurationError(f"configuration file not found: {args.config}")
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.trials is not None:
            cfg.trials = args.trials
        if args.threads is not None:
            cfg.threads = args.threads
        out_dir = args.out or cfg.out_dir
        if args.command == "simulate":
            _simulate(cfg, out_dir)
        elif args.command == "analyze":
            _analyze(cfg, out_dir)
        else:
            _sweep(cfg, out_dir, args.param, args.values)
        return 0
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
