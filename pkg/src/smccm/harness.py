"""Monte Carlo experiment harness.

Scenario scripting (user entry/exit, SNR and Doppler changes), the
per-symbol processing loop, ensemble averaging and the analytical
comparison. One trial is strictly sequential; trials are independent
and dispatched to a process pool, with results merged by trial index so
the output is identical for any worker count.

Per-symbol processing order (pinned; the golden-trace test guards it):

    1. advance fading               5. bound update
    2. compose received vector      6. receiver update
    3. channel estimation           7. detect (post-update output)
    4. matched filter, interference 8. metrics
       and amplitude tracking

The a-priori output (pre-update filter) feeds the MSE metric and the
interference subtraction; the bit-error indicator uses the post-update
detection per the order above.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from . import cdma, chanest
from .errors import ConfigurationError, NumericalError
from .receivers import RlsState, SgState, detect, sm_ccm_rls_update, sm_ccm_sg_update

RECORD_DTYPE = np.dtype([
    ("symbol_index", np.int64),
    ("mse", np.float64),
    ("ber_indicator", np.int64),
    ("updated", np.int64),
    ("gamma", np.float64),
    ("v_hat", np.float64),
    ("a_hat", np.float64),
    ("channel_mse", np.float64),
])

SHIFT_PREV, SHIFT_CUR, SHIFT_NEXT = 0, 1, 2


@dataclass(frozen=True)
class Event:
    """Timeline entry. kind is one of add_user / remove_user / set_snr /
    set_doppler; add_user consumes offset_db (+ optional lognormal
    spread_db), remove_user consumes user_id, the setters consume value."""

    symbol_index: int
    kind: str
    offset_db: float = 0.0
    spread_db: float = 0.0
    user_id: int = -1
    value: float = 0.0


@dataclass(frozen=True)
class ScenarioScript:
    """Declarative experiment timeline. The first add_user (id 0) is the
    desired user at the 0 dB reference power."""

    duration: int
    trials: int
    seed: int
    events: tuple
    snr_db: float = 15.0
    doppler: float = 0.0
    gold_degree: int = 5
    n_taps: int = 6
    n_paths: int = 3

    def __post_init__(self):
        idx = [e.symbol_index for e in self.events]
        if idx != sorted(idx):
            raise ConfigurationError("scenario events must be sorted by symbol index")
        live = set()
        next_id = 0
        for e in self.events:
            if e.kind == "add_user":
                live.add(next_id)
                next_id += 1
            elif e.kind == "remove_user":
                if e.user_id not in live:
                    raise ConfigurationError(f"remove_user references dead user {e.user_id}")
                live.discard(e.user_id)
            elif e.kind not in ("set_snr", "set_doppler"):
                raise ConfigurationError(f"unknown event kind {e.kind!r}")


@dataclass(frozen=True)
class ReceiverConfig:
    """Algorithm and bound selection for one experiment."""

    algorithm: str = "sm_ccm_sg"            # sm_ccm_sg | sm_ccm_rls | ccm_sg_fixed | ccm_rls_fixed
    bound: str = "fixed"                    # fixed | pdb | pidb
    gamma: float = 0.65
    alpha: float = 8.0
    beta: float = 0.95                      # forgetting factor; innovation weight is 1 - beta
    tau: float = 0.35
    nu: float = 1.0
    mu_fixed: float = 1e-3
    lam_fixed: float = 1.0
    delta: float = 0.01
    rls_discount: float = 1.0               # exponential window on accepted updates (1 = printed growing window)
    rls_weight_cap: float = 1.0             # cap on a single update's relative weight (0 = off)
    constraint_agc: bool = True             # normalise nu by the amplitude estimate
    channel_estimation: bool = True         # False: genie channel knowledge
    p_power: int = 1
    amplitude_mode: str = "power"
    literal_recursions: bool = False

    def __post_init__(self):
        if self.algorithm not in ("sm_ccm_sg", "sm_ccm_rls", "ccm_sg_fixed", "ccm_rls_fixed"):
            raise ConfigurationError(f"unknown algorithm {self.algorithm!r}")
        if self.bound not in ("fixed", "pdb", "pidb"):
            raise ConfigurationError(f"unknown bound {self.bound!r}")
        if not 0.0 < self.beta < 1.0:
            raise ConfigurationError(f"beta must lie in (0, 1), got {self.beta}")


@dataclass
class TrialResult:
    trial_index: int
    records: np.ndarray
    updates: int
    failed: bool = False
    failure: str = ""
    aux: dict = field(default_factory=dict)


class _User:
    """Per-trial live user: spreading matrices, channel, symbol stream."""

    __slots__ = ("uid", "amplitude", "channel", "mats", "spread", "symbols", "start", "static")

    def __init__(self, uid, amplitude, channel, chips, symbols, start):
        self.uid = uid
        self.amplitude = amplitude
        self.channel = channel
        n_taps = channel.taps.size
        self.mats = np.stack([
            cdma.build_constraint_matrix(chips, n_taps, -1),
            cdma.build_constraint_matrix(chips, n_taps, 0),
            cdma.build_constraint_matrix(chips, n_taps, +1),
        ])
        self.spread = np.empty((3, self.mats.shape[1]), dtype=np.complex128)
        self.symbols = symbols          # symbols[j+1] is the symbol at local time j
        self.start = start
        self.static = channel.doppler == 0.0
        self.refresh_spread()

    def refresh_spread(self):
        for s in range(3):
            self.spread[s] = self.mats[s] @ self.channel.taps

    def symbol(self, i, shift=0):
        # local index with the +1 guard offset; entries before entry are zero
        j = i - self.start + 1 + shift
        return self.symbols[j] if 0 <= j < self.symbols.size else 0.0


def _make_user(uid, offset_db, spread_db, rng, script, n_sym_left, codes, doppler):
    amp_db = offset_db + (rng.normal(0.0, spread_db) if spread_db > 0.0 else 0.0)
    channel = cdma.make_channel(rng, script.n_taps, doppler,
                                path_powers_db=tuple(-3.0 * l for l in range(script.n_paths)))
    symbols = cdma.qpsk_symbols(rng, n_sym_left + 2)
    if uid >= codes.shape[0]:
        raise ConfigurationError(f"scenario needs more users than the Gold family provides ({codes.shape[0]})")
    return _User(uid, 10.0 ** (amp_db / 20.0), channel, codes[uid], symbols, 0)


def run_trial(script: ScenarioScript, rx: ReceiverConfig, trial_index: int,
              collect_aux: bool = False) -> TrialResult:
    """Run one deterministic trial; see module docstring for the pinned
    per-symbol order. Numerical failures mark the trial failed."""
    try:
        return _run_trial_inner(script, rx, trial_index, collect_aux)
    except (NumericalError, OverflowError, FloatingPointError) as exc:
        return TrialResult(trial_index, np.zeros(0, dtype=RECORD_DTYPE), 0,
                           failed=True, failure=str(exc))


def _run_trial_inner(script, rx, trial_index, collect_aux):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=script.seed,
                                                       spawn_key=(trial_index,)))
    codes = cdma.gold_sequences(script.gold_degree)
    n_chips = codes.shape[1]
    m_dim = n_chips + script.n_taps - 1
    snr_db = script.snr_db
    doppler = script.doppler
    sigma2 = cdma.noise_power_from_ebn0(snr_db)
    w_innov = 1.0 - rx.beta

    users: list[_User] = []
    next_id = 0
    events = list(script.events)
    ev_ptr = 0

    # consume events scheduled at symbol 0 before building receiver state
    def apply_events(i):
        nonlocal ev_ptr, next_id, snr_db, sigma2, doppler
        while ev_ptr < len(events) and events[ev_ptr].symbol_index <= i:
            e = events[ev_ptr]
            ev_ptr += 1
            if e.kind == "add_user":
                u = _make_user(next_id, e.offset_db, e.spread_db, rng, script,
                               script.duration - i, codes, doppler)
                u.start = i
                users.append(u)
                next_id += 1
            elif e.kind == "remove_user":
                users[:] = [u for u in users if u.uid != e.user_id]
            elif e.kind == "set_snr":
                snr_db = e.value
                sigma2 = cdma.noise_power_from_ebn0(snr_db)
            elif e.kind == "set_doppler":
                doppler = e.value

    apply_events(0)
    if not users or users[0].uid != 0:
        raise ConfigurationError("scenario must add the desired user (id 0) at symbol 0")

    boundaries = sorted({e.symbol_index for e in events if e.symbol_index > 0}
                        | {script.duration})

    desired = users[0]
    c_mat = desired.mats[SHIFT_CUR]

    # channel estimate: genie or blind power-method state
    ce = chanest.ChannelEstState.initial(script.n_taps, rx.p_power)
    if rx.channel_estimation:
        h_hat = ce.h_hat.copy()
        ce_r_inv = np.eye(m_dim, dtype=np.complex128) / rx.delta
    else:
        h_hat = desired.channel.taps / np.linalg.norm(desired.channel.taps)
        ce_r_inv = None

    p_vec = c_mat @ h_hat
    is_rls = rx.algorithm in ("sm_ccm_rls", "ccm_rls_fixed")
    if is_rls:
        state = RlsState.initial(p_vec, nu=rx.nu, delta=rx.delta, discount=rx.rls_discount,
                                 weight_cap=rx.rls_weight_cap)
    else:
        state = SgState.initial(p_vec, nu=rx.nu)

    bstate = bnd.BoundState(gamma=rx.gamma, alpha=rx.alpha, beta=w_innov, tau=rx.tau,
                            sigma2=sigma2, amplitude_mode=rx.amplitude_mode,
                            literal_recursions=rx.literal_recursions)

    records = np.zeros(script.duration, dtype=RECORD_DTYPE)
    records["symbol_index"] = np.arange(script.duration)
    updates = 0
    booted = False
    last_ce_update = 0

    aux = {}
    if collect_aux:
        ea2 = np.zeros(script.duration)
        z_hist = np.zeros(script.duration, dtype=np.complex128)
        wr_hist = np.zeros(script.duration, dtype=np.complex128)
        mu_hist = np.zeros(script.duration)
        u2_hist = np.zeros(script.duration)
        part_hist = np.zeros((script.duration, 3))
        opt_norm2 = 0.0
        b_hist = np.zeros(script.duration, dtype=np.complex128)

    seg_start = 0
    for seg_end in boundaries:
        if seg_end <= seg_start:
            continue
        seg_len = seg_end - seg_start
        n_users = len(users)
        seg_static = doppler == 0.0

        # per-segment coefficient tensor: amplitude * symbol at shifts -1/0/+1
        coeff = np.zeros((seg_len, n_users, 3), dtype=np.complex128)
        for k, u in enumerate(users):
            j0 = seg_start - u.start + 1
            for s, off in ((SHIFT_PREV, -1), (SHIFT_CUR, 0), (SHIFT_NEXT, 1)):
                coeff[:, k, s] = u.amplitude * u.symbols[j0 + off:j0 + off + seg_len]
        b_cur = coeff[:, 0, SHIFT_CUR] / users[0].amplitude

        noise_scale = math.sqrt(sigma2 / 2.0)
        gauss = rng.standard_normal((seg_len, 2, m_dim))
        noise_seg = noise_scale * (gauss[:, 0, :] + 1j * gauss[:, 1, :])

        if seg_static:
            spread_all = np.stack([u.spread for u in users])       # (K, 3, M)
            desired_seg = np.outer(coeff[:, 0, SHIFT_CUR], spread_all[0, SHIFT_CUR])
            mai_seg = coeff[:, 1:, SHIFT_CUR] @ spread_all[1:, SHIFT_CUR, :]
            isi_seg = (coeff[:, :, SHIFT_PREV] @ spread_all[:, SHIFT_PREV, :]
                       + coeff[:, :, SHIFT_NEXT] @ spread_all[:, SHIFT_NEXT, :])
            r_seg = desired_seg + mai_seg + isi_seg + noise_seg
            if collect_aux:
                w_opt = _optimal_filter(users, sigma2)
                opt_norm2 = float(np.vdot(w_opt, w_opt).real)
                wr_seg = r_seg @ w_opt.conj()
                sl = slice(seg_start, seg_end)
                part_hist[sl, 0] = np.abs(mai_seg @ w_opt.conj()) ** 2
                part_hist[sl, 1] = np.abs(isi_seg @ w_opt.conj()) ** 2
                part_hist[sl, 2] = np.abs(noise_seg @ w_opt.conj()) ** 2

        for t in range(seg_len):
            i = seg_start + t

            if not seg_static:
                # 1. fading advance and per-symbol composition
                for u in users:
                    cdma.fading_step(u.channel)
                    u.refresh_spread()
                parts = np.zeros((3, m_dim), dtype=np.complex128)
                for k, u in enumerate(users):
                    main = coeff[t, k, SHIFT_CUR] * u.spread[SHIFT_CUR]
                    parts[0 if k == 0 else 1] += main
                    parts[2] += (coeff[t, k, SHIFT_PREV] * u.spread[SHIFT_PREV]
                                 + coeff[t, k, SHIFT_NEXT] * u.spread[SHIFT_NEXT])
                r = parts.sum(axis=0) + noise_seg[t]
                if collect_aux:
                    w_opt = _optimal_filter(users, sigma2)
                    opt_norm2 = float(np.vdot(w_opt, w_opt).real)
                    part_hist[i, 0] = abs(np.vdot(w_opt, parts[1])) ** 2
                    part_hist[i, 1] = abs(np.vdot(w_opt, parts[2])) ** 2
                    part_hist[i, 2] = abs(np.vdot(w_opt, noise_seg[t])) ** 2
                    wr_t = complex(np.vdot(w_opt, r))
            else:
                r = r_seg[t]
                if collect_aux:
                    wr_t = complex(wr_seg[t])

            z_pre = complex(np.vdot(state.w, r))
            e_pre = abs(z_pre) ** 2 - 1.0

            # 3. channel estimation
            if rx.channel_estimation:
                r_inv_src = state.r_inv if is_rls else ce_r_inv
                if abs(e_pre) > bstate.gamma > 0.0:
                    rr = r_inv_src @ r
                    q_ce = np.vdot(r, rr).real
                    if q_ce <= 0.0:
                        raise NumericalError("channel-estimation correlation inverse "
                                             "lost positive definiteness")
                    lam_ce = (abs(e_pre) / bstate.gamma - 1.0) / q_ce
                    ce_disc = rx.rls_discount ** max(1, i - last_ce_update) \
                        if rx.rls_discount < 1.0 else 1.0
                    chanest.upsilon_update(ce, c_mat, bstate.a_hat, r_inv_src, lam_ce,
                                           discount=ce_disc)
                    if not is_rls:
                        # rank-one correlation update for the standalone tracker
                        c = lam_ce * abs(z_pre) ** 2 / ce_disc
                        denom = 1.0 + c * q_ce
                        if denom <= 0.0:
                            raise NumericalError("channel-estimation correlation update "
                                                 "lost positive definiteness")
                        ce_r_inv -= (c / denom) * np.outer(rr, rr.conj())
                        ce_r_inv *= 1.0 / ce_disc
                        ce_r_inv += ce_r_inv.conj().T.copy()
                        ce_r_inv *= 0.5
                    last_ce_update = i
                chanest.sm_bce_step(ce)
                h_hat = chanest.align_phase(ce.h_hat, desired.channel.taps)
                p_vec = c_mat @ h_hat
                state.set_signature(p_vec)
                state.reanchor()
            elif not seg_static:
                h_hat = desired.channel.taps / np.linalg.norm(desired.channel.taps)
                p_vec = c_mat @ h_hat
                state.set_signature(p_vec)
                state.reanchor()

            # 4. matched filter output, interference and amplitude tracking
            x_out = complex(np.vdot(p_vec, r))      # RAKE filter f = C h_hat
            if not booted:
                bnd.bootstrap_amplitude(bstate, x_out)
                booted = True
            b_pre = detect(z_pre)
            d_res = bnd.interference_residual(x_out, bstate.a_hat, b_pre)
            bnd.track_interference(bstate, d_res)
            bnd.amplitude_update(bstate, x_out)

            # 5. bound
            if rx.bound == "pdb":
                bstate.sigma2 = sigma2
                bnd.pdb_update(bstate, state.w)
            elif rx.bound == "pidb":
                bstate.sigma2 = sigma2
                bnd.pidb_update(bstate, state.w)

            # 5b. blind constraint normalisation (gradient family only):
            # hold the estimated convexity margin D = nu^2 A_hat^2 near one
            # so the anchored output stays on the unit-modulus target as
            # the channel energy wanders. Slew-limited so detection-error
            # transients in the amplitude tracker cannot close a feedback
            # loop with the receiver. The LS recursions are scale-committed
            # through their accumulated cross-correlations, so nu stays
            # fixed there.
            if rx.constraint_agc and booted and not is_rls:
                target_nu = rx.nu / min(max(bstate.a_hat, 0.25), 4.0)
                state.nu += 0.01 * (target_nu - state.nu)
                state.reanchor()

            # 6. receiver update
            if rx.algorithm == "sm_ccm_sg":
                out = sm_ccm_sg_update(state, r, bstate.gamma)
            elif rx.algorithm == "ccm_sg_fixed":
                out = sm_ccm_sg_update(state, r, 0.0, mu_override=rx.mu_fixed)
            elif rx.algorithm == "sm_ccm_rls":
                out = sm_ccm_rls_update(state, r, bstate.gamma)
            else:
                out = sm_ccm_rls_update(state, r, 0.0, lam_override=rx.lam_fixed)
            updates += int(out.updated)

            # 7. detection on the post-update output
            z_post = complex(np.vdot(state.w, r))
            b_true = complex(b_cur[t])
            err = int(abs(detect(z_post) - b_true) > 1e-12)

            # 8. metrics
            rec = records[i]
            rec["mse"] = abs(b_true - z_pre) ** 2
            rec["ber_indicator"] = err
            rec["updated"] = int(out.updated)
            rec["gamma"] = bstate.gamma
            rec["v_hat"] = bstate.v_hat
            rec["a_hat"] = bstate.a_hat
            rec["channel_mse"] = chanest.channel_mse(h_hat, desired.channel.taps)

            if collect_aux:
                # a-priori error against the optimum filter
                ea2[i] = abs(wr_t - z_pre) ** 2
                z_hist[i] = z_pre
                wr_hist[i] = wr_t
                b_hist[i] = b_true
                mu_hist[i] = out.step_or_lambda if out.updated else 0.0
                pp = np.vdot(p_vec, p_vec).real
                g = np.vdot(p_vec, r)
                u2_hist[i] = (np.vdot(r, r).real - (g.conjugate() * g).real / pp)

        seg_start = seg_end
        if seg_end < script.duration:
            apply_events(seg_end)
            if not any(u.uid == 0 for u in users):
                raise ConfigurationError("scenario removed the desired user")
            desired = users[0]

    if collect_aux:
        tail = slice(script.duration // 2, None)
        b_stream = b_hist
        # coherent desired gain of the optimum filter, measured on the tail
        opt_gain = wr_hist * np.conj(b_stream)
        s_hat = np.mean(z_hist[tail] * np.conj(b_stream[tail]))
        resid = z_hist[tail] - s_hat * b_stream[tail]
        aux = dict(
            excess_mse=float(np.mean(ea2[tail])),
            desired_power=float(abs(np.mean(opt_gain[tail])) ** 2),
            residual_power=float(np.mean(np.abs(resid) ** 2)),
            lam_filter=float(abs(s_hat) ** 2),
            mu1=float(np.mean(mu_hist[tail])),
            mu2=float(np.mean(mu_hist[tail] ** 2)),
            u2=float(np.mean(u2_hist[tail])),
            u4=float(np.mean(u2_hist[tail] ** 2)),
            sigma2_mai=float(np.mean(part_hist[tail, 0])),
            sigma2_isi=float(np.mean(part_hist[tail, 1])),
            sigma2_noise=float(np.mean(part_hist[tail, 2])),
            w_opt_norm2=opt_norm2,
            sigma_e=float(np.std(np.abs(z_hist[tail]) ** 2 - 1.0)),
        )
    return TrialResult(trial_index, records, updates, aux=aux)


def _optimal_filter(users, sigma2):
    """Exact linear MMSE filter for the desired user's current symbol,
    assembled from the true per-user effective signatures."""
    m_dim = users[0].spread.shape[1]
    cov = sigma2 * np.eye(m_dim, dtype=np.complex128)
    for u in users:
        for s in range(3):
            e = u.amplitude * u.spread[s]
            cov += np.outer(e, e.conj())
    target = users[0].amplitude * users[0].spread[SHIFT_CUR]
    return np.linalg.solve(cov, target)


def _trial_args(job):
    script, rx, idx, collect_aux = job
    return run_trial(script, rx, idx, collect_aux)


def run_experiment(script: ScenarioScript, rx: ReceiverConfig, threads: int = 1,
                   collect_aux: bool = False):
    """Run the full ensemble. Returns (results, n_failed); failed trials
    are excluded, the survivors sorted by trial index."""
    jobs = [(script, rx, t, collect_aux) for t in range(script.trials)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_trial_args, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        results = [_trial_args(j) for j in jobs]
    results.sort(key=lambda tr: tr.trial_index)
    good = [tr for tr in results if not tr.failed]
    return good, len(results) - len(good)


def update_rate(trials) -> float:
    """Mean over trials of the per-trial update fraction."""
    trials = list(trials)
    if not trials:
        raise ValueError("update_rate of an empty ensemble")
    ratios = []
    for updates, symbols in trials:
        if symbols <= 0:
            raise ValueError("trial with no symbols")
        ratios.append(updates / symbols)
    return float(np.mean(ratios))


def ensemble_average(streams):
    """Pointwise means and 95% normal-approximation half-widths.

    streams: list of equal-length structured record arrays (or plain
    float arrays). Returns (mean, half_width) with matching dtype
    fields; a single trial has zero half-width by convention.
    """
    if not streams:
        raise ValueError("ensemble_average of an empty list")
    lengths = {len(s) for s in streams}
    if len(lengths) != 1:
        raise ValueError(f"trial streams disagree on length: {sorted(lengths)}")
    if streams[0].dtype.names:
        fields = [f for f in streams[0].dtype.names if f != "symbol_index"]
        stacked = {f: np.stack([s[f].astype(np.float64) for s in streams]) for f in fields}
    else:
        stacked = {"value": np.stack([np.asarray(s, dtype=np.float64) for s in streams])}
    n = len(streams)
    mean = {f: v.mean(axis=0) for f, v in stacked.items()}
    if n == 1:
        half = {f: np.zeros_like(v) for f, v in mean.items()}
    else:
        half = {f: 1.96 * v.std(axis=0, ddof=1) / math.sqrt(n) for f, v in stacked.items()}
    return mean, half


@dataclass
class ComparisonReport:
    simulated: float
    predicted: float
    diff_db: float
    tolerance_db: float
    passed: bool


def compare_analytical(sim_steady_mse: float, predicted: float,
                       tolerance_db: float = 2.0) -> ComparisonReport:
    """dB-domain difference between simulated and predicted values."""
    if not (sim_steady_mse > 0.0 and predicted > 0.0 and math.isfinite(sim_steady_mse)
            and math.isfinite(predicted)):
        raise ValueError("both values must be finite and positive")
    diff = 10.0 * math.log10(predicted / sim_steady_mse)
    return ComparisonReport(sim_steady_mse, predicted, diff, tolerance_db,
                            abs(diff) <= tolerance_db)


def static_scenario(n_users: int = 8, duration: int = 3000, trials: int = 100,
                    seed: int = 12345, snr_db: float = 15.0, doppler: float = 0.0,
                    power_spread_db: float = 0.0, offsets_db=None) -> ScenarioScript:
    """All users present from symbol 0. Interferer offsets default to the
    desired user's power; a lognormal spread draws per-trial offsets."""
    if offsets_db is None:
        offsets_db = [0.0] * n_users
    events = [Event(0, "add_user", offset_db=offsets_db[k],
                    spread_db=(power_spread_db if k > 0 else 0.0))
              for k in range(n_users)]
    return ScenarioScript(duration=duration, trials=trials, seed=seed,
                          events=tuple(events), snr_db=snr_db, doppler=doppler)


def dynamic_entry_exit_scenario(duration: int = 3000, trials: int = 100,
                                seed: int = 12345, snr_db: float = 15.0,
                                doppler: float = 0.0) -> ScenarioScript:
    """The pinned non-stationary script: 8 users (two at +7 dB) at start;
    at 1000 two +10 dB and one 0 dB enter while one +7 dB leaves; at 2000
    one +10 dB and five 0 dB leave while one +15 dB enters. Live user
    counts run 8 -> 10 -> 5."""
    ev = [Event(0, "add_user", offset_db=0.0),          # id 0, desired
          Event(0, "add_user", offset_db=7.0),          # id 1
          Event(0, "add_user", offset_db=7.0),          # id 2
          Event(0, "add_user", offset_db=0.0),          # id 3
          Event(0, "add_user", offset_db=0.0),          # id 4
          Event(0, "add_user", offset_db=0.0),          # id 5
          Event(0, "add_user", offset_db=0.0),          # id 6
          Event(0, "add_user", offset_db=0.0),          # id 7
          Event(1000, "add_user", offset_db=10.0),      # id 8
          Event(1000, "add_user", offset_db=10.0),      # id 9
          Event(1000, "add_user", offset_db=0.0),       # id 10
          Event(1000, "remove_user", user_id=1),
          Event(2000, "remove_user", user_id=8),
          Event(2000, "remove_user", user_id=3),
          Event(2000, "remove_user", user_id=4),
          Event(2000, "remove_user", user_id=5),
          Event(2000, "remove_user", user_id=6),
          Event(2000, "remove_user", user_id=7),
          Event(2000, "add_user", offset_db=15.0)]      # id 11
    return ScenarioScript(duration=duration, trials=trials, seed=seed,
                          events=tuple(ev), snr_db=snr_db, doppler=doppler)


def channel_estimation_scenario(duration: int = 3000, trials: int = 50,
                                seed: int = 12345, snr_db: float = 15.0) -> ScenarioScript:
    """Ten users with 3 dB lognormal interferer powers; six more (6 dB
    spread) enter at symbol 1500."""
    ev = [Event(0, "add_user", offset_db=0.0)]
    ev += [Event(0, "add_user", offset_db=0.0, spread_db=3.0) for _ in range(9)]
    ev += [Event(1500, "add_user", offset_db=0.0, spread_db=6.0) for _ in range(6)]
    return ScenarioScript(duration=duration, trials=trials, seed=seed,
                          events=tuple(ev), snr_db=snr_db)
