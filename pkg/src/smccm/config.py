"""Declarative experiment configuration.

A YAML key-value tree with four sections (system, algorithm, bound,
scenario) plus run/analysis/output controls. Every key has a default
matching the reference operating point (N = 31 Gold codes, gamma = 0.65,
alpha = 8, tau = 0.35, beta = 0.95), so an empty file is a complete
experiment. Unknown keys are rejected by name.

Schema (defaults in parentheses):

system:
  gold_degree (5)        spreading-code register degree, N = 2^d - 1
  n_taps (6)             channel FIR model order L_p
  n_paths (3)            propagation paths per user
  ebn0_db ([15.0])       Eb/N0 grid in dB
  doppler (0.0)          normalised Doppler f_d T
algorithm:
  kind (sm_ccm_sg)       sm_ccm_sg | sm_ccm_rls | ccm_sg_fixed | ccm_rls_fixed
  nu (1.0)               constraint value
  mu_fixed (0.001)       fixed-step baseline step size
  lam_fixed (1.0)        fixed forgetting weight baseline
  delta (0.01)           inverse-correlation initialisation scale
  rls_discount (1.0)     exponential window applied on accepted LS updates
  rls_weight_cap (1.0)   relative-weight cap per accepted LS update (0 = off)
  constraint_agc (true)  normalise the constraint by the amplitude estimate
  channel_estimation (true)   blind estimation; false = genie channel
  p_power (1)            inverse-correlation power in the estimator
bound:
  kind (fixed)           fixed | pdb | pidb
  gamma (0.65)           fixed bound / initial bound value
  alpha (8.0)            noise-scaling tuning parameter
  beta (0.95)            forgetting factor (innovation weight 1 - beta)
  tau (0.35)             interference weighting
  amplitude_mode (power) power | magnitude amplitude-tracker variant
  literal_recursions (false) unweighted-innovation magnitude recursions
scenario:
  kind (static)          static | dynamic_entry_exit | channel_estimation
  n_users (8)            static-scenario population
  duration (3000)        symbols per trial
  trials (100)           ensemble size
  power_spread_db (0.0)  lognormal interferer power spread
run:
  seed (12345)           base RNG seed
  threads (1)            trial worker processes
  warmup (200)           symbols excluded from error tallies
analysis:
  enabled (false)        closed-form comparison after simulation
  tolerance_db (2.0)     pass/fail threshold for the comparison
output:
  dir (out)              output directory (SMCCM_OUT_DIR overrides)
  formats ([csv, svg])   emitted artifacts
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field

import yaml

from .errors import ConfigurationError
from .harness import ReceiverConfig, ScenarioScript, channel_estimation_scenario, \
    dynamic_entry_exit_scenario, static_scenario

ALGORITHMS = ("sm_ccm_sg", "sm_ccm_rls", "ccm_sg_fixed", "ccm_rls_fixed")
BOUNDS = ("fixed", "pdb", "pidb")
SCENARIOS = ("static", "dynamic_entry_exit", "channel_estimation")
OUT_DIR_ENV = "SMCCM_OUT_DIR"


@dataclass
class ExperimentConfig:
    gold_degree: int = 5
    n_taps: int = 6
    n_paths: int = 3
    ebn0_db: list = field(default_factory=lambda: [15.0])
    doppler: float = 0.0

    algorithm: str = "sm_ccm_sg"
    nu: float = 1.0
    mu_fixed: float = 1e-3
    lam_fixed: float = 1.0
    delta: float = 0.01
    rls_discount: float = 1.0
    rls_weight_cap: float = 1.0
    constraint_agc: bool = True
    channel_estimation: bool = True
    p_power: int = 1

    bound: str = "fixed"
    gamma: float = 0.65
    alpha: float = 8.0
    beta: float = 0.95
    tau: float = 0.35
    amplitude_mode: str = "power"
    literal_recursions: bool = False

    scenario: str = "static"
    n_users: int = 8
    duration: int = 3000
    trials: int = 100
    power_spread_db: float = 0.0

    seed: int = 12345
    threads: int = 1
    warmup: int = 200

    analysis_enabled: bool = False
    tolerance_db: float = 2.0

    out_dir: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "svg"])

    def receiver_config(self) -> ReceiverConfig:
        return ReceiverConfig(
            algorithm=self.algorithm, bound=self.bound, gamma=self.gamma,
            alpha=self.alpha, beta=self.beta, tau=self.tau, nu=self.nu,
            mu_fixed=self.mu_fixed, lam_fixed=self.lam_fixed, delta=self.delta,
            rls_discount=self.rls_discount, rls_weight_cap=self.rls_weight_cap,
            constraint_agc=self.constraint_agc,
            channel_estimation=self.channel_estimation, p_power=self.p_power,
            amplitude_mode=self.amplitude_mode,
            literal_recursions=self.literal_recursions,
        )

    def scenario_script(self, snr_db: float) -> ScenarioScript:
        if self.scenario == "static":
            return static_scenario(n_users=self.n_users, duration=self.duration,
                                   trials=self.trials, seed=self.seed, snr_db=snr_db,
                                   doppler=self.doppler,
                                   power_spread_db=self.power_spread_db)
        if self.scenario == "dynamic_entry_exit":
            return dynamic_entry_exit_scenario(duration=self.duration, trials=self.trials,
                                               seed=self.seed, snr_db=snr_db,
                                               doppler=self.doppler)
        return channel_estimation_scenario(duration=self.duration, trials=self.trials,
                                           seed=self.seed, snr_db=snr_db)


_SECTIONS = {
    "system": {"gold_degree": int, "n_taps": int, "n_paths": int,
               "ebn0_db": list, "doppler": float},
    "algorithm": {"kind": str, "nu": float, "mu_fixed": float, "lam_fixed": float,
                  "delta": float, "rls_discount": float, "rls_weight_cap": float,
                  "constraint_agc": bool,
                  "channel_estimation": bool, "p_power": int},
    "bound": {"kind": str, "gamma": float, "alpha": float, "beta": float, "tau": float,
              "amplitude_mode": str, "literal_recursions": bool},
    "scenario": {"kind": str, "n_users": int, "duration": int, "trials": int,
                 "power_spread_db": float},
    "run": {"seed": int, "threads": int, "warmup": int},
    "analysis": {"enabled": bool, "tolerance_db": float},
    "output": {"dir": str, "formats": list},
}

# (section, key) -> ExperimentConfig attribute
_ATTR = {
    ("system", "gold_degree"): "gold_degree", ("system", "n_taps"): "n_taps",
    ("system", "n_paths"): "n_paths", ("system", "ebn0_db"): "ebn0_db",
    ("system", "doppler"): "doppler",
    ("algorithm", "kind"): "algorithm", ("algorithm", "nu"): "nu",
    ("algorithm", "mu_fixed"): "mu_fixed", ("algorithm", "lam_fixed"): "lam_fixed",
    ("algorithm", "delta"): "delta",
    ("algorithm", "rls_discount"): "rls_discount",
    ("algorithm", "rls_weight_cap"): "rls_weight_cap",
    ("algorithm", "constraint_agc"): "constraint_agc",
    ("algorithm", "channel_estimation"): "channel_estimation",
    ("algorithm", "p_power"): "p_power",
    ("bound", "kind"): "bound", ("bound", "gamma"): "gamma",
    ("bound", "alpha"): "alpha", ("bound", "beta"): "beta", ("bound", "tau"): "tau",
    ("bound", "amplitude_mode"): "amplitude_mode",
    ("bound", "literal_recursions"): "literal_recursions",
    ("scenario", "kind"): "scenario", ("scenario", "n_users"): "n_users",
    ("scenario", "duration"): "duration", ("scenario", "trials"): "trials",
    ("scenario", "power_spread_db"): "power_spread_db",
    ("run", "seed"): "seed", ("run", "threads"): "threads", ("run", "warmup"): "warmup",
    ("analysis", "enabled"): "analysis_enabled",
    ("analysis", "tolerance_db"): "tolerance_db",
    ("output", "dir"): "out_dir", ("output", "formats"): "formats",
}


def _coerce(section, key, value, want):
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigurationError(f"{section}.{key}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigurationError(f"{section}.{key}: expected an integer, got {value!r}")
        return value
    if want is bool:
        if not isinstance(value, bool):
            raise ConfigurationError(f"{section}.{key}: expected a boolean, got {value!r}")
        return value
    if want is list:
        if not isinstance(value, list):
            raise ConfigurationError(f"{section}.{key}: expected a list, got {value!r}")
        return value
    return str(value)


def _validate(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.algorithm not in ALGORITHMS:
        raise ConfigurationError(f"algorithm.kind must be one of {ALGORITHMS}, got {cfg.algorithm!r}")
    if cfg.bound not in BOUNDS:
        raise ConfigurationError(f"bound.kind must be one of {BOUNDS}, got {cfg.bound!r}")
    if cfg.scenario not in SCENARIOS:
        raise ConfigurationError(f"scenario.kind must be one of {SCENARIOS}, got {cfg.scenario!r}")
    if not 0.0 < cfg.beta < 1.0:
        raise ConfigurationError(f"bound.beta must lie in the open interval (0, 1), got {cfg.beta}")
    if cfg.gamma < 0.0:
        raise ConfigurationError(f"bound.gamma must be >= 0, got {cfg.gamma}")
    if cfg.alpha <= 0.0:
        raise ConfigurationError(f"bound.alpha must be > 0, got {cfg.alpha}")
    if cfg.tau < 0.0:
        raise ConfigurationError(f"bound.tau must be >= 0, got {cfg.tau}")
    if cfg.amplitude_mode not in ("power", "magnitude"):
        raise ConfigurationError(f"bound.amplitude_mode must be power or magnitude, got {cfg.amplitude_mode!r}")
    if cfg.p_power not in (1, 2):
        raise ConfigurationError(f"algorithm.p_power must be 1 or 2, got {cfg.p_power}")
    if not 0.0 < cfg.rls_discount <= 1.0:
        raise ConfigurationError(f"algorithm.rls_discount must lie in (0, 1], got {cfg.rls_discount}")
    if cfg.rls_weight_cap < 0.0:
        raise ConfigurationError(f"algorithm.rls_weight_cap must be >= 0, got {cfg.rls_weight_cap}")
    if cfg.gold_degree not in (5, 6, 7):
        raise ConfigurationError(f"system.gold_degree must be 5, 6 or 7, got {cfg.gold_degree}")
    if cfg.duration <= 0 or cfg.trials <= 0:
        raise ConfigurationError("scenario.duration and scenario.trials must be positive")
    if cfg.threads < 1:
        raise ConfigurationError(f"run.threads must be >= 1, got {cfg.threads}")
    if not cfg.ebn0_db:
        raise ConfigurationError("system.ebn0_db must list at least one SNR point")
    cfg.ebn0_db = [float(v) for v in cfg.ebn0_db]
    cfg.formats = [str(v) for v in cfg.formats]
    for fmt in cfg.formats:
        if fmt not in ("csv", "svg"):
            raise ConfigurationError(f"output.formats entries must be csv or svg, got {fmt!r}")
    return cfg


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate a YAML configuration; empty input yields the
    full default configuration."""
    data = yaml.safe_load(text) if text.strip() else {}
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("configuration root must be a mapping")
    cfg = ExperimentConfig()
    for section, body in data.items():
        if section not in _SECTIONS:
            raise ConfigurationError(f"unknown section {section!r}; expected one of {sorted(_SECTIONS)}")
        if body is None:
            continue
        if not isinstance(body, dict):
            raise ConfigurationError(f"section {section!r} must be a mapping")
        for key, value in body.items():
            if key not in _SECTIONS[section]:
                raise ConfigurationError(
                    f"unknown key {section}.{key}; expected one of {sorted(_SECTIONS[section])}")
            setattr(cfg, _ATTR[(section, key)], _coerce(section, key, value, _SECTIONS[section][key]))
    cfg = _validate(cfg)
    if cfg.out_dir == "out":
        cfg.out_dir = os.environ.get(OUT_DIR_ENV, cfg.out_dir)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(cfg: ExperimentConfig) -> str:
    """Round-trippable YAML rendering of a configuration."""
    tree = {}
    for (section, key), attr in _ATTR.items():
        tree.setdefault(section, {})[key] = getattr(cfg, attr)
    return yaml.safe_dump(tree, sort_keys=True)


def config_equal(a: ExperimentConfig, b: ExperimentConfig) -> bool:
    return asdict(a) == asdict(b)
