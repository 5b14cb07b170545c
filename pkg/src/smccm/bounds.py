"""Time-varying error bounds and blind interference/amplitude tracking.

The bound recursions are exponentially weighted moving averages written
in the form  state <- (1-beta)*state + beta*innovation, so ``beta`` is
the weight on the innovation. Two bounds are provided:

* parameter-dependent (PDB): tracks sqrt(alpha ||w||^2 sigma^2), the
  noise picked up by the current filter;
* parameter-and-interference-dependent (PIDB): adds sqrt(tau) times the
  tracked interference power.

Interference power is estimated by subtracting the reconstructed desired
signal (amplitude estimate times the linear receiver's detected symbol)
from the matched-filter output x and tracking |d|^2. Amplitude
estimation supports two modes:

* ``power`` (default): track E|x|^2 and take sqrt(E|x|^2 - v_hat); the
  interference power cancels exactly at the fixed point, which is the
  desired-signal magnitude.
* ``magnitude``: track E|x| and subtract sqrt(v_hat). Kept for
  reference; biased low whenever interference is non-negligible since
  E|x| < sqrt(E|x|^2). ``literal_recursions`` additionally reproduces
  the unweighted-innovation variants of the magnitude recursions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class BoundState:
    """Bound value and tracker states for one user.

    beta is the innovation weight of every recursion here. q tracks the
    mean output magnitude (magnitude mode), q2 the mean output power
    (power mode); a_hat is the amplitude estimate, v_hat the tracked
    interference power.
    """

    gamma: float
    alpha: float = 8.0
    beta: float = 0.05
    tau: float = 0.35
    sigma2: float = 0.0
    v_hat: float = 0.0
    q: float = 0.0
    q2: float = 0.0
    a_hat: float = 0.0
    amplitude_mode: str = "power"
    literal_recursions: bool = False


def pdb_update(s: BoundState, w: np.ndarray) -> BoundState:
    """gamma <- (1-beta) gamma + beta sqrt(alpha ||w||^2 sigma^2)."""
    target = np.sqrt(s.alpha * np.vdot(w, w).real * s.sigma2)
    s.gamma = (1.0 - s.beta) * s.gamma + s.beta * target
    return s


def pidb_update(s: BoundState, w: np.ndarray) -> BoundState:
    """gamma <- (1-beta) gamma + beta (sqrt(tau v_hat^2) + sqrt(alpha ||w||^2 sigma^2))."""
    target = np.sqrt(s.tau * s.v_hat**2) + np.sqrt(s.alpha * np.vdot(w, w).real * s.sigma2)
    s.gamma = (1.0 - s.beta) * s.gamma + s.beta * target
    return s


def rake_output(f: np.ndarray, r: np.ndarray) -> complex:
    """Matched-filter (effective-signature) output x = f^H r."""
    return complex(np.vdot(f, r))


def interference_residual(x: complex, a_hat: float, b_hat: complex) -> complex:
    """Residual after cancelling the reconstructed desired signal:
    d = x - a_hat * b_hat."""
    return x - a_hat * b_hat


def track_interference(s: BoundState, d: complex) -> BoundState:
    """v_hat <- (1-beta) v_hat + beta |d|^2."""
    s.v_hat = (1.0 - s.beta) * s.v_hat + s.beta * abs(d) ** 2
    return s


def amplitude_update(s: BoundState, x: complex) -> BoundState:
    """Advance the output trackers and the amplitude estimate.

    Power mode: q2 tracks |x|^2 and a_hat pulls toward
    sqrt(max(0, q2 - v_hat)). Magnitude mode: q tracks |x| and a_hat
    pulls toward max(0, q - sqrt(v_hat)); with ``literal_recursions``
    the q and a_hat innovations are added unweighted.
    """
    ax = abs(x)
    if s.amplitude_mode == "power":
        s.q2 = (1.0 - s.beta) * s.q2 + s.beta * ax * ax
        s.a_hat = (1.0 - s.beta) * s.a_hat + s.beta * np.sqrt(max(0.0, s.q2 - s.v_hat))
    elif s.amplitude_mode == "magnitude":
        if s.literal_recursions:
            s.q = (1.0 - s.beta) * s.q + ax
            s.a_hat = (1.0 - s.beta) * s.a_hat + max(0.0, s.q - np.sqrt(s.v_hat))
        else:
            s.q = (1.0 - s.beta) * s.q + s.beta * ax
            s.a_hat = (1.0 - s.beta) * s.a_hat + s.beta * max(0.0, s.q - np.sqrt(s.v_hat))
    else:
        raise ValueError(f"unknown amplitude_mode {s.amplitude_mode!r}")
    return s


def bootstrap_amplitude(s: BoundState, x: complex) -> BoundState:
    """Seed the output trackers from the first matched-filter output.

    Starting all trackers at zero makes q2 and v_hat identical streams
    (d = x while a_hat = 0), so the amplitude estimate can never lift
    off; seeding breaks the tie at the right scale.
    """
    ax = abs(x)
    s.a_hat = ax
    s.q = ax
    s.q2 = ax * ax
    return s
