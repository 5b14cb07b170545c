"""Blind channel estimation and matched-filter construction.

The set-membership estimator accumulates the quadratic form
Upsilon += lambda |A_hat|^2 C^H (R^-1)^p C on innovation events and runs
one shifted power-method step per symbol,

    h <- (I - Upsilon / tr(Upsilon)) h,   h <- h / ||h||,

which converges to the eigenvector of the smallest eigenvalue of
Upsilon. A direct eigendecomposition of C^H R^-1 C serves as the
reference estimator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalError


@dataclass
class ChannelEstState:
    """Unit-norm channel estimate and its accumulated quadratic form."""

    h_hat: np.ndarray
    upsilon: np.ndarray
    p_power: int = 1

    @classmethod
    def initial(cls, n_taps: int, p_power: int = 1, upsilon_scale: float = 1e-3) -> "ChannelEstState":
        if p_power not in (1, 2):
            raise ValueError("p_power must be 1 or 2")
        h = np.zeros(n_taps, dtype=np.complex128)
        h[0] = 1.0
        return cls(h_hat=h, upsilon=upsilon_scale * np.eye(n_taps, dtype=np.complex128),
                   p_power=p_power)


def upsilon_update(s: ChannelEstState, c_mat: np.ndarray, a_hat: float,
                   r_inv: np.ndarray, lam: float, discount: float = 1.0) -> ChannelEstState:
    """Accumulate lambda |a_hat|^2 C^H (R^-1)^p C, Hermitian-symmetrised.
    No-op when lambda or a_hat is zero. ``discount`` < 1 geometrically
    ages the accumulator first (tracking window for fading channels)."""
    if c_mat.shape[0] != r_inv.shape[0]:
        raise ValueError("constraint matrix and correlation inverse disagree on window size")
    if lam == 0.0 or a_hat == 0.0:
        return s
    if discount < 1.0:
        s.upsilon *= discount
    r_pow = r_inv if s.p_power == 1 else r_inv @ r_inv
    quad = c_mat.conj().T @ (r_pow @ c_mat)
    s.upsilon += (lam * a_hat * a_hat) * quad
    s.upsilon += s.upsilon.conj().T.copy()
    s.upsilon *= 0.5
    return s


def sm_bce_step(s: ChannelEstState) -> ChannelEstState:
    """One shifted inverse-power iteration toward the minimum eigenvector
    of the accumulated form. Skips on a cold (zero-trace) accumulator;
    re-initialises to the first basis vector if the iterate collapses."""
    tr = s.upsilon.trace().real
    if tr <= 0.0:
        return s
    h = s.h_hat - (s.upsilon @ s.h_hat) / tr
    norm = np.linalg.norm(h)
    if norm == 0.0:
        s.h_hat[:] = 0.0
        s.h_hat[0] = 1.0
        return s
    s.h_hat = h / norm
    return s


def evd_channel_estimate(r_inv: np.ndarray, c_mat: np.ndarray) -> np.ndarray:
    """Reference estimator: unit-norm eigenvector of the minimum
    eigenvalue of C^H R^-1 C (direct eigendecomposition)."""
    quad = c_mat.conj().T @ (r_inv @ c_mat)
    quad = 0.5 * (quad + quad.conj().T)
    vals, vecs = np.linalg.eigh(quad)
    if not np.isfinite(vals).all():
        raise NumericalError("eigendecomposition of the channel quadratic form failed")
    h = vecs[:, 0]
    return h / np.linalg.norm(h)


def rake_filter(c_mat: np.ndarray, h_hat: np.ndarray) -> np.ndarray:
    """Matched filter on the effective signature: f = C h."""
    return c_mat @ h_hat


def resolve_phase_ambiguity(h_hat: np.ndarray) -> np.ndarray:
    """Rotate the estimate so its reference tap is real positive. Uses the
    first tap, falling back to the first non-zero tap if it vanishes."""
    h_hat = np.asarray(h_hat, dtype=np.complex128)
    idx = 0
    if abs(h_hat[0]) == 0.0:
        nz = np.flatnonzero(np.abs(h_hat) > 0)
        if nz.size == 0:
            return h_hat.copy()
        idx = int(nz[0])
    rot = np.conj(h_hat[idx]) / abs(h_hat[idx])
    return h_hat * rot


def align_phase(h_hat: np.ndarray, h_ref: np.ndarray) -> np.ndarray:
    """Rotate the estimate by the unit scalar that best matches the
    reference (ideal phase tracking for time-varying channels)."""
    inner = np.vdot(h_hat, h_ref)
    if abs(inner) == 0.0:
        return h_hat.copy()
    return h_hat * (inner / abs(inner))


def channel_mse(h_hat: np.ndarray, h_true: np.ndarray) -> float:
    """Phase-invariant estimation error min_phi ||e^{j phi} h_hat - h||^2
    against the unit-normalised true channel."""
    href = np.asarray(h_true, dtype=np.complex128)
    href = href / np.linalg.norm(href)
    return float(np.linalg.norm(h_hat) ** 2 + 1.0 - 2.0 * abs(np.vdot(h_hat, href)))


def channel_correlation(h_hat: np.ndarray, h_true: np.ndarray) -> float:
    """|<h_hat, h_true>| with the true channel unit-normalised."""
    href = np.asarray(h_true, dtype=np.complex128)
    href = href / np.linalg.norm(href)
    return float(abs(np.vdot(h_hat, href)))
