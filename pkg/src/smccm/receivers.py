"""Blind constrained constant-modulus receivers.

Two data-selective algorithms share the linear constraint w^H p = nu on
the effective signature p:

* a stochastic-gradient recursion whose variable step size lands the
  output magnitude exactly on the nearest hyper-strip boundary
  sqrt(1 +/- gamma) whenever |z| leaves the strip, and
* a recursive least-squares recursion whose variable forgetting factor
  is non-zero only when the constant-modulus error exceeds the bound
  (innovation check), with the inverse weighted correlation matrix kept
  by a rank-one inversion-lemma update.

Fixed-step and fixed-forgetting always-update baselines are the same
recursions with the data selectivity bypassed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import _py as _status
from .errors import NumericalError

QPSK_POINTS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


def projection_matrix(p: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the complement of span{p}:
    I - p (p^H p)^-1 p^H. Hermitian, idempotent, annihilates p."""
    p = np.asarray(p, dtype=np.complex128)
    pp = np.vdot(p, p).real
    if pp <= 0.0:
        raise ValueError("projection onto the complement of a zero vector")
    return np.eye(p.size, dtype=np.complex128) - np.outer(p, p.conj()) / pp


def detect(z: complex) -> complex:
    """Nearest unit-modulus QPSK point; ties break toward positive real
    and imaginary parts."""
    re = 1.0 if z.real >= 0 else -1.0
    im = 1.0 if z.imag >= 0 else -1.0
    return complex(re, im) / np.sqrt(2.0)


def variable_step(z: complex, e: float, gamma: float, quad: float) -> float:
    """Data-selective step size.

    Zero inside the hyper-strip sqrt(1-gamma) < |z| < sqrt(1+gamma);
    otherwise the closed form (1 - sqrt(1 +/- gamma)/|z|) / (e * quad)
    that projects the output onto the violated boundary. quad is the
    projected input energy r^H Pi r. A triggered update with |z| = 0 is
    degenerate and returns 0.
    """
    if quad <= 0.0:
        raise ValueError("quad = r^H Pi r must be positive")
    az = abs(z)
    hi = np.sqrt(1.0 + gamma)
    if az >= hi:
        root = hi
    elif gamma < 1.0 and az <= np.sqrt(1.0 - gamma):
        root = np.sqrt(1.0 - gamma)
    else:
        return 0.0
    if az == 0.0:
        return 0.0
    return (1.0 - root / az) / (e * quad)


def variable_forgetting(e: float, gamma: float, r: np.ndarray, r_inv: np.ndarray) -> float:
    """Innovation-check forgetting weight: (|e|/gamma - 1) / (r^H R^-1 r)
    when |e| exceeds the bound, zero otherwise."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive for the innovation check")
    q = np.vdot(r, r_inv @ r).real
    if q <= 0.0:
        raise NumericalError("r^H R^-1 r <= 0: correlation inverse lost positive definiteness")
    return (abs(e) / gamma - 1.0) / q if abs(e) > gamma else 0.0


@dataclass
class UpdateOutcome:
    """Per-symbol result: filter output, constant-modulus error, whether
    an update happened and the step / forgetting weight used (0 when
    skipped). ``degenerate`` marks a triggered update skipped on |z|=0."""

    updated: bool
    step_or_lambda: float
    output: complex
    error: float
    degenerate: bool = False


@dataclass
class SgState:
    """Gradient receiver state for one user."""

    w: np.ndarray
    p: np.ndarray
    nu: float = 1.0
    _projection: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def initial(cls, p: np.ndarray, nu: float = 1.0) -> "SgState":
        """Minimum-norm filter satisfying the constraint: nu*p/(p^H p)."""
        p = np.asarray(p, dtype=np.complex128)
        w = nu * p / np.vdot(p, p).real
        return cls(w=w, p=p.copy(), nu=nu)

    @property
    def projection(self) -> np.ndarray:
        """Cached constraint projector for the current p."""
        if self._projection is None:
            self._projection = projection_matrix(self.p)
        return self._projection

    def set_signature(self, p: np.ndarray) -> None:
        self.p = np.asarray(p, dtype=np.complex128)
        self._projection = None

    def reanchor(self) -> None:
        """Re-project the filter onto the constraint hyperplane (the update
        equation's anchor term with no gradient step); needed whenever the
        effective signature or the constraint value moves between updates."""
        pp = np.vdot(self.p, self.p).real
        self.w += ((self.nu - np.vdot(self.p, self.w)) / pp) * self.p


@dataclass
class RlsState:
    """Recursive LS receiver state for one user. ``discount`` < 1 applies
    the exponential window of the weighted LS cost on each accepted
    update; the default keeps the plain growing-window recursions."""

    w: np.ndarray
    p: np.ndarray
    r_inv: np.ndarray
    d_hat: np.ndarray
    nu: float = 1.0
    delta: float = 0.01
    discount: float = 1.0
    weight_cap: float = 0.0

    @classmethod
    def initial(cls, p: np.ndarray, nu: float = 1.0, delta: float = 0.01,
                discount: float = 1.0, weight_cap: float = 0.0) -> "RlsState":
        p = np.asarray(p, dtype=np.complex128)
        m = p.size
        w = nu * p / np.vdot(p, p).real
        return cls(w=w, p=p.copy(), r_inv=np.eye(m, dtype=np.complex128) / delta,
                   d_hat=np.zeros(m, dtype=np.complex128), nu=nu, delta=delta,
                   discount=discount, weight_cap=weight_cap)

    def reinitialize_correlation(self) -> None:
        """Reset R^-1 = delta^-1 I after a lost-positive-definiteness event."""
        self.r_inv[:] = 0.0
        np.fill_diagonal(self.r_inv, 1.0 / self.delta)

    def set_signature(self, p: np.ndarray) -> None:
        self.p = np.asarray(p, dtype=np.complex128)

    def reanchor(self) -> None:
        """Re-project the filter onto the constraint hyperplane; see
        SgState.reanchor."""
        pp = np.vdot(self.p, self.p).real
        self.w += ((self.nu - np.vdot(self.p, self.w)) / pp) * self.p


def sm_ccm_sg_update(state: SgState, r: np.ndarray, gamma: float,
                     mu_override: float = -1.0) -> UpdateOutcome:
    """One data-selective gradient step on ``state`` (mutated in place).

    Non-finite input raises NumericalError with the state untouched; a
    non-finite result rolls the filter back before raising.
    """
    if not np.isfinite(r).all():
        raise NumericalError("non-finite received vector")
    w_backup = state.w.copy()
    z, e, mu, status = _kernels.sg_step(state.w, state.p, r, gamma, state.nu, mu_override)
    if status == _status.STATUS_UPDATED and not np.isfinite(state.w).all():
        state.w[:] = w_backup
        raise NumericalError("gradient update produced non-finite filter")
    return UpdateOutcome(updated=status == _status.STATUS_UPDATED,
                         step_or_lambda=mu, output=z, error=e,
                         degenerate=status == _status.STATUS_DEGENERATE)


def sm_ccm_rls_update(state: RlsState, r: np.ndarray, gamma: float,
                      lam_override: float = -1.0) -> UpdateOutcome:
    """One innovation-checked recursive LS step on ``state`` (in place).
    The exponential window is discounted per accepted update (a
    wall-clock window would evaporate between sparse updates).

    Lost positive definiteness re-initialises R^-1 = delta^-1 I and
    raises NumericalError; the filter itself is left unchanged.
    """
    if not np.isfinite(r).all():
        raise NumericalError("non-finite received vector")
    z, e, lam, status = _kernels.rls_step(state.w, state.p, state.r_inv, state.d_hat,
                                          r, gamma, state.nu, lam_override, state.discount,
                                          state.weight_cap)
    if status == _status.STATUS_LOST_PD:
        state.reinitialize_correlation()
        raise NumericalError("correlation inverse lost positive definiteness; re-initialised")
    return UpdateOutcome(updated=status == _status.STATUS_UPDATED,
                         step_or_lambda=lam, output=z, error=e)


def baseline_ccm_sg_update(state: SgState, r: np.ndarray, mu_fixed: float) -> UpdateOutcome:
    """Always-update gradient baseline with a constant step size."""
    return sm_ccm_sg_update(state, r, gamma=0.0, mu_override=mu_fixed)


def baseline_ccm_rls_update(state: RlsState, r: np.ndarray, lam_fixed: float = 1.0) -> UpdateOutcome:
    """Always-update recursive LS baseline with a constant forgetting weight."""
    return sm_ccm_rls_update(state, r, gamma=1.0, lam_override=lam_fixed)


def batch_ccm_ls_solve(received: np.ndarray, outputs: np.ndarray, p: np.ndarray,
                       nu: float = 1.0, delta: float = 0.01) -> np.ndarray:
    """Direct (non-recursive) solve of the constrained weighted LS filter
    from exhaustively accumulated correlations; oracle for the recursive
    always-update path.

    received: (n, M) vectors, outputs: (n,) filter outputs z[l] used as
    the |z|^2 weights and cross-correlation references.
    """
    m = p.size
    r_acc = delta * np.eye(m, dtype=np.complex128)
    d_acc = np.zeros(m, dtype=np.complex128)
    for rl, zl in zip(received, outputs):
        r_acc += (abs(zl) ** 2) * np.outer(rl, rl.conj())
        d_acc += np.conj(zl) * rl
    r_inv = np.linalg.inv(r_acc)
    rp = r_inv @ p
    rd = r_inv @ d_acc
    kappa = (np.vdot(p, rd) - nu) / np.vdot(p, rp).real
    return rd - kappa * rp
