"""Closed-form performance prediction and design checks.

Contains the update-probability and step-size moment formulas, the
printed-constant excess-MSE expressions (kept exactly as published, with
their typographical quirks, behind :func:`excess_mse_steady` /
:func:`excess_mse_tracking`), and a hyper-strip quadrature predictor
(:func:`sm_excess_mse_steady`) derived from the energy-conservation
balance of the data-selective gradient recursion, which is what the
experiment harness uses for analytical-vs-simulated comparisons.

The quadrature predictor models the receiver output as z = s b + delta
with |s|^2 = lam (desired power) and delta circular Gaussian with
variance sig2, so |z| is Rice distributed. Each update projects the
output onto the violated hyper-strip boundary, shifting the a-posteriori
error by psi(z) = (1 - sqrt(1 +/- gamma)/|z|) z; balancing update energy
against error decay gives

    xi = E[ (|z| - root)^2 ; update ] / E[ 1 - root/(2|z|) ; update ].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import PredictedInstabilityError


@dataclass
class NoisePartition:
    """Residual variances at the reference filter output."""

    sigma2_mai: float
    sigma2_isi: float
    sigma2_noise: float

    def total(self) -> float:
        return self.sigma2_mai + self.sigma2_isi + self.sigma2_noise


@dataclass
class StepMoments:
    """First and second step-size moments and the update probability.
    The published moment formulas are independent approximations, so
    mean_mu**2 <= mean_mu2 is not guaranteed."""

    mean_mu: float
    mean_mu2: float
    p_up: float


def q_function(x: float) -> float:
    """Gaussian tail integral Q(x) = P(N(0,1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def prob_update(gamma_mean: float, sigma_e: float) -> float:
    """Update probability 2 Q(E[gamma]/sigma_e), clamped to [0, 1]."""
    if sigma_e <= 0.0:
        raise ValueError("sigma_e must be positive")
    return min(1.0, max(0.0, 2.0 * q_function(gamma_mean / sigma_e)))


def step_moments(gamma_mean: float, p_up: float, amp_moments, u_moments) -> StepMoments:
    """Published step-size moment approximations.

    amp_moments = (E[A], E[A^2]), u_moments = (E||u||^2, E||u||^4):

        E[mu]   = gamma_mean P_up + ((1-P_up)/gamma_mean) E[A]  / E||u||^2
        E[mu^2] = gamma_mean P_up + ((1-P_up)/gamma_mean) E[A^2]/ E||u||^4
    """
    if gamma_mean <= 0.0:
        raise ValueError("gamma_mean must be positive")
    ea, ea2 = amp_moments
    u2, u4 = u_moments
    mean_mu = gamma_mean * p_up + (1.0 - p_up) / gamma_mean * ea / u2
    mean_mu2 = gamma_mean * p_up + (1.0 - p_up) / gamma_mean * ea2 / u4
    return StepMoments(mean_mu=mean_mu, mean_mu2=mean_mu2, p_up=p_up)


def _printed_constants(partition: NoisePartition):
    """The published A and B polynomials, transcribed term by term.

    Reading: sigma_MAI/sigma_eta/sigma_v are the square roots of the
    partition variances; the symbol printed as sigma_n is read as the
    ISI deviation sigma_eta (the expansion otherwise never references
    it, and the companion terms make the quadratic form symmetric);
    exponents are kept exactly as printed, including the lone
    first-power sigma_MAI and the duplicated B terms.
    """
    sm2, si2, sv2 = partition.sigma2_mai, partition.sigma2_isi, partition.sigma2_noise
    sm, sn2 = math.sqrt(sm2), si2
    a_const = 3.0 + 3.0 * sm2**2 + 6.0 * sm2 * sv2 + 6.0 * sm * sn2 + 3.0 * sv2**2 \
        + 6.0 * sv2 * sn2 + 3.0 * sn2**2
    b_const = (si2**3 + 3.0 * sv2 * si2**2 + 3.0 * sm2 * si2**2 + sv2**3 + 6.0 * sv2
               + si2 * sm2 + 3.0 * sm2**2 * sn2 + 3.0 * sm2**2 * sv2 + sm2**3 + sm2**2
               + 2.0 * sv2 * sn2 + sv2**2 + 2.0 * sm2 + 2.0 * sm2 * sv2 + sm2**2
               + 4.0 * sv2 + 2.0 * si2 + 2.0 * sm2 + 2.0)
    return a_const, b_const


def excess_mse_steady(moments: StepMoments, u2: float, partition: NoisePartition) -> float:
    """Published steady-state excess MSE
    xi = E[mu^2] E||u||^2 B / (2 E[mu] (s_MAI^2+s_v^2+s_eta^2) - E[mu^2] E||u||^2 A).

    Raises PredictedInstabilityError when the denominator is not
    positive (the expression's stability region).
    """
    return excess_mse_tracking(moments, u2, partition, trace_q=0.0)


def excess_mse_tracking(moments: StepMoments, u2: float, partition: NoisePartition,
                        trace_q: float) -> float:
    """Published tracking excess MSE: steady-state numerator plus Tr(Q)."""
    a_const, b_const = _printed_constants(partition)
    denom = 2.0 * moments.mean_mu * partition.total() - moments.mean_mu2 * u2 * a_const
    if denom <= 0.0:
        raise PredictedInstabilityError(denom)
    return (moments.mean_mu2 * u2 * b_const + trace_q) / denom


def _rice_pdf(x, lam, sig2):
    # |s b + delta| with |s|^2 = lam, delta ~ CN(0, sig2); i0e for overflow safety
    arg = 2.0 * x * math.sqrt(lam) / sig2
    return (2.0 * x / sig2) * np.exp(-((x - math.sqrt(lam)) ** 2) / sig2) * special.i0e(arg)


def _strip_integrals(gamma: float, lam: float, sig2: float):
    hi = math.sqrt(1.0 + gamma)
    lo = math.sqrt(1.0 - gamma) if gamma < 1.0 else None

    def seg(f, a, b):
        val, _ = integrate.quad(lambda x: f(x) * _rice_pdf(x, lam, sig2), a, b, limit=200)
        return val

    num = seg(lambda x: (x - hi) ** 2, hi, np.inf)
    den = seg(lambda x: 1.0 - hi / (2.0 * x), hi, np.inf)
    pup = seg(lambda x: 1.0, hi, np.inf)
    if lo is not None and lo > 0.0:
        num += seg(lambda x: (x - lo) ** 2, 0.0, lo)
        den += seg(lambda x: 1.0 - lo / (2.0 * x), 0.0, lo)
        pup += seg(lambda x: 1.0, 0.0, lo)
    return num, den, pup


def sm_excess_mse_steady(gamma: float, desired_power: float, residual_power: float,
                         self_consistent: bool = False) -> float:
    """Hyper-strip quadrature excess MSE for the data-selective gradient
    recursion.

    desired_power is |s|^2 at the reference filter; residual_power the
    total output residual variance (measured from a calibration window,
    or the optimum-filter partition total when ``self_consistent`` is
    set, in which case the output spread is widened by the predicted
    excess and iterated to a fixed point).
    """
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    if not self_consistent:
        num, den, _ = _strip_integrals(gamma, desired_power, residual_power)
        if den <= 0.0:
            raise PredictedInstabilityError(den)
        return num / den
    xi = 0.0
    for _ in range(80):
        num, den, _ = _strip_integrals(gamma, desired_power, residual_power + xi)
        if den <= 0.0:
            raise PredictedInstabilityError(den)
        xi = 0.5 * xi + 0.5 * num / den
    return xi


def sm_excess_mse_tracking(gamma: float, desired_power: float, residual_power: float,
                           u2: float, trace_q: float) -> float:
    """Tracking variant: the optimum-filter random walk adds
    Tr(Q) E||u||^2 to the update-energy numerator."""
    num, den, _ = _strip_integrals(gamma, desired_power, residual_power)
    if den <= 0.0:
        raise PredictedInstabilityError(den)
    return (num + trace_q * u2) / den


def sm_update_probability(gamma: float, desired_power: float, residual_power: float) -> float:
    """Update probability under the Rice output model."""
    _, _, pup = _strip_integrals(gamma, desired_power, residual_power)
    return min(1.0, max(0.0, pup))


def jakes_trace_q(fd_t: float, w_opt_norm2: float, dim: int = 0) -> float:
    """Random-walk increment power for the optimum-filter tracking model:
    2 (1 - J0(2 pi fd T)) ||w_opt||^2, the per-symbol decorrelation of an
    isotropic fading process spread over the filter energy."""
    if fd_t < 0.0:
        raise ValueError("fd_t must be >= 0")
    return 2.0 * (1.0 - special.j0(2.0 * np.pi * fd_t)) * w_opt_norm2


def convexity_condition(nu: float, amp: float, h_inner: float):
    """D = nu^2 |A|^2 |h_hat^H h|^2 and whether D >= 1/4, the threshold
    above which the constrained constant-modulus cost has no local
    minima inside a hyper-strip."""
    d = nu**2 * amp**2 * h_inner**2
    return d, bool(d >= 0.25)


def transformed_cm_cost(d: float, t_bar: np.ndarray) -> float:
    """Interference-coordinate constant-modulus cost
    8 (D + t^H t)^2 - 4 (D^2 + t^H t)^2 - 4 (D + t^H t) + 1, used by the
    finite-difference Hessian check of the convexity condition."""
    s = float(np.vdot(t_bar, t_bar).real)
    return 8.0 * (d + s) ** 2 - 4.0 * (d**2 + s) ** 2 - 4.0 * (d + s) + 1.0


def stability_bound(r_vr: np.ndarray) -> float:
    """Sufficient-stability step ceiling min_k 2/|lambda_k| over the
    eigenvalues of the (generally non-Hermitian) error-dynamics matrix.
    Returns +inf for the zero matrix."""
    if not np.isfinite(r_vr).all():
        raise ValueError("matrix must be finite")
    eigs = np.linalg.eigvals(r_vr)
    mags = np.abs(eigs)
    mags = mags[mags > 0.0]
    if mags.size == 0:
        return math.inf
    return float(np.min(2.0 / mags))


def compare_db(simulated: float, predicted: float) -> float:
    """Signed dB difference 10 log10(predicted / simulated)."""
    if simulated <= 0.0 or predicted <= 0.0:
        raise ValueError("both values must be positive")
    return 10.0 * math.log10(predicted / simulated)
