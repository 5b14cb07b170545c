"""Pure-numpy reference implementation of the per-symbol kernels.

Semantics shared with the compiled backend:

* ``sg_step``    one constrained constant-modulus gradient update with the
                 data-selective variable step (hyper-strip projection).
* ``rls_step``   one constrained constant-modulus recursive LS update with
                 the innovation-check variable forgetting factor.
* ``clarke_step``advance sum-of-sinusoids oscillator banks one symbol.
* ``spread_channels`` channel-convolved signature vectors for a stack of
                 users and symbol shifts.

Status codes returned by the filter kernels: 0 no update, 1 updated,
-1 update was triggered but skipped on a degenerate (|z| = 0) output,
-2 lost positive definiteness (RLS only; caller must re-initialise).
"""

import numpy as np

STATUS_NONE = 0
STATUS_UPDATED = 1
STATUS_DEGENERATE = -1
STATUS_LOST_PD = -2


def sg_step(w, p, r, gamma, nu, mu_override=-1.0):
    """Advance the gradient receiver state ``w`` in place.

    Returns ``(z, e, mu, status)`` where z is the pre-update output,
    e = |z|^2 - 1 and mu the applied step (0 when no update). With
    ``mu_override >= 0`` the data-selective logic is bypassed and the
    fixed step is applied every symbol.
    """
    z = complex(np.vdot(w, r))
    az = abs(z)
    e = az * az - 1.0

    if mu_override >= 0.0:
        mu = mu_override
        if mu == 0.0:
            return z, e, 0.0, STATUS_NONE
    else:
        hi = np.sqrt(1.0 + gamma)
        lo = np.sqrt(1.0 - gamma) if gamma < 1.0 else -1.0
        if az >= hi:
            root = hi
        elif lo >= 0.0 and az <= lo:
            root = lo
        else:
            return z, e, 0.0, STATUS_NONE
        if az == 0.0:
            return z, e, 0.0, STATUS_DEGENERATE
        pp = np.vdot(p, p).real
        g = np.vdot(p, r)
        u = r - (g / pp) * p
        quad = np.vdot(r, u).real
        mu = (1.0 - root / az) / (e * quad)
        w -= (mu * e * np.conj(z)) * u
        # re-anchor the linear constraint against rounding drift
        w += ((nu - np.vdot(p, w)) / pp) * p
        return z, e, mu, STATUS_UPDATED

    # fixed-step path (always-update baseline)
    pp = np.vdot(p, p).real
    g = np.vdot(p, r)
    u = r - (g / pp) * p
    w -= (mu * e * np.conj(z)) * u
    w += ((nu - np.vdot(p, w)) / pp) * p
    return z, e, mu, STATUS_UPDATED


def rls_step(w, p, r_inv, d_hat, r, gamma, nu, lam_override=-1.0, discount=1.0,
             weight_cap=0.0):
    """Advance the recursive LS receiver state (w, r_inv, d_hat) in place.

    Returns ``(z, e, lam, status)``. With ``lam_override >= 0`` the
    innovation check is bypassed and the given forgetting weight applied
    every symbol. ``discount`` < 1 geometrically down-weights the
    accumulated correlations on each accepted update (the exponential
    window of the weighted LS cost); 1 reproduces the plain growing
    window.
    """
    z = complex(np.vdot(w, r))
    az2 = (z * z.conjugate()).real
    e = az2 - 1.0

    rr = r_inv @ r
    q = np.vdot(r, rr).real
    if q <= 0.0:
        return z, e, 0.0, STATUS_LOST_PD

    if lam_override >= 0.0:
        lam = lam_override
    else:
        lam = (abs(e) / gamma - 1.0) / q if abs(e) > gamma else 0.0
        if weight_cap > 0.0 and az2 > 0.0:
            # bound the relative weight of a single rank-one correction
            lam = min(lam, weight_cap / (az2 * q))
    if lam == 0.0:
        return z, e, 0.0, STATUS_NONE

    d_hat *= discount
    d_hat += (lam * np.conj(z)) * r
    c = lam * az2 / discount
    denom = 1.0 + c * q
    if denom <= 0.0:
        return z, e, lam, STATUS_LOST_PD
    r_inv -= (c / denom) * np.outer(rr, np.conj(rr))
    r_inv *= 1.0 / discount
    r_inv += np.conj(r_inv.T)
    r_inv *= 0.5

    rp = r_inv @ p
    rd = r_inv @ d_hat
    prp = np.vdot(p, rp).real
    kappa = (np.vdot(p, rd) - nu) / prp
    w[:] = rd - kappa * rp
    return z, e, lam, STATUS_UPDATED


def clarke_step(phases, rates, out_gains):
    """Advance oscillator banks one step; row j of ``out_gains`` receives
    the normalised phasor sum of row j of ``phases``."""
    phases += rates
    np.sum(np.exp(1j * phases), axis=1, out=out_gains)
    out_gains /= np.sqrt(phases.shape[1])


def spread_channels(mats, taps, out):
    """Channel-convolved signatures for all users and shifts.

    mats: (K, 3, M, L) real shift matrices, taps: (K, L) complex,
    out: (K, 3, M) complex receiving mats[k,s] @ taps[k].
    """
    np.einsum("ksml,kl->ksm", mats, taps, out=out)
