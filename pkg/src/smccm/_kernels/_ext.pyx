# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of the pure-numpy kernels in ``_py``.

Same entry points, same semantics, same status codes; numerical parity
is asserted by tests/test_kernels.py.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()

STATUS_NONE = 0
STATUS_UPDATED = 1
STATUS_DEGENERATE = -1
STATUS_LOST_PD = -2


cdef inline double _re(double complex v):
    return v.real


def sg_step(double complex[::1] w, double complex[::1] p, double complex[::1] r,
            double gamma, double nu, double mu_override=-1.0):
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t j
    cdef double complex z = 0
    cdef double complex g = 0
    cdef double complex c, s, acc
    cdef double az, e, hi, lo, root, pp, quad, mu

    for j in range(m):
        z += w[j].conjugate() * r[j]
    az = sqrt(z.real * z.real + z.imag * z.imag)
    e = az * az - 1.0

    if mu_override >= 0.0:
        mu = mu_override
        if mu == 0.0:
            return complex(z), e, 0.0, 0
        root = -1.0
    else:
        hi = sqrt(1.0 + gamma)
        lo = sqrt(1.0 - gamma) if gamma < 1.0 else -1.0
        if az >= hi:
            root = hi
        elif lo >= 0.0 and az <= lo:
            root = lo
        else:
            return complex(z), e, 0.0, 0
        if az == 0.0:
            return complex(z), e, 0.0, -1

    pp = 0.0
    g = 0
    for j in range(m):
        pp += p[j].real * p[j].real + p[j].imag * p[j].imag
        g += p[j].conjugate() * r[j]
    c = g / pp

    # u = r - c p, quad = Re(r^H u), filter update, constraint re-anchor
    quad = 0.0
    cdef double complex[::1] u = np.empty(m, dtype=np.complex128)
    for j in range(m):
        u[j] = r[j] - c * p[j]
        quad += (r[j].conjugate() * u[j]).real

    if mu_override >= 0.0:
        mu = mu_override
    else:
        mu = (1.0 - root / az) / (e * quad)

    s = mu * e * z.conjugate()
    for j in range(m):
        w[j] = w[j] - s * u[j]
    acc = 0
    for j in range(m):
        acc += p[j].conjugate() * w[j]
    c = (nu - acc) / pp
    for j in range(m):
        w[j] = w[j] + c * p[j]
    return complex(z), e, mu, 1


def rls_step(double complex[::1] w, double complex[::1] p,
             double complex[:, ::1] r_inv, double complex[::1] d_hat,
             double complex[::1] r, double gamma, double nu,
             double lam_override=-1.0, double discount=1.0, double weight_cap=0.0):
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t j, k
    cdef double complex z = 0
    cdef double complex acc, kappa
    cdef double az2, e, q, lam, cw, denom, prp, inv_disc, abs_e

    for j in range(m):
        z += w[j].conjugate() * r[j]
    az2 = z.real * z.real + z.imag * z.imag
    e = az2 - 1.0

    cdef double complex[::1] rr = np.empty(m, dtype=np.complex128)
    q = 0.0
    for j in range(m):
        acc = 0
        for k in range(m):
            acc += r_inv[j, k] * r[k]
        rr[j] = acc
        q += (r[j].conjugate() * acc).real
    if q <= 0.0:
        return complex(z), e, 0.0, -2

    if lam_override >= 0.0:
        lam = lam_override
    else:
        abs_e = e if e >= 0.0 else -e
        lam = (abs_e / gamma - 1.0) / q if abs_e > gamma else 0.0
        if weight_cap > 0.0 and az2 > 0.0:
            if lam > weight_cap / (az2 * q):
                lam = weight_cap / (az2 * q)
    if lam == 0.0:
        return complex(z), e, 0.0, 0

    for j in range(m):
        d_hat[j] = discount * d_hat[j] + lam * z.conjugate() * r[j]
    cw = lam * az2 / discount
    denom = 1.0 + cw * q
    if denom <= 0.0:
        return complex(z), e, lam, -2
    cw = cw / denom
    inv_disc = 1.0 / discount
    # rank-one downdate, rescale, then hermitise
    for j in range(m):
        for k in range(m):
            r_inv[j, k] = (r_inv[j, k] - cw * rr[j] * rr[k].conjugate()) * inv_disc
    for j in range(m):
        for k in range(j, m):
            acc = 0.5 * (r_inv[j, k] + r_inv[k, j].conjugate())
            r_inv[j, k] = acc
            r_inv[k, j] = acc.conjugate()

    # w = R^-1 (d_hat - kappa p) with kappa enforcing w^H p = nu
    cdef double complex[::1] rp = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] rd = np.empty(m, dtype=np.complex128)
    prp = 0.0
    acc = 0
    for j in range(m):
        kappa = 0
        for k in range(m):
            kappa += r_inv[j, k] * p[k]
        rp[j] = kappa
        prp += (p[j].conjugate() * kappa).real
    for j in range(m):
        kappa = 0
        for k in range(m):
            kappa += r_inv[j, k] * d_hat[k]
        rd[j] = kappa
        acc += p[j].conjugate() * kappa
    kappa = (acc - nu) / prp
    for j in range(m):
        w[j] = rd[j] - kappa * rp[j]
    return complex(z), e, lam, 1


def clarke_step(double[:, ::1] phases, double[:, ::1] rates,
                double complex[::1] out_gains):
    cdef Py_ssize_t n = phases.shape[0]
    cdef Py_ssize_t nosc = phases.shape[1]
    cdef Py_ssize_t j, k
    cdef double re, im, ph
    cdef double scale = 1.0 / sqrt(<double> nosc)
    for j in range(n):
        re = 0.0
        im = 0.0
        for k in range(nosc):
            ph = phases[j, k] + rates[j, k]
            phases[j, k] = ph
            re += cos(ph)
            im += sin(ph)
        out_gains[j] = (re + 1j * im) * scale


def spread_channels(double[:, :, :, ::1] mats, double complex[:, ::1] taps,
                    double complex[:, :, ::1] out):
    cdef Py_ssize_t n_users = mats.shape[0]
    cdef Py_ssize_t n_shift = mats.shape[1]
    cdef Py_ssize_t m = mats.shape[2]
    cdef Py_ssize_t l = mats.shape[3]
    cdef Py_ssize_t k, s, i, j
    cdef double complex acc
    for k in range(n_users):
        for s in range(n_shift):
            for i in range(m):
                acc = 0
                for j in range(l):
                    acc += mats[k, s, i, j] * taps[k, j]
                out[k, s, i] = acc
