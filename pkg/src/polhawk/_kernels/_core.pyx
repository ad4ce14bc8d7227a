# cython: boundscheck=False, wraparound=False, cdivision=True
"""Hot inner kernels for the split-step integrator and the pair-moment
accumulator.  Pure-python equivalents live in pure.py; this module only
exists to make large stochastic ensembles affordable.

Complex arithmetic is spelled out in real parts: C99 complex ops compile
to libcalls (__muldc3 and friends) that dominate the step time.  The
numpy fallback implements the same algorithm with the same polynomial
branch; the two agree to rounding (numpy's vectorized complex product
may round the last ulp differently), and each backend is exactly
reproducible on its own.
"""

from libc.math cimport cos, sin


cdef inline void sincos_small(double t, double* c, double* s) nogil:
    # |t| <= 0.2: polynomial good to ~1e-17, cheaper than libm;
    # multiplications only, in the same order as the numpy fallback
    cdef double t2 = t * t
    if t2 > 0.04:
        c[0] = cos(t)
        s[0] = sin(t)
        return
    c[0] = 1.0 + t2 * (-0.5 + t2 * (1.0 / 24.0 + t2 * (-1.0 / 720.0
           + t2 * (1.0 / 40320.0 + t2 * (-1.0 / 3628800.0)))))
    s[0] = t * (1.0 + t2 * (-1.0 / 6.0 + t2 * (1.0 / 120.0 + t2 * (-1.0 / 5040.0
           + t2 * (1.0 / 362880.0 + t2 * (-1.0 / 39916800.0))))))


def rotate_then_affine(double complex[:, ::1] psi,
                       double complex[::1] pref,
                       double complex[::1] pump_phi,
                       double g_dt,
                       Py_ssize_t pump_lo,
                       Py_ssize_t pump_hi):
    """In-place local half-substep, nonlinear phase first.

    psi <- pref * e^(-i g_dt |psi|^2) * psi + pump_phi.  Both factors
    are exact flows of their pieces: the modulus-preserving nonlinear
    rotation, then the constant-coefficient linear update whose drive
    term pump_phi = -i h F phi1(w) is precomputed.  Points outside
    [pump_lo, pump_hi) skip the drive term.
    """
    cdef Py_ssize_t b, i, nb = psi.shape[0], n = psi.shape[1]
    cdef double th, cc, ss, re, im
    cdef double prr, pri, zr, zi, rr, ri
    # C99 lays a double complex out as double[2]; writing through a
    # double pointer keeps the stores free of complex-helper calls.
    cdef double* row
    with nogil:
        for b in range(nb):
            row = <double*> &psi[b, 0]
            for i in range(n):
                re = row[2 * i]
                im = row[2 * i + 1]
                th = g_dt * (re * re + im * im)
                sincos_small(th, &cc, &ss)
                prr = pref[i].real
                pri = pref[i].imag
                # z = pref * (cc - i ss)
                zr = prr * cc + pri * ss
                zi = pri * cc - prr * ss
                rr = zr * re - zi * im
                ri = zr * im + zi * re
                if pump_lo <= i < pump_hi:
                    rr = rr + pump_phi[i].real
                    ri = ri + pump_phi[i].imag
                row[2 * i] = rr
                row[2 * i + 1] = ri


def affine_then_rotate(double complex[:, ::1] psi,
                       double complex[::1] pref,
                       double complex[::1] pump_phi,
                       double g_dt,
                       Py_ssize_t pump_lo,
                       Py_ssize_t pump_hi):
    """In-place local half-substep, nonlinear phase last: the adjoint
    ordering of rotate_then_affine, used on the far side of the kinetic
    factor so the full step is palindromic (second order).

    psi <- e^(-i g_dt |a|^2) * a  with  a = pref * psi + pump_phi.
    """
    cdef Py_ssize_t b, i, nb = psi.shape[0], n = psi.shape[1]
    cdef double th, cc, ss, re, im
    cdef double prr, pri, ar, ai
    cdef double* row
    with nogil:
        for b in range(nb):
            row = <double*> &psi[b, 0]
            for i in range(n):
                re = row[2 * i]
                im = row[2 * i + 1]
                prr = pref[i].real
                pri = pref[i].imag
                ar = prr * re - pri * im
                ai = prr * im + pri * re
                if pump_lo <= i < pump_hi:
                    ar = ar + pump_phi[i].real
                    ai = ai + pump_phi[i].imag
                th = g_dt * (ar * ar + ai * ai)
                sincos_small(th, &cc, &ss)
                row[2 * i] = cc * ar + ss * ai
                row[2 * i + 1] = cc * ai - ss * ar


def abs2_rows(double complex[:, ::1] psi, double[:, ::1] out):
    """out[b, i] = |psi[b, i]|^2."""
    cdef Py_ssize_t b, i
    cdef double complex p
    with nogil:
        for b in range(psi.shape[0]):
            for i in range(psi.shape[1]):
                p = psi[b, i]
                out[b, i] = p.real * p.real + p.imag * p.imag


def accumulate_tri(double[::1] nvec,
                   double[::1] sum_n, double[::1] comp_n,
                   double[::1] sum_nn, double[::1] comp_nn):
    """Kahan-compensated accumulation of a density sample and its
    upper-triangular (diagonal included, row-major) pair products."""
    cdef Py_ssize_t i, j, idx, n = nvec.shape[0]
    cdef double v, y, t, ni
    with nogil:
        for i in range(n):
            v = nvec[i]
            y = v - comp_n[i]
            t = sum_n[i] + y
            comp_n[i] = (t - sum_n[i]) - y
            sum_n[i] = t
        idx = 0
        for i in range(n):
            ni = nvec[i]
            for j in range(i, n):
                v = ni * nvec[j]
                y = v - comp_nn[idx]
                t = sum_nn[idx] + y
                comp_nn[idx] = (t - sum_nn[idx]) - y
                sum_nn[idx] = t
                idx += 1
