"""NumPy fallback for the compiled kernels.

Same contracts and the same algorithm as _core.pyx, including the
polynomial sin/cos branch in the same Horner order.  Results agree
with the compiled path to rounding but not bit for bit: numpy's
vectorized complex product can round the last ulp differently from
the scalar (ac - bd, ad + bc) evaluation.  Within one backend results
are exactly reproducible; the accumulator arithmetic is element-wise
Kahan in the same order as the compiled version, so accumulation of
identical samples matches it exactly.

Hot-path temporaries are cached per shape; this module is not
thread-safe (neither is the stochastic driver, which parallelizes over
processes).
"""

import numpy as np

_WS = {}


def _workspace(shape):
    ws = _WS.get(shape)
    if ws is None:
        ws = {
            "th": np.empty(shape),
            "u": np.empty(shape),
            "cc": np.empty(shape),
            "ss": np.empty(shape),
            "w": np.empty(shape, dtype=np.complex128),
        }
        _WS[shape] = ws
        if len(_WS) > 8:
            for key in list(_WS)[:-8]:
                del _WS[key]
    return ws


def _sincos_small(t, cc, ss, u):
    """cos/sin of t into cc/ss (u is scratch): polynomial branch below
    t^2 = 0.04, matching the compiled kernel's Horner order; libm
    elsewhere."""
    np.multiply(t, t, out=u)
    np.multiply(u, -1.0 / 3628800.0, out=cc)
    cc += 1.0 / 40320.0
    cc *= u
    cc += -1.0 / 720.0
    cc *= u
    cc += 1.0 / 24.0
    cc *= u
    cc += -0.5
    cc *= u
    cc += 1.0
    np.multiply(u, -1.0 / 39916800.0, out=ss)
    ss += 1.0 / 362880.0
    ss *= u
    ss += -1.0 / 5040.0
    ss *= u
    ss += 1.0 / 120.0
    ss *= u
    ss += -1.0 / 6.0
    ss *= u
    ss += 1.0
    ss *= t
    big = u > 0.04
    if np.any(big):
        cc[big] = np.cos(t[big])
        ss[big] = np.sin(t[big])


def rotate_then_affine(psi, pref, pump_phi, g_dt, pump_lo, pump_hi):
    """psi <- pref e^(-i g_dt |psi|^2) psi + pump_phi (drive only on
    [pump_lo, pump_hi))."""
    ws = _workspace(psi.shape)
    th, u, cc, ss, w = ws["th"], ws["u"], ws["cc"], ws["ss"], ws["w"]
    np.multiply(psi.real, psi.real, out=th)
    np.multiply(psi.imag, psi.imag, out=u)
    th += u
    th *= g_dt
    _sincos_small(th, cc, ss, u)
    # w = pref * (cc - i ss)
    w.real = cc
    np.negative(ss, out=w.imag)
    w *= pref
    psi *= w
    if pump_hi > pump_lo:
        psi[..., pump_lo:pump_hi] += pump_phi[pump_lo:pump_hi]


def affine_then_rotate(psi, pref, pump_phi, g_dt, pump_lo, pump_hi):
    """psi <- e^(-i g_dt |a|^2) a with a = pref psi + pump_phi: adjoint
    ordering of rotate_then_affine."""
    ws = _workspace(psi.shape)
    th, u, cc, ss, w = ws["th"], ws["u"], ws["cc"], ws["ss"], ws["w"]
    psi *= pref
    if pump_hi > pump_lo:
        psi[..., pump_lo:pump_hi] += pump_phi[pump_lo:pump_hi]
    np.multiply(psi.real, psi.real, out=th)
    np.multiply(psi.imag, psi.imag, out=u)
    th += u
    th *= g_dt
    _sincos_small(th, cc, ss, u)
    w.real = cc
    np.negative(ss, out=w.imag)
    psi *= w


def abs2_rows(psi, out):
    np.multiply(psi.real, psi.real, out=out)
    out += psi.imag ** 2


_TRI = {}


def _tri_indices(n):
    pair = _TRI.get(n)
    if pair is None:
        pair = np.triu_indices(n)
        _TRI[n] = pair
        if len(_TRI) > 4:
            for key in list(_TRI)[:-4]:
                del _TRI[key]
    return pair


def accumulate_tri(nvec, sum_n, comp_n, sum_nn, comp_nn):
    _kahan_add(nvec, sum_n, comp_n)
    iu, ju = _tri_indices(nvec.shape[0])
    _kahan_add(nvec[iu] * nvec[ju], sum_nn, comp_nn)


def _kahan_add(v, s, c):
    y = v - c
    t = s + y
    c[...] = (t - s) - y
    s[...] = t
