# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernels (hot path of every bound evaluation).

Same surface as becert._kernels_py; becert._backend picks this module when
the extension built. Must be configured with the two universal constants
before the majorant functions are used.
"""

import numpy as np

from libc.math cimport cos, exp, expm1, fabs, hypot, log, pi, pow, sqrt, tan

BACKEND_NAME = "compiled"

cdef double _TWO_PI = 2.0 * pi
cdef double _EXP_CLIP = 700.0

cdef double _theta0 = float("nan")
cdef double _kappa = float("nan")


def configure(double theta0, double kappa):
    global _theta0, _kappa
    _theta0 = theta0
    _kappa = kappa


def is_configured():
    return _theta0 == _theta0


cdef inline double _chi(double t, double eps) nogil:
    cdef double x
    t = fabs(t)
    x = eps * t
    if x <= _theta0:
        return 0.5 * t * t - _kappa * eps * t * t * t
    if x <= _TWO_PI:
        return (1.0 - cos(x)) / (eps * eps)
    return 0.0


cdef inline double _kernel_abs(double t) nogil:
    cdef double re = 0.5 * (1.0 - t)
    cdef double im = 0.5 * ((1.0 - t) / tan(pi * t) + 1.0 / pi)
    return hypot(re, im)


cdef inline double _cot_minus_inv(double t) nogil:
    cdef double x
    if t < 1e-4:
        x = pi * t
        return -x / 3.0 - x * x * x / 45.0 - 2.0 * pow(x, 5) / 945.0
    return 1.0 / tan(pi * t) - 1.0 / (pi * t)


cdef inline double _smoothing_weight(double t) nogil:
    cdef double d = _cot_minus_inv(t)
    return 0.5 * (1.0 - t) * sqrt(1.0 + d * d)


cdef inline double _rtilde3(double t, double eps) nogil:
    cdef double e
    t = fabs(t)
    e = _kappa * eps * t * t * t
    if e > _EXP_CLIP:
        e = _EXP_CLIP
    return expm1(e) * exp(-0.5 * t * t) / (6.0 * _kappa)


def _require_configured():
    if not is_configured():
        raise RuntimeError("kernel backend not configured (import becert first)")


# -- scalar wrappers --------------------------------------------------------

def chi(double t, double eps):
    _require_configured()
    return _chi(t, eps)


def f1(double t, double eps, int n):
    cdef double b
    _require_configured()
    b = 1.0 - 2.0 * _chi(t, eps) / n
    if b < 0.0:
        return -1.0
    return pow(b, 0.5 * n)


def f2(double t, double eps):
    _require_configured()
    return exp(-_chi(t, eps))


def f3(double t, double eps):
    cdef double e
    _require_configured()
    t = fabs(t)
    e = -0.5 * t * t + _kappa * eps * t * t * t
    if e > _EXP_CLIP:
        e = _EXP_CLIP
    return exp(e)


def kernel_abs(double t):
    return _kernel_abs(t)


def smoothing_weight(double t):
    return _smoothing_weight(t)


def rtilde3(double t, double eps):
    _require_configured()
    return _rtilde3(t, eps)


# -- array kernels ----------------------------------------------------------

def chi_arr(t, double eps):
    _require_configured()
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = _chi(tv[i], eps)
    return out


def fmaj_arr(t, double eps, int n):
    _require_configured()
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double c, b
    with nogil:
        for i in range(tv.shape[0]):
            c = _chi(tv[i], eps)
            b = 1.0 - 2.0 * c / n
            if b >= 0.0:
                ov[i] = pow(b, 0.5 * n)
            else:
                ov[i] = exp(-c)
    return out


def f2_arr(t, double eps):
    _require_configured()
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = exp(-_chi(tv[i], eps))
    return out


def f3_arr(t, double eps):
    _require_configured()
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double u, e
    with nogil:
        for i in range(tv.shape[0]):
            u = fabs(tv[i])
            e = -0.5 * u * u + _kappa * eps * u * u * u
            if e > _EXP_CLIP:
                e = _EXP_CLIP
            ov[i] = exp(e)
    return out


def kernel_abs_arr(t):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = _kernel_abs(tv[i])
    return out


def smoothing_weight_arr(t):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = _smoothing_weight(tv[i])
    return out


def rtilde3_arr(t, double eps):
    _require_configured()
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty(tv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = _rtilde3(tv[i], eps)
    return out


def inner_g_finite_arr(u, double eps_n, int n):
    _require_configured()
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64).ravel()
    out = np.empty(uv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double x, c, b, e
    with nogil:
        for i in range(uv.shape[0]):
            x = uv[i]
            c = _chi(x, eps_n)
            b = 1.0 - 2.0 * c / n
            if b > 0.0:
                e = 0.5 * x * x + 0.5 * (n - 1) * log(b)
            elif b == 0.0:
                ov[i] = 0.0
                continue
            else:
                e = 0.5 * x * x - (n - 1.0) / n * c
            if e > _EXP_CLIP:
                e = _EXP_CLIP
            ov[i] = 0.5 * x * x * exp(e)
    return out


def inner_g_ratio_arr(u, double eps_arg, double ratio):
    _require_configured()
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64).ravel()
    out = np.empty(uv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double x, e
    with nogil:
        for i in range(uv.shape[0]):
            x = uv[i]
            e = 0.5 * x * x - ratio * _chi(x, eps_arg)
            if e > _EXP_CLIP:
                e = _EXP_CLIP
            ov[i] = 0.5 * x * x * exp(e)
    return out


def inner_g_r3_arr(u, double eps_n, int n):
    _require_configured()
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64).ravel()
    out = np.empty(uv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    cdef double x, ke, e
    ke = _kappa * eps_n
    with nogil:
        for i in range(uv.shape[0]):
            x = uv[i]
            e = ke * x * x * x + (0.5 * x * x / n) * (1.0 - 2.0 * ke * x)
            if e > _EXP_CLIP:
                e = _EXP_CLIP
            ov[i] = 0.5 * x * x * exp(e)
    return out
