"""Pure-Python/numpy evaluation kernels.

Mirror of the compiled extension ``becert._kernels``; selected by
``becert._backend`` when the extension is unavailable or BECERT_PURE is set.
All functions here are hot paths: they get called at every quadrature node
of every bound evaluation, so the array variants are fully vectorized.

The module must be configured once with the two universal constants (the
root of the cosine-envelope equation and the cubic coefficient) before the
majorant functions are used; ``becert.constants`` does this at import.
"""

import math

import numpy as np

BACKEND_NAME = "python"

_TWO_PI = 2.0 * math.pi
_EXP_CLIP = 700.0  # exp() overflow guard; exp(700) ~ 1e304

_theta0 = float("nan")
_kappa = float("nan")


def configure(theta0: float, kappa: float) -> None:
    global _theta0, _kappa
    _theta0 = float(theta0)
    _kappa = float(kappa)


def is_configured() -> bool:
    return _theta0 == _theta0  # not NaN


def _require_configured():
    if not is_configured():
        raise RuntimeError("kernel backend not configured (import becert first)")


# ---------------------------------------------------------------------------
# scalar kernels
# ---------------------------------------------------------------------------

def chi(t: float, eps: float) -> float:
    """Piecewise exponent envelope: quadratic-minus-cubic up to the root
    theta0/eps, oscillatory (1-cos)/eps^2 up to 2*pi/eps, zero beyond."""
    _require_configured()
    t = abs(t)
    x = eps * t
    if x <= _theta0:
        return 0.5 * t * t - _kappa * eps * t * t * t
    if x <= _TWO_PI:
        return (1.0 - math.cos(x)) / (eps * eps)
    return 0.0


def f1(t: float, eps: float, n: int) -> float:
    """Product-form majorant [1 - 2*chi/n]^(n/2); returns -1.0 when the
    bracket is negative (caller falls back to f2)."""
    b = 1.0 - 2.0 * chi(t, eps) / n
    if b < 0.0:
        return -1.0
    return b ** (0.5 * n)


def f2(t: float, eps: float) -> float:
    return math.exp(-chi(t, eps))


def f3(t: float, eps: float) -> float:
    _require_configured()
    t = abs(t)
    return math.exp(min(_EXP_CLIP, -0.5 * t * t + _kappa * eps * t * t * t))


def kernel_abs(t: float) -> float:
    re = 0.5 * (1.0 - t)
    im = 0.5 * ((1.0 - t) / math.tan(math.pi * t) + 1.0 / math.pi)
    return math.hypot(re, im)


def _cot_minus_inv(t: float) -> float:
    # cot(pi t) - 1/(pi t); raw form cancels catastrophically near 0
    if t < 1e-4:
        x = math.pi * t
        return -x / 3.0 - x * x * x / 45.0 - 2.0 * x ** 5 / 945.0
    return 1.0 / math.tan(math.pi * t) - 1.0 / (math.pi * t)


def smoothing_weight(t: float) -> float:
    d = _cot_minus_inv(t)
    return 0.5 * (1.0 - t) * math.sqrt(1.0 + d * d)


def rtilde3(t: float, eps: float) -> float:
    """Closed-form n-uniform remainder bound (exp(kappa*eps*|t|^3)-1)*exp(-t^2/2)/(6*kappa)."""
    _require_configured()
    t = abs(t)
    e = min(_EXP_CLIP, _kappa * eps * t * t * t)
    return (math.expm1(e)) * math.exp(-0.5 * t * t) / (6.0 * _kappa)


# ---------------------------------------------------------------------------
# array kernels (float64 in, float64 out)
# ---------------------------------------------------------------------------

def chi_arr(t, eps: float):
    _require_configured()
    t = np.abs(np.asarray(t, dtype=np.float64))
    x = eps * t
    cubic = 0.5 * t * t - (_kappa * eps) * t ** 3
    cosine = (1.0 - np.cos(x)) / (eps * eps)
    return np.where(x <= _theta0, cubic, np.where(x <= _TWO_PI, cosine, 0.0))


def fmaj_arr(t, eps: float, n: int):
    """Sharpest available modulus majorant: f1 where its bracket is
    nonnegative, f2 elsewhere."""
    c = chi_arr(t, eps)
    b = 1.0 - 2.0 * c / n
    with np.errstate(divide="ignore"):
        logb = np.log(np.where(b > 0.0, b, 1.0))
    pos = np.exp(0.5 * n * logb)
    pos[b == 0.0] = 0.0
    return np.where(b >= 0.0, pos, np.exp(-c))


def f2_arr(t, eps: float):
    return np.exp(-chi_arr(t, eps))


def f3_arr(t, eps: float):
    _require_configured()
    t = np.abs(np.asarray(t, dtype=np.float64))
    return np.exp(np.minimum(_EXP_CLIP, -0.5 * t * t + (_kappa * eps) * t ** 3))


def kernel_abs_arr(t):
    t = np.asarray(t, dtype=np.float64)
    re = 0.5 * (1.0 - t)
    im = 0.5 * ((1.0 - t) / np.tan(np.pi * t) + 1.0 / np.pi)
    return np.hypot(re, im)


def smoothing_weight_arr(t):
    t = np.asarray(t, dtype=np.float64)
    x = np.pi * t
    small = t < 1e-4
    safe = np.where(small, 0.5, t)
    d = np.where(
        small,
        -x / 3.0 - x ** 3 / 45.0 - 2.0 * x ** 5 / 945.0,
        1.0 / np.tan(np.pi * safe) - 1.0 / (np.pi * safe),
    )
    return 0.5 * (1.0 - t) * np.sqrt(1.0 + d * d)


def rtilde3_arr(t, eps: float):
    _require_configured()
    t = np.abs(np.asarray(t, dtype=np.float64))
    e = np.minimum(_EXP_CLIP, (_kappa * eps) * t ** 3)
    return np.expm1(e) * np.exp(-0.5 * t * t) / (6.0 * _kappa)


def inner_g_finite_arr(u, eps_n: float, n: int):
    """Integrand of the sharp remainder bound: (u^2/2) e^{u^2/2} times the
    (n-1)/2 power of the f1 bracket, with the exp(-(n-1)/n chi) fallback
    where the bracket goes negative."""
    u = np.asarray(u, dtype=np.float64)
    c = chi_arr(u, eps_n)
    b = 1.0 - 2.0 * c / n
    base = 0.5 * u * u
    with np.errstate(divide="ignore"):
        logb = np.log(np.where(b > 0.0, b, 1.0))
    e_pos = np.minimum(_EXP_CLIP, 0.5 * u * u + 0.5 * (n - 1) * logb)
    e_neg = np.minimum(_EXP_CLIP, 0.5 * u * u - (n - 1.0) / n * c)
    g = np.where(b >= 0.0, base * np.exp(e_pos), base * np.exp(e_neg))
    g[(b == 0.0)] = 0.0
    return g


def inner_g_ratio_arr(u, eps_arg: float, ratio: float):
    """Integrand (u^2/2) exp{u^2/2 - ratio*chi(u, eps_arg)}; covers both the
    finite-n exponential remainder (ratio=(n-1)/n, eps_arg=ell_n) and its
    n-uniform version (ratio=(N-1)/N, shifted eps)."""
    u = np.asarray(u, dtype=np.float64)
    c = chi_arr(u, eps_arg)
    e = np.minimum(_EXP_CLIP, 0.5 * u * u - ratio * c)
    return 0.5 * u * u * np.exp(e)


def inner_g_r3_arr(u, eps_n: float, n: int):
    """Integrand (u^2/2) exp{kappa*eps_n*u^3 + (u^2/2n)(1 - 2*kappa*eps_n*u)}."""
    _require_configured()
    u = np.asarray(u, dtype=np.float64)
    ke = _kappa * eps_n
    e = np.minimum(_EXP_CLIP, ke * u ** 3 + (0.5 * u * u / n) * (1.0 - 2.0 * ke * u))
    return 0.5 * u * u * np.exp(e)
