"""Certified 1-D quadrature, exponential-integral tail, root finding and
scalar maximization.

Everything downstream (bound certificates, distance oracles) composes its
error budget from the ``error_bound`` fields reported here. The bounds are
double-precision heuristics validated by the test suite, not interval
arithmetic.
"""

import math
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

__all__ = [
    "CertifiedValue",
    "QuadratureError",
    "integrate",
    "exp_e1",
    "gaussian_tail_over_t",
    "find_root",
    "maximize_scalar",
    "normal_cdf",
    "normal_cdf_arr",
]


@dataclass(frozen=True)
class CertifiedValue:
    estimate: float
    error_bound: float

    def upper(self) -> float:
        return self.estimate + self.error_bound


class QuadratureError(RuntimeError):
    """Tolerance not reached before the subdivision limit."""

    def __init__(self, msg, estimate, error_bound):
        super().__init__(msg)
        self.estimate = estimate
        self.error_bound = error_bound


# 15-point Kronrod nodes with Kronrod weights and the embedded 7-point Gauss
# weights (zero on the Kronrod-only nodes).
_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813,
])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529,
])
_GK_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0, 0.381830050505119,
    0.0, 0.279705391489277, 0.0, 0.129484966168870, 0.0,
])


def _eval(f, x):
    y = f(x)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != x.shape:  # scalar-only integrand
        y = np.array([float(f(xi)) for xi in x])
    return y


def _panel(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _GK_NODES
    y = _eval(f, x)
    if not np.all(np.isfinite(y)):
        raise QuadratureError(
            f"integrand not finite on [{a}, {b}]", float("nan"), float("inf")
        )
    est = half * float(np.dot(_GK_WK, y))
    coarse = half * float(np.dot(_GK_WG, y))
    err = abs(est - coarse) + 50.0 * np.finfo(float).eps * abs(est)
    return est, err


def integrate(f, a: float, b: float, tol: float = 1e-9, *, points=None,
              limit: int = 2000) -> CertifiedValue:
    """Adaptive Gauss-Kronrod 7/15 on [a, b] to absolute tolerance ``tol``.

    ``points`` pre-splits the interval (put known kinks there). The worst
    panel is bisected until the summed error estimate meets ``tol``; running
    past ``limit`` panels raises QuadratureError carrying the achieved bound.
    """
    if not a <= b:
        raise ValueError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return CertifiedValue(0.0, 0.0)
    edges = [a]
    for p in sorted(points or []):
        if a < p < b:
            edges.append(float(p))
    edges.append(b)

    heap = []  # (-err, lo, hi, est)
    total_est = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        est, err = _panel(f, lo, hi)
        heappush(heap, (-err, lo, hi, est))
        total_est += est
        total_err += err

    min_width = abs(b - a) * 1e-14
    while total_err > tol and len(heap) < limit:
        neg_err, lo, hi, est = heappop(heap)
        if hi - lo < min_width:
            heappush(heap, (neg_err, lo, hi, est))
            break
        total_est -= est
        total_err += neg_err  # neg_err = -err
        mid = 0.5 * (lo + hi)
        for u, v in ((lo, mid), (mid, hi)):
            e2, r2 = _panel(f, u, v)
            heappush(heap, (-r2, u, v, e2))
            total_est += e2
            total_err += r2

    if total_err > tol:
        raise QuadratureError(
            f"quadrature tolerance {tol:g} not reached (achieved {total_err:g})",
            total_est, total_err,
        )
    return CertifiedValue(total_est, total_err)


# ---------------------------------------------------------------------------
# exponential integral
# ---------------------------------------------------------------------------

_EULER_GAMMA = 0.5772156649015328606


def exp_e1(x: float) -> float:
    """E1(x) for x > 0: alternating series below 1, modified-Lentz continued
    fraction above."""
    if x <= 0.0:
        raise ValueError("exp_e1 requires x > 0")
    if x <= 1.0:
        s = -_EULER_GAMMA - math.log(x)
        term = 1.0
        for k in range(1, 64):
            term *= -x / k
            add = -term / k
            s += add
            if abs(add) < 1e-18 * max(1.0, abs(s)):
                break
        return s
    tiny = 1e-300
    b = x + 1.0
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 300):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        if c == 0.0:
            c = tiny
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x) * h


def gaussian_tail_over_t(a: float) -> CertifiedValue:
    """Integral of exp(-u^2/2)/u du over (a, inf) = E1(a^2/2)/2 for a > 0."""
    if a <= 0.0:
        raise ValueError("gaussian_tail_over_t requires a > 0 (divergent at 0)")
    est = 0.5 * exp_e1(0.5 * a * a)
    return CertifiedValue(est, 1e-15 * est + 1e-300)


# ---------------------------------------------------------------------------
# root finding and scalar maximization
# ---------------------------------------------------------------------------

def find_root(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Bisection; ``tol`` is the final bracket width."""
    fa, fb = f(a), f(b)
    if math.isnan(fa) or math.isnan(fb):
        raise ValueError("find_root: NaN at bracket endpoint")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"find_root: no sign change on [{a}, {b}]")
    while b - a > tol:
        m = 0.5 * (a + b)
        fm = f(m)
        if math.isnan(fm):
            raise ValueError("find_root: NaN inside bracket")
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def maximize_scalar(f, a: float, b: float, tol: float = 1e-10, *,
                    grid: int = 512):
    """Coarse grid scan, then golden-section refinement in the best cell,
    then verification that no grid point beats the refined maximum.
    Returns (argmax, max).
    """
    xs = np.linspace(a, b, grid)
    fs = np.array([f(x) for x in xs], dtype=float)
    if np.any(np.isnan(fs)):
        raise ValueError("maximize_scalar: NaN in objective")
    i = int(np.argmax(fs))
    lo = xs[max(0, i - 1)]
    hi = xs[min(grid - 1, i + 1)]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1v, f2v = f(x1), f(x2)
    while hi - lo > tol:
        if f1v < f2v:
            lo, x1, f1v = x1, x2, f2v
            x2 = lo + invphi * (hi - lo)
            f2v = f(x2)
        else:
            hi, x2, f2v = x2, x1, f1v
            x1 = hi - invphi * (hi - lo)
            f1v = f(x1)
    xbest = 0.5 * (lo + hi)
    fbest = f(xbest)
    # keep whichever of the probes won, guard against flat plateaus
    for xc, fc in ((x1, f1v), (x2, f2v), (xs[i], fs[i])):
        if fc > fbest:
            xbest, fbest = xc, fc
    if fbest < float(np.max(fs)):
        raise RuntimeError("maximize_scalar: refinement lost the grid maximum")
    return float(xbest), float(fbest)


# ---------------------------------------------------------------------------
# standard normal distribution
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / _SQRT2))


_erf_vec = np.vectorize(math.erf, otypes=[np.float64])


def normal_cdf_arr(x):
    return 0.5 * (1.0 + _erf_vec(np.asarray(x, dtype=np.float64) / _SQRT2))
