"""Majorants for the modulus of the standardized-sum characteristic function
and for its distance to the Gaussian one.

The sharp remainder bounds r1/r2/r3 are integrals themselves; evaluated
standalone they go through adaptive quadrature, while bound certification
uses ``BoundContext``, which accumulates the inner integral once on a fine
monotone grid (upper-biased per panel, so the certified direction survives)
and serves every outer quadrature node by linear interpolation of the
cumulative upper envelope.
"""

import math
from typing import Optional

import numpy as np

from becert._backend import impl
from becert.constants import UNIVERSAL
from becert.quadrature import integrate

__all__ = [
    "chi", "f1", "f2", "f3",
    "r1", "r2", "r3",
    "cutoff_T", "uniform_f", "uniform_r2", "uniform_r3",
    "BoundContext", "CutoffError",
]

_U_CAP = 36.0  # exp(u^2/2) overflows past ~37.6; bounds are useless out there anyway


class CutoffError(ValueError):
    """Requested |t| lies beyond the validity cutoff of the closed-form
    n-uniform remainder bound."""


# ---------------------------------------------------------------------------
# pointwise majorants
# ---------------------------------------------------------------------------

def chi(t: float, eps: float) -> float:
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return impl.chi(t, eps)


def f1(t: float, eps: float, n: int) -> Optional[float]:
    """[1 - (2/n) chi]^(n/2); None when the bracket is negative (callers
    substitute f2, which stays valid)."""
    if eps <= 0.0 or n < 1:
        raise ValueError("need eps > 0 and n >= 1")
    v = impl.f1(t, eps, n)
    return None if v < 0.0 else v


def f2(t: float, eps: float) -> float:
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return impl.f2(t, eps)


def f3(t: float, eps: float) -> float:
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return impl.f3(t, eps)


# ---------------------------------------------------------------------------
# remainder bounds (standalone, adaptive quadrature)
# ---------------------------------------------------------------------------

def _remainder(t, prefactor, integrand, tol):
    t = abs(t)
    if t == 0.0 or prefactor == 0.0:
        return 0.0
    inner = integrate(integrand, 0.0, t, tol)
    return prefactor * math.exp(-0.5 * t * t) * inner.estimate


def r1(t: float, ell: float, n: int, tol: float = 1e-10) -> float:
    if ell < 0.0 or n < 1:
        raise ValueError("need ell >= 0 and n >= 1")
    eps_n = ell + 1.0 / math.sqrt(n)
    return _remainder(t, ell, lambda u: impl.inner_g_finite_arr(u, eps_n, n), tol)


def r2(t: float, ell: float, n: int, tol: float = 1e-10) -> float:
    if ell < 0.0 or n < 1:
        raise ValueError("need ell >= 0 and n >= 1")
    eps_n = ell + 1.0 / math.sqrt(n)
    ratio = (n - 1.0) / n
    return _remainder(t, ell, lambda u: impl.inner_g_ratio_arr(u, eps_n, ratio), tol)


def r3(t: float, ell: float, n: int, tol: float = 1e-10) -> float:
    if ell < 0.0 or n < 1:
        raise ValueError("need ell >= 0 and n >= 1")
    eps_n = ell + 1.0 / math.sqrt(n)
    return _remainder(t, ell, lambda u: impl.inner_g_r3_arr(u, eps_n, n), tol)


# ---------------------------------------------------------------------------
# n-uniform bounds
# ---------------------------------------------------------------------------

def cutoff_T(N: int, eps: float) -> float:
    """min{N^(1/4)/sqrt(eps), 1/(2 kappa eps)}: validity range of the
    closed-form uniform remainder bound."""
    if N < 1 or eps <= 0.0:
        raise ValueError("need N >= 1 and eps > 0")
    return min(N ** 0.25 / math.sqrt(eps), 1.0 / (2.0 * UNIVERSAL.kappa * eps))


def _check_uniform_args(eps, N, k):
    if not 0.0 <= k <= 1.0:
        raise ValueError("k must lie in [0, 1]")
    if N < 1:
        raise ValueError("N must be a positive integer")
    if eps <= k / math.sqrt(N):
        raise ValueError(f"need eps > k/sqrt(N) = {k / math.sqrt(N):g}")


def uniform_f(j: int, t: float, eps: float, N: int, k: float) -> Optional[float]:
    """f_j evaluated at the shifted argument eps + (1-k)/sqrt(N); for j=1 the
    power index is frozen at N."""
    _check_uniform_args(eps, N, k)
    shifted = eps + (1.0 - k) / math.sqrt(N)
    if j == 1:
        return f1(t, shifted, N)
    if j == 2:
        return f2(t, shifted)
    raise ValueError("j must be 1 or 2")


def uniform_r2(t: float, eps: float, N: int, k: float, tol: float = 1e-10) -> float:
    _check_uniform_args(eps, N, k)
    shifted = eps + (1.0 - k) / math.sqrt(N)
    ratio = (N - 1.0) / N
    return _remainder(t, eps, lambda u: impl.inner_g_ratio_arr(u, shifted, ratio), tol)


def uniform_r3(t: float, eps: float, N: int) -> float:
    if eps <= 0.0 or N < 1:
        raise ValueError("need eps > 0 and N >= 1")
    if abs(t) > cutoff_T(N, eps):
        raise CutoffError(
            f"|t|={abs(t):g} beyond cutoff {cutoff_T(N, eps):g}: "
            "the uniform bound is not proven there (shrink T or t0)"
        )
    return impl.rtilde3(t, eps)


# ---------------------------------------------------------------------------
# evaluation context with the shared cumulative inner integral
# ---------------------------------------------------------------------------

class BoundContext:
    """One (epsilon, k, n-or-uniform-tail) evaluation context.

    Carries the derived Lyapunov quantities and lazily builds the cumulative
    inner-integral grid shared by all outer quadrature nodes. ``grid_h`` is
    the panel width of that grid; the upper envelope adds O(grid_h) bias in
    the certified direction only.
    """

    def __init__(self, epsilon: float, k: float, *, n: Optional[int] = None,
                 N: Optional[int] = None, grid_h: float = 1e-4):
        if (n is None) == (N is None):
            raise ValueError("exactly one of n (finite) or N (uniform tail) required")
        if epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        self.epsilon = float(epsilon)
        self.k = float(k)
        self.n = n
        self.N = N
        self.grid_h = float(grid_h)
        self._grid = None  # (edges, cum_hi, cum_lo)

        if n is not None:
            if n < 1:
                raise ValueError("n must be >= 1")
            self.ell = epsilon - k / math.sqrt(n)
            if self.ell < 0.0:
                raise ValueError(f"epsilon - k/sqrt(n) = {self.ell:g} < 0")
            self.ell_n = self.ell + 1.0 / math.sqrt(n)
        else:
            _check_uniform_args(epsilon, N, k)
            self.ell = None
            self.ell_n = None
            self.shifted = epsilon + (1.0 - k) / math.sqrt(N)

    @property
    def uniform(self) -> bool:
        return self.N is not None

    @property
    def closed_form_remainder(self) -> bool:
        # k=1 uniform tail has the closed-form remainder; no grid needed
        return self.uniform and self.k == 1.0

    def r_cutoff(self) -> float:
        if self.closed_form_remainder:
            return cutoff_T(self.N, self.epsilon)
        return _U_CAP

    def _inner_g(self, u):
        if self.uniform:
            return impl.inner_g_ratio_arr(u, self.shifted, (self.N - 1.0) / self.N)
        return impl.inner_g_finite_arr(u, self.ell_n, self.n)

    def _ensure_grid(self):
        if self._grid is not None:
            return
        m = int(math.ceil(_U_CAP / self.grid_h))
        pts = np.linspace(0.0, _U_CAP, 2 * m + 1)
        g = self._inner_g(pts)
        gl, gm, gr = g[0:-1:2], g[1::2], g[2::2]
        du = pts[2] - pts[0]
        hi = du * np.maximum(np.maximum(gl, gm), gr)
        lo = du * np.minimum(np.minimum(gl, gm), gr)
        edges = pts[0::2]
        cum_hi = np.concatenate(([0.0], np.cumsum(hi)))
        cum_lo = np.concatenate(([0.0], np.cumsum(lo)))
        self._grid = (edges, cum_hi, cum_lo)

    def inner_upper(self, u):
        """Pointwise upper bound on the cumulative inner integral (piecewise
        linear, nondecreasing); +inf beyond the grid cap."""
        self._ensure_grid()
        edges, cum_hi, _ = self._grid
        u = np.abs(np.asarray(u, dtype=np.float64))
        out = np.interp(u, edges, cum_hi)
        return np.where(u > edges[-1], np.inf, out)

    def inner_band(self, u_max: float) -> float:
        """Width of the upper/lower envelope gap up to u_max (diagnostic)."""
        self._ensure_grid()
        edges, cum_hi, cum_lo = self._grid
        i = int(np.searchsorted(edges, min(u_max, edges[-1])))
        return float(cum_hi[min(i, len(cum_hi) - 1)] - cum_lo[min(i, len(cum_lo) - 1)])

    def r_upper_arr(self, t):
        """Remainder bound (upper envelope) at an array of |t| values;
        +inf beyond the grid cap (exp(-t^2/2) may underflow there, so the
        sentinel is applied after the product)."""
        t = np.abs(np.asarray(t, dtype=np.float64))
        if self.closed_form_remainder:
            return impl.rtilde3_arr(t, self.epsilon)
        pref = self.epsilon if self.uniform else self.ell
        if pref == 0.0:
            return np.zeros_like(t)
        inner = self.inner_upper(t)
        capped = np.isinf(inner)
        out = pref * np.exp(-0.5 * t * t) * np.where(capped, 1.0, inner)
        return np.where(capped, np.inf, out)

    def f_term_arr(self, t):
        """Modulus majorant for the mid-frequency term. Finite n: sharpest
        product-form majorant with exponential fallback. Uniform tail: the
        exponential majorant at the shifted argument, which dominates every
        n >= N (the frozen-index product form does not)."""
        t = np.asarray(t, dtype=np.float64)
        if self.uniform:
            return impl.f2_arr(t, self.shifted)
        return impl.fmaj_arr(t, self.ell_n, self.n)
