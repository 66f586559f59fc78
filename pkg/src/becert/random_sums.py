"""Closed-form convergence-rate bounds for Poisson and mixed-Poisson random
sums: the 0.3051 Poisson bound, its finite-n reduction, the gamma/geometric
mixing corollaries, and the two location-mixture bounds with their inner
epsilon minimization.
"""

import math
from dataclasses import dataclass

import numpy as np

from becert.empirical import MomentProfile

__all__ = [
    "StructuralSpec",
    "poisson_be_bound", "compound_third_moment_bound",
    "standardized_third_moment_bound", "poisson_bound_via_finite_n",
    "theorem5_bound", "gamma_inverse_sqrt_moment", "q_factor",
    "theorem6_bound", "theorem8_bound", "heavy_tail_mean_abs",
]

POISSON_COEFF = 0.3051


@dataclass(frozen=True)
class StructuralSpec:
    """Mixing-intensity description: mean drift ell*t, variance s^2*t, the
    first absolute moment of the limit fluctuation V, the structural
    Kolmogorov distance input, and (for the infinite-variance route) the
    normalized mean absolute deviation E|L_t - t|/sqrt(t)."""
    ell: float
    s: float
    E_abs_V: float
    delta_t: float = 0.0
    mean_abs_dev: float = 0.0

    def __post_init__(self):
        if self.ell <= 0.0:
            raise ValueError("ell must be positive")
        for name in ("s", "E_abs_V", "delta_t", "mean_abs_dev"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")


def poisson_be_bound(m: MomentProfile, lam: float) -> float:
    """0.3051 * beta^3 / ((mu^2 + sigma^2)^(3/2) sqrt(lam))."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    return POISSON_COEFF * m.beta3 / ((m.mu ** 2 + m.sigma2) ** 1.5 * math.sqrt(lam))


def compound_third_moment_bound(m: MomentProfile, nu: float) -> float:
    """nu * beta^3 * (1 + 40 nu): centered absolute third moment of one
    splitting summand of the compound law, proven only for nu <= 1."""
    if not 0.0 < nu <= 1.0:
        raise ValueError("nu must lie in (0, 1] (the bound is unproven beyond)")
    return nu * m.beta3 * (1.0 + 40.0 * nu)


def standardized_third_moment_bound(m: MomentProfile, lam: float, n: int) -> float:
    """beta^3 (1 + 40 lam/n) sqrt(n) / ((mu^2+sigma^2)^(3/2) sqrt(lam)):
    third absolute moment of the standardized splitting summand."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    if n < lam:
        raise ValueError("need n >= lam (splitting ratio above 1 unproven)")
    return (m.beta3 * (1.0 + 40.0 * lam / n) * math.sqrt(n)
            / ((m.mu ** 2 + m.sigma2) ** 1.5 * math.sqrt(lam)))


def poisson_bound_via_finite_n(m: MomentProfile, lam: float, n: int) -> float:
    """Finite-n route to the Poisson bound: 0.3051*(E|Z|^3 + 1)/sqrt(n) with
    the splitting-summand moment bound; decreases to poisson_be_bound as
    n -> inf."""
    z3 = standardized_third_moment_bound(m, lam, n)
    return POISSON_COEFF * z3 / math.sqrt(n) + POISSON_COEFF / math.sqrt(n)


def theorem5_bound(beta3: float, inv_sqrt_moment: float, delta_t: float) -> float:
    """Scale-mixture rate bound: 0.3051 * beta^3 * E[Lambda^(-1/2)] + delta/2."""
    if beta3 < 0.0 or inv_sqrt_moment < 0.0 or delta_t < 0.0:
        raise ValueError("all inputs must be nonnegative")
    return POISSON_COEFF * beta3 * inv_sqrt_moment + 0.5 * delta_t


def gamma_inverse_sqrt_moment(r: float, t: float) -> float:
    """E[U^(-1/2)] for U ~ Gamma(shape r, scale t) = G(r-1/2)/(G(r) sqrt(t));
    diverges as r -> 1/2."""
    if r <= 0.5:
        raise ValueError("moment diverges for r <= 1/2")
    if t <= 0.0:
        raise ValueError("t must be positive")
    return math.exp(math.lgamma(r - 0.5) - math.lgamma(r)) / math.sqrt(t)


def q_factor(epsilon: float) -> float:
    """max{1/e, sqrt(1+e) / ((1+sqrt(1-e)) sqrt(2 pi e_const (1-e)))} on (0,1)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    second = math.sqrt(1.0 + epsilon) / (
        (1.0 + math.sqrt(1.0 - epsilon))
        * math.sqrt(2.0 * math.pi * math.e * (1.0 - epsilon))
    )
    return max(1.0 / epsilon, second)


def _minimize_eps(objective) -> float:
    """Scalar minimization on (0, 1): 64-point coarse scan (the objective
    diverges at both endpoints, but need not be unimodal) seeding a
    golden-section refinement."""
    xs = np.linspace(1e-6, 1.0 - 1e-6, 64)
    vals = np.array([objective(x) for x in xs])
    i = int(np.argmin(vals))
    lo = xs[max(0, i - 1)]
    hi = xs[min(len(xs) - 1, i + 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    while hi - lo > 1e-12:
        if f1 > f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = objective(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = objective(x1)
    return min(float(vals[i]), f1, f2, objective(0.5 * (lo + hi)))


def theorem6_bound(m: MomentProfile, spec: StructuralSpec, t: float) -> float:
    """Location-mixture rate bound for nonzero-mean summands with
    finite-variance mixing intensity."""
    if m.mu == 0.0:
        raise ValueError("zero-mean summands: use the scale-mixture bound")
    if t <= 0.0:
        raise ValueError("t must be positive")
    c = POISSON_COEFF * m.beta3 / (m.mu ** 2 + m.sigma2) ** 1.5

    def objective(e):
        return (c / math.sqrt((1.0 - e) * spec.ell)
                + (spec.s / spec.ell) * (spec.E_abs_V / e + q_factor(e)))

    return spec.delta_t + _minimize_eps(objective) / math.sqrt(t)


def theorem8_bound(m: MomentProfile, E_abs_V: float, mean_abs_dev: float,
                   delta_hat: float, t: float) -> float:
    """Location-mixture rate bound assuming only the first moment of the
    mixing intensity (E Lambda_t = t)."""
    if m.mu == 0.0:
        raise ValueError("zero-mean summands: use the scale-mixture bound")
    if t <= 0.0:
        raise ValueError("t must be positive")
    if E_abs_V < 0.0 or mean_abs_dev < 0.0 or delta_hat < 0.0:
        raise ValueError("moment inputs must be nonnegative")
    c = POISSON_COEFF * m.beta3 / (m.mu ** 2 + m.sigma2) ** 1.5

    def objective(e):
        return (c / math.sqrt(1.0 - e) + E_abs_V / e
                + q_factor(e) * mean_abs_dev)

    return delta_hat + _minimize_eps(objective) / math.sqrt(t)


def heavy_tail_mean_abs(alpha: float) -> float:
    """E|V| for the polynomial-tail density (alpha+1)/(2(|x|+1)^alpha):
    equals (alpha+1)/((alpha-2)(alpha-1)) for alpha in (2, 3)."""
    if not 2.0 < alpha < 3.0:
        raise ValueError("alpha must lie in (2, 3)")
    return (alpha + 1.0) / ((alpha - 2.0) * (alpha - 1.0))
