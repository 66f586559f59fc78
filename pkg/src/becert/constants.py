"""Universal numerical constants of the certification pipeline.

All four are computed at import time (bisection / golden section over
closed-form objectives), cross-checked, frozen into ``UNIVERSAL``, and
pushed into the evaluation-kernel backend.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from becert import _backend
from becert.quadrature import find_root, maximize_scalar, normal_cdf

__all__ = [
    "UniversalConstants",
    "theta_equation",
    "theta_equation_alt",
    "compute_theta0",
    "compute_kappa",
    "esseen_lower_constant",
    "bhattacharya_bound",
    "lemma6_regime",
    "UNIVERSAL",
]


@dataclass(frozen=True)
class UniversalConstants:
    theta0: float            # root of the cosine-envelope equation in (pi, 2*pi)
    kappa: float             # sup_{x>0} (cos x - 1 + x^2/2)/x^3, attained at theta0
    esseen_lower: float      # (sqrt(10)+3)/(6*sqrt(2*pi))
    bhattacharya_bound: float  # sup_{x>0} (Phi(x) - x^2/(1+x^2))


def theta_equation(theta: float) -> float:
    """3(1-cos t) - t sin t - t^2/2; positive at pi, negative at 2*pi."""
    return 3.0 * (1.0 - math.cos(theta)) - theta * math.sin(theta) - 0.5 * theta * theta


def theta_equation_alt(theta: float) -> float:
    """t^2 + 2t sin t + 6(cos t - 1); same root, opposite orientation (-2x)."""
    return theta * theta + 2.0 * theta * math.sin(theta) + 6.0 * (math.cos(theta) - 1.0)


def compute_theta0(tol: float = 1e-12) -> float:
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    return find_root(theta_equation, math.pi, 2.0 * math.pi, tol)


def _kappa_objective(x):
    return (np.cos(x) - 1.0 + 0.5 * x * x) / x ** 3


def compute_kappa(theta0: float, grid_tol: float = 1e-6) -> float:
    """Closed form at theta0, cross-checked against a dense grid scan of the
    objective over (0, 4*pi]; a grid value above the closed form flags a
    broken root."""
    value = (math.cos(theta0) - 1.0 + 0.5 * theta0 * theta0) / theta0 ** 3
    # below ~1e-2 the numerator (~x^4/24) drowns in rounding noise, and the
    # objective vanishes there anyway; the sup sits near theta0 ~ 4
    xs = np.linspace(1e-2, 4.0 * math.pi, 20001)
    grid_max = float(np.max(_kappa_objective(xs)))
    if grid_max > value + grid_tol:
        raise RuntimeError(
            f"grid sup {grid_max} exceeds closed form {value}: bad theta0?"
        )
    return value


def esseen_lower_constant() -> float:
    return (math.sqrt(10.0) + 3.0) / (6.0 * math.sqrt(2.0 * math.pi))


def bhattacharya_bound() -> float:
    _, fmax = maximize_scalar(
        lambda x: normal_cdf(x) - x * x / (1.0 + x * x), 1e-9, 10.0, tol=1e-9
    )
    return fmax


def lemma6_regime(k: float, epsilon: float) -> Optional[float]:
    """Constant valid in the small-epsilon regime, or None when the regime
    does not apply. The caller guarantees the underlying large-n envelope
    through the epsilon threshold 0.05*(1+k)."""
    if not 0.0 <= k <= 1.0:
        raise ValueError("k must lie in [0, 1]")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if epsilon > 0.05 * (1.0 + k):
        return None
    if k >= 0.75:
        return 0.2727
    if k <= 0.74:
        return 0.4768 / (1.0 + k)
    return None


def _build() -> UniversalConstants:
    theta0 = compute_theta0(1e-12)
    kappa = compute_kappa(theta0)
    return UniversalConstants(
        theta0=theta0,
        kappa=kappa,
        esseen_lower=esseen_lower_constant(),
        bhattacharya_bound=bhattacharya_bound(),
    )


UNIVERSAL = _build()
_backend.configure(UNIVERSAL.theta0, UNIVERSAL.kappa)
