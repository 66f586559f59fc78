"""Smoothing kernel: |K(t)| and the pole-subtracted weight |K(t) - i/(2 pi t)|.

K(t) = (1-t)/2 + (i/2)[(1-t) cot(pi t) + 1/pi] on (0, 1). The weight factors
as (1-t)/2 * sqrt(1 + (cot(pi t) - 1/(pi t))^2), whose bracket is evaluated
by series below t = 1e-4 (the raw difference cancels catastrophically
there); the continuous extension at 0 is 1/2.
"""

from dataclasses import dataclass

import becert.constants  # noqa: F401  (configures the kernel backend)
from becert._backend import impl

__all__ = ["KernelPoint", "kernel_abs", "smoothing_weight", "kernel_point"]


@dataclass(frozen=True)
class KernelPoint:
    t: float
    abs_K: float
    smoothing_weight: float


def _check_domain(t: float) -> None:
    if not 0.0 < t < 1.0:
        raise ValueError(f"t must lie in the open interval (0, 1), got {t}")


def kernel_abs(t: float) -> float:
    _check_domain(t)
    return impl.kernel_abs(t)


def smoothing_weight(t: float) -> float:
    _check_domain(t)
    return impl.smoothing_weight(t)


def kernel_point(t: float) -> KernelPoint:
    _check_domain(t)
    return KernelPoint(t, impl.kernel_abs(t), impl.smoothing_weight(t))
