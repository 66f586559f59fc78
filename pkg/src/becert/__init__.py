"""becert: certified sharpened Berry-Esseen constants and random-sum bounds.

The package certifies the two sharpened central-limit-theorem error
constants (0.335789 with additive shift 0.425, and 0.3051 with shift 1)
through a smoothing-inequality pipeline with explicit quadrature error
budgets, validates them against an exact lattice-distribution oracle, and
exposes the derived bound evaluators for Poisson and mixed-Poisson random
sums.
"""

from becert._backend import BACKEND
from becert.constants import UNIVERSAL

__all__ = ["BACKEND", "UNIVERSAL", "__version__"]
__version__ = "0.1.0"
