"""Backend selector: compiled extension if it built, pure numpy otherwise.

Set BECERT_PURE=1 to force the pure-Python kernels (used by the benchmark
and by the backend-parity tests).
"""

import os

if os.environ.get("BECERT_PURE"):
    from becert import _kernels_py as impl
else:
    try:
        from becert import _kernels as impl  # type: ignore[no-redef]
    except ImportError:
        from becert import _kernels_py as impl  # type: ignore[no-redef]

BACKEND = impl.BACKEND_NAME


def configure(theta0: float, kappa: float) -> None:
    impl.configure(theta0, kappa)
