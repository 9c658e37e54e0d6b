"""Kernel backend selection.

The hot numeric kernels exist twice: a numba-compiled version
(``_numba_kernels``) and a pure-numpy reference (``_numpy_kernels``).
Which one is active is decided once at import time:

* ``CATSCREEN_BACKEND=numpy``  force the numpy fallback
* ``CATSCREEN_BACKEND=numba``  force numba (raises if numba is missing)
* unset                        numba when importable, numpy otherwise

``benchmarks/kernel_bench.py`` times the two side by side.
"""

from __future__ import annotations

import os

from .errors import ConfigError

_ENV_VAR = "CATSCREEN_BACKEND"


def _load():
    choice = os.environ.get(_ENV_VAR, "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ConfigError(f"{_ENV_VAR} must be 'numba' or 'numpy', got {choice!r}")
    if choice == "numpy":
        from . import _numpy_kernels as mod
        return mod
    try:
        from . import _numba_kernels as mod
        return mod
    except ImportError:
        if choice == "numba":
            raise ConfigError("CATSCREEN_BACKEND=numba but numba is not importable")
        from . import _numpy_kernels as mod
        return mod


kernels = _load()


def active_backend() -> str:
    """Name of the kernel backend selected at import time."""
    return kernels.BACKEND_NAME
