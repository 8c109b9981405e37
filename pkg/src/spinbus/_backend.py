"""Kernel backend selection.

The hot kernels in :mod:`spinbus._kernels` exist in two variants: a numba
``@njit`` version and a pure-numpy version.  Which one the package uses is
decided once, at import time, from the ``SPINBUS_NUMBA`` environment
variable:

* unset or ``auto`` - use numba when it imports cleanly, numpy otherwise;
* ``1`` / ``true`` / ``on`` - require numba, raise if it is unavailable;
* ``0`` / ``false`` / ``off`` - force the numpy fallback.

``backend_name()`` reports the active choice.  Both variants stay callable
directly (``*_numpy`` / ``*_numba`` names in ``_kernels``) so the benchmark
and the test suite can compare them inside one process.
"""

import os

_FALSE = {"0", "false", "off", "no"}
_TRUE = {"1", "true", "on", "yes"}


def _decide():
    raw = os.environ.get("SPINBUS_NUMBA", "auto").strip().lower()
    if raw in _FALSE:
        return False
    try:
        import numba  # noqa: F401
        available = True
    except ImportError:
        available = False
    if raw in _TRUE:
        if not available:
            raise ImportError(
                "SPINBUS_NUMBA=1 requires numba, which failed to import"
            )
        return True
    return available


USE_NUMBA = _decide()


def backend_name():
    """Name of the active kernel backend, 'numba' or 'numpy'."""
    return "numba" if USE_NUMBA else "numpy"
