"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it was built and ``EGSUMS_PURE_PYTHON`` is
unset (or ``0``).  Both backends return identical results.
"""
import os

from . import _pykernels as python_backend

try:
    from . import _ckernels as compiled_backend
except ImportError:  # extension not built
    compiled_backend = None

if compiled_backend is not None and os.environ.get("EGSUMS_PURE_PYTHON", "0") in ("", "0"):
    _active = compiled_backend
    BACKEND = "cython"
else:
    _active = python_backend
    BACKEND = "python"

rising = _active.rising
unit_fraction_sum = _active.unit_fraction_sum
greedy_unit_scan = _active.greedy_unit_scan
count_assignments = _active.count_assignments
enumerate_sums = _active.enumerate_sums


def backends():
    """Available backends as ``{name: module}``."""
    found = {"python": python_backend}
    if compiled_backend is not None:
        found["cython"] = compiled_backend
    return found
