"""Selects the gate-application backend.

The statevector hot loops exist twice: a numba-jitted version and a pure
numpy version with identical semantics. The jitted one is used whenever
numba imports cleanly; set ``QTAMPER_DISABLE_NUMBA=1`` to force the numpy
path (useful for debugging and for the benchmark baseline).
"""
import os

_DISABLE_FLAG = "QTAMPER_DISABLE_NUMBA"


def _numba_available() -> bool:
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def _select():
    if os.environ.get(_DISABLE_FLAG, "").strip().lower() in ("1", "true", "yes"):
        return "numpy"
    return "numba" if _numba_available() else "numpy"


ACTIVE = _select()

if ACTIVE == "numba":
    from . import _gateloops_nb as gateloops
else:
    from . import _gateloops_np as gateloops


def active_backend() -> str:
    """Name of the gate-loop backend chosen at import time."""
    return ACTIVE
