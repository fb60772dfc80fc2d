"""Select compiled kernels when available, else the numpy fallback.

Set ``QDESIRE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

COMPILED = False
if os.environ.get("QDESIRE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl
        COMPILED = True
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

jacobi_sweeps = _impl.jacobi_sweeps
accumulate_payoffs = _impl.accumulate_payoffs
