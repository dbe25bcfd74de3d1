"""Kernel backend selection.

Prefers the compiled Cython extension and falls back to the NumPy
implementations. Set ``PHASEFRONT_PURE_PYTHON=1`` to force the fallback
(useful for benchmarking and backend parity tests).
"""

import os

from . import _kernels_py

if os.environ.get("PHASEFRONT_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

fd1_periodic = _impl.fd1_periodic
fd2_periodic = _impl.fd2_periodic
allen_cahn_rhs_core = _impl.allen_cahn_rhs_core
tanh_fit_batch = _impl.tanh_fit_batch


def backend_name():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return _impl.BACKEND_NAME
