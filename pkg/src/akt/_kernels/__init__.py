"""Hot-kernel backend selection.

The compiled Cython module is preferred; ``AKT_PURE_PYTHON=1`` in the
environment (or a missing build) selects the numpy fallback. Both expose
the same functions; ``benchmarks/kernel_backends.py`` times them against
each other.
"""

import os

from . import fallback

if os.environ.get("AKT_PURE_PYTHON"):
    _impl = fallback
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = fallback

BACKEND = _impl.NAME

bspline_basis = _impl.bspline_basis
bspline_basis_deriv = _impl.bspline_basis_deriv
rational_fwd = _impl.rational_fwd
rational_bwd = _impl.rational_bwd
lap_solve = _impl.lap_solve
