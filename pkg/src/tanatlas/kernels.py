"""Backend selection for the raster classification kernels.

Prefers the compiled Cython extension; falls back to the vectorized numpy
implementation when the extension was not built.  Both expose the same
interface and implement the same per-cell state machine.

    classify_dynamic(lam, p, q, z0_flat, max_iter, trap_r) -> (tag, aux1, aux2)
    classify_param(p, q, lams_flat, max_iter)              -> (tag, aux1, aux2)

Tag encodings (uint8):
    dynamic: 0 undecided, 1 attracted-to-zero, 2 attracting cycle,
             3 pole escape, 4 neutral candidate
    param:   0 undecided, 1 capture, 2 shell
"""

from ._kernels_py import (
    DYN_CYCLE,
    DYN_NEUTRAL,
    DYN_POLE,
    DYN_UNDECIDED,
    DYN_ZERO,
    PAR_CAPTURE,
    PAR_SHELL,
    PAR_UNDECIDED,
)

try:
    from . import _kernels as _impl
except ImportError:
    from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
classify_dynamic = _impl.classify_dynamic
classify_param = _impl.classify_param
basin_dem = _impl.basin_dem


def fallback_backend():
    """The pure-python backend, always available (used by the benchmark)."""
    from . import _kernels_py

    return _kernels_py


def compiled_backend():
    """The compiled backend, or None when it is not built."""
    try:
        from . import _kernels

        return _kernels
    except ImportError:
        return None
