"""Hot-kernel backend selection: compiled extension if available, numpy otherwise."""

from . import numpy_backend

BRACKET_NU = numpy_backend.BRACKET_NU
BRACKET_NORM = numpy_backend.BRACKET_NORM

try:
    from . import _accum as _compiled
    susy_sum = _compiled.susy_sum
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None
    susy_sum = numpy_backend.susy_sum
    BACKEND = "numpy"

__all__ = ["susy_sum", "BACKEND", "BRACKET_NU", "BRACKET_NORM", "numpy_backend"]
