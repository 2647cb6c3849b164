"""Backend selection for the hot loops.

The compiled extension is used when it was built; setting
``ARITHWAVE_PURE_PYTHON=1`` forces the numpy implementation.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

ENV_PURE = "ARITHWAVE_PURE_PYTHON"

if os.environ.get(ENV_PURE, "") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"


def contour_lengths(values, x0: float, y0: float, h: float, cx: float = 0.0, cy: float = 0.0,
                    radius: float = float("inf")) -> tuple[float, float]:
    """``(length inside disc, total length)`` of the zero set of grid samples."""
    v = np.ascontiguousarray(values, dtype=np.float64)
    return _impl.contour_lengths(v, float(x0), float(y0), float(h), float(cx), float(cy), float(radius))


def python_contour_lengths(values, x0, y0, h, cx=0.0, cy=0.0, radius=float("inf")):
    """The numpy backend regardless of selection, for comparison."""
    return _kernels_py.contour_lengths(np.asarray(values, dtype=float), x0, y0, h, cx, cy, radius)
