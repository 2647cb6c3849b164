"""Nodal length of a field inside a disc, by marching squares."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ArgumentError
from ..kernels import contour_lengths
from .fields import FieldSpec, torus_values


@dataclass(frozen=True)
class NodalLengthEstimate:
    """Length at step ``grid_step``; ``refinement_ratio`` is ``L(h) / L(h/2)``."""

    length: float
    grid_step: float
    refinement_ratio: float
    s: float

    @property
    def accepted(self) -> bool:
        return 0.9 <= self.refinement_ratio <= 1.1


def ball_grid(s: float, h: float, centre=(0.0, 0.0)):
    """Grid axes of step ``h`` covering the square around the disc."""
    cells = max(1, math.ceil(2.0 * s / h - 1e-9))
    xs = centre[0] - s + h * np.arange(cells + 1)
    ys = centre[1] - s + h * np.arange(cells + 1)
    return xs, ys


def ball_length(field: FieldSpec, s: float, h: float, centre=(0.0, 0.0)) -> float:
    xs, ys = ball_grid(s, h, centre)
    values = field.grid(xs, ys)
    inside, _ = contour_lengths(values, xs[0], ys[0], h, centre[0], centre[1], s)
    return inside


def nodal_length(field: FieldSpec, s: float, h: float, refine: bool = True,
                 centre=(0.0, 0.0)) -> NodalLengthEstimate:
    """Zero-set length of ``field`` inside ``B(centre, s)``."""
    if not s > 0:
        raise ArgumentError(f"s must be positive, got {s}")
    if not 0 < h <= s / 20 * (1 + 1e-12):
        raise ArgumentError(f"grid step must satisfy 0 < h <= s/20, got h={h}, s={s}")
    coarse = ball_length(field, s, h, centre)
    ratio = math.nan
    if refine:
        fine = ball_length(field, s, h / 2, centre)
        if fine > 0:
            ratio = coarse / fine
        elif coarse == 0:
            ratio = 1.0
    return NodalLengthEstimate(coarse, h, ratio, s)


def torus_lengths(field: FieldSpec, K: int, s: float | None = None) -> tuple[float, float]:
    """``(length in the disc of radius s at the torus centre, total torus length)``.

    The periodic ``K x K`` grid is closed by repeating its first row and
    column, so cells across the seam are included.
    """
    v = torus_values(field, K)
    v = np.concatenate([v, v[:1]], axis=0)
    v = np.concatenate([v, v[:, :1]], axis=1)
    h = 1.0 / K
    radius = float("inf") if s is None else float(s)
    return contour_lengths(v, 0.0, 0.0, h, 0.5, 0.5, radius)
