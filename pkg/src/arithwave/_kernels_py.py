"""Numpy implementation of the marching-squares contour length.

Same contract as the compiled kernel; used when the extension is missing or
``ARITHWAVE_PURE_PYTHON=1``.
"""
from __future__ import annotations

import numpy as np

ZERO_NUDGE = 1e-12


def _clip_lengths(ax, ay, bx, by, cx, cy, r2):
    dx, dy = bx - ax, by - ay
    a = dx * dx + dy * dy
    fx, fy = ax - cx, ay - cy
    b = 2.0 * (fx * dx + fy * dy)
    c = fx * fx + fy * fy - r2
    disc = b * b - 4.0 * a * c
    ok = (a > 0) & (disc > 0)
    a_safe = np.where(ok, a, 1.0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    t1 = np.maximum((-b - sq) / (2.0 * a_safe), 0.0)
    t2 = np.minimum((-b + sq) / (2.0 * a_safe), 1.0)
    return np.where(ok & (t2 > t1), np.sqrt(a) * (t2 - t1), 0.0)


def contour_lengths(values, x0, y0, h, cx, cy, radius):
    """Zero-set length of the edge-interpolated field; returns ``(inside, total)``."""
    v = np.asarray(values, dtype=float)
    v = np.where(v == 0.0, ZERO_NUDGE, v)
    v0, v1, v2, v3 = v[:-1, :-1], v[1:, :-1], v[1:, 1:], v[:-1, 1:]
    pos = [v0 > 0, v1 > 0, v2 > 0, v3 > 0]
    code = pos[0] * 1 + pos[1] * 2 + pos[2] * 4 + pos[3] * 8
    active = (code != 0) & (code != 15)
    ii, jj = np.nonzero(active)
    if len(ii) == 0:
        return 0.0, 0.0
    a0, a1, a2, a3 = v0[ii, jj], v1[ii, jj], v2[ii, jj], v3[ii, jj]
    x = x0 + ii * h
    y = y0 + jj * h
    c = code[ii, jj]
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = a0 / (a0 - a1)
        t1 = a1 / (a1 - a2)
        t2 = a2 / (a2 - a3)
        t3 = a3 / (a3 - a0)
    px = np.stack([x + t0 * h, x + h, x + h - t2 * h, x], axis=1)
    py = np.stack([y, y + t1 * h, y + h, y + h - t3 * h], axis=1)
    cross = np.stack(
        [(a0 > 0) != (a1 > 0), (a1 > 0) != (a2 > 0), (a2 > 0) != (a3 > 0), (a3 > 0) != (a0 > 0)],
        axis=1,
    )
    saddle = (c == 5) | (c == 10)
    # ordinary cells: the two crossed edges, lowest index first
    order = np.argsort(~cross, axis=1, kind="stable")
    starts = [order[:, 0]]
    ends = [order[:, 1]]
    rows = [np.arange(len(c))]
    if saddle.any():
        s = np.flatnonzero(saddle)
        centre = 0.25 * (a0[s] + a1[s] + a2[s] + a3[s])
        same = (centre > 0) == (a0[s] > 0)
        starts[0] = starts[0].copy()
        ends[0] = ends[0].copy()
        starts[0][s] = np.where(same, 0, 3)
        ends[0][s] = np.where(same, 1, 0)
        starts.append(np.where(same, 2, 1))
        ends.append(np.where(same, 3, 2))
        rows.append(s)
    inside = 0.0
    total = 0.0
    r2 = radius * radius
    for st, en, rw in zip(starts, ends, rows):
        ax, ay = px[rw, st], py[rw, st]
        bx, by = px[rw, en], py[rw, en]
        L = np.hypot(bx - ax, by - ay)
        total += float(L.sum())
        if np.isinf(radius):
            inside += float(L.sum())
        else:
            inside += float(_clip_lengths(ax, ay, bx, by, cx, cy, r2).sum())
    return inside, total
