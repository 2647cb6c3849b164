# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled marching-squares contour length with exact disc clipping."""

from libc.math cimport sqrt, INFINITY

cdef double ZERO_NUDGE = 1e-12


cdef inline double _fix(double v) noexcept nogil:
    return v if v != 0.0 else ZERO_NUDGE


cdef inline double _clip(double ax, double ay, double bx, double by,
                         double cx, double cy, double r2) noexcept nogil:
    """Length of the part of segment a-b inside the disc."""
    cdef double dx = bx - ax, dy = by - ay
    cdef double a = dx * dx + dy * dy
    if a == 0.0:
        return 0.0
    cdef double fx = ax - cx, fy = ay - cy
    cdef double b = 2.0 * (fx * dx + fy * dy)
    cdef double c = fx * fx + fy * fy - r2
    cdef double disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return 0.0
    cdef double sq = sqrt(disc)
    cdef double t1 = (-b - sq) / (2.0 * a)
    cdef double t2 = (-b + sq) / (2.0 * a)
    if t1 < 0.0:
        t1 = 0.0
    if t2 > 1.0:
        t2 = 1.0
    if t2 <= t1:
        return 0.0
    return sqrt(a) * (t2 - t1)


def contour_lengths(double[:, ::1] values, double x0, double y0, double h,
                    double cx, double cy, double radius):
    """Zero-set length of the bilinear-edge interpolant of ``values``.

    ``values[i, j]`` is the sample at ``(x0 + i*h, y0 + j*h)``.  Returns
    ``(inside, total)`` where ``inside`` is the length within the disc of
    the given centre and radius (``radius = inf`` disables clipping).
    """
    cdef Py_ssize_t nx = values.shape[0], ny = values.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double v[4]
    cdef double px[4]
    cdef double py[4]
    cdef bint cross[4]
    cdef double x, y, t, centre, L, dxs, dys
    cdef double total = 0.0, inside = 0.0
    cdef double r2 = radius * radius
    cdef bint clip = radius < INFINITY
    cdef double far, near, qx, qy
    cdef int code, e, na
    cdef int ends[4]
    cdef double diag = h * 1.4142135623730951
    with nogil:
        for i in range(nx - 1):
            x = x0 + i * h
            for j in range(ny - 1):
                v[0] = _fix(values[i, j])
                v[1] = _fix(values[i + 1, j])
                v[2] = _fix(values[i + 1, j + 1])
                v[3] = _fix(values[i, j + 1])
                code = (v[0] > 0) | ((v[1] > 0) << 1) | ((v[2] > 0) << 2) | ((v[3] > 0) << 3)
                if code == 0 or code == 15:
                    continue
                y = y0 + j * h
                cross[0] = (v[0] > 0) != (v[1] > 0)
                cross[1] = (v[1] > 0) != (v[2] > 0)
                cross[2] = (v[2] > 0) != (v[3] > 0)
                cross[3] = (v[3] > 0) != (v[0] > 0)
                if cross[0]:
                    t = v[0] / (v[0] - v[1])
                    px[0] = x + t * h
                    py[0] = y
                if cross[1]:
                    t = v[1] / (v[1] - v[2])
                    px[1] = x + h
                    py[1] = y + t * h
                if cross[2]:
                    t = v[2] / (v[2] - v[3])
                    px[2] = x + h - t * h
                    py[2] = y + h
                if cross[3]:
                    t = v[3] / (v[3] - v[0])
                    px[3] = x
                    py[3] = y + h - t * h
                if code == 5 or code == 10:
                    centre = 0.25 * (v[0] + v[1] + v[2] + v[3])
                    if (centre > 0) == (v[0] > 0):
                        ends[0] = 0; ends[1] = 1; ends[2] = 2; ends[3] = 3
                    else:
                        ends[0] = 3; ends[1] = 0; ends[2] = 1; ends[3] = 2
                    na = 2
                else:
                    na = 0
                    for e in range(4):
                        if cross[e]:
                            ends[na] = e
                            na += 1
                    na = 1
                # classify the cell against the disc once
                qx = x + 0.5 * h - cx
                qy = y + 0.5 * h - cy
                near = sqrt(qx * qx + qy * qy)
                for k in range(na):
                    dxs = px[ends[2 * k + 1]] - px[ends[2 * k]]
                    dys = py[ends[2 * k + 1]] - py[ends[2 * k]]
                    L = sqrt(dxs * dxs + dys * dys)
                    total += L
                    if not clip or near + 0.5 * diag <= radius:
                        inside += L
                    elif near - 0.5 * diag < radius:
                        inside += _clip(px[ends[2 * k]], py[ends[2 * k]],
                                        px[ends[2 * k + 1]], py[ends[2 * k + 1]], cx, cy, r2)
    return inside, total
