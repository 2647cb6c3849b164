import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithwave import kernels
from arithwave.kernels import contour_lengths, python_contour_lengths
from arithwave.quadrature import adaptive_cubature, gauss_legendre_panels
from arithwave.errors import QuadratureError

import oracles


def _grid(h, lo=-1.0, hi=1.0):
    xs = np.arange(lo, hi + h / 2, h)
    return xs, np.meshgrid(xs, xs, indexing="ij")


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")


@given(st.integers(0, 2**32), st.integers(2, 60), st.floats(0.05, 2.0))
@settings(max_examples=60, deadline=None)
def test_backends_agree(seed, size, radius):
    g = np.random.default_rng(seed)
    v = g.standard_normal((size, size + 3))
    v[g.random(v.shape) < 0.05] = 0.0
    a = contour_lengths(v, -0.3, -0.2, 0.02, 0.1, 0.05, radius)
    b = python_contour_lengths(v, -0.3, -0.2, 0.02, 0.1, 0.05, radius)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("offset", [0.0, 0.3, -0.55])
def test_straight_line_is_exact(offset):
    h = 0.01
    xs, (X, Y) = _grid(h)
    v = X - offset + 0.5 * h * 0.37  # keep the line off the grid nodes
    inside, total = contour_lengths(v, xs[0], xs[0], h, 0.0, 0.0, 0.8)
    line_x = offset - 0.5 * h * 0.37
    assert inside == pytest.approx(oracles.plane_chord(0.8, line_x), abs=1e-12)
    assert total == pytest.approx(xs[-1] - xs[0], abs=1e-12)


def test_circle_converges():
    errs = []
    for h in (0.04, 0.02, 0.01):
        xs, (X, Y) = _grid(h)
        v = X * X + Y * Y - 0.5**2
        _, total = contour_lengths(v, xs[0], xs[0], h)
        errs.append(abs(total - math.pi))
    assert errs[0] > errs[1] > errs[2] and errs[2] < 1e-3


def test_constant_field_has_no_zero_set():
    assert contour_lengths(np.ones((10, 10)), 0, 0, 0.1) == (0.0, 0.0)


def test_gauss_legendre_panels_integrate_polynomials():
    x, w = gauss_legendre_panels(0.0, 2.0, 3, 5)
    assert w.sum() == pytest.approx(2.0)
    assert np.dot(w, x**9) == pytest.approx(2.0**10 / 10, rel=1e-13)


def test_adaptive_cubature_smooth_and_oscillatory():
    r = adaptive_cubature(lambda x, y: np.exp(x + y), 0, 1, 0, 2, rtol=1e-12)
    assert r.value == pytest.approx((math.e - 1) * (math.e**2 - 1), rel=1e-12)
    r = adaptive_cubature(lambda x, y: np.cos(40 * x) * np.cos(3 * y), 0, 1, 0, 1, rtol=1e-10)
    assert r.value == pytest.approx(math.sin(40) / 40 * math.sin(3) / 3, rel=1e-9)


def test_adaptive_cubature_reports_failure():
    with pytest.raises(QuadratureError):
        adaptive_cubature(lambda x, y: 1 / np.sqrt(np.abs(x - 0.3) + 1e-30), 0, 1, 0, 1, rtol=1e-15, max_regions=50)
