"""Kac-Rice reference values for arithmetic random waves.

Everything is computed from the lattice points, never from tabulated
constants: the mean nodal-length density from the second moments of the
spectral measure, the moments of the covariance from exact correlation
counts, and the two-point variance density ``L_2`` from the covariance jet.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import j1

from ..correlations import DEFAULT_BUDGET, _Join
from ..errors import ArgumentError, SingularityError
from ..gaussint import LatticePointSet
from ..quadrature import adaptive_cubature, gauss_legendre_panels
from ..spectral import covariance, covariance_derivatives

SINGULAR_GAP = 1e-9


@dataclass(frozen=True)
class KacRiceJet:
    r: float
    X: np.ndarray
    Y: np.ndarray
    L2: float
    eps_bound: float


def _tr(a: np.ndarray) -> np.ndarray:
    return np.trace(a, axis1=-2, axis2=-1)


def assemble(r, grad, hess, energy: float):
    """``(X, Y, L2, eps_bound)`` from the covariance jet, vectorized.

    ``X = -2 / (E (1 - r^2)) g g^T`` and ``Y = -(2/E) (H + r / (1 - r^2) g g^T)``
    where ``E`` is the energy used to normalize derivatives.
    """
    r = np.asarray(r, dtype=float)
    g = np.asarray(grad, dtype=float)
    H = np.asarray(hess, dtype=float)
    one_minus = 1.0 - r * r
    gg = g[..., :, None] * g[..., None, :]
    X = -2.0 / (energy * one_minus)[..., None, None] * gg
    Y = -2.0 / energy * (H + (r / one_minus)[..., None, None] * gg)
    Y2 = Y @ Y
    X2 = X @ X
    trX = _tr(X)
    trY2 = _tr(Y2)
    r2 = r * r
    total = (
        r2
        + trX
        + trY2 / 4.0
        + 0.75 * r2 * r2
        - _tr(X @ Y2) / 8.0
        - _tr(X2) / 16.0
        + _tr(Y2 @ Y2) / 128.0
        + trY2 * trY2 / 256.0
        - trX * trY2 / 16.0
        + r2 * trX / 2.0
        + r2 * trY2 / 8.0
    )
    L2 = total / 8.0
    Y3 = Y2 @ Y
    eps = np.abs(r2 * r2 * r2) + np.abs(_tr(X2 @ X)) + np.abs(_tr(Y3 @ Y3))
    return X, Y, L2, eps


def kac_rice_jet(points: LatticePointSet, x, energy: float | None = None) -> KacRiceJet:
    """``X``, ``Y``, ``L_2`` and the remainder bound at the separation ``x``.

    ``energy`` defaults to ``n``; pass ``4 pi^2 n`` for derivatives
    normalized to unit variance.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ArgumentError("x must be a 2-vector")
    E = float(points.n if energy is None else energy)
    r, g, H = covariance_derivatives(points, x)
    if r * r >= 1.0 - SINGULAR_GAP:
        raise SingularityError(f"r(x)^2 = {r * r!r} is within {SINGULAR_GAP} of 1 at x={x.tolist()}")
    X, Y, L2, eps = assemble(r, g, 0.5 * (H + H.T), E)
    return KacRiceJet(float(r), X, 0.5 * (Y + Y.T), float(L2), float(eps))


def gradient_variance(points: LatticePointSet) -> float:
    """Per-component variance of the gradient of the unit-variance field."""
    pts = points.points.astype(float)
    m11 = float(np.mean(pts[:, 0] ** 2))
    m22 = float(np.mean(pts[:, 1] ** 2))
    m12 = float(np.mean(pts[:, 0] * pts[:, 1]))
    if abs(m11 - m22) > 1e-9 * max(m11, 1.0) or abs(m12) > 1e-9 * max(m11, 1.0):
        raise ArgumentError("gradient covariance is not isotropic")
    return 4.0 * math.pi**2 * m11


def mean_length_density(points: LatticePointSet) -> float:
    """Expected nodal length per unit area, ``sigma / 2``."""
    return 0.5 * math.sqrt(gradient_variance(points))


def expected_length(points: LatticePointSet, s: float) -> float:
    return mean_length_density(points) * math.pi * s * s


# -- moments of the covariance ---------------------------------------------------


def sum_norm_weights(points: LatticePointSet, l: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """``W[m]`` = number of ordered ``l``-tuples with ``|sum|^2 = m``."""
    join = _Join(points, l, budget)
    A, B = join.head, join.tail
    a = A.decode()
    b = B.decode()
    top = (l * math.isqrt(points.n) + l) ** 2
    W = np.zeros(top + 1, dtype=np.float64)
    chunk = max(1, 2_000_000 // max(1, len(a)))
    for s0 in range(0, len(b), chunk):
        bb = b[s0 : s0 + chunk]
        v = a[None, :, :] + bb[:, None, :]
        m = (v[..., 0] * v[..., 0] + v[..., 1] * v[..., 1]).ravel()
        w = (B.counts[s0 : s0 + chunk, None].astype(float) * A.counts[None, :].astype(float)).ravel()
        W += np.bincount(m, weights=w, minlength=top + 1)[: top + 1]
    return W


def moment_closed_form(points: LatticePointSet, l: int, s: float) -> tuple[float, float]:
    """``(integral of r^l over B(s), the Bessel part of it)``.

    The zero sums contribute ``pi s^2 S(l, n) / N^l``; each nonzero sum ``v``
    contributes ``2 pi s^2 J_1(2 pi s |v|) / (2 pi s |v|)``.
    """
    W = sum_norm_weights(points, l)
    N = len(points)
    m = np.flatnonzero(W[1:]) + 1
    k = 2.0 * math.pi * s * np.sqrt(m)
    tail = 2.0 * math.pi * s * s * float(np.sum(W[m] * j1(k) / k)) / N**l
    zero = math.pi * s * s * W[0] / N**l
    return zero + tail, tail


def moment_quadrature(points: LatticePointSet, l: int, s: float, rtol: float = 1e-10) -> float:
    """Adaptive cubature of ``r^l`` over ``B(s)`` in polar coordinates."""

    def f(rho, phi):
        x = np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=-1)
        return covariance(points, x) ** l * rho

    return adaptive_cubature(f, 0.0, s, 0.0, 2.0 * math.pi, rtol=rtol).value


def moment_integral(points: LatticePointSet, l: int, s: float, rtol: float = 1e-10):
    """``(closed_form, quadrature, bessel_tail)`` for ``l`` in ``{2, 4, 6}``."""
    if l not in (2, 4, 6):
        raise ArgumentError(f"l must be 2, 4 or 6, got {l}")
    if not s > 0:
        raise ArgumentError("s must be positive")
    closed, tail = moment_closed_form(points, l, s)
    quad = moment_quadrature(points, l, s, rtol)
    return closed, quad, tail


# -- variance integral -----------------------------------------------------------------


def lens_area(d, s: float):
    """Area of ``B(s) ∩ (B(s) + u)`` for ``|u| = d``."""
    d = np.clip(np.asarray(d, dtype=float), 0.0, 2.0 * s)
    return 2.0 * s * s * np.arccos(d / (2.0 * s)) - 0.5 * d * np.sqrt(np.maximum(4.0 * s * s - d * d, 0.0))


class VarianceIntegral(NamedTuple):
    """Two-point Kac-Rice integral and the size of its neglected remainder."""

    value: float
    remainder_bound: float
    rho_nodes: int
    phi_nodes: int


def variance_integral(
    points: LatticePointSet,
    s: float,
    energy: float | None = None,
    nodes_per_wavelength: int = 48,
    angular_factor: float = 12.0,
) -> VarianceIntegral:
    """``(E/2) * integral of L_2(u) * |B(s) ∩ (B(s)+u)| du`` over ``|u| <= 2s``.

    ``E`` defaults to ``4 pi^2 n``, the energy of the unit-variance field.
    ``remainder_bound`` integrates ``eps_bound + r^6`` the same way.  The
    radial direction uses composite 16-point Gauss-Legendre panels; the
    angular direction the trapezoid rule on one eighth of the circle, which
    the dihedral symmetry of the lattice points extends to the full turn.
    """
    if not s > 0:
        raise ArgumentError("s must be positive")
    n = points.n
    E = 4.0 * math.pi**2 * n if energy is None else float(energy)
    k = math.sqrt(n)
    panels = max(4, math.ceil(2.0 * s * k * nodes_per_wavelength / 16))
    rho, wr = gauss_legendre_panels(0.0, 2.0 * s, panels, 16)
    m = max(16, 8 * math.ceil(angular_factor * 2.0 * s * k / 8))
    phi = np.linspace(0.0, math.pi / 4, m + 1)
    wphi = np.full(m + 1, math.pi / 4 / m)
    wphi[[0, -1]] *= 0.5
    wphi *= 8.0
    weight = wr * rho * lens_area(rho, s)
    dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    total = 0.0
    rem = 0.0
    for i in range(len(rho)):
        r, g, H = covariance_derivatives(points, rho[i] * dirs)
        _, _, L2, eps = assemble(r, g, H, E)
        total += weight[i] * float(L2 @ wphi)
        rem += weight[i] * float((eps + r**6) @ wphi)
    return VarianceIntegral(0.5 * E * total, 0.5 * E * rem, len(rho), m + 1)
