"""The spectral measure of a circle's lattice points and its functionals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ArgumentError
from .gaussint import LatticePointSet

#: Exponent of the almost-everywhere discrepancy decay, ``log(pi/2) / 2``.
KAPPA = 0.5 * math.log(math.pi / 2)

_IMAG_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Atomic probability measure on the circle, angles as fractions of a turn.

    ``points`` keeps the integer lattice points when the measure comes from
    a circle, which lets Fourier coefficients be computed from exact
    coordinates rather than from rounded angles.
    """

    angles: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    n: int | None = None
    points: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if len(self.angles) == 0:
            raise ArgumentError("a spectral measure needs at least one atom")
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ArgumentError("weights must sum to 1")

    @property
    def size(self) -> int:
        return len(self.angles)

    @property
    def is_lattice(self) -> bool:
        return self.points is not None


@dataclass(frozen=True)
class CovarianceJet:
    value: float
    gradient: np.ndarray
    hessian: np.ndarray


def spectral_measure(points: LatticePointSet) -> SpectralMeasure:
    """Mass ``1/N`` at the angle of every lattice point."""
    N = len(points)
    if N == 0:
        raise ArgumentError(f"n={points.n} has no lattice points")
    return SpectralMeasure(
        np.asarray(points.angles, dtype=float),
        np.full(N, 1.0 / N),
        n=points.n,
        points=np.asarray(points.points, dtype=np.int64),
    )


def measure_from_angles(angles, weights=None) -> SpectralMeasure:
    """Synthetic measure; equal weights unless given."""
    a = np.mod(np.asarray(angles, dtype=float), 1.0)
    w = np.full(len(a), 1.0 / len(a)) if weights is None else np.asarray(weights, dtype=float)
    order = np.argsort(a, kind="stable")
    return SpectralMeasure(a[order], w[order])


def fourier_coefficient(m: SpectralMeasure, k: int) -> float:
    """``sum_j w_j * exp(-2 pi i k theta_j)``; must be real up to 1e-12."""
    k = int(k)
    if m.is_lattice and k % 4 == 0:
        return _lattice_coefficient(m, abs(k))
    if m.is_lattice:
        pts = m.points
        z = (pts[:, 0] - 1j * pts[:, 1]) / math.sqrt(m.n)
        value = complex(np.mean(z ** abs(k)))
    else:
        value = complex(np.sum(m.weights * np.exp(-2j * np.pi * k * m.angles)))
    if abs(value.imag) > _IMAG_TOL:
        raise ArgumentError(f"coefficient {k} has imaginary part {value.imag:.3e}; measure is not symmetric")
    if m.is_lattice and k % 4:
        if abs(value.real) > _IMAG_TOL:
            raise AssertionError(f"coefficient {k} should vanish by quarter-turn symmetry")
        return 0.0
    return float(value.real)


def _gauss_pow(x: int, y: int, k: int) -> tuple[int, int]:
    rx, ry = 1, 0
    while k:
        if k & 1:
            rx, ry = rx * x - ry * y, rx * y + ry * x
        x, y = x * x - y * y, 2 * x * y
        k >>= 1
    return rx, ry


def _lattice_coefficient(m: SpectralMeasure, k: int) -> float:
    """Exact rational value of the coefficient for ``k`` divisible by 4."""
    total = 0
    for x, y in m.points.tolist():
        total += _gauss_pow(x, -y, k)[0]
    N = len(m.points)
    return float(Fraction(total, N * m.n ** (k // 2)))


def _atoms(m: SpectralMeasure) -> tuple[np.ndarray, np.ndarray]:
    u, inv = np.unique(m.angles, return_inverse=True)
    w = np.bincount(inv, weights=m.weights, minlength=len(u))
    return u, w


def interval_discrepancy(m: SpectralMeasure) -> float:
    """``sup_{0<a<b<1} |m(a, b) - (b - a)|`` over open and closed intervals."""
    u, w = _atoms(m)
    keep = u > 0.0
    u, w = u[keep], w[keep]
    if len(u) == 0:
        return 1.0
    M = np.cumsum(w)
    Mprev = M - w
    # closed [u_i, u_j], i <= j: mass excess
    left = np.minimum.accumulate(Mprev - u)
    d_plus = max(0.0, float(np.max((M - u) - left)))
    # open (e_i, e_j) between consecutive-or-not endpoints in {0, atoms, 1}
    total = float(M[-1])
    e = np.concatenate([[0.0], u, [1.0]])
    c_left = np.concatenate([[0.0], Mprev, [total]])
    c_right = np.concatenate([[0.0], M, [total]])
    start = np.minimum.accumulate(e - c_right)
    d_minus = float(np.max((e[1:] - c_left[1:]) - start[:-1]))
    return min(1.0, max(d_plus, d_minus))


def circular_discrepancy(m: SpectralMeasure) -> float:
    """Sup over arcs of the circle, wrapping arcs included."""
    u, w = _atoms(m)
    M = np.cumsum(w)
    Mprev = M - w
    d_plus = float(np.max(M - u) - np.min(Mprev - u))
    d_minus = float(np.max(u - Mprev) - np.min(u - M))
    return min(1.0, max(d_plus, d_minus))


def discrepancy(m: SpectralMeasure) -> float:
    """Interval discrepancy on ``[0, 1)``; see :func:`circular_discrepancy`."""
    return interval_discrepancy(m)


# -- covariance -----------------------------------------------------------------


def _phase(points: LatticePointSet | np.ndarray, x: np.ndarray):
    pts = points.points if isinstance(points, LatticePointSet) else np.asarray(points)
    pts = pts.astype(float)
    x = np.asarray(x, dtype=float)
    return pts, 2.0 * np.pi * (x[..., None, :] * pts).sum(-1)


def covariance(points, x) -> np.ndarray:
    """``r(x) = mean_xi cos(2 pi <xi, x>)`` at one or many points ``x[..., 2]``."""
    _, ph = _phase(points, x)
    return np.cos(ph).mean(-1)


def covariance_derivatives(points, x):
    """``(r, grad r, Hessian r)`` vectorized over leading axes of ``x``."""
    pts, ph = _phase(points, x)
    c = np.cos(ph)
    s = np.sin(ph)
    N = pts.shape[0]
    r = c.mean(-1)
    grad = -2.0 * np.pi * (s @ pts) / N
    outer = pts[:, :, None] * pts[:, None, :]
    hess = -4.0 * np.pi**2 * np.tensordot(c, outer, axes=([-1], [0])) / N
    return r, grad, hess


def covariance_jet(points, x) -> CovarianceJet:
    x = np.asarray(x, dtype=float)
    if x.shape != (2,):
        raise ArgumentError(f"x must be a 2-vector, got shape {x.shape}")
    r, g, H = covariance_derivatives(points, x)
    H = 0.5 * (H + H.T)
    return CovarianceJet(float(r), np.asarray(g, dtype=float), np.asarray(H, dtype=float))


# -- closed form for n = p^m q -------------------------------------------------------


def lobe_factor(m: int, theta: float) -> float:
    """``sin((m+1) theta) / ((m+1) sin theta)``, written as a cosine average.

    The average ``sum_j cos((m - 2j) theta) / (m+1)`` equals the quotient
    and has no removable singularity at ``theta = 0``.
    """
    if m < 0:
        raise ArgumentError(f"m must be nonnegative, got {m}")
    j = np.arange(m + 1)
    return float(np.mean(np.cos((m - 2 * j) * theta)))


def desym_fourier(m: int, phi_p: float, phi_q: float | None = None) -> float:
    """Fourth Fourier coefficient of the measure of ``p**m * q``.

    ``phi_p`` and ``phi_q`` are arguments of the Gaussian primes in radians;
    ``phi_q=None`` drops the ``q`` factor (the measure of ``p**m``).
    """
    value = lobe_factor(m, 4.0 * phi_p)
    if phi_q is not None:
        value *= lobe_factor(1, 4.0 * phi_q)
    return value
