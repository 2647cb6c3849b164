"""Gaussian trigonometric fields: arithmetic and Berry random waves.

A field is stored as a finite sum
``f(x) = sum_k b_k cos(2 pi <k, x>) + c_k sin(2 pi <k, x>)``
over frequency vectors ``k``.  Rescaling ``x -> a x`` multiplies every
frequency by ``a``, so rescaled fields stay in the same representation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .. import rng
from ..errors import ArgumentError
from ..gaussint import LatticePointSet, lattice_points

DEFAULT_BRW_DIRECTIONS = 256


@dataclass(frozen=True, eq=False)
class FieldSpec:
    """A real trigonometric field, see the module docstring.

    For ``kind == "ARW"`` the frequencies are one representative of each pair
    ``{xi, -xi}`` of lattice points (times ``scale``); the complex
    coefficients ``a_xi`` are recoverable through :meth:`arw_coefficients`.
    """

    kind: str
    freqs: np.ndarray = field(repr=False)
    cos_coef: np.ndarray = field(repr=False)
    sin_coef: np.ndarray = field(repr=False)
    n: int | None = None
    M: int | None = None
    seed: int | None = None
    scale: float = 1.0

    def __post_init__(self):
        k = len(self.freqs)
        if self.freqs.shape != (k, 2) or self.cos_coef.shape != (k,) or self.sin_coef.shape != (k,):
            raise ArgumentError("freqs must be (K, 2) and coefficients (K,)")

    # -- evaluation ------------------------------------------------------------

    def _phases(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 2.0 * np.pi * (x @ self.freqs.T)

    def __call__(self, x) -> np.ndarray:
        ph = self._phases(x)
        return np.cos(ph) @ self.cos_coef + np.sin(ph) @ self.sin_coef

    def gradient(self, x) -> np.ndarray:
        ph = self._phases(x)
        d = -np.sin(ph) * self.cos_coef + np.cos(ph) * self.sin_coef
        return 2.0 * np.pi * (d @ self.freqs)

    def hessian(self, x) -> np.ndarray:
        ph = self._phases(x)
        d = -(np.cos(ph) * self.cos_coef + np.sin(ph) * self.sin_coef)
        outer = self.freqs[:, :, None] * self.freqs[:, None, :]
        return 4.0 * np.pi**2 * np.tensordot(d, outer, axes=([-1], [0]))

    def grid(self, xs, ys, order: int = 0):
        """Values (``order=0``), plus gradient and Hessian (``order=2``) on ``xs x ys``.

        Uses the separable form ``Re(E_x diag(b - i c) E_y^T)`` with
        ``E_x[i, k] = exp(2 pi i k_1 x_i)``.
        """
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        Ex = np.exp(2j * np.pi * np.outer(xs, self.freqs[:, 0]))
        Ey = np.exp(2j * np.pi * np.outer(ys, self.freqs[:, 1]))
        coef = self.cos_coef - 1j * self.sin_coef
        values = np.real((Ex * coef) @ Ey.T)
        if order == 0:
            return values
        tp = 2j * np.pi
        fx, fy = self.freqs[:, 0], self.freqs[:, 1]

        def part(wx, wy):
            return np.real((Ex * (coef * wx * wy)) @ Ey.T)

        one = np.ones_like(fx)
        gx = part(tp * fx, one)
        gy = part(one, tp * fy)
        hxx = part((tp * fx) ** 2, one)
        hxy = part(tp * fx, tp * fy)
        hyy = part(one, (tp * fy) ** 2)
        return values, np.stack([gx, gy], -1), np.stack([hxx, hxy, hyy], -1)

    def rescaled(self, a: float) -> FieldSpec:
        """The field ``x -> f(a x)``."""
        return replace(self, freqs=self.freqs * a, scale=self.scale * a)

    def scaled(self, c: float) -> FieldSpec:
        """The field ``c * f``."""
        return replace(self, cos_coef=c * self.cos_coef, sin_coef=c * self.sin_coef)

    def perturbed(self, other: FieldSpec, eps: float) -> FieldSpec:
        """The field ``f + eps * other``."""
        return FieldSpec(
            "sum",
            np.concatenate([self.freqs, other.freqs]),
            np.concatenate([self.cos_coef, eps * other.cos_coef]),
            np.concatenate([self.sin_coef, eps * other.sin_coef]),
        )

    def arw_coefficients(self) -> dict[tuple[int, int], complex]:
        """``{xi: a_xi}`` with ``a_{-xi} = conj(a_xi)``, for unscaled ARW fields."""
        if self.kind != "ARW" or self.scale != 1.0:
            raise ArgumentError("coefficients are only defined for unscaled ARW fields")
        N = 2 * len(self.freqs)
        out = {}
        for (x, y), b, c in zip(self.freqs, self.cos_coef, self.sin_coef):
            a = complex(b, -c) * math.sqrt(N) / 2.0
            out[(int(round(x)), int(round(y)))] = a
            out[(-int(round(x)), -int(round(y)))] = a.conjugate()
        return out


def half_points(points: LatticePointSet) -> np.ndarray:
    """One representative of each ``{xi, -xi}`` pair, in angle order."""
    pts = points.points
    half = pts[(pts[:, 1] > 0) | ((pts[:, 1] == 0) & (pts[:, 0] > 0))]
    if 2 * len(half) != len(pts):
        raise AssertionError("lattice points are not closed under negation")
    return half


def _generator(seed: int, trial: int, tag: int) -> np.random.Generator:
    return rng.stream(seed, trial) if tag == 0 else rng.substream(seed, trial, tag)


def sample_arw(n: int, seed: int, trial: int = 0, points: LatticePointSet | None = None,
               tag: int = 0) -> FieldSpec:
    """Arithmetic random wave with i.i.d. standard complex Gaussian ``a_xi``.

    Each pair contributes ``a e(<xi,x>) + conj(a) e(-<xi,x>) =
    2 (u cos - v sin)`` with ``a = u + iv`` and ``u, v ~ N(0, 1/2)``; the
    ``1/sqrt(N)`` factor gives unit pointwise variance.  A nonzero ``tag``
    selects a stream family independent of the default one.
    """
    pts = points if points is not None else lattice_points(n)
    if len(pts) == 0:
        raise ArgumentError(f"n={n} is not a sum of two squares")
    half = half_points(pts)
    g = _generator(seed, trial, tag)
    uv = g.standard_normal((len(half), 2)) * math.sqrt(0.5)
    amp = 2.0 / math.sqrt(len(pts))
    return FieldSpec("ARW", half.astype(float), amp * uv[:, 0], -amp * uv[:, 1], n=n, seed=seed)


def brw_directions(M: int) -> np.ndarray:
    j = np.arange(M)
    return np.stack([np.cos(2 * np.pi * j / M), np.sin(2 * np.pi * j / M)], axis=1)


def sample_brw(M: int = DEFAULT_BRW_DIRECTIONS, seed: int = 0, trial: int = 0, tag: int = 0) -> FieldSpec:
    """Berry random wave approximated by ``M`` equispaced unit frequencies.

    ``f = M**-0.5 * sum_j (b_j cos + c_j sin)`` has unit variance and
    covariance ``mean_j cos(2 pi <e_j, x - y>)``, which tends to
    ``J_0(2 pi |x - y|)``.
    """
    if M < 16:
        raise ArgumentError(f"M must be at least 16, got {M}")
    g = _generator(seed, trial, tag)
    bc = g.standard_normal((M, 2)) / math.sqrt(M)
    return FieldSpec("BRW", brw_directions(M), bc[:, 0], bc[:, 1], M=M, seed=seed)


def plane_field(freq, amplitude: float = 1.0, phase: float = 0.0) -> FieldSpec:
    """``amplitude * sin(2 pi <freq, x> + phase)`` as a one-term field."""
    k = np.asarray(freq, dtype=float).reshape(1, 2)
    return FieldSpec(
        "custom", k, np.array([amplitude * math.sin(phase)]), np.array([amplitude * math.cos(phase)])
    )


@dataclass(frozen=True)
class AffineField:
    """``c0 + c1 * x1 + c2 * x2``, with exact derivatives."""

    c0: float
    c1: float = 0.0
    c2: float = 0.0

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.c0 + self.c1 * x[..., 0] + self.c2 * x[..., 1]

    def gradient(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.array([self.c1, self.c2]), x.shape).copy()

    def hessian(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1] + (2, 2))

    def grid(self, xs, ys, order: int = 0):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        values = self.c0 + self.c1 * xs[:, None] + self.c2 * ys[None, :]
        if order == 0:
            return values
        grads = np.empty(values.shape + (2,))
        grads[..., 0] = self.c1
        grads[..., 1] = self.c2
        return values, grads, np.zeros(values.shape + (3,))


def torus_values(field: FieldSpec, K: int) -> np.ndarray:
    """Exact values on the periodic grid ``(i/K, j/K)`` via one inverse FFT.

    Requires integer frequencies (an unscaled ARW).
    """
    f = np.rint(field.freqs).astype(np.int64)
    if not np.array_equal(f, field.freqs):
        raise ArgumentError("torus evaluation needs integer frequencies")
    spec = np.zeros((K, K), dtype=complex)
    coef = 0.5 * (field.cos_coef - 1j * field.sin_coef)
    np.add.at(spec, (f[:, 0] % K, f[:, 1] % K), coef)
    np.add.at(spec, (-f[:, 0] % K, -f[:, 1] % K), np.conj(coef))
    return np.real(np.fft.ifft2(spec)) * (K * K)
