"""Independent brute-force and closed-form references used by the tests.

Nothing here imports the package under test.
"""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy import integrate, special


def r2_table(limit: int) -> np.ndarray:
    """``table[m]`` = number of integer ``(x, y)`` with ``x*x + y*y == m`` for ``m <= limit``."""
    r = math.isqrt(limit)
    x = np.arange(-r, r + 1, dtype=np.int64)
    table = np.zeros(limit + 1, dtype=np.int64)
    for xi in x:
        m = xi * xi + x * x
        np.add.at(table, m[m <= limit], 1)
    return table


def brute_points(n: int) -> set[tuple[int, int]]:
    r = math.isqrt(n)
    return {(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1) if x * x + y * y == n}


def trial_division(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def sieve_S_prime(X: int) -> list[int]:
    """Integers ``<= X`` all of whose prime factors are ``1 mod 4`` (1 included)."""
    return [n for n in range(1, X + 1) if all(p % 4 == 1 for p in trial_division(n))]


def tuple_norms(points, l: int) -> np.ndarray:
    """``|sum|^2`` of every ordered ``l``-tuple of integer points (``N**l`` values)."""
    pts = np.asarray(sorted(points), dtype=np.int64).reshape(-1, 2)
    acc = np.zeros((1, 2), dtype=np.int64)
    for _ in range(l):
        acc = (acc[:, None, :] + pts[None, :, :]).reshape(-1, 2)
    return acc[:, 0] * acc[:, 0] + acc[:, 1] * acc[:, 1]


def brute_correlations(points, l: int, K: float | None = None):
    """``(zero count, quasi count at K, min nonzero norm)`` by full enumeration.

    ``K`` is compared exactly: ``m <= K**2`` as rationals.
    """
    norms = tuple_norms(points, l)
    zero = int(np.count_nonzero(norms == 0))
    nz = norms[norms > 0]
    gap = int(nz.min()) if len(nz) else None
    quasi = None
    if K is not None:
        KK = Fraction(K) ** 2
        vals, counts = np.unique(nz, return_counts=True)
        quasi = int(sum(int(c) for v, c in zip(vals, counts) if Fraction(int(v)) <= KK))
    return zero, quasi, gap


def pairing_only_zero_sums(points) -> bool:
    """True when every zero-sum ordered 4-tuple splits into two opposite pairs."""
    pts = np.asarray(sorted(points), dtype=np.int64).reshape(-1, 2)
    N = len(pts)
    idx = np.indices((N,) * 4).reshape(4, -1).T
    s = pts[idx].sum(axis=1)
    z = idx[(s[:, 0] == 0) & (s[:, 1] == 0)]
    P = pts[z]

    def opp(i, j):
        return np.all(P[:, i] == -P[:, j], axis=1)

    paired = (opp(0, 1) & opp(2, 3)) | (opp(0, 2) & opp(1, 3)) | (opp(0, 3) & opp(1, 2))
    return bool(paired.all())


def brute_small_sums(points: np.ndarray, l: int, alpha: float) -> int:
    pts = np.asarray(points, dtype=float)
    acc = np.zeros((1, 2))
    for _ in range(l):
        acc = (acc[:, None, :] + pts[None, :, :]).reshape(-1, 2)
    return int(np.count_nonzero(np.hypot(acc[:, 0], acc[:, 1]) <= alpha))


def two_step_small_ball(alpha: float) -> float:
    """``P(|e(t1) + e(t2)| <= alpha)`` since ``|e(t1)+e(t2)| = 2|cos(pi (t1 - t2))|``."""
    return 2.0 / math.pi * math.asin(min(alpha, 2.0) / 2.0)


def three_step_density(x: float) -> float:
    """Density of ``|e(t1) + e(t2) + e(t3)|`` on ``[0, 3]`` (hypergeometric closed form)."""
    z = x * x * (9.0 - x * x) ** 2 / (3.0 + x * x) ** 3
    return 2.0 * math.sqrt(3.0) / math.pi * x / (3.0 + x * x) * float(special.hyp2f1(1 / 3, 2 / 3, 1.0, z))


def three_step_small_ball(alpha: float) -> float:
    if alpha > 1:
        raise ValueError("closed form used below the singularity at 1 only")
    return integrate.quad(three_step_density, 0.0, alpha, epsabs=0, epsrel=1e-12)[0]


def central_gradient(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros(2)
    for i in range(2):
        e = np.zeros(2)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def lens_area_numeric(d: float, s: float) -> float:
    """Overlap of two discs of radius ``s`` at distance ``d`` by 1D quadrature."""
    if d >= 2 * s:
        return 0.0
    half = d / 2.0
    return 4.0 * integrate.quad(lambda x: math.sqrt(max(s * s - x * x, 0.0)), half, s, epsrel=1e-13)[0]


def plane_chord(radius: float, offset: float) -> float:
    """Length of the chord of a disc at distance ``offset`` from its centre."""
    return 2.0 * math.sqrt(max(radius * radius - offset * offset, 0.0))


def covariance_jet_brute(points, x):
    """``(r, grad r, Hessian r)`` of ``mean cos(2 pi <xi, x>)`` by explicit loops."""
    r = 0.0
    g = np.zeros(2)
    H = np.zeros((2, 2))
    for px, py in points:
        ph = 2 * math.pi * (px * x[0] + py * x[1])
        r += math.cos(ph)
        g -= 2 * math.pi * math.sin(ph) * np.array([px, py])
        H -= 4 * math.pi**2 * math.cos(ph) * np.outer([px, py], [px, py])
    N = len(points)
    return r / N, g / N, H / N


def l2_density(points, x, energy):
    """Two-point Kac-Rice density from the covariance jet, term by term."""
    r, g, H = covariance_jet_brute(points, x)
    X = -2.0 / (energy * (1 - r * r)) * np.outer(g, g)
    Y = -2.0 / energy * (H + r / (1 - r * r) * np.outer(g, g))
    Y2 = Y @ Y
    tr = np.trace
    terms = [
        r**2,
        tr(X),
        tr(Y2) / 4,
        3 * r**4 / 4,
        -tr(X @ Y2) / 8,
        -tr(X @ X) / 16,
        tr(Y2 @ Y2) / 128,
        tr(Y2) ** 2 / 256,
        -tr(X) * tr(Y2) / 16,
        r**2 * tr(X) / 2,
        r**2 * tr(Y2) / 8,
    ]
    return sum(terms) / 8


def variance_integral_dblquad(points, s, energy):
    """``(E/2) * integral of L2(u) * lens(|u|) du`` with nested adaptive quadrature."""

    def lens(d):
        return 2 * s * s * math.acos(d / (2 * s)) - 0.5 * d * math.sqrt(max(4 * s * s - d * d, 0.0))

    def integrand(phi, rho):
        u = (rho * math.cos(phi), rho * math.sin(phi))
        return l2_density(points, u, energy) * lens(rho) * rho

    val = integrate.dblquad(integrand, 1e-7, 2 * s, 0.0, 2 * math.pi, epsabs=1e-11, epsrel=1e-9)[0]
    return 0.5 * energy * val
