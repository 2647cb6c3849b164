"""Integers with prescribed lattice-point geometry built from chosen primes.

Split primes are indexed by the argument of their canonical Gaussian prime
``a + bi`` with ``a > b > 0``, which lies in ``(0, pi/4)``.  Angles outside
that chart are reached through conjugation and unit rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import expi

from .errors import ArgumentError, NotFoundError
from .gaussint import GaussianInt, SplitFactorization, factorize, lattice_points, primes_up_to
from .spectral import desym_fourier, fourier_coefficient, lobe_factor, spectral_measure

BISECT_TOL = 1e-12
CONSISTENCY_TOL = 1e-10


@dataclass(frozen=True)
class SectorQuery:
    lo: float
    hi: float
    p_min: int = 2
    p_max: int = 10**5

    def __post_init__(self):
        if not 0 <= self.lo < self.hi <= math.pi / 4 + 1e-15:
            raise ArgumentError(f"need 0 <= lo < hi <= pi/4, got ({self.lo}, {self.hi})")
        if self.p_min > self.p_max:
            raise ArgumentError("empty prime range")


@dataclass(frozen=True, eq=False)
class ConstructionResult:
    n: int
    factorization: SplitFactorization
    achieved: float
    target: float
    witnesses: tuple | None = None
    params: dict = field(default_factory=dict)


@lru_cache(maxsize=8)
def split_primes_upto(p_max: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(p, a, b)`` with ``p = a*a + b*b`` prime and ``a > b > 0``, ascending in ``p``.

    Enumerating ``(a, b)`` pairs and filtering by a sieve gives every split
    prime exactly once, since each has a unique such representation.
    """
    if p_max < 5:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    is_p = np.zeros(p_max + 1, dtype=bool)
    is_p[primes_up_to(p_max)] = True
    amax = math.isqrt(p_max)
    a, b = np.meshgrid(np.arange(1, amax + 1), np.arange(1, amax + 1), indexing="ij")
    a, b = a.ravel(), b.ravel()
    keep = b < a
    a, b = a[keep], b[keep]
    p = a * a + b * b
    keep = p <= p_max
    a, b, p = a[keep], b[keep], p[keep]
    keep = is_p[p]
    a, b, p = a[keep], b[keep], p[keep]
    order = np.argsort(p, kind="stable")
    return p[order].astype(np.int64), a[order].astype(np.int64), b[order].astype(np.int64)


def primes_in_sector(q: SectorQuery) -> list[tuple[int, GaussianInt, float]]:
    """Split primes in ``[p_min, p_max]`` whose canonical angle lies in ``[lo, hi]``."""
    p, a, b = split_primes_upto(q.p_max)
    ang = np.arctan2(b, a)
    keep = (p >= q.p_min) & (ang >= q.lo) & (ang <= q.hi)
    return [
        (int(pp), GaussianInt(int(aa), int(bb)), float(t))
        for pp, aa, bb, t in zip(p[keep], a[keep], b[keep], ang[keep])
    ]


def sector_main_term(lo: float, hi: float, X: float) -> float:
    """Expected number of split primes ``<= X`` with canonical angle in ``[lo, hi]``.

    Split primes carry half of ``li(X)`` and spread uniformly over the chart
    of width ``pi/4``, which gives density ``(2/pi) li(X)`` per radian.
    """
    li = expi(math.log(X)) - expi(math.log(2.0))
    return 2.0 / math.pi * (hi - lo) * li


# -- n = p^m q -----------------------------------------------------------------


def _bisect(f, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    """Root of ``f`` on ``[lo, hi]`` given ``f(lo) >= 0 >= f(hi)``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lobe_root(m: int, w: float) -> float:
    """``theta`` in the first lobe ``[0, pi/(m+1)]`` with ``lobe_factor(m, theta) = w``."""
    if not 0.0 <= w <= 1.0:
        raise ArgumentError(f"target w must lie in [0, 1], got {w}")
    if m < 1:
        raise ArgumentError(f"m must be at least 1, got {m}")
    edge = math.pi / (m + 1)
    if w >= 1.0:
        return 0.0
    if w <= 0.0:
        return edge
    return _bisect(lambda t: lobe_factor(m, t) - w, 0.0, edge)


def _lobe_window(m: int, w: float, tol: float, scale: float) -> tuple[float, float]:
    """Interval of ``theta`` on the first lobe where ``|scale * D_m(theta) - w| <= tol``."""
    edge = math.pi / (m + 1)

    def g(t):
        return scale * lobe_factor(m, t)

    upper, lower = w + tol, w - tol
    if g(0.0) < lower:
        return edge, 0.0
    a = 0.0 if g(0.0) <= upper else _bisect(lambda t: g(t) - upper, 0.0, edge)
    b = edge if g(edge) >= lower else _bisect(lambda t: g(t) - lower, 0.0, edge)
    return a, b


def build_pmq(w: float, tol: float = 0.05, m: int = 1, p_max: int = 10**5) -> ConstructionResult:
    """``n = p**m * q`` whose fourth Fourier coefficient is within ``tol`` of ``w``."""
    if not tol > 0:
        raise ArgumentError(f"tol must be positive, got {tol}")
    theta_star = lobe_root(m, w)
    p, a, b = split_primes_upto(p_max)
    four_phi = 4.0 * np.arctan2(b, a)
    cq = np.cos(four_phi)
    if len(p) < 2:
        raise NotFoundError(f"fewer than two split primes below {p_max}")
    q_hits = np.flatnonzero(cq >= 1.0 - tol / 2.0)
    # the window below uses the actual q factor, so any q keeps the result exact
    iq = int(q_hits[0]) if len(q_hits) else int(np.argmax(cq))
    scale = float(cq[iq])
    lo, hi = _lobe_window(m, w, tol, scale)
    inside = (four_phi >= lo) & (four_phi <= hi) & (np.arange(len(p)) != iq)
    hits = np.flatnonzero(inside)
    if len(hits) == 0:
        errs = np.array([abs(scale * lobe_factor(m, t) - w) for t in four_phi])
        errs[iq] = np.inf
        j = int(np.argmin(errs))
        best = (int(p[j]), int(p[iq]), float(scale * lobe_factor(m, four_phi[j])))
        raise NotFoundError(
            f"no p <= {p_max} with 4*phi_p in [{lo:.6g}, {hi:.6g}] for w={w}, m={m}", best=best
        )
    ip = int(hits[0])
    P, Q = int(p[ip]), int(p[iq])
    n = P**m * Q
    fac = factorize(n)
    achieved = fourier_coefficient(spectral_measure(lattice_points(n, fac)), 4)
    phi_p = math.atan2(int(b[ip]), int(a[ip]))
    phi_q = math.atan2(int(b[iq]), int(a[iq]))
    closed = desym_fourier(m, phi_p, phi_q)
    if abs(closed - achieved) > CONSISTENCY_TOL:
        raise AssertionError(f"closed form {closed} disagrees with direct value {achieved}")
    params = {"p": P, "q": Q, "m": m, "theta_star": theta_star, "window": (lo, hi), "tol": tol}
    return ConstructionResult(n, fac, achieved, float(w), None, params)


# -- three primes --------------------------------------------------------------------

_TARGETS = np.array([0.0, 2.0 * math.pi / 3.0, -2.0 * math.pi / 3.0])


def _spread(d: np.ndarray) -> np.ndarray:
    """Smallest max-deviation of angles ``d[..., 3]`` from a common rotation."""
    s = np.sort(np.mod(d, 2 * np.pi), axis=-1)
    gaps = np.concatenate([np.diff(s, axis=-1), (s[..., :1] + 2 * np.pi) - s[..., -1:]], axis=-1)
    return (2 * np.pi - gaps.max(-1)) / 2.0


def best_equilateral_triple(n: int, angle_tol: float):
    """Ordered triple of lattice points within ``angle_tol`` of an equilateral
    configuration that minimizes the nonzero ``|xi1 + xi2 + xi3|**2``.

    Returns ``(norm_sq, triple)`` or ``None`` when no triple qualifies.
    """
    pts = lattice_points(n).points
    N = len(pts)
    ang = np.arctan2(pts[:, 1], pts[:, 0])
    i, j, k = np.meshgrid(np.arange(N), np.arange(N), np.arange(N), indexing="ij")
    i, j, k = i.ravel(), j.ravel(), k.ravel()
    d = np.stack([ang[i], ang[j], ang[k]], axis=1) - _TARGETS
    ok = _spread(d) <= angle_tol
    s = pts[i] + pts[j] + pts[k]
    norm = s[:, 0] * s[:, 0] + s[:, 1] * s[:, 1]
    ok &= norm > 0
    if not ok.any():
        return None
    cand = np.flatnonzero(ok)
    t = int(cand[np.argmin(norm[cand])])
    triple = tuple((int(pts[x, 0]), int(pts[x, 1])) for x in (i[t], j[t], k[t]))
    return int(norm[t]), triple


def build_three_prime(angle_tol: float = 0.02, p_max: int = 10**5) -> ConstructionResult:
    """``n = p1 * p2 * p3`` with three lattice points nearly summing to zero.

    Differences of lattice-point angles of ``p1 p2 p3`` are ``2 phi`` plus
    multiples of ``pi/2``, so an equilateral triple needs two primes with
    ``phi`` near ``pi/12`` or ``pi/6``; the third prime only rotates the
    configuration.
    """
    if not angle_tol > 0:
        raise ArgumentError(f"angle_tol must be positive, got {angle_tol}")
    p, a, b = split_primes_upto(p_max)
    if len(p) < 3:
        raise NotFoundError(f"fewer than three split primes below {p_max}")
    phi = np.arctan2(b, a)
    if angle_tol >= math.pi:
        pool = np.arange(len(p))
    else:
        near = np.minimum(np.abs(phi - math.pi / 12), np.abs(phi - math.pi / 6))
        pool = np.flatnonzero(near <= angle_tol / 2.0)
    for jj in range(len(pool)):
        for ii in range(jj):
            i1, i3 = int(pool[ii]), int(pool[jj])
            i2 = next(x for x in range(len(p)) if x not in (i1, i3))
            n = int(p[i1]) * int(p[i2]) * int(p[i3])
            found = best_equilateral_triple(n, angle_tol)
            if found is None:
                continue
            norm, triple = found
            achieved = math.sqrt(norm / n)
            fac = factorize(n)
            params = {
                "primes": (int(p[i1]), int(p[i2]), int(p[i3])),
                "angle_tol": angle_tol,
                "norm_sq": norm,
            }
            return ConstructionResult(n, fac, achieved, 0.0, (triple,), params)
    raise NotFoundError(f"no qualifying prime pair below {p_max} for angle_tol={angle_tol}")
