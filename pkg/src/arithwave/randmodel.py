"""Random model for lattice points: sign matrices applied to uniform angles.

A point's angle is ``phi_i = sum_k eta_ik * theta_k`` where the rows
``eta_i`` run over sign vectors and the ``theta_k`` are i.i.d. uniform on
``[0, 1)``.  The module counts short sums of such points, estimates the
small-ball probability of a sum of independent uniform unit vectors, and
measures how often a random sign matrix has full row rank.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import mpmath
import numpy as np
from scipy.spatial import cKDTree

from . import _parallel, rng
from .errors import ArgumentError, ResourceError

DEFAULT_BUDGET = 10**7
GUARD = 1e-12
MC_BATCH = 100_000
EXACT_RANK_LIMIT = 2**24
_RANK_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class SignMatrix:
    omega: int
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows)
        if rows.ndim != 2 or rows.shape[1] != self.omega:
            raise ArgumentError(f"rows must have shape (N, {self.omega})")
        if not np.all(np.abs(rows) == 1):
            raise ArgumentError("sign matrix entries must be +1 or -1")
        if len(np.unique(rows, axis=0)) != len(rows):
            raise ArgumentError("sign vectors must be distinct")

    @property
    def N(self) -> int:
        return len(self.rows)


@dataclass(frozen=True, eq=False)
class AngleSample:
    theta: np.ndarray
    seed: int


class MonteCarloEstimate(NamedTuple):
    estimate: float
    stderr: float
    trials: int


@dataclass(frozen=True)
class RankResult:
    """Probability that an ``l x omega`` sign matrix has rank ``l``.

    ``exact`` is set when every matrix was enumerated.
    """

    l: int
    omega: int
    probability: float
    stderr: float
    trials: int
    exact: Fraction | None = None


def all_signs(omega: int) -> SignMatrix:
    """All ``2**omega`` sign vectors, lexicographic with ``+1`` first."""
    if omega < 1:
        raise ArgumentError(f"omega must be at least 1, got {omega}")
    rows = np.array(list(itertools.product((1, -1), repeat=omega)), dtype=np.int8)
    return SignMatrix(omega, rows)


def sample_angles(omega: int, seed: int, trial: int = 0) -> AngleSample:
    """``omega`` uniform angles from the stream ``(seed, trial)``."""
    theta = rng.stream(seed, trial).random(omega)
    return AngleSample(theta, int(seed))


def model_points(eta: SignMatrix, sample: AngleSample) -> np.ndarray:
    """Unit vectors ``(cos 2 pi phi_i, sin 2 pi phi_i)``, shape ``(N, 2)``."""
    theta = np.asarray(sample.theta, dtype=float)
    if theta.shape != (eta.omega,):
        raise ArgumentError(f"expected {eta.omega} angles, got shape {theta.shape}")
    phi = np.mod(eta.rows.astype(float) @ theta, 1.0)
    return np.stack([np.cos(2 * np.pi * phi), np.sin(2 * np.pi * phi)], axis=1)


# -- small sums ---------------------------------------------------------------


def _tuple_sums(points: np.ndarray, h: int) -> np.ndarray:
    """Sums of all ordered ``h``-tuples; row ``i`` is tuple ``unravel(i)``."""
    out = np.zeros((1, 2))
    for _ in range(h):
        out = (out[:, None, :] + points[None, :, :]).reshape(-1, 2)
    return out


def _exact_le(points: np.ndarray, idx: tuple[int, ...], alpha_sq: Fraction) -> bool:
    sx = sum(Fraction(float(points[i, 0])) for i in idx)
    sy = sum(Fraction(float(points[i, 1])) for i in idx)
    return sx * sx + sy * sy <= alpha_sq


def _arc_counts(head: np.ndarray, tail_sorted: np.ndarray, alpha: float):
    """Per head sum ``a``, the sorted-tail index range of unit ``b`` with ``|a+b| <= alpha``.

    Returns ``(lo, hi)`` into the doubled angle array ``tail_sorted + [0, 1)``.
    """
    N = len(tail_sorted) // 2
    rho = np.hypot(head[:, 0], head[:, 1])
    psi = np.mod(np.arctan2(head[:, 1], head[:, 0]) / (2 * np.pi) + 0.5, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cmin = (rho * rho + 1.0 - alpha * alpha) / (2.0 * rho)
    half = np.where(cmin <= -1.0, 0.5, np.arccos(np.clip(cmin, -1.0, 1.0)) / (2 * np.pi))
    none = cmin > 1.0
    full = half >= 0.5
    zero = rho == 0.0
    start = psi - half
    start = np.where(start < 0, start + 1.0, start)
    lo = np.searchsorted(tail_sorted, start, side="left")
    hi = np.searchsorted(tail_sorted, start + 2 * half, side="right")
    hi = np.where(none, lo, hi)
    lo = np.where(full, 0, lo)
    hi = np.where(full, N, hi)
    zero_in = alpha >= 1.0
    lo = np.where(zero, 0, lo)
    hi = np.where(zero, N if zero_in else 0, hi)
    return lo, hi


def count_small_sums(points, l: int, alpha: float, budget: int = DEFAULT_BUDGET) -> int:
    """Ordered ``l``-tuples of unit vectors with ``|sum| <= alpha``, zero sums included."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ArgumentError("points must have shape (N, 2)")
    if l < 2:
        raise ArgumentError(f"l must be at least 2, got {l}")
    if not alpha > 0:
        raise ArgumentError(f"alpha must be positive, got {alpha}")
    N = len(pts)
    h1, h2 = (l + 1) // 2, l // 2
    if N**h1 > budget:
        raise ResourceError(f"N^ceil(l/2) = {N**h1} exceeds the work budget {budget}")
    if alpha >= l:
        return N**l
    alpha_sq = Fraction(alpha) ** 2
    head = _tuple_sums(pts, h1)
    if h2 == 1:
        return _count_arc(pts, head, h1, alpha, alpha_sq)
    return _count_tree(pts, head, _tuple_sums(pts, h2), h1, h2, alpha, alpha_sq)


def _count_arc(pts, head, h1, alpha, alpha_sq) -> int:
    N = len(pts)
    ang = np.mod(np.arctan2(pts[:, 1], pts[:, 0]) / (2 * np.pi), 1.0)
    order = np.argsort(ang, kind="stable")
    doubled = np.concatenate([ang[order], ang[order] + 1.0])
    lo_in, hi_in = _arc_counts(head, doubled, max(alpha - GUARD, 0.0))
    lo_out, hi_out = _arc_counts(head, doubled, alpha + GUARD)
    total = int(np.sum(hi_in - lo_in))
    # boundary band: tuples inside the outer arc but outside the inner one
    for a in np.flatnonzero((hi_out - lo_out) != (hi_in - lo_in)):
        inner = {j % N for j in range(lo_in[a], hi_in[a])}
        hidx = np.unravel_index(a, (N,) * h1)
        for j in range(lo_out[a], hi_out[a]):
            if j % N in inner:
                continue
            b = int(order[j % N])
            if _exact_le(pts, tuple(int(i) for i in hidx) + (b,), alpha_sq):
                total += 1
    return total


def _count_tree(pts, head, tail, h1, h2, alpha, alpha_sq) -> int:
    N = len(pts)
    ta = cKDTree(head)
    tb = cKDTree(-tail)
    lo_r, hi_r = max(alpha - GUARD, 0.0), alpha + GUARD
    inner, outer = ta.count_neighbors(tb, np.array([lo_r, hi_r]))
    total = int(inner)
    if outer == inner:
        return total
    near = ta.query_ball_tree(tb, lo_r)
    for a, bs in enumerate(ta.query_ball_tree(tb, hi_r)):
        if len(bs) == len(near[a]):
            continue
        inside = set(near[a])
        for b in bs:
            if b in inside:
                continue
            idx = tuple(int(i) for i in np.unravel_index(a, (N,) * h1))
            idx += tuple(int(i) for i in np.unravel_index(b, (N,) * h2))
            if _exact_le(pts, idx, alpha_sq):
                total += 1
    return total


def small_ball_closed_form(alpha: float) -> float:
    """``P(|e(t1) + e(t2)| <= alpha)`` for independent uniform ``t1, t2``."""
    if alpha >= 2:
        return 1.0
    return 2.0 / math.pi * math.asin(alpha / 2.0)


def _batch_hits(args) -> int:
    l, alpha, seed, batch, size = args
    theta = rng.stream(seed, batch).random((size, l))
    x = np.cos(2 * np.pi * theta).sum(1)
    y = np.sin(2 * np.pi * theta).sum(1)
    r2 = x * x + y * y
    a2 = alpha * alpha
    hits = int(np.count_nonzero(r2 <= a2 - GUARD))
    band = np.flatnonzero(np.abs(r2 - a2) < GUARD)
    if len(band):
        with mpmath.workdps(50):
            for i in band:
                sx = mpmath.fsum(mpmath.cospi(2 * mpmath.mpf(float(t))) for t in theta[i])
                sy = mpmath.fsum(mpmath.sinpi(2 * mpmath.mpf(float(t))) for t in theta[i])
                if sx * sx + sy * sy <= mpmath.mpf(alpha) ** 2:
                    hits += 1
    return hits


def small_sum_probability(
    l: int, alpha: float, trials: int, seed: int = 0, workers: int | None = None
) -> MonteCarloEstimate:
    """Monte-Carlo ``P(|e(t_1) + ... + e(t_l)| <= alpha)`` with binomial error."""
    if l < 2:
        raise ArgumentError(f"l must be at least 2, got {l}")
    if trials < 1:
        raise ArgumentError("trials must be positive")
    jobs = [
        (l, float(alpha), seed, b, min(MC_BATCH, trials - start))
        for b, start in enumerate(range(0, trials, MC_BATCH))
    ]
    hits = sum(_parallel.ordered_map(_batch_hits, jobs, workers))
    p = hits / trials
    return MonteCarloEstimate(p, math.sqrt(p * (1 - p) / trials), trials)


# -- rank of sign matrices -------------------------------------------------------


def integer_rank(A) -> int:
    """Rank of an integer matrix by fraction-free elimination with pivoting."""
    M = [[int(v) for v in row] for row in np.asarray(A)]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    rank = 0
    prev = 1
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if M[r][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        for r in range(rank + 1, rows):
            for k in range(c + 1, cols):
                M[r][k] = (M[r][k] * M[rank][c] - M[rank][k] * M[r][c]) // prev
            M[r][c] = 0
        prev = M[rank][c]
        rank += 1
        if rank == rows:
            break
    return rank


def full_rank_mask(A: np.ndarray) -> np.ndarray:
    """Batched test ``rank(A[b]) == l`` for ``A`` of shape ``(B, l, omega)``.

    The Gram matrix ``A A^T`` is positive semidefinite, so ``A`` has full
    row rank iff every leading principal minor of the Gram matrix is
    positive.  Fraction-free elimination without pivoting produces exactly
    those minors as pivots.
    """
    G = np.einsum("bik,bjk->bij", A.astype(np.int64), A.astype(np.int64))
    l = G.shape[1]
    ok = np.ones(G.shape[0], dtype=bool)
    prev = np.ones(G.shape[0], dtype=np.int64)
    for k in range(l):
        piv = G[:, k, k].copy()
        ok &= piv > 0
        piv_safe = np.where(piv > 0, piv, 1)
        if k + 1 < l:
            sub = G[:, k + 1 :, k + 1 :]
            upd = sub * piv_safe[:, None, None] - G[:, k + 1 :, k, None] * G[:, None, k, k + 1 :]
            G[:, k + 1 :, k + 1 :] = upd // prev[:, None, None]
        prev = piv_safe
    return ok


def _enumerate_rank(l: int, omega: int) -> Fraction:
    # column sign flips preserve rank, so the first row may be fixed to +1
    free = (l - 1) * omega
    total = 1 << free
    good = 0
    bits = np.arange(free, dtype=np.uint64)
    for a, b in _parallel.chunk_bounds(total, _RANK_CHUNK):
        codes = np.arange(a, b, dtype=np.uint64)
        signs = 1 - 2 * ((codes[:, None] >> bits) & np.uint64(1)).astype(np.int8)
        rest = signs.reshape(-1, l - 1, omega)
        first = np.ones((len(codes), 1, omega), dtype=np.int8)
        good += int(np.count_nonzero(full_rank_mask(np.concatenate([first, rest], axis=1))))
    return Fraction(good, total)


def _rank_batch(args) -> int:
    l, omega, seed, batch, size = args
    g = rng.stream(seed, batch)
    A = 1 - 2 * g.integers(0, 2, size=(size, l, omega), dtype=np.int8)
    return int(np.count_nonzero(full_rank_mask(A)))


def rank_statistics(
    l: int, omega: int, trials: int = 10**5, seed: int = 0, workers: int | None = None
) -> RankResult:
    """Probability that a uniform ``l x omega`` sign matrix has rank ``l``."""
    if l < 1 or omega < 1:
        raise ArgumentError("l and omega must be positive")
    if l > omega:
        return RankResult(l, omega, 0.0, 0.0, 0, Fraction(0))
    if l == 1:
        return RankResult(l, omega, 1.0, 0.0, 0, Fraction(1))
    if 2 ** (l * omega) <= EXACT_RANK_LIMIT:
        p = _enumerate_rank(l, omega)
        return RankResult(l, omega, float(p), 0.0, 2 ** (l * omega), p)
    if trials < 1:
        raise ArgumentError("trials must be positive")
    jobs = [
        (l, omega, seed, b, min(MC_BATCH, trials - start))
        for b, start in enumerate(range(0, trials, MC_BATCH))
    ]
    good = sum(_parallel.ordered_map(_rank_batch, jobs, workers))
    p = good / trials
    return RankResult(l, omega, p, math.sqrt(p * (1 - p) / trials), trials)
