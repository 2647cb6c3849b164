"""Spectral correlations and quasi-correlations of lattice points.

For lattice points ``xi`` on the circle ``|xi|**2 == n`` we count ordered
``l``-tuples whose vector sum is zero (``S(l, n)``) or nonzero of length at
most ``K`` (``Q(l, n, K)``).  Both counts split the tuple into a head of
``ceil(l/2)`` points and a tail of ``floor(l/2)`` points, aggregate the
distinct partial sums with multiplicities, and join the two tables on the
exact integer sum vector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from . import _parallel
from .errors import ArgumentError, ResourceError
from .gaussint import LatticePointSet, enumerate_S_prime, lattice_points

DEFAULT_BUDGET = 10**8
DEFAULT_WITNESS_CAP = 10
MAX_L = 8
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class CorrelationReport:
    n: int
    l: int
    mode: Literal["exact-zero", "quasi"]
    count: int
    min_nonzero_norm_sq: int
    K: float | None = None
    witnesses: tuple[tuple[tuple[int, int], ...], ...] = ()


@dataclass(frozen=True)
class ExponentTable:
    epsilon: float
    values: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class HalfSums:
    """Distinct sums of ``h``-tuples of points.

    ``keys`` is the sorted encoding ``x * width + y`` of each distinct sum,
    ``counts`` its multiplicity over ordered tuples and ``reps`` one
    representative tuple (as point indices) per key.
    """

    h: int
    width: int
    keys: np.ndarray
    counts: np.ndarray
    reps: np.ndarray

    def decode(self) -> np.ndarray:
        return decode_keys(self.keys, self.width)


# -- encoding -----------------------------------------------------------------


def key_width(n: int, l: int) -> int:
    """Row width so that ``x * W + y`` is injective for all sums of ``l`` points."""
    bound = l * (math.isqrt(n) + 1)
    return 2 * bound + 3


def encode(xy: np.ndarray, width: int) -> np.ndarray:
    xy = np.asarray(xy, dtype=np.int64)
    return xy[..., 0] * width + xy[..., 1]


def decode_keys(keys: np.ndarray, width: int) -> np.ndarray:
    keys = np.asarray(keys, dtype=np.int64)
    half = width // 2
    x = np.floor_divide(keys + half, width)
    y = keys - x * width
    return np.stack([x, y], axis=-1)


def threshold_sq(K: float) -> int:
    """Largest integer ``m`` with ``m <= K**2``, after widening ``K`` by one ulp."""
    if not K > 0 or not math.isfinite(K):
        raise ArgumentError(f"K must be a positive finite real, got {K!r}")
    widened = Fraction(math.nextafter(float(K), math.inf))
    return math.floor(widened * widened)


def check_budget(N: int, l: int, budget: int = DEFAULT_BUDGET) -> None:
    if not 2 <= l <= MAX_L:
        raise ArgumentError(f"l must lie in [2, {MAX_L}], got {l}")
    work = N ** ((l + 1) // 2)
    if work > budget:
        raise ResourceError(
            f"N^ceil(l/2) = {N}^{(l + 1) // 2} = {work} exceeds the work budget {budget}"
        )


def half_sums(points: LatticePointSet, h: int, width: int | None = None) -> HalfSums:
    """Aggregate all ordered ``h``-tuple sums of ``points``."""
    if width is None:
        width = key_width(points.n, 2 * h)
    base = encode(points.points, width)
    N = len(base)
    if h == 0:
        return HalfSums(0, width, np.zeros(1, np.int64), np.ones(1, np.int64), np.zeros((1, 0), np.int64))
    keys, first = np.unique(base, return_index=True)
    counts = np.bincount(np.searchsorted(keys, base), minlength=len(keys)).astype(np.int64)
    reps = first.reshape(-1, 1).astype(np.int64)
    for _ in range(h - 1):
        prod_keys = (keys[:, None] + base[None, :]).ravel()
        prod_counts = np.repeat(counts, N)
        new_keys, first, inverse = np.unique(prod_keys, return_index=True, return_inverse=True)
        new_counts = np.zeros(len(new_keys), dtype=np.int64)
        np.add.at(new_counts, inverse, prod_counts)
        parent, last = np.divmod(first, N)
        reps = np.concatenate([reps[parent], last.reshape(-1, 1)], axis=1)
        keys, counts = new_keys, new_counts
    return HalfSums(h, width, keys, counts, reps)


def _weighted_total(a: np.ndarray, b: np.ndarray, exact_big: bool) -> int:
    if not exact_big:
        return int(np.dot(a.astype(np.int64), b.astype(np.int64)))
    return sum(int(x) * int(y) for x, y in zip(a.tolist(), b.tolist()))


class _Join:
    """Head and tail tables of one ``(points, l)`` query, shared by the counters."""

    def __init__(self, points: LatticePointSet, l: int, budget: int):
        N = len(points)
        if N == 0:
            raise ArgumentError(f"n={points.n} has no lattice points")
        check_budget(N, l, budget)
        self.points = points
        self.l = l
        self.N = N
        self.width = key_width(points.n, l)
        self.head = half_sums(points, (l + 1) // 2, self.width)
        self.tail = half_sums(points, l // 2, self.width)
        self.exact_big = N**l >= _INT64_SAFE
        self.radius = l * (math.isqrt(points.n) + 1)

    def zero_count(self) -> int:
        A, B = self.head, self.tail
        pos = np.searchsorted(A.keys, -B.keys)
        pos = np.minimum(pos, len(A.keys) - 1)
        hit = A.keys[pos] == -B.keys
        return _weighted_total(A.counts[pos[hit]], B.counts[hit], self.exact_big)

    def ball_count(self, KK: int) -> int:
        """Ordered tuples with ``|sum|**2 <= KK``, zero sums included."""
        A, B = self.head, self.tail
        prefix = np.concatenate([[0], np.cumsum(A.counts)])
        total = 0
        for lo, hi in self._row_ranges(KK):
            total += _weighted_total(prefix[hi] - prefix[lo], B.counts, self.exact_big)
        return total

    def _row_ranges(self, KK: int):
        """Per row offset ``dx``, index ranges into the head table of the disc."""
        A, B = self.head, self.tail
        W = self.width
        tb = -B.keys
        cy = decode_keys(tb, W)[:, 1]
        r = min(math.isqrt(KK), 2 * self.radius)
        for dx in range(-r, r + 1):
            dy = min(math.isqrt(KK - dx * dx), 2 * self.radius)
            # keep the y-window inside one encoded row
            down = np.maximum(-dy, -self.radius - cy)
            up = np.minimum(dy, self.radius - cy)
            centre = tb + dx * W
            lo = np.searchsorted(A.keys, centre + down, side="left")
            hi = np.searchsorted(A.keys, centre + up, side="right")
            yield lo, hi

    def min_gap(self) -> int:
        A, B = self.head, self.tail
        W = self.width
        keys = A.keys
        m = len(keys)
        tb = -B.keys
        xb = decode_keys(tb, W)[:, 0]
        best = None
        dx = 0
        while best is None or dx * dx < best:
            for sx in (dx, -dx) if dx else (0,):
                centre = tb + sx * W
                pos = np.searchsorted(keys, centre)
                for off in (-1, 0, 1):
                    idx = pos + off
                    ok = (idx >= 0) & (idx < m)
                    cand = keys[np.clip(idx, 0, m - 1)]
                    xy = decode_keys(cand, W)
                    ok &= xy[:, 0] == xb + sx
                    d = cand - centre
                    norm = d * d + sx * sx
                    ok &= norm > 0
                    if ok.any():
                        v = int(norm[ok].min())
                        if best is None or v < best:
                            best = v
            dx += 1
        return best

    def witnesses(self, KK: int, cap: int) -> tuple:
        """Up to ``cap`` tuples with ``0 < |sum|**2 <= KK``, in a fixed order."""
        if cap <= 0:
            return ()
        A, B = self.head, self.tail
        pts = self.points.points
        out = []
        for lo, hi in self._row_ranges(KK):
            for j in np.flatnonzero(hi > lo):
                for i in range(lo[j], hi[j]):
                    if A.keys[i] + B.keys[j] == 0:
                        continue
                    idx = list(A.reps[i]) + list(B.reps[j])
                    out.append(tuple((int(pts[k, 0]), int(pts[k, 1])) for k in idx))
                    if len(out) >= cap:
                        return tuple(out)
        return tuple(out)


def spectral_correlations(
    points: LatticePointSet, l: int, budget: int = DEFAULT_BUDGET
) -> CorrelationReport:
    """Exact ``#S(l, n)``, the ordered ``l``-tuples summing to zero."""
    join = _Join(points, l, budget)
    count = 0 if l % 2 else join.zero_count()
    return CorrelationReport(points.n, l, "exact-zero", count, join.min_gap())


def quasi_correlations(
    points: LatticePointSet,
    l: int,
    K: float,
    budget: int = DEFAULT_BUDGET,
    witness_cap: int = DEFAULT_WITNESS_CAP,
) -> CorrelationReport:
    """Exact ``#Q(l, n, K)``: ordered tuples with ``0 < |sum| <= K``."""
    KK = threshold_sq(K)
    join = _Join(points, l, budget)
    zero = 0 if l % 2 else join.zero_count()
    count = join.ball_count(KK) - zero
    wit = join.witnesses(KK, witness_cap) if count else ()
    return CorrelationReport(points.n, l, "quasi", count, join.min_gap(), float(K), wit)


def min_gap(points: LatticePointSet, l: int, budget: int = DEFAULT_BUDGET) -> int:
    """Smallest nonzero ``|xi_1 + ... + xi_l|**2``."""
    return _Join(points, l, budget).min_gap()


def c_exponent(l: int, epsilon: float = 0.0) -> float:
    """Exponent ``c(l, eps)`` of the quasi-correlation threshold."""
    if l < 2:
        raise ArgumentError(f"l must be at least 2, got {l}")
    if epsilon < 0:
        raise ArgumentError(f"epsilon must be nonnegative, got {epsilon}")
    if l == 2:
        return math.log(2) + epsilon
    if l == 3:
        return 1.5 * math.log(2) + epsilon
    return l * math.log(2) / 2 + c_exponent(l // 2, epsilon) + epsilon


def exponent_table(epsilon: float, l_max: int = MAX_L) -> ExponentTable:
    return ExponentTable(epsilon, {l: c_exponent(l, epsilon) for l in range(2, l_max + 1)})


# -- census -------------------------------------------------------------------


@dataclass(frozen=True)
class ThresholdRule:
    """How a census picks ``K`` for each ``n``.

    ``kind`` is ``"explicit"`` (``K = value``), ``"theorem1"``
    (``K = sqrt(n) / log(n)**c(l, value)``) or ``"fraction"``
    (``K = value * sqrt(n)``).
    """

    kind: Literal["explicit", "theorem1", "fraction"]
    value: float

    def __post_init__(self):
        if self.kind not in ("explicit", "theorem1", "fraction"):
            raise ArgumentError(f"unknown threshold rule {self.kind!r}")
        if self.kind == "theorem1" and self.value < 0:
            raise ArgumentError("theorem1 epsilon must be nonnegative")
        if self.kind != "theorem1" and not self.value > 0:
            raise ArgumentError(f"{self.kind} threshold must be positive")

    def K(self, n: int, l: int) -> float:
        if self.kind == "explicit":
            return float(self.value)
        if self.kind == "fraction":
            return float(self.value) * math.sqrt(n)
        return math.sqrt(n) / math.log(n) ** c_exponent(l, self.value)


@dataclass(frozen=True)
class CensusRow:
    n: int
    N: int
    l: int
    K: float
    min_gap_sq: int | None
    count: int | None
    status: str = "ok"

    @property
    def nonempty(self) -> bool | None:
        return None if self.count is None else self.count > 0


def census_row(n: int, l: int, rule: ThresholdRule, budget: int = DEFAULT_BUDGET) -> CensusRow:
    pts = lattice_points(n)
    K = rule.K(n, l)
    try:
        rep = quasi_correlations(pts, l, K, budget=budget, witness_cap=0)
    except ResourceError:
        return CensusRow(n, len(pts), l, K, None, None, "budget")
    return CensusRow(n, len(pts), l, K, rep.min_nonzero_norm_sq, rep.count)


def census(
    X: int,
    l: int,
    rule: ThresholdRule,
    budget: int = DEFAULT_BUDGET,
    include_one: bool = False,
    workers: int | None = None,
) -> list[CensusRow]:
    """One row per ``n`` in S' with ``n <= X``; over-budget rows are flagged."""
    if not 2 <= l <= MAX_L:
        raise ArgumentError(f"l must lie in [2, {MAX_L}], got {l}")
    ns = [n for n in enumerate_S_prime(X) if include_one or n > 1]
    if rule.kind == "theorem1":
        # log(1) = 0 makes the threshold undefined
        ns = [n for n in ns if n > 1]
    return _parallel.ordered_map(lambda n: census_row(n, l, rule, budget), ns, workers)


def nonempty_fraction(rows: list[CensusRow]) -> float:
    done = [r for r in rows if r.count is not None]
    if not done:
        raise ArgumentError("no completed census rows")
    return sum(r.count > 0 for r in done) / len(done)
