"""Exact Gaussian-integer arithmetic and lattice points on circles.

Everything here works on Python integers, so there is no silent overflow;
instead every entry point checks its inputs against :data:`MAX_INT`, the
configured integer width (signed 64-bit by default).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, RangeError

#: Largest admissible value of ``n`` (and of any norm ``re**2 + im**2``).
MAX_INT = 2**63 - 1

TRIAL_DIVISION_LIMIT = 10**6
_RHO_SEED = 1
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _check_range(n: int, what: str = "n") -> None:
    if n > MAX_INT:
        raise RangeError(f"{what}={n} exceeds the integer width bound {MAX_INT}")


@dataclass(frozen=True)
class GaussianInt:
    """The Gaussian integer ``re + im*i``."""

    re: int
    im: int

    def __post_init__(self):
        _check_range(self.re * self.re + self.im * self.im, "norm")

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def conjugate(self) -> GaussianInt:
        return GaussianInt(self.re, -self.im)

    def times_i(self) -> GaussianInt:
        return GaussianInt(-self.im, self.re)

    def __neg__(self) -> GaussianInt:
        return GaussianInt(-self.re, -self.im)

    def __add__(self, other: GaussianInt) -> GaussianInt:
        return GaussianInt(self.re + other.re, self.im + other.im)

    def __mul__(self, other: GaussianInt) -> GaussianInt:
        return GaussianInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __pow__(self, k: int) -> GaussianInt:
        out = GaussianInt(1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def angle(self) -> float:
        """Argument in radians, in ``(-pi, pi]``."""
        return math.atan2(self.im, self.re)

    def as_tuple(self) -> tuple[int, int]:
        return (self.re, self.im)


@dataclass(frozen=True)
class SplitFactorization:
    """Factorization ``n = 2**alpha2 * prod p**alpha * prod q**beta``.

    ``split`` holds ``(p, alpha, P)`` for primes ``p = 1 mod 4`` with the
    canonical Gaussian prime ``P`` (``re > im > 0``); ``inert`` holds
    ``(q, beta)`` for primes ``q = 3 mod 4``.
    """

    n: int
    alpha2: int
    split: tuple[tuple[int, int, GaussianInt], ...]
    inert: tuple[tuple[int, int], ...]

    def expand(self) -> int:
        out = 2**self.alpha2
        for p, a, _ in self.split:
            out *= p**a
        for q, b in self.inert:
            out *= q**b
        return out

    @property
    def in_S(self) -> bool:
        return all(b % 2 == 0 for _, b in self.inert)

    @property
    def in_S_prime(self) -> bool:
        return self.alpha2 == 0 and not self.inert

    @property
    def omega(self) -> int:
        """Number of distinct split primes."""
        return len(self.split)


@dataclass(frozen=True, eq=False)
class LatticePointSet:
    """All ``(x, y)`` with ``x**2 + y**2 == n``, sorted by angle.

    ``angles[i]`` is the angle of ``points[i]`` as a fraction of a full turn,
    in ``[0, 1)``.
    """

    n: int
    points: np.ndarray = field(repr=False)
    angles: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def N(self) -> int:
        return len(self.points)

    def as_set(self) -> set[tuple[int, int]]:
        return {(int(x), int(y)) for x, y in self.points}


# -- primes -----------------------------------------------------------------


@lru_cache(maxsize=4)
def primes_up_to(limit: int) -> np.ndarray:
    """Primes ``<= limit`` by the sieve of Eratosthenes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for ``n < 3.3e24``."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """A nontrivial factor of the composite odd ``n``."""
    c = _RHO_SEED
    while True:
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        c += 1


def _factor_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _factor_large(d, out)
    _factor_large(n // d, out)


def prime_factors(n: int) -> dict[int, int]:
    """``{p: exponent}`` for ``n >= 1``; trial division then Pollard-Brent."""
    out: dict[int, int] = {}
    rem = n
    for p in primes_up_to(TRIAL_DIVISION_LIMIT):
        p = int(p)
        if p * p > rem:
            break
        if rem % p == 0:
            e = 0
            while rem % p == 0:
                rem //= p
                e += 1
            out[p] = e
    if rem > 1:
        if rem < TRIAL_DIVISION_LIMIT**2 or is_prime(rem):
            out[rem] = out.get(rem, 0) + 1
        else:
            _factor_large(rem, out)
    return dict(sorted(out.items()))


# -- Gaussian primes ----------------------------------------------------------


@lru_cache(maxsize=65536)
def split_prime(p: int) -> GaussianInt:
    """The unique ``(a, b)`` with ``a*a + b*b == p`` and ``a > b > 0``."""
    if p % 4 != 1 or not is_prime(p):
        raise ArgumentError(f"{p} is not a prime congruent to 1 mod 4")
    _check_range(p, "p")
    # square root of -1 from a quadratic non-residue
    c = 2
    while pow(c, (p - 1) // 2, p) != p - 1:
        c += 1
    t = pow(c, (p - 1) // 4, p)
    # Euclidean descent: the first two remainders below sqrt(p) give a, b
    a, b = p, t
    root = math.isqrt(p)
    while b > root:
        a, b = b, a % b
    x = b
    y = math.isqrt(p - x * x)
    if x * x + y * y != p:
        raise AssertionError(f"descent failed for p={p}")
    return GaussianInt(max(x, y), min(x, y))


def factorize(n: int) -> SplitFactorization:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise RangeError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    _check_range(n)
    alpha2 = 0
    split = []
    inert = []
    for p, e in prime_factors(n).items():
        if p == 2:
            alpha2 = e
        elif p % 4 == 1:
            split.append((p, e, split_prime(p)))
        else:
            inert.append((p, e))
    return SplitFactorization(n, alpha2, tuple(split), tuple(inert))


def r2_count(n: int) -> int:
    """Number of representations of ``n`` as an ordered sum of two squares."""
    f = factorize(n)
    if not f.in_S:
        return 0
    return 4 * math.prod(a + 1 for _, a, _ in f.split)


def lattice_points(n: int, factorization: SplitFactorization | None = None) -> LatticePointSet:
    """All lattice points on the circle of radius ``sqrt(n)``.

    Each point is ``u * (1+i)**alpha2 * prod q**(beta/2) *
    prod P**g * conj(P)**(alpha-g)`` for a unit ``u`` and ``0 <= g <= alpha``.
    """
    f = factorization if factorization is not None else factorize(n)
    if not f.in_S:
        empty = np.zeros((0, 2), dtype=np.int64)
        return LatticePointSet(f.n, empty, np.zeros(0))
    common = GaussianInt(1, 1) ** f.alpha2
    for q, b in f.inert:
        common = common * GaussianInt(q ** (b // 2), 0)
    choices = []
    for _, a, P in f.split:
        Pbar = P.conjugate()
        choices.append([P**g * Pbar ** (a - g) for g in range(a + 1)])
    pts = []
    for combo in itertools.product(*choices):
        z = common
        for w in combo:
            z = z * w
        for _ in range(4):
            pts.append((z.re, z.im))
            z = z.times_i()
    arr = np.array(pts, dtype=np.int64)
    ang = np.mod(np.arctan2(arr[:, 1], arr[:, 0]) / (2 * np.pi), 1.0)
    # atan2 of (x, -0) style inputs cannot occur; guard the 1.0 rounding edge
    ang[ang >= 1.0] = 0.0
    order = np.lexsort((arr[:, 1], arr[:, 0], ang))
    return LatticePointSet(f.n, arr[order], ang[order])


def enumerate_S_prime(X: int) -> list[int]:
    """All ``n <= X`` whose prime factors are all ``1 mod 4``, ascending.

    ``n = 1`` satisfies the condition vacuously and is included; callers that
    need a nontrivial circle should drop it (see :func:`is_vacuous`).
    """
    if X < 1:
        raise RangeError(f"X must be positive, got {X}")
    _check_range(X, "X")
    ok = np.ones(X + 1, dtype=bool)
    ok[0] = False
    for p in primes_up_to(X):
        if p % 4 != 1:
            ok[p::p] = False
    return [int(v) for v in np.flatnonzero(ok)]


def is_vacuous(n: int) -> bool:
    """True for ``n = 1``, the member of S' with no prime factors."""
    return n == 1
