"""Monte-Carlo experiments on nodal lengths of random waves.

Every trial draws its field from its own counter-based stream, so results
are identical for any number of workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from .. import rng
from .._parallel import chunk_bounds, default_workers, ordered_map
from ..errors import ArgumentError, DegenerateInputError
from ..gaussint import LatticePointSet, lattice_points
from ..kernels import contour_lengths
from ..spectral import discrepancy, fourier_coefficient, spectral_measure
from .contour import ball_grid, ball_length, torus_lengths
from .fields import DEFAULT_BRW_DIRECTIONS, sample_arw, sample_brw
from .kacrice import expected_length, variance_integral

STEPS_PER_WAVELENGTH = 20
BOOTSTRAP_TAG = 7
BRW_TAG = 1
PERTURB_TAG = 2
DEFAULT_BOOTSTRAP = 200
STABILITY_CONSTANT = 100.0


def _points(n: int, points: LatticePointSet | None = None) -> LatticePointSet:
    pts = points if points is not None else lattice_points(n)
    if len(pts) == 0:
        raise ArgumentError(f"n={n} is not a sum of two squares")
    return pts


def _map_trials(fn: Callable[[int], object], trials: int, workers: int | None) -> list:
    """``[fn(i) for i in range(trials)]`` spread over workers in fixed chunks."""
    workers = default_workers() if workers is None else max(1, int(workers))
    chunks = chunk_bounds(trials, max(1, math.ceil(trials / (4 * workers))))
    parts = ordered_map(lambda b: [fn(i) for i in range(*b)], chunks, workers)
    return [x for part in parts for x in part]


def _bootstrap_indices(seed: int, trials: int, rounds: int) -> np.ndarray:
    g = rng.substream(seed, 0, BOOTSTRAP_TAG)
    return g.integers(0, trials, size=(rounds, trials))


def _variance_stderr(x: np.ndarray) -> float:
    """Large-sample standard error of the unbiased sample variance."""
    T = len(x)
    d = x - x.mean()
    var = float(d @ d) / (T - 1)
    m4 = float(np.mean(d**4))
    return math.sqrt(max(m4 - var * var * (T - 3) / (T - 1), 0.0) / T)


def default_step(n: int, s: float) -> float:
    """Grid step: a twentieth of the wavelength ``1/sqrt(n)``, at most ``s/20``."""
    return min(s / 20.0, 1.0 / (STEPS_PER_WAVELENGTH * math.sqrt(n)))


# -- mean length ---------------------------------------------------------------


@dataclass(frozen=True)
class MeanLengthResult:
    n: int
    s: float
    trials: int
    seed: int
    mean: float
    stderr: float
    expected: float
    grid_step: float

    @property
    def ratio(self) -> float:
        return self.mean / self.expected


def mean_length_experiment(n: int, s: float, trials: int, seed: int = 0, h: float | None = None,
                           workers: int | None = None) -> MeanLengthResult:
    """Sample mean of the nodal length of ARW in ``B(s)`` against the Kac-Rice value."""
    if trials < 2:
        raise ArgumentError("trials must be at least 2")
    pts = _points(n)
    h = default_step(n, s) if h is None else float(h)
    L = np.array(_map_trials(lambda i: ball_length(sample_arw(n, seed, i, pts), s, h), trials, workers))
    return MeanLengthResult(n, s, trials, seed, float(L.mean()), float(L.std(ddof=1) / math.sqrt(trials)),
                            expected_length(pts, s), h)


# -- variance --------------------------------------------------------------------------


@dataclass(frozen=True)
class VarianceResult:
    """Variance of the nodal length in ``B(s)`` by three routes.

    ``formula`` is ``(1 + mu4^2) / 512 * (pi s^2)^2 * E / N^2`` with
    ``E = 4 pi^2 n``; ``formula_literal`` is ``(1 + mu4) / 512 *
    (pi s^2)^2 * n / N^2``.  ``corr_ratio`` is
    ``Cov(L_s, L) / (pi s^2 Var(L))`` for the whole-torus length ``L``,
    and ``corr_ratio_literal`` uses ``(pi s^2)^2`` in the denominator.
    """

    n: int
    N: int
    mu4: float
    s: float
    trials: int
    seed: int
    mc_var: float
    mc_var_stderr: float
    mean_length: float
    formula: float
    formula_literal: float
    kacrice: float
    kacrice_quad_error: float
    kacrice_remainder: float
    torus_var: float
    cov_ball_torus: float
    corr_ratio: float
    corr_ratio_stderr: float
    corr_ratio_literal: float
    grid_step: float
    torus_grid: int

    CSV_FIELDS = (
        "n", "N", "mu4", "s", "trials", "mc_var", "formula", "kacrice",
        "mc_var_stderr", "formula_literal", "kacrice_quad_error", "kacrice_remainder",
        "mean_length", "torus_var", "cov_ball_torus", "corr_ratio", "corr_ratio_stderr",
        "corr_ratio_literal", "grid_step", "torus_grid", "seed",
    )

    def row(self) -> dict:
        return {k: getattr(self, k) for k in self.CSV_FIELDS}


def torus_grid_size(n: int) -> int:
    """Power of two giving at least ten grid steps per wavelength."""
    return 1 << max(4, math.ceil(math.log2(10.0 * math.sqrt(n))))


def variance_experiment(n: int, s: float, trials: int, seed: int = 0, h: float | None = None,
                        K: int | None = None, torus: bool = True, kacrice: bool = True,
                        workers: int | None = None, bootstrap: int = DEFAULT_BOOTSTRAP) -> VarianceResult:
    """Monte-Carlo variance of ``L(f_n, s)`` with the asymptotic and Kac-Rice references.

    With ``torus`` set, each sample also yields the total nodal length on
    the torus, from which the covariance identity is estimated.
    """
    if trials < 100:
        raise ArgumentError(f"trials must be at least 100, got {trials}")
    if not 0 < s < 0.5:
        raise ArgumentError(f"s must lie in (0, 1/2), got {s}")
    pts = _points(n)
    N = len(pts)
    mu4 = fourier_coefficient(spectral_measure(pts), 4)
    h = default_step(n, s) if h is None else float(h)
    K = torus_grid_size(n) if K is None else int(K)

    def one(i):
        f = sample_arw(n, seed, i, pts)
        ball = ball_length(f, s, h)
        total = torus_lengths(f, K)[1] if torus else math.nan
        return ball, total

    out = np.array(_map_trials(one, trials, workers))
    Ls, LT = out[:, 0], out[:, 1]
    area = math.pi * s * s
    E = 4.0 * math.pi**2 * n
    formula = (1.0 + mu4 * mu4) / 512.0 * area * area * E / N**2
    literal = (1.0 + mu4) / 512.0 * area * area * n / N**2

    kr = kr_err = kr_rem = math.nan
    if kacrice:
        fine = variance_integral(pts, s)
        coarse = variance_integral(pts, s, nodes_per_wavelength=32, angular_factor=8.0)
        kr, kr_rem = fine.value, fine.remainder_bound
        kr_err = abs(fine.value - coarse.value)

    tvar = cov = ratio = ratio_se = ratio_lit = math.nan
    if torus:
        tvar = float(LT.var(ddof=1))
        cov = float(np.cov(Ls, LT)[0, 1])
        ratio = cov / (area * tvar)
        ratio_lit = cov / (area * area * tvar)
        idx = _bootstrap_indices(seed, trials, bootstrap)
        boot = []
        for row in idx:
            a, b = Ls[row], LT[row]
            boot.append(np.cov(a, b)[0, 1] / (area * b.var(ddof=1)))
        ratio_se = float(np.std(boot, ddof=1))

    return VarianceResult(
        n=n, N=N, mu4=mu4, s=s, trials=trials, seed=seed,
        mc_var=float(Ls.var(ddof=1)), mc_var_stderr=_variance_stderr(Ls), mean_length=float(Ls.mean()),
        formula=formula, formula_literal=literal,
        kacrice=kr, kacrice_quad_error=kr_err, kacrice_remainder=kr_rem,
        torus_var=tvar, cov_ball_torus=cov, corr_ratio=ratio, corr_ratio_stderr=ratio_se,
        corr_ratio_literal=ratio_lit, grid_step=h, torus_grid=K,
    )


# -- stability of the nodal set ----------------------------------------------------------


class SmoothField(Protocol):
    def __call__(self, x): ...
    def gradient(self, x): ...
    def hessian(self, x): ...
    def grid(self, xs, ys, order: int = 0): ...


@dataclass(frozen=True)
class StabilityResult:
    beta: float
    M: float
    tau: float
    L_h: float
    L_h_plus_theta: float
    rel_change: float
    bound: float
    hypotheses_ok: bool
    bound_satisfied: bool


def _c2_parts(f: SmoothField, P: np.ndarray):
    """``|f|``, ``|grad f|`` and the spectral norm of the Hessian at points ``P``."""
    g = f.gradient(P)
    H = f.hessian(P)
    hxx, hxy, hyy = H[..., 0, 0], 0.5 * (H[..., 0, 1] + H[..., 1, 0]), H[..., 1, 1]
    hn = 0.5 * np.abs(hxx + hyy) + np.hypot(0.5 * (hxx - hyy), hxy)
    return np.abs(f(P)), np.hypot(g[..., 0], g[..., 1]), hn


class _Sum:
    def __init__(self, a: SmoothField, b: SmoothField):
        self.a, self.b = a, b

    def __call__(self, x):
        return self.a(x) + self.b(x)

    def gradient(self, x):
        return self.a.gradient(x) + self.b.gradient(x)

    def hessian(self, x):
        return self.a.hessian(x) + self.b.hessian(x)


def _cell_corners(q: np.ndarray) -> np.ndarray:
    """Corner values of every cell of a ``(..., k+1, k+1)`` node array, shape ``(..., k, k, 4)``."""
    return np.stack([q[..., :-1, :-1], q[..., 1:, :-1], q[..., :-1, 1:], q[..., 1:, 1:]], axis=-1)


def bounded_min(q: Callable[[np.ndarray], np.ndarray], s: float, step: float, rel_tol: float = 1e-3,
                factor: int = 4, max_levels: int = 6, max_cells: int = 200_000) -> float:
    """Lower bound for ``min q`` over ``B(s)`` by Lipschitz branch and bound.

    Each cell's bound is its smallest corner value minus the grid Lipschitz
    estimate times half the cell diagonal; cells that can still beat the
    best node value are subdivided ``factor x factor`` until the gap is
    below ``rel_tol`` of the best value.
    """
    cells = max(1, math.ceil(2.0 * s / step))
    h = 2.0 * s / cells
    x0 = -s + h * np.arange(cells)
    ox, oy = np.meshgrid(x0, x0, indexing="ij")
    centre = np.hypot(ox + 0.5 * h, oy + 0.5 * h)
    keep = centre <= s + h * math.sqrt(0.5)
    origins = np.stack([ox[keep], oy[keep]], axis=1)
    k = 1
    best = math.inf
    bound = -math.inf
    for level in range(max_levels + 1):
        t = h * np.arange(k + 1)
        sub = np.stack(np.meshgrid(t, t, indexing="ij"), axis=-1)
        P = origins[:, None, None, :] + sub[None]
        inside = np.hypot(P[..., 0], P[..., 1]) <= s
        qv = np.asarray(q(P.reshape(-1, 2)), dtype=float).reshape(P.shape[:-1])
        if inside.any():
            best = min(best, float(qv[inside].min()))
        lip = max(float(np.abs(np.diff(qv, axis=1)).max()), float(np.abs(np.diff(qv, axis=2)).max())) / h
        lb = _cell_corners(qv).min(axis=-1) - lip * h * math.sqrt(0.5)
        bound = float(lb.min())
        if best - bound <= rel_tol * abs(best) or level == max_levels:
            break
        cand = lb < best - rel_tol * abs(best)
        idx = np.argwhere(cand)
        if len(idx) * factor * factor > max_cells:
            break
        origins = origins[idx[:, 0]] + h * idx[:, 1:].astype(float)
        h = h / factor
        # drop sub-cells lying wholly outside the disc
        near = np.clip(0.0, origins, origins + factor * h)
        origins = origins[np.hypot(near[:, 0], near[:, 1]) <= s]
        if len(origins) == 0:
            return best
        k = factor
    return min(best, bound)


def bounded_max(q, s, step, **kw) -> float:
    return -bounded_min(lambda P: -np.asarray(q(P)), s, step, **kw)


def stability_check(h: SmoothField, theta: SmoothField, grid_step: float | None = None, s: float = 1.0,
                    C: float = STABILITY_CONSTANT) -> StabilityResult:
    """Compare nodal lengths of ``h`` and ``h + theta`` in ``B(s)`` with the stability bound.

    ``beta`` bounds ``min max(|h|, |grad h|)`` from below, ``M`` the ``C^2``
    norms of ``h`` and ``h + theta`` from above and ``tau`` the ``C^2`` norm
    of ``theta`` from above, all by :func:`bounded_min` on the grid.
    ``bound_satisfied`` checks ``|L(h+theta) - L(h)| / L(h) <= C tau M^3 /
    beta^4``; ``hypotheses_ok`` records whether ``tau <= beta^2 / (16 M)``.
    """
    step = s / 400.0 if grid_step is None else float(grid_step)
    if not 0 < step <= s / 20.0:
        raise ArgumentError(f"grid step must satisfy 0 < step <= s/20, got {step}")
    total = _Sum(h, theta)

    def q_beta(P):
        a, g, _ = _c2_parts(h, P)
        return np.maximum(a, g)

    def q_M(P):
        return np.max(np.stack(_c2_parts(h, P) + _c2_parts(total, P)), axis=0)

    def q_tau(P):
        return np.max(np.stack(_c2_parts(theta, P)), axis=0)

    coarse = min(s / 20.0, 4.0 * step)
    beta = bounded_min(q_beta, s, coarse)
    M = bounded_max(q_M, s, coarse)
    tau = bounded_max(q_tau, s, coarse)

    xs, ys = ball_grid(s, step)
    hv = h.grid(xs, ys)
    tv = theta.grid(xs, ys)
    L_h = contour_lengths(hv, xs[0], ys[0], step, 0.0, 0.0, s)[0]
    if L_h == 0:
        raise DegenerateInputError("h has no zeros in the ball")
    L_ht = contour_lengths(hv + tv, xs[0], ys[0], step, 0.0, 0.0, s)[0]
    rel = abs(L_ht - L_h) / L_h
    bound = C * tau * M**3 / beta**4 if beta > 0 else math.inf
    hyp = beta > 0 and tau <= beta * beta / (16.0 * M)
    return StabilityResult(beta, M, tau, L_h, L_ht, rel, bound, bool(hyp), bool(rel <= bound))


def arw_stability_trial(n: int, seed: int, eps: float = 1e-4, R: float = 2.0,
                        grid_step: float | None = None) -> StabilityResult:
    """``h = F_n`` and ``theta = eps * F_n'`` for two independent ARW samples, on ``B(1)``."""
    pts = _points(n)
    a = R / math.sqrt(n)
    h = sample_arw(n, seed, 0, pts).rescaled(a)
    theta = sample_arw(n, seed, 0, pts, tag=PERTURB_TAG).rescaled(a).scaled(eps)
    step = 1.0 / (40.0 * R) if grid_step is None else grid_step
    return stability_check(h, theta, step)


# -- characteristic functions -------------------------------------------------------------


@dataclass(frozen=True)
class CFRow:
    t: float
    cf_arw: complex
    cf_brw: complex
    abs_diff: float
    stderr: float

    CSV_FIELDS = ("t", "cf_arw_re", "cf_arw_im", "cf_brw_re", "cf_brw_im", "abs_diff", "stderr")

    def row(self) -> dict:
        return {
            "t": self.t, "cf_arw_re": self.cf_arw.real, "cf_arw_im": self.cf_arw.imag,
            "cf_brw_re": self.cf_brw.real, "cf_brw_im": self.cf_brw.imag,
            "abs_diff": self.abs_diff, "stderr": self.stderr,
        }


@dataclass(frozen=True, eq=False)
class CFTable:
    n: int
    R: float
    trials: int
    seed: int
    discrepancy: float
    rows: tuple[CFRow, ...]

    @property
    def max_abs_diff(self) -> float:
        return max(r.abs_diff for r in self.rows)

    @property
    def stderr_at_max(self) -> float:
        return max(self.rows, key=lambda r: r.abs_diff).stderr


def _unit_step(R: float) -> float:
    return 1.0 / (2.0 * STEPS_PER_WAVELENGTH * R)


def arw_unit_lengths(n: int, R: float, trials: int, seed: int = 0, h: float | None = None,
                     workers: int | None = None) -> np.ndarray:
    """Nodal lengths of ``F_n(y) = f_n(R y / sqrt(n))`` in ``B(1)``."""
    pts = _points(n)
    a = R / math.sqrt(n)
    h = _unit_step(R) if h is None else h
    return np.array(_map_trials(lambda i: ball_length(sample_arw(n, seed, i, pts).rescaled(a), 1.0, h),
                                trials, workers))


def brw_unit_lengths(R: float, trials: int, seed: int = 0, M: int = DEFAULT_BRW_DIRECTIONS,
                     h: float | None = None, workers: int | None = None) -> np.ndarray:
    """Nodal lengths of ``F(y) = f(R y)`` in ``B(1)`` for Berry's wave, on streams
    independent of :func:`arw_unit_lengths` with the same seed."""
    h = _unit_step(R) if h is None else h
    return np.array(_map_trials(lambda i: ball_length(sample_brw(M, seed, i, tag=BRW_TAG).rescaled(R), 1.0, h),
                                trials, workers))


def empirical_cf(lengths: np.ndarray, t: float) -> complex:
    if t == 0:
        return 1.0 + 0.0j
    return complex(np.mean(np.exp(1j * t * lengths)))


def cf_table(t_grid: Sequence[float], La: np.ndarray, Lb: np.ndarray, seed: int = 0,
             bootstrap: int = DEFAULT_BOOTSTRAP) -> list[CFRow]:
    """Per-``t`` characteristic functions with bootstrap standard errors of ``abs_diff``."""
    ia = _bootstrap_indices(seed, len(La), bootstrap)
    ib = _bootstrap_indices(seed + 1, len(Lb), bootstrap)
    rows = []
    for t in t_grid:
        t = float(t)
        ca, cb = empirical_cf(La, t), empirical_cf(Lb, t)
        if t == 0:
            rows.append(CFRow(t, ca, cb, 0.0, 0.0))
            continue
        ea, eb = np.exp(1j * t * La), np.exp(1j * t * Lb)
        boot = np.abs(ea[ia].mean(axis=1) - eb[ib].mean(axis=1))
        rows.append(CFRow(t, ca, cb, abs(ca - cb), float(np.std(boot, ddof=1))))
    return rows


def cf_compare(n: int, R: float, t_grid: Sequence[float], trials: int, seed: int = 0,
               M: int = DEFAULT_BRW_DIRECTIONS, h: float | None = None, workers: int | None = None,
               bootstrap: int = DEFAULT_BOOTSTRAP, brw_lengths: np.ndarray | None = None) -> CFTable:
    """Empirical characteristic functions of ``L(F_n)`` and ``L(F_mu)`` on ``B(1)``.

    The two samples are independent.  ``brw_lengths`` may be passed to reuse
    one Berry sample across several ``n``.
    """
    if R < 1:
        raise ArgumentError(f"R must be at least 1, got {R}")
    if trials < 2:
        raise ArgumentError("trials must be at least 2")
    t_grid = [float(t) for t in t_grid]
    if not all(math.isfinite(t) for t in t_grid):
        raise ArgumentError("t values must be finite")
    La = arw_unit_lengths(n, R, trials, seed, h, workers)
    Lb = brw_unit_lengths(R, trials, seed, M, h, workers) if brw_lengths is None else brw_lengths
    disc = discrepancy(spectral_measure(_points(n)))
    return CFTable(n, R, trials, seed, disc, tuple(cf_table(t_grid, La, Lb, seed, bootstrap)))
