import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from arithwave.errors import ArgumentError, ResourceError
from arithwave.randmodel import (
    AngleSample,
    SignMatrix,
    all_signs,
    count_small_sums,
    full_rank_mask,
    integer_rank,
    model_points,
    rank_statistics,
    sample_angles,
    small_ball_closed_form,
    small_sum_probability,
)

import oracles


def test_sign_matrix_validation():
    assert all_signs(3).N == 8
    with pytest.raises(ArgumentError):
        SignMatrix(2, np.array([[1, 1], [1, 1]]))
    with pytest.raises(ArgumentError):
        SignMatrix(2, np.array([[1, 0]]))


def test_model_point_examples():
    eta = all_signs(3)
    pts = model_points(eta, AngleSample(np.zeros(3), 0))
    assert np.allclose(pts, [1, 0])
    eta1 = SignMatrix(1, np.array([[1], [-1]]))
    t = 0.137
    pts = model_points(eta1, AngleSample(np.array([t]), 0))
    assert np.allclose(pts[0], [math.cos(2 * math.pi * t), math.sin(2 * math.pi * t)])
    assert np.allclose(pts[1], [math.cos(2 * math.pi * t), -math.sin(2 * math.pi * t)])
    pts = model_points(all_signs(2), sample_angles(2, seed=11))
    assert np.max(np.abs(np.hypot(pts[:, 0], pts[:, 1]) - 1)) < 1e-14
    with pytest.raises(ArgumentError):
        model_points(all_signs(2), AngleSample(np.zeros(3), 0))


def test_sample_angles_reproducible():
    a = sample_angles(6, 5, 3).theta
    assert np.array_equal(a, sample_angles(6, 5, 3).theta)
    assert not np.array_equal(a, sample_angles(6, 5, 4).theta)
    assert np.all((a >= 0) & (a < 1))


def test_count_small_sums_trivial_cases():
    pts = model_points(all_signs(3), sample_angles(3, 0))
    assert count_small_sums(pts, 2, 2.0) == 64
    assert count_small_sums(pts, 3, 3.5) == 512
    zeros = model_points(all_signs(3), AngleSample(np.zeros(3), 0))
    assert count_small_sums(zeros, 2, 0.5) == 0
    with pytest.raises(ResourceError):
        count_small_sums(model_points(all_signs(8), sample_angles(8, 0)), 4, 0.1, budget=1000)


@given(st.integers(1, 5), st.integers(2, 4), st.floats(0.01, 1.5), st.integers(0, 2**32))
@settings(max_examples=60, deadline=None)
def test_count_small_sums_matches_brute_force(omega, l, alpha, seed):
    N = 2**omega
    if N**l > 10**6:
        l = 2
    pts = model_points(all_signs(omega), sample_angles(omega, seed))
    assert count_small_sums(pts, l, alpha) == oracles.brute_small_sums(pts, l, alpha)


def test_count_small_sums_counts_exact_zero_sums():
    # conjugate pairs give exact zero sums for l = 2 only through antipodes
    pts = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    assert count_small_sums(pts, 2, 1e-9) == 4
    assert count_small_sums(pts, 4, 1e-9) == oracles.brute_small_sums(pts, 4, 1e-9)


def test_small_sum_probability_examples():
    full = small_sum_probability(2, 2.0, 1000, seed=0)
    assert full.estimate == 1 and full.stderr == 0
    est = small_sum_probability(2, 0.1, 200_000, seed=1)
    exact = 2 / math.pi * math.asin(0.05)
    # 0.1 / pi = 0.031831 is the small-angle value; the arcsine adds 4e-4 relative
    assert exact == pytest.approx(0.1 / math.pi, rel=5e-4)
    assert abs(est.estimate - exact) <= 4 * est.stderr
    assert small_ball_closed_form(0.1) == pytest.approx(oracles.two_step_small_ball(0.1), abs=1e-15)


def test_three_step_density_oracle_is_a_density():
    total = integrate.quad(oracles.three_step_density, 0, 3, points=[1.0], limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-6)


def test_three_step_small_ball_scales_quadratically():
    small = small_sum_probability(3, 0.05, 400_000, seed=2)
    large = small_sum_probability(3, 0.1, 400_000, seed=3)
    for est, a in ((small, 0.05), (large, 0.1)):
        assert abs(est.estimate - oracles.three_step_small_ball(a)) <= 4 * est.stderr
    exact_ratio = oracles.three_step_small_ball(0.1) / oracles.three_step_small_ball(0.05)
    assert 3.9 < exact_ratio < 4.05


def test_small_sum_probability_independent_of_workers():
    a = small_sum_probability(3, 0.4, 250_000, seed=9, workers=1)
    b = small_sum_probability(3, 0.4, 250_000, seed=9, workers=3)
    assert a == b


def test_integer_rank():
    assert integer_rank([[1, 1], [1, 1]]) == 1
    assert integer_rank([[1, 1], [1, -1]]) == 2
    assert integer_rank([[1, 1, 1], [1, -1, 1], [1, 1, -1]]) == 3
    assert integer_rank([[0, 0], [0, 0]]) == 0


@given(st.integers(1, 4), st.integers(1, 7), st.integers(0, 2**32))
@settings(max_examples=50, deadline=None)
def test_full_rank_mask_matches_integer_rank(l, omega, seed):
    g = np.random.default_rng(seed)
    A = 1 - 2 * g.integers(0, 2, size=(30, l, omega))
    mask = full_rank_mask(A)
    assert mask.tolist() == [integer_rank(a) == l for a in A]


def test_rank_examples():
    assert rank_statistics(1, 5).exact == 1
    assert rank_statistics(2, 2).exact == Fraction(1, 2)
    assert rank_statistics(2, 10).exact == 1 - Fraction(1, 2**9)
    assert rank_statistics(3, 2).probability == 0


def test_rank_monotone_in_omega():
    for l in (2, 3, 4):
        probs = [rank_statistics(l, w, trials=20_000, seed=1).probability for w in range(l, 25, 3)]
        assert all(b >= a - 0.01 for a, b in zip(probs, probs[1:]))
        assert probs[-1] > 0.99
