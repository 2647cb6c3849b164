import math

import numpy as np
import pytest
import sympy

from arithwave.construct import (
    SectorQuery,
    build_pmq,
    build_three_prime,
    lobe_root,
    primes_in_sector,
    sector_main_term,
    split_primes_upto,
)
from arithwave.correlations import quasi_correlations
from arithwave.errors import ArgumentError, NotFoundError
from arithwave.gaussint import lattice_points
from arithwave.spectral import fourier_coefficient, lobe_factor, spectral_measure


def test_split_primes_match_sympy():
    p, a, b = split_primes_upto(5000)
    expected = [q for q in sympy.primerange(2, 5001) if q % 4 == 1]
    assert p.tolist() == expected
    assert np.all(a * a + b * b == p) and np.all(a > b) and np.all(b > 0)


def test_sector_examples():
    hits = primes_in_sector(SectorQuery(0.0, math.pi / 8, p_max=100))
    seventeen = [h for h in hits if h[0] == 17]
    assert seventeen and seventeen[0][1].as_tuple() == (4, 1)
    assert seventeen[0][2] == pytest.approx(0.2450, abs=1e-4)
    assert [h[0] for h in primes_in_sector(SectorQuery(0.0, math.pi / 4, p_max=30))] == [5, 13, 17, 29]
    assert primes_in_sector(SectorQuery(0.40, 0.41, p_max=50)) == []


def test_sector_query_validation():
    with pytest.raises(ArgumentError):
        SectorQuery(0.5, 0.4)
    with pytest.raises(ArgumentError):
        SectorQuery(0.0, 1.0)


@pytest.mark.parametrize("lo", np.arange(0.0, math.pi / 4 - 0.05, 0.1))
def test_sector_counts_follow_main_term(lo):
    hi = lo + 0.05
    count = len(primes_in_sector(SectorQuery(lo, hi, p_max=10**5)))
    assert 0.5 <= count / sector_main_term(lo, hi, 1e5) <= 2.0


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("w", [0.0, 0.1, 0.5, 0.9, 1.0])
def test_lobe_root(m, w):
    t = lobe_root(m, w)
    assert 0 <= t <= math.pi / (m + 1)
    assert lobe_factor(m, t) == pytest.approx(w, abs=1e-10)


@pytest.mark.parametrize("w", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_build_pmq_hits_target(w):
    res = build_pmq(w, tol=0.05)
    direct = fourier_coefficient(spectral_measure(lattice_points(res.n)), 4)
    assert abs(direct - res.achieved) <= 1e-12
    assert abs(res.achieved - w) <= 0.05
    assert res.factorization.expand() == res.n
    assert res.n == res.params["p"] ** res.params["m"] * res.params["q"]


def test_build_pmq_higher_power():
    res = build_pmq(0.3, tol=0.05, m=2)
    assert abs(res.achieved - 0.3) <= 0.05


def test_build_pmq_reports_best_candidate():
    with pytest.raises(NotFoundError) as info:
        build_pmq(0.5, tol=1e-6, p_max=200)
    assert info.value.best is not None


def test_three_prime_example():
    res = build_three_prime(0.02, 10**5)
    assert res.achieved <= 0.05
    norm = res.achieved**2 * res.n
    assert abs(norm - round(norm)) < 1e-6 and round(norm) > 0
    (triple,) = res.witnesses
    s = np.sum(np.array(triple), axis=0)
    assert 0 < s @ s == round(norm)
    assert all(x * x + y * y == res.n for x, y in triple)
    K = res.achieved * math.sqrt(res.n)
    assert quasi_correlations(lattice_points(res.n), 3, K * (1 + 1e-12)).count > 0


def test_three_prime_degenerate():
    res = build_three_prime(math.pi, 100)
    assert 0 < res.achieved <= 3
