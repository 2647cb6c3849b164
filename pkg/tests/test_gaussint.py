import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from arithwave.errors import ArgumentError, RangeError
from arithwave.gaussint import (
    GaussianInt,
    enumerate_S_prime,
    factorize,
    is_prime,
    is_vacuous,
    lattice_points,
    prime_factors,
    primes_up_to,
    r2_count,
    split_prime,
)

import oracles


def test_factorize_examples():
    f = factorize(5)
    assert (f.alpha2, f.split, f.inert) == (0, ((5, 1, GaussianInt(2, 1)),), ())
    f = factorize(45)
    assert f.split == ((5, 1, GaussianInt(2, 1)),) and f.inert == ((3, 2),)
    assert f.in_S and not f.in_S_prime
    f = factorize(21)
    assert f.inert == ((3, 1), (7, 1)) and not f.in_S


def test_factorize_rejects_out_of_range():
    with pytest.raises(RangeError):
        factorize(0)
    with pytest.raises(RangeError):
        factorize(2**63)


@pytest.mark.parametrize("p,expected", [(5, (2, 1)), (13, (3, 2)), (97, (9, 4))])
def test_split_prime_examples(p, expected):
    assert split_prime(p).as_tuple() == expected


@pytest.mark.parametrize("p", [3, 7, 15, 21, 1])
def test_split_prime_rejects(p):
    with pytest.raises(ArgumentError):
        split_prime(p)


def test_split_prime_large_and_canonical():
    for p in primes_up_to(20000):
        p = int(p)
        if p % 4 != 1:
            continue
        P = split_prime(p)
        assert P.norm() == p and P.re > P.im > 0


def test_lattice_point_examples():
    assert lattice_points(1).as_set() == {(1, 0), (0, 1), (-1, 0), (0, -1)}
    assert len(lattice_points(5)) == 8
    assert len(lattice_points(3)) == 0


@pytest.mark.parametrize("n,count", [(25, 12), (65, 16), (2, 4), (3, 0), (1, 4)])
def test_r2_count_examples(n, count):
    assert r2_count(n) == count


def test_r2_count_matches_brute_force_small():
    table = oracles.r2_table(5000)
    assert [r2_count(n) for n in range(1, 5001)] == table[1:].tolist()


@pytest.mark.parametrize("n", [1, 2, 5, 25, 50, 65, 325, 1105, 5525, 9, 18, 45, 32045])
def test_lattice_points_match_brute_force(n):
    pts = lattice_points(n)
    assert pts.as_set() == oracles.brute_points(n)
    assert len(pts.as_set()) == len(pts)
    a = pts.angles
    assert np.all(np.diff(a) > 0) and a.min() >= 0 and a.max() < 1


@given(st.integers(1, 10**6))
@settings(max_examples=200, deadline=None)
def test_lattice_point_symmetries(n):
    s = lattice_points(n).as_set()
    assert {(-x, -y) for x, y in s} == s
    assert {(-y, x) for x, y in s} == s


@given(st.integers(1, 10**6))
@settings(max_examples=300, deadline=None)
def test_factorize_reexpands(n):
    f = factorize(n)
    assert f.expand() == n
    assert all(P.norm() == p for p, _, P in f.split)


@given(st.integers(2, 2**62))
@settings(max_examples=100, deadline=None)
def test_prime_factors_match_sympy(n):
    assert prime_factors(n) == dict(sympy.factorint(n))


@given(st.integers(2, 10**12))
@settings(max_examples=200, deadline=None)
def test_is_prime_matches_sympy(n):
    assert is_prime(n) == sympy.isprime(n)


def test_primes_up_to():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_enumerate_S_prime_examples():
    assert enumerate_S_prime(30) == [1, 5, 13, 17, 25, 29]
    assert enumerate_S_prime(4) == [1]
    X = 200
    c = len(enumerate_S_prime(X)) * math.sqrt(math.log(X)) / X
    assert 0.3 < c < 1.5
    assert enumerate_S_prime(3000) == oracles.sieve_S_prime(3000)
    assert is_vacuous(1) and not is_vacuous(5)


def test_gaussian_int_arithmetic():
    a, b = GaussianInt(2, 1), GaussianInt(3, -2)
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a**3).as_tuple() == (2, 11)
    assert a.times_i().as_tuple() == (-1, 2)
    assert (a + (-a)).as_tuple() == (0, 0)
