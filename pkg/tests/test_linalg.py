from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxload import linalg

P = linalg.primes(1)[0]

fractions = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@st.composite
def low_rank_matrices(draw):
    """Rational matrices built as products, so the nullspace is usually nontrivial."""
    rows = draw(st.integers(1, 7))
    cols = draw(st.integers(1, 7))
    rank = draw(st.integers(0, min(rows, cols)))
    left = draw(st.lists(st.lists(fractions, min_size=rank, max_size=rank), min_size=rows, max_size=rows))
    right = draw(st.lists(st.lists(fractions, min_size=cols, max_size=cols), min_size=rank, max_size=rank))
    return [[sum((left[i][k] * right[k][j] for k in range(rank)), Fraction(0)) for j in range(cols)] for i in range(rows)]


def test_primes_are_increasing_primes_above_start():
    ps = linalg.primes(5)
    assert ps == sorted(ps)
    assert all(p > 2**30 and p < 2**31 for p in ps)
    assert all(all(p % d for d in range(2, 2000)) for p in ps)


def test_rref_exact_known():
    reduced, pivots = linalg.rref_exact([[1, 2, 3], [2, 4, 7]])
    assert pivots == [0, 2]
    assert reduced == [[1, 2, 0], [0, 0, 1]]


def test_nullspace_exact_known():
    basis = linalg.nullspace_exact([[1, 1, 1]])
    assert basis == [[-1, 1, 0], [-1, 0, 1]]
    assert linalg.nullspace_exact([[1, 0], [0, 1]]) == []


@settings(max_examples=60, deadline=None)
@given(low_rank_matrices())
def test_modular_matches_exact(rows):
    cols = len(rows[0])
    exact = linalg.nullspace_exact(rows, cols)
    modular = linalg.nullspace_modular(rows, cols)
    assert modular == exact
    for v in exact:
        assert linalg.annihilated(rows, v)


@settings(max_examples=40, deadline=None)
@given(low_rank_matrices())
def test_rref_mod_matches_exact_reduction(rows):
    reduced, pivots = linalg.rref_exact(rows)
    try:
        mat = np.array([[linalg.reduce_mod(x, P) for x in row] for row in rows], dtype=np.int64)
    except ZeroDivisionError:
        return
    reduced_p, pivots_p = linalg.rref_mod(mat, P)
    # exact entries are small, so mod P the pivot pattern only changes for unlucky P
    assert pivots_p == pivots
    assert [[linalg.reduce_mod(x, P) for x in row] for row in reduced] == reduced_p.tolist()


@settings(max_examples=200)
@given(st.integers(-3000, 3000), st.integers(1, 3000))
def test_rational_reconstruction_roundtrip(a, b):
    x = Fraction(a, b)
    m = P * linalg.primes(2)[1]
    assert linalg.rational_reconstruct(linalg.reduce_mod(x, m), m) == x


def test_rational_reconstruction_fails_when_modulus_small():
    x = Fraction(123456, 654321)
    assert linalg.rational_reconstruct(linalg.reduce_mod(x, 10007), 10007) != x


@settings(max_examples=100)
@given(st.integers(0, 10**18))
def test_crt_pair(x):
    p, q = linalg.primes(2)
    r, m = linalg.crt_pair(x % p, p, x % q, q)
    assert m == p * q
    assert r % m == x % m


def test_reduce_mod_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        linalg.reduce_mod(Fraction(1, P), P)


def test_modular_handles_large_entries():
    # entries far above a single prime force several primes and CRT
    big = 10**40 + 7
    rows = [[big, 1, Fraction(1, 3)], [2 * big, 2, Fraction(2, 3)], [1, big, 5]]
    assert linalg.nullspace_modular(rows) == linalg.nullspace_exact(rows)
