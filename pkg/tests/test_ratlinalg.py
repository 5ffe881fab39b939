import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given

from crossedhom.ratlinalg import RatMatrix, bareiss_rank, nullspace, rationalize, rref, solve
from conftest import rat_matrices


def sympy_rank(m: RatMatrix) -> int:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m.entries]).rank()


@given(rat_matrices())
def test_bareiss_rank_matches_sympy(m):
    assert bareiss_rank(m) == sympy_rank(m)


@given(rat_matrices())
def test_rank_nullity(m):
    basis = nullspace(m)
    assert bareiss_rank(m) + len(basis) == m.cols
    for v in basis:
        assert not any(m.apply(v))


@given(rat_matrices())
def test_rref_is_reduced(m):
    r, pivots = rref(m)
    assert len(pivots) == bareiss_rank(m)
    for i, p in enumerate(pivots):
        assert r[i, p] == 1
        assert all(r[k, p] == 0 for k in range(r.rows) if k != i)


def test_rank_of_dependent_rows():
    m = RatMatrix.from_rows([[1, 2, 3], [2, 4, 6], [Fraction(1, 2), 1, Fraction(3, 2)]])
    assert bareiss_rank(m) == 1
    assert len(nullspace(m)) == 2


def test_zero_and_empty():
    assert bareiss_rank(RatMatrix.zeros(3, 4)) == 0
    assert bareiss_rank(RatMatrix.zeros(0, 4)) == 0
    assert len(nullspace(RatMatrix.zeros(0, 3))) == 3


def test_solve_consistent_and_inconsistent():
    m = RatMatrix.from_rows([[1, 1], [1, -1], [2, 0]])
    x = solve(m, [3, 1, 4])
    assert x == (2, 1)
    assert solve(m, [3, 1, 5]) is None


def test_rationalize_thousand_random_fractions():
    rng = random.Random(1234)
    for _ in range(1000):
        f = Fraction(rng.randint(-5000, 5000), rng.randint(1, 1000))
        assert rationalize(float(f)) == f


def test_rationalize_rejects_irrational():
    assert rationalize(2 ** 0.5, tol=1e-12) is None


def test_matmul_shape_mismatch():
    with pytest.raises(ValueError):
        RatMatrix.identity(2) @ RatMatrix.identity(3)
