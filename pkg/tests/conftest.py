from fractions import Fraction

import pytest
from hypothesis import settings, strategies as st

from crossedhom.algebra_core import LieAlgebraSpec, adjoint_action, borel_sl2
from crossedhom.ratlinalg import RatMatrix

settings.register_profile("ci", max_examples=200, deadline=None, derandomize=True)
settings.load_profile("ci")

small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def rat_matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small_fracs, min_size=c, max_size=c), min_size=r, max_size=r))
    return RatMatrix.from_rows(rows, c)


@pytest.fixture
def borel():
    return borel_sl2()


@pytest.fixture
def borel_ad(borel):
    return adjoint_action(borel)


def heisenberg() -> LieAlgebraSpec:
    return LieAlgebraSpec.from_brackets(3, {(0, 1): (0, 0, 1)})


def sl2() -> LieAlgebraSpec:
    """[h,e]=2e, [h,f]=-2f, [e,f]=h in the basis (h, e, f)."""
    return LieAlgebraSpec.from_brackets(3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)})


def fr(*xs):
    return tuple(Fraction(x) for x in xs)
