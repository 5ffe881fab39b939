from fractions import Fraction
from itertools import combinations, permutations

import pytest
import sympy
from hypothesis import given, strategies as st

from crossedhom.algebra_core import LieAlgebraSpec, adjoint_action, borel_sl2, bracket, zero_action
from crossedhom.ce_cohomology import (
    build_coboundary,
    coboundary_from_rep,
    coboundary_witness,
    cochain_dim,
    cochain_from_values,
    cohomology_dims,
    cohomology_table_rep,
    subsets,
    verify_complex,
    verify_complex_rep,
)
from crossedhom.crossed_alg import DIAGONAL, NILPOTENT, AlgCrossedHom, twisted_matrices
from crossedhom.errors import InputError
from crossedhom.ratlinalg import RatMatrix, bareiss_rank, nullspace
from conftest import heisenberg, sl2, small_fracs


def perm_sign(seq):
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def oracle_coboundary(g, rep, k):
    """Assemble d^k column by column by evaluating basis cochains on basis tuples."""
    n, m = g.dim, rep[0].rows
    src, dst = list(combinations(range(n), k)), list(combinations(range(n), k + 1))

    def cochain(S, a):
        def alpha(xs):  # xs: tuple of vectors in g
            total = [Fraction(0)] * m
            # multilinear alternating extension of e_S -> e_a
            for idx in permutations(range(k)):
                coeff = perm_sign(idx)
                for pos, t in enumerate(idx):
                    coeff *= xs[pos][S[t]]
                total[a] += coeff
            return total

        return alpha

    cols = []
    e = [g.basis(i) for i in range(n)]
    for S in src:
        for a in range(m):
            alpha = cochain(S, a)
            col = []
            for T in dst:
                xs = [e[i] for i in T]
                val = [Fraction(0)] * m
                for i in range(k + 1):
                    rest = xs[:i] + xs[i + 1:]
                    v = rep_apply(rep, xs[i], alpha(rest))
                    val = [p + (-1) ** i * q for p, q in zip(val, v)]
                for i in range(k + 1):
                    for j in range(i + 1, k + 1):
                        rest = [bracket(g, xs[i], xs[j])] + [x for t, x in enumerate(xs) if t not in (i, j)]
                        v = alpha(rest)
                        val = [p + (-1) ** (i + j) * q for p, q in zip(val, v)]
                col.extend(val)
            cols.append(col)
    rows = len(dst) * m
    return [[cols[c][r] for c in range(len(cols))] for r in range(rows)]


def rep_apply(rep, x, v):
    out = [Fraction(0)] * len(v)
    for xi, mat in zip(x, rep):
        if xi:
            w = mat.apply(v)
            out = [p + xi * q for p, q in zip(out, w)]
    return out


def oracle_dims(g, rep):
    ranks = []
    for k in range(g.dim + 1):
        M = oracle_coboundary(g, rep, k)
        ranks.append(sympy.Matrix(M).rank() if M and M[0] else 0)
    dims = []
    for k in range(g.dim + 1):
        c = cochain_dim(g.dim, rep[0].rows, k)
        dims.append(c - ranks[k] - (ranks[k - 1] if k else 0))
    return dims


def borel_map(rows):
    g = borel_sl2()
    return AlgCrossedHom(g, g, adjoint_action(g), RatMatrix.from_rows(rows))


def test_basis_conventions():
    assert subsets(3, 2) == [(0, 1), (0, 2), (1, 2)]
    assert cochain_dim(3, 2, 2) == 6
    assert cochain_dim(2, 2, 3) == 0


def test_degree_zero_is_stack_of_rep(borel):
    d = borel_map([[0, 0], [3, 5]])
    reps = twisted_matrices(d)
    d0 = build_coboundary(d, 0).matrix
    assert d0.rows == 4 and d0.cols == 2
    for i in range(2):
        for r in range(2):
            assert d0.row(2 * i + r) == reps[i].row(r)


def test_top_degree_has_no_rows():
    d = borel_map([[0, 0], [0, 0]])
    top = build_coboundary(d, 2).matrix
    assert top.shape == (0, 2)


def test_degree_out_of_range():
    with pytest.raises(InputError):
        build_coboundary(borel_map([[0, 0], [0, 0]]), 3)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_adjoint_matches_oracle(k):
    g = borel_sl2()
    rep = adjoint_action(g).matrices
    assert coboundary_from_rep(g, rep, k).matrix.tolist() == oracle_coboundary(g, rep, k)


@pytest.mark.parametrize("alg", [heisenberg, sl2])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_three_dim_matches_oracle(alg, k):
    g = alg()
    rep = adjoint_action(g).matrices
    assert coboundary_from_rep(g, rep, k).matrix.tolist() == oracle_coboundary(g, rep, k)


FROZEN_DIMS = {
    ((0, 0), (0, -1)): [1, 2, 1],
    ((-1, 0), (0, -1)): [2, 2, 0],
    ((0, 0), (0, 0)): [0, 0, 0],  # adjoint cohomology: trivial centre, all derivations inner
}


@pytest.mark.parametrize("rows", list(FROZEN_DIMS))
def test_frozen_dims(rows):
    d = borel_map(rows)
    assert oracle_dims(d.source, twisted_matrices(d)) == FROZEN_DIMS[rows]
    assert [h for _, h in cohomology_dims(d)][:3] == FROZEN_DIMS[rows]


def test_dims_beyond_top_degree_vanish():
    dims = cohomology_dims(borel_map([[0, 0], [1, 2]]), max_degree=5)
    assert [h for k, h in dims if k > 2] == [0, 0, 0]


def test_classified_maps_give_complexes():
    vals = [Fraction(-2), Fraction(0), Fraction(1, 3), Fraction(4)]
    for x in vals:
        for y in vals:
            assert verify_complex(borel_map(NILPOTENT.member(x, y).tolist()))
            if x:
                assert verify_complex(borel_map(DIAGONAL.member(x, y).tolist()))


def r3(lam):
    """[e3, e1] = e1, [e3, e2] = lam e2."""
    return LieAlgebraSpec.from_brackets(3, {(2, 0): (1, 0, 0), (2, 1): (0, lam, 0)})


@given(small_fracs)
def test_random_three_dim_complex(lam):
    g = r3(lam)
    for d in (RatMatrix.zeros(3, 3), RatMatrix.identity(3).scale(-1)):
        assert verify_complex(AlgCrossedHom(g, g, adjoint_action(g), d))


@given(st.lists(small_fracs, min_size=4, max_size=4))
def test_zero_action_abelian_target(vals):
    # with theta = 0 and h abelian, d is crossed iff it kills [g, g] = span{e2}
    g = borel_sl2()
    h = LieAlgebraSpec.abelian(2)
    d = RatMatrix.from_rows([[vals[0], 0], [vals[1], 0]])
    assert verify_complex(AlgCrossedHom(g, h, zero_action(g, h), d))


def test_corrupted_rep_breaks_complex():
    d = borel_map([[0, 0], [0, -1]])
    mats = list(twisted_matrices(d))
    mats[1] = mats[1].with_entry(0, 0, 1)
    ok, k = verify_complex_rep(d.source, tuple(mats))
    assert not ok and k == 0


@given(st.sampled_from([(0, 0, 0, -1), (2, 0, 7, -1), (0, 0, 3, 5), (-1, 0, 0, -1)]))
def test_rank_nullity_per_degree(entries):
    d = borel_map([entries[:2], entries[2:]])
    for k in range(3):
        m = build_coboundary(d, k).matrix
        assert bareiss_rank(m) + len(nullspace(m)) == m.cols


invertible = st.lists(small_fracs, min_size=4, max_size=4).filter(lambda v: v[0] * v[3] - v[1] * v[2] != 0)


@given(invertible, st.sampled_from([(0, 0, 0, -1), (-1, 0, 0, -1), (3, 0, 1, -1), (0, 0, 1, 2)]))
def test_dims_invariant_under_basis_change(p, entries):
    d = borel_map([entries[:2], entries[2:]])
    P = RatMatrix.from_rows([p[:2], p[2:]])
    det = p[0] * p[3] - p[1] * p[2]
    Pinv = RatMatrix.from_rows([[p[3] / det, -p[1] / det], [-p[2] / det, p[0] / det]])
    conj = tuple(P @ m @ Pinv for m in twisted_matrices(d))
    base = [r.dim_cohomology for r in cohomology_table_rep(d.source, twisted_matrices(d))]
    moved = [r.dim_cohomology for r in cohomology_table_rep(d.source, conj)]
    assert base == moved


@given(st.lists(small_fracs, min_size=2, max_size=2))
def test_witness_recovers_coboundaries(w):
    d = borel_map([[3, 0], [1, -1]])
    c = build_coboundary(d, 0).matrix.apply(w)
    res = coboundary_witness(d, c)
    assert res.solvable
    assert build_coboundary(d, 0).matrix.apply(res.w) == c


def test_witness_zero():
    res = coboundary_witness(borel_map([[0, 0], [0, -1]]), [0, 0, 0, 0])
    assert res.solvable and res.w == (0, 0)


def test_lambda_direction_is_exact():
    # c(e1) = e2, c(e2) = 0 at d = [[0,0],[0,-1]] is the coboundary of w = (0, 1/2)
    d = borel_map([[0, 0], [0, -1]])
    res = coboundary_witness(d, cochain_from_values([(0, 1), (0, 0)]))
    assert res.solvable
    assert res.w[1] == Fraction(1, 2)


def test_mu_direction_is_not_exact():
    d = borel_map([[0, 0], [0, -1]])
    res = coboundary_witness(d, cochain_from_values([(0, 0), (0, 1)]))
    assert not res.solvable
    assert (res.rank_plain, res.rank_augmented) == (1, 2)


def test_witness_rejects_non_cocycle():
    with pytest.raises(InputError, match="not a 1-cocycle"):
        # (d c)(e1, e2) = theta_d(e1) c(e2) - c([e1, e2]) = 0 - 2 e1
        coboundary_witness(borel_map([[0, 0], [0, -1]]), cochain_from_values([(0, 0), (1, 0)]))
