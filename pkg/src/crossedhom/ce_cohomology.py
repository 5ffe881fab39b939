"""Chevalley-Eilenberg complex of g with coefficients in (h, theta_d).

Cochain basis in degree k: pairs (I, a) where I runs over the k-subsets of
{0..n_g-1} in ``itertools.combinations`` (lexicographic) order and a over
the h-basis. The flat index is ``subset_index * n_h + a``; degree 0 is h.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .algebra_core import LieAlgebraSpec, bracket
from .crossed_alg import AlgCrossedHom, twisted_matrices
from .errors import InputError
from .ratlinalg import RatMatrix, bareiss_rank, solve, vec


def subsets(n: int, k: int) -> list[tuple[int, ...]]:
    return list(combinations(range(n), k))


def cochain_dim(n_g: int, n_h: int, k: int) -> int:
    if k < 0 or k > n_g:
        return 0
    return comb(n_g, k) * n_h


@dataclass(frozen=True)
class CoboundaryMatrix:
    degree: int
    matrix: RatMatrix


def _sorted_sign(indices: list[int]) -> tuple[int, tuple[int, ...]] | None:
    """Sign of the sorting permutation, or None when an index repeats."""
    if len(set(indices)) != len(indices):
        return None
    sign = 1
    arr = list(indices)
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


def coboundary_from_rep(g: LieAlgebraSpec, rep: tuple, k: int) -> CoboundaryMatrix:
    """d^k : C^k -> C^{k+1} for the representation with basis matrices ``rep``."""
    n_g = g.dim
    n_h = rep[0].rows if rep else 0
    if not 0 <= k <= n_g:
        raise InputError(f"degree {k} outside 0..{n_g}")
    src = subsets(n_g, k)
    dst = subsets(n_g, k + 1)
    src_index = {s: i for i, s in enumerate(src)}
    rows = [[0] * (len(src) * n_h) for _ in range(len(dst) * n_h)]

    def add(row_block: int, subset: tuple[int, ...], coeff, vector_map):
        """Add coeff * vector_map(alpha(e_subset)) into the rows of ``row_block``."""
        col_block = src_index[subset]
        for a in range(n_h):
            for b in range(n_h):
                v = vector_map[a][b]
                if v:
                    rows[row_block * n_h + a][col_block * n_h + b] += coeff * v

    ident = [[1 if a == b else 0 for b in range(n_h)] for a in range(n_h)]
    for r, xs in enumerate(dst):
        # sum_i (-1)^i rho(x_i) alpha(x_0..^x_i..x_k)
        for i, xi in enumerate(xs):
            rest = xs[:i] + xs[i + 1:]
            add(r, rest, (-1) ** i, rep[xi].entries)
        # sum_{i<j} (-1)^{i+j} alpha([x_i, x_j], x_0..^x_i..^x_j..)
        for i in range(len(xs)):
            for j in range(i + 1, len(xs)):
                rest = [x for t, x in enumerate(xs) if t not in (i, j)]
                br = bracket(g, g.basis(xs[i]), g.basis(xs[j]))
                for m, c in enumerate(br):
                    if not c:
                        continue
                    sorted_ = _sorted_sign([m] + rest)
                    if sorted_ is None:
                        continue
                    sign, subset = sorted_
                    add(r, subset, (-1) ** (i + j) * sign * c, ident)
    return CoboundaryMatrix(k, RatMatrix.from_rows(rows, len(src) * n_h) if rows else RatMatrix.zeros(0, len(src) * n_h))


def build_coboundary(d: AlgCrossedHom, k: int) -> CoboundaryMatrix:
    return coboundary_from_rep(d.source, twisted_matrices(d), k)


def _chain(g: LieAlgebraSpec, rep: tuple) -> list[CoboundaryMatrix]:
    return [coboundary_from_rep(g, rep, k) for k in range(g.dim + 1)]


def verify_complex_rep(g: LieAlgebraSpec, rep: tuple) -> tuple[bool, int | None]:
    """(ok, first failing degree k with d^{k+1} d^k != 0)."""
    chain = _chain(g, rep)
    for k in range(len(chain) - 1):
        prod = chain[k + 1].matrix @ chain[k].matrix
        if not prod.is_zero():
            return False, k
    return True, None


def verify_complex(d: AlgCrossedHom) -> bool:
    return verify_complex_rep(d.source, twisted_matrices(d))[0]


@dataclass(frozen=True)
class CohomologyRow:
    k: int
    dim_cochains: int
    rank: int  # rank of d^k
    dim_cohomology: int


def cohomology_table_rep(g: LieAlgebraSpec, rep: tuple, max_degree: int | None = None) -> list[CohomologyRow]:
    n_g = g.dim
    n_h = rep[0].rows if rep else 0
    top = n_g + 1 if max_degree is None else max_degree
    ranks = {}
    for k in range(0, n_g + 1):
        ranks[k] = bareiss_rank(coboundary_from_rep(g, rep, k).matrix)
    out = []
    for k in range(0, top + 1):
        dim_c = cochain_dim(n_g, n_h, k)
        rk = ranks.get(k, 0)
        prev = ranks.get(k - 1, 0)
        out.append(CohomologyRow(k, dim_c, rk, dim_c - rk - prev))
    return out


def cohomology_table(d: AlgCrossedHom, max_degree: int | None = None) -> list[CohomologyRow]:
    return cohomology_table_rep(d.source, twisted_matrices(d), max_degree)


def cohomology_dims(d: AlgCrossedHom, max_degree: int | None = None) -> list[tuple[int, int]]:
    if not verify_complex(d):
        raise InputError("coboundary does not square to zero; twisted action is not a representation")
    return [(row.k, row.dim_cohomology) for row in cohomology_table(d, max_degree)]


@dataclass(frozen=True)
class WitnessResult:
    solvable: bool
    w: tuple | None
    rank_plain: int
    rank_augmented: int


def coboundary_witness(d: AlgCrossedHom, c) -> WitnessResult:
    """Solve d^0 w = c for a 1-cochain c (flat vector in the C^1 basis).

    When unsolvable the certificate is the rank jump of the augmented system.
    """
    c = vec(c)
    d0 = build_coboundary(d, 0).matrix
    d1 = build_coboundary(d, 1).matrix
    if len(c) != d0.rows:
        raise InputError(f"1-cochain must have {d0.rows} coordinates")
    if any(d1.apply(c)):
        raise InputError("input is not a 1-cocycle")
    aug = RatMatrix.from_rows([list(r) + [x] for r, x in zip(d0.entries, c)], d0.cols + 1)
    r0, r1 = bareiss_rank(d0), bareiss_rank(aug)
    w = solve(d0, c) if r0 == r1 else None
    return WitnessResult(w is not None, w, r0, r1)


def cochain_from_values(values: list) -> tuple:
    """Flatten a 1-cochain given as the list of its values on e_1..e_n."""
    return tuple(x for v in values for x in vec(v))
