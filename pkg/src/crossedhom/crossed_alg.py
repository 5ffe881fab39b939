"""Crossed homomorphisms between Lie algebras.

A linear map d: g -> h is a crossed homomorphism for an action theta when

    d([x, y]) = theta(x) d(y) - theta(y) d(x) + [d(x), d(y)]

for all x, y. Matrices store ``d(e_j)`` as column j in h-coordinates.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra_core import AlgebraAction, LieAlgebraSpec, ad_matrix, adjoint_action, bracket, borel_sl2
from .errors import InputError
from .ratlinalg import RatMatrix, rationalize, vadd, vsub

RESIDUAL_TOL = 1e-10
DEDUP_TOL = 1e-6


def _check_dims(d: RatMatrix, g: LieAlgebraSpec, h: LieAlgebraSpec, theta: AlgebraAction) -> None:
    if d.shape != (h.dim, g.dim):
        raise InputError(f"candidate has shape {d.shape}, expected {(h.dim, g.dim)}")
    if theta.domain != g or theta.codomain != h:
        raise InputError("action does not match the given algebras")


def crossed_residual(d: RatMatrix, g: LieAlgebraSpec, h: LieAlgebraSpec, theta: AlgebraAction) -> dict:
    """Residual h-vector for each basis pair (i, j), i < j (0-based keys)."""
    _check_dims(d, g, h, theta)
    cols = [d.column(j) for j in range(g.dim)]
    table = {}
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            lhs = d.apply(bracket(g, g.basis(i), g.basis(j)))
            rhs = vsub(theta.matrices[i].apply(cols[j]), theta.matrices[j].apply(cols[i]))
            rhs = vadd(rhs, bracket(h, cols[i], cols[j]))
            table[(i, j)] = vsub(lhs, rhs)
    return table


def residual_is_zero(table: dict) -> bool:
    return all(x == 0 for v in table.values() for x in v)


@dataclass(frozen=True)
class AlgCrossedHom:
    source: LieAlgebraSpec
    target: LieAlgebraSpec
    action: AlgebraAction
    matrix: RatMatrix
    checked: bool = True

    def __post_init__(self):
        if self.checked:
            table = crossed_residual(self.matrix, self.source, self.target, self.action)
            if not residual_is_zero(table):
                bad = next(k for k, v in table.items() if any(v))
                raise InputError(
                    f"not a crossed homomorphism: residual {table[bad]} at (e{bad[0] + 1}, e{bad[1] + 1})"
                )

    def image(self, i: int):
        return self.matrix.column(i)


@dataclass(frozen=True)
class TwistedRep:
    base: AlgCrossedHom
    matrices: tuple

    def of(self, x) -> RatMatrix:
        n = self.base.target.dim
        out = RatMatrix.zeros(n, n)
        for xi, m in zip(x, self.matrices):
            if xi:
                out = out + m.scale(xi)
        return out


def twisted_matrices(d: AlgCrossedHom) -> tuple:
    """theta(e_i) + ad_{d(e_i)} without verifying the representation identity."""
    return tuple(
        d.action.matrices[i] + ad_matrix(d.target, d.image(i)) for i in range(d.source.dim)
    )


def check_representation(g: LieAlgebraSpec, matrices) -> tuple | None:
    """First basis pair (0-based) breaking rho([e_i,e_j]) = [rho_i, rho_j], else ``None``."""
    n = matrices[0].rows if matrices else 0
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            coeffs = bracket(g, g.basis(i), g.basis(j))
            lhs = RatMatrix.zeros(n, n)
            for c, m in zip(coeffs, matrices):
                if c:
                    lhs = lhs + m.scale(c)
            if not (lhs - (matrices[i] @ matrices[j] - matrices[j] @ matrices[i])).is_zero():
                return (i, j)
    return None


def twisted_representation(d: AlgCrossedHom) -> TwistedRep:
    if not residual_is_zero(crossed_residual(d.matrix, d.source, d.target, d.action)):
        raise InputError("twisted representation requires a crossed homomorphism")
    mats = twisted_matrices(d)
    bad = check_representation(d.source, mats)
    if bad is not None:
        raise InputError(f"representation identity fails on (e{bad[0] + 1}, e{bad[1] + 1})")
    return TwistedRep(d, mats)


@dataclass(frozen=True)
class Family:
    """A parametric family of crossed homomorphisms on the 2D Borel algebra."""

    name: str
    params: tuple
    constraint: str
    template: tuple  # rows of strings, for display

    def member(self, *values) -> RatMatrix:
        raise NotImplementedError


class _NilpotentFamily(Family):
    def member(self, lam, mu) -> RatMatrix:
        return RatMatrix.from_rows([[0, 0], [lam, mu]])

    def distance(self, m: np.ndarray) -> float:
        return float(np.hypot(m[0, 0], m[0, 1]))


class _DiagonalFamily(Family):
    def member(self, p, q) -> RatMatrix:
        if Fraction(p) == 0:
            raise InputError("p = 0 belongs to the other family")
        return RatMatrix.from_rows([[p, 0], [q, -1]])

    def distance(self, m: np.ndarray) -> float:
        return float(np.hypot(m[0, 1], m[1, 1] + 1))


NILPOTENT = _NilpotentFamily("nilpotent", ("lambda", "mu"), "", (("0", "0"), ("lambda", "mu")))
DIAGONAL = _DiagonalFamily("diagonal", ("p", "q"), "p != 0", (("p", "0"), ("q", "-1")))


def _is_borel(A: LieAlgebraSpec) -> bool:
    return A == borel_sl2()


def classify_2d(algebra: LieAlgebraSpec, theta: AlgebraAction | None = None) -> tuple:
    """The two families of crossed homomorphisms for the adjoint action."""
    if not _is_borel(algebra) or (theta is not None and theta != adjoint_action(algebra)):
        raise InputError("classification only implemented for the 2D Borel algebra [e1,e2]=2e2 with theta=ad")
    return (NILPOTENT, DIAGONAL)


def family_distance(m: np.ndarray) -> float:
    """Distance of a float 2x2 matrix to the union of the two families."""
    return min(NILPOTENT.distance(m), DIAGONAL.distance(m))


# ---------------------------------------------------------------- numeric solve


def _float_tensors(g: LieAlgebraSpec, h: LieAlgebraSpec, theta: AlgebraAction):
    cg = np.array(g.structure_constants, dtype=float)
    ch = np.array(h.structure_constants, dtype=float)
    th = np.array([m.to_float() for m in theta.matrices]).reshape(g.dim, h.dim, h.dim)
    return cg, ch, th


def _residual_and_jacobian(x: np.ndarray, cg, ch, th, pairs):
    """Residual vector and exact Jacobian in the unknowns d[a, j] (row-major)."""
    ng = cg.shape[0]
    nh = ch.shape[0]
    d = x.reshape(nh, ng)
    res = []
    jac = []
    for i, j in pairs:
        # d([e_i, e_j]) - theta_i d_j + theta_j d_i - [d_i, d_j]
        r = d @ cg[i, j] - th[i] @ d[:, j] + th[j] @ d[:, i] - np.einsum("a,b,abk->k", d[:, i], d[:, j], ch)
        res.append(r)
        J = np.zeros((nh, nh, ng))
        # d/d d[a, col] of each term
        for col in range(ng):
            J[:, :, col] += np.eye(nh) * cg[i, j, col]
        J[:, :, j] -= th[i]
        J[:, :, i] += th[j]
        J[:, :, i] -= np.einsum("b,abk->ka", d[:, j], ch)
        J[:, :, j] -= np.einsum("a,abk->kb", d[:, i], ch)
        jac.append(J.reshape(nh, nh * ng))
    if not pairs:
        return np.zeros(0), np.zeros((0, nh * ng))
    return np.concatenate(res), np.vstack(jac)


def _newton(x0, cg, ch, th, pairs, max_iter=60):
    x = x0.copy()
    for _ in range(max_iter):
        r, J = _residual_and_jacobian(x, cg, ch, th, pairs)
        norm = float(np.linalg.norm(r)) if r.size else 0.0
        if norm < RESIDUAL_TOL * 1e-2:
            return x, norm
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        x = x + step
        if not np.all(np.isfinite(x)) or np.abs(x).max() > 1e8:
            return x, float("inf")
    r, _ = _residual_and_jacobian(x, cg, ch, th, pairs)
    return x, float(np.linalg.norm(r)) if r.size else 0.0


@dataclass(frozen=True)
class NumericSolution:
    matrix: np.ndarray
    residual: float


def solve_numeric(
    g: LieAlgebraSpec,
    h: LieAlgebraSpec,
    theta: AlgebraAction,
    starts: int | np.ndarray = 100,
    box: tuple[float, float] = (-3.0, 3.0),
    seed: int = 0,
    workers: int = 1,
) -> list[NumericSolution]:
    """Multistart Gauss-Newton (least-norm steps) on the crossed-hom equations.

    ``starts`` is either a count of uniform random starts in ``box`` or an
    explicit array of initial matrices.
    """
    if g.dim > 4 or h.dim > 4:
        raise InputError("numeric solver supports dimensions up to 4")
    nvar = g.dim * h.dim
    if isinstance(starts, (int, np.integer)):
        rng = np.random.default_rng(seed)
        x0s = rng.uniform(box[0], box[1], size=(int(starts), nvar))
    else:
        x0s = np.asarray(starts, dtype=float).reshape(-1, nvar)
    cg, ch, th = _float_tensors(g, h, theta)
    pairs = [(i, j) for i in range(g.dim) for j in range(i + 1, g.dim)]

    def run(x0):
        return _newton(x0, cg, ch, th, pairs)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, x0s))
    else:
        results = [run(x0) for x0 in x0s]
    converged = sorted(
        ((tuple(np.round(x, 12)), x, r) for x, r in results if r < RESIDUAL_TOL),
        key=lambda t: t[0],
    )
    kept: list[NumericSolution] = []
    for _, x, r in converged:
        m = x.reshape(h.dim, g.dim)
        if all(np.linalg.norm(m - k.matrix) > DEDUP_TOL for k in kept):
            kept.append(NumericSolution(m, r))
    return kept


def rationalize_matrix(m: np.ndarray, tol: float = 1e-8, max_denominator: int = 1000) -> RatMatrix | None:
    rows = []
    for row in np.atleast_2d(m):
        out = []
        for x in row:
            f = rationalize(float(x), tol, max_denominator)
            if f is None:
                return None
            out.append(f)
        rows.append(out)
    return RatMatrix.from_rows(rows)
