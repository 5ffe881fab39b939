"""Finite-dimensional Lie algebras over Q and their actions.

Bases are index-based (0-based internally). ``c[i][j][k]`` is the coefficient
of ``e_k`` in ``[e_i, e_j]``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .errors import InputError
from .ratlinalg import RatMatrix, Vector, as_fraction, unit_vec, vadd, vec, vsub, zero_vec

MAX_DIM = 8


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    witness: tuple | None = None
    residual: object = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class LieAlgebraSpec:
    dim: int
    structure_constants: tuple  # [i][j][k] -> Fraction

    def __post_init__(self):
        n = self.dim
        if not 1 <= n <= MAX_DIM:
            raise InputError(f"dimension {n} outside supported range 1..{MAX_DIM}")
        c = self.structure_constants
        if len(c) != n or any(len(ci) != n or any(len(cij) != n for cij in ci) for ci in c):
            raise InputError("structure constants must be an n x n x n array")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if c[i][j][k] != -c[j][i][k]:
                        raise InputError(f"structure constants not antisymmetric at ({i + 1},{j + 1},{k + 1})")

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict) -> "LieAlgebraSpec":
        """Build from ``{(i, j): result_vector}`` (0-based), completing antisymmetrically."""
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        seen: dict = {}
        for (i, j), result in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise InputError(f"bracket index ({i + 1},{j + 1}) out of range")
            result = vec(result)
            if len(result) != dim:
                raise InputError(f"bracket [e{i + 1},e{j + 1}] has {len(result)} coordinates, expected {dim}")
            for key, val in (((i, j), result), ((j, i), tuple(-x for x in result))):
                if key in seen and seen[key] != val:
                    raise InputError(f"conflicting values for [e{key[0] + 1},e{key[1] + 1}]")
                seen[key] = val
            if i == j and any(result):
                raise InputError(f"[e{i + 1},e{i + 1}] must vanish")
        for (i, j), val in seen.items():
            c[i][j] = list(val)
        return cls(dim, tuple(tuple(tuple(ck) for ck in ci) for ci in c))

    @classmethod
    def abelian(cls, dim: int) -> "LieAlgebraSpec":
        return cls.from_brackets(dim, {})

    def basis(self, i: int) -> Vector:
        return unit_vec(self.dim, i)

    def is_abelian(self) -> bool:
        return all(x == 0 for ci in self.structure_constants for cij in ci for x in cij)


def borel_sl2() -> LieAlgebraSpec:
    """span{e1 = diag(1,-1), e2 = E12} with [e1, e2] = 2 e2."""
    return LieAlgebraSpec.from_brackets(2, {(0, 1): (0, 2)})


def bracket(A: LieAlgebraSpec, u: Sequence, v: Sequence) -> Vector:
    n = A.dim
    if len(u) != n or len(v) != n:
        raise InputError(f"bracket expects vectors of length {n}, got {len(u)} and {len(v)}")
    out = [0] * n
    c = A.structure_constants
    for i, ui in enumerate(u):
        if ui == 0:
            continue
        for j, vj in enumerate(v):
            if vj == 0:
                continue
            w = ui * vj
            cij = c[i][j]
            for k in range(n):
                if cij[k]:
                    out[k] += w * cij[k]
    return tuple(out)


def ad_matrix(A: LieAlgebraSpec, u: Sequence) -> RatMatrix:
    """Matrix of ``v -> [u, v]``."""
    cols = [bracket(A, u, A.basis(j)) for j in range(A.dim)]
    return RatMatrix.from_columns(cols)


def check_jacobi(A: LieAlgebraSpec) -> CheckResult:
    """Exact Jacobi check; the witness is a 1-based basis triple."""
    n = A.dim
    e = [A.basis(i) for i in range(n)]
    for i, j, k in combinations(range(n), 3):
        total = zero_vec(n)
        for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
            total = vadd(total, bracket(A, bracket(A, e[x], e[y]), e[z]))
        if any(total):
            return CheckResult(False, (i + 1, j + 1, k + 1), total)
    return CheckResult(True)


@dataclass(frozen=True)
class AlgebraAction:
    domain: LieAlgebraSpec
    codomain: LieAlgebraSpec
    matrices: tuple  # one RatMatrix per basis element of the domain

    def __post_init__(self):
        if len(self.matrices) != self.domain.dim:
            raise InputError(f"action needs {self.domain.dim} matrices, got {len(self.matrices)}")
        n = self.codomain.dim
        for m in self.matrices:
            if m.shape != (n, n):
                raise InputError(f"action matrix of shape {m.shape}, expected {(n, n)}")

    def of(self, x: Sequence) -> RatMatrix:
        """theta(x) for a coordinate vector x of the domain."""
        n = self.codomain.dim
        out = RatMatrix.zeros(n, n)
        for xi, m in zip(x, self.matrices):
            if xi:
                out = out + m.scale(xi)
        return out


def adjoint_action(A: LieAlgebraSpec) -> AlgebraAction:
    return AlgebraAction(A, A, tuple(ad_matrix(A, A.basis(i)) for i in range(A.dim)))


def zero_action(g: LieAlgebraSpec, h: LieAlgebraSpec) -> AlgebraAction:
    return AlgebraAction(g, h, tuple(RatMatrix.zeros(h.dim, h.dim) for _ in range(g.dim)))


def check_action(theta: AlgebraAction) -> CheckResult:
    """Derivation property on basis pairs, then bracket-to-commutator.

    Witnesses are ``("derivation", i, j, k)`` or ``("homomorphism", i, j)``
    with 1-based indices.
    """
    g, h = theta.domain, theta.codomain
    for i, t in enumerate(theta.matrices):
        for j in range(h.dim):
            for k in range(h.dim):
                ej, ek = h.basis(j), h.basis(k)
                lhs = t.apply(bracket(h, ej, ek))
                rhs = vadd(bracket(h, t.apply(ej), ek), bracket(h, ej, t.apply(ek)))
                res = vsub(lhs, rhs)
                if any(res):
                    return CheckResult(False, ("derivation", i + 1, j + 1, k + 1), res)
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            ti, tj = theta.matrices[i], theta.matrices[j]
            lhs = theta.of(bracket(g, g.basis(i), g.basis(j)))
            res = lhs - (ti @ tj - tj @ ti)
            if not res.is_zero():
                return CheckResult(False, ("homomorphism", i + 1, j + 1), res)
    return CheckResult(True)


def algebra_from_json(data) -> LieAlgebraSpec:
    """``{"dim": n, "brackets": [{"i": 1, "j": 2, "result": [...]}, ...]}``.

    ``result`` entries may be scalars or one-element lists (column form).
    """
    if isinstance(data, str):
        data = json.loads(data)
    try:
        dim = int(data["dim"])
        brackets = {}
        for entry in data.get("brackets", []):
            i, j = int(entry["i"]) - 1, int(entry["j"]) - 1
            result = [r[0] if isinstance(r, list) else r for r in entry["result"]]
            key = (i, j)
            if key in brackets and vec(brackets[key]) != vec(result):
                raise InputError(f"conflicting duplicate bracket [e{i + 1},e{j + 1}]")
            brackets[key] = result
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed algebra JSON: {exc}") from exc
    return LieAlgebraSpec.from_brackets(dim, brackets)


def algebra_to_json(A: LieAlgebraSpec) -> dict:
    out = []
    for i in range(A.dim):
        for j in range(i + 1, A.dim):
            r = A.structure_constants[i][j]
            if any(r):
                out.append({"i": i + 1, "j": j + 1, "result": [[str(x)] for x in r]})
    return {"dim": A.dim, "brackets": out}


def matrix_from_json(data, rows: int, cols: int) -> RatMatrix:
    """Candidate map ``{"matrix": [[...], ...]}`` (rows = target coordinates)."""
    if isinstance(data, str):
        data = json.loads(data)
    try:
        rows_data = data["matrix"]
    except (KeyError, TypeError) as exc:
        raise InputError("candidate JSON needs a 'matrix' field") from exc
    if len(rows_data) != rows or any(len(r) != cols for r in rows_data):
        raise InputError(f"candidate matrix must be {rows}x{cols}")
    return RatMatrix.from_rows([[as_fraction(x) for x in r] for r in rows_data], cols)
