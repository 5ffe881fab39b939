"""Exact linear algebra over the rationals.

Matrices are immutable ``RatMatrix`` values holding ``Fraction`` entries.
Ranks use fraction-free (Bareiss) elimination on an integer-scaled copy;
kernels and particular solutions use Gauss-Jordan over ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .errors import InputError

Vector = tuple  # tuple[Fraction, ...]


def as_fraction(value) -> Fraction:
    """Coerce ``int``, ``Fraction`` or a ``"p/q"`` string to ``Fraction``.

    Floats are accepted only when they are exact binary values; callers that
    hold measured floats should use :func:`rationalize` instead.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, (int, float)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"not a rational: {value!r}") from exc
    raise InputError(f"not a rational: {value!r}")


def rationalize(x: float, tol: float = 1e-8, max_denominator: int = 1000) -> Fraction | None:
    """Continued-fraction rounding; ``None`` when no fraction is within ``tol``."""
    frac = Fraction(x).limit_denominator(max_denominator)
    if abs(float(frac) - x) > tol:
        return None
    return frac


def vec(values: Iterable) -> Vector:
    return tuple(as_fraction(v) for v in values)


def zero_vec(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vec(n: int, i: int) -> Vector:
    return tuple(Fraction(1) if k == i else Fraction(0) for k in range(n))


def vadd(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u: Vector) -> Vector:
    return tuple(c * a for a in u)


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple  # tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InputError(f"entry grid does not match shape {self.rows}x{self.cols}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        data = tuple(tuple(as_fraction(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RatMatrix":
        return cls(rows, cols, tuple((Fraction(0),) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, tuple(unit_vec(n, i) for i in range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int | None = None) -> "RatMatrix":
        if not columns:
            return cls.zeros(rows or 0, 0)
        n = len(columns[0])
        return cls.from_rows([[columns[j][i] for j in range(len(columns))] for i in range(n)])

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def column(self, j: int) -> Vector:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def row(self, i: int) -> Vector:
        return self.entries[i]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows, tuple(self.column(j) for j in range(self.cols)))

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise InputError(f"vector of length {len(v)} for matrix with {self.cols} columns")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.entries)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.column(j) for j in range(other.cols)]
        data = tuple(
            tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols)
            for r in self.entries
        )
        return RatMatrix(self.rows, other.cols, data)

    def _zip(self, other: "RatMatrix", op) -> "RatMatrix":
        if self.shape != other.shape:
            raise InputError(f"shape mismatch {self.shape} vs {other.shape}")
        data = tuple(tuple(op(a, b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        return RatMatrix(self.rows, self.cols, data)

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self) -> "RatMatrix":
        return self.scale(-1)

    def scale(self, c) -> "RatMatrix":
        c = as_fraction(c)
        return RatMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.entries for a in r)

    def with_entry(self, i: int, j: int, value) -> "RatMatrix":
        rows = [list(r) for r in self.entries]
        rows[i][j] = as_fraction(value)
        return RatMatrix.from_rows(rows, self.cols)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.entries]

    def to_float(self):
        import numpy as np

        return np.array([[float(a) for a in r] for r in self.entries], dtype=float).reshape(self.rows, self.cols)

    def __str__(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.entries) + "]"


def vstack(blocks: Sequence[RatMatrix], cols: int | None = None) -> RatMatrix:
    if not blocks:
        return RatMatrix.zeros(0, cols or 0)
    ncols = blocks[0].cols
    return RatMatrix(sum(b.rows for b in blocks), ncols, tuple(r for b in blocks for r in b.entries))


def bareiss_rank(m: RatMatrix) -> int:
    """Rank by fraction-free elimination.

    Each row is scaled by the lcm of its denominators so the elimination runs
    on Python integers; every intermediate is an exact integer minor.
    """
    a = []
    for r in m.entries:
        den = lcm(*(x.denominator for x in r)) if r else 1
        a.append([int(x * den) for x in r])
    nrows, ncols = m.rows, m.cols
    rank = 0
    prev = 1
    for col in range(ncols):
        if rank == nrows:
            break
        pivot = next((i for i in range(rank, nrows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, nrows):
            f = a[i][col]
            row = a[i]
            prow = a[rank]
            for j in range(col + 1, ncols):
                # exact division is guaranteed by Sylvester's identity
                row[j] = (p * row[j] - f * prow[j]) // prev
            row[col] = 0
        prev = p
        rank += 1
    return rank


def rref(m: RatMatrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = m.tolist()
    pivots: list[int] = []
    r = 0
    for c in range(m.cols):
        pivot = next((i for i in range(r, m.rows) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(m.rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m.rows:
            break
    return RatMatrix.from_rows(a, m.cols), pivots


def nullspace(m: RatMatrix) -> list[Vector]:
    """Basis of ``{v : m v = 0}``, one vector per free column."""
    red, pivots = rref(m)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -red[row, f]
        basis.append(tuple(v))
    return basis


def solve(m: RatMatrix, b: Sequence) -> Vector | None:
    """A particular solution of ``m x = b`` (free variables set to 0), or ``None``."""
    b = vec(b)
    if len(b) != m.rows:
        raise InputError(f"right-hand side of length {len(b)} for {m.rows} rows")
    aug = RatMatrix.from_rows([list(r) + [x] for r, x in zip(m.entries, b)], m.cols + 1)
    red, pivots = rref(aug)
    if m.cols in pivots:
        return None
    x = [Fraction(0)] * m.cols
    for row, pc in enumerate(pivots):
        x[pc] = red[row, m.cols]
    return tuple(x)
