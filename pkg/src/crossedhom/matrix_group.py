"""The group G of 2x2 upper-triangular matrices [[a, b], [0, 1/a]], a > 0.

Its Lie algebra h = g is spanned by e1 = diag(1, -1) and e2 = E12, and a
vector x*e1 + y*e2 is the matrix [[x, y], [0, -x]]. G acts on itself by
conjugation. Crossed homomorphisms D: G -> G for that action satisfy
D(gh) = D(g) g D(h) g^{-1} and come in three families (see ``eval_family``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence, Union

import numpy as np

from .numdiff import central_diff, mixed_second
from .errors import InputError

E = math.e
GRID_A = (0.5, 1.0, 2.0, E, 5.0)
GRID_B = (-2.0, -1.0, 0.0, 1.0, 3.0)
PAIR_STRIDE = 6
N_PAIRS = 100


@dataclass(frozen=True)
class UT2Element:
    a: float
    b: float

    def __post_init__(self):
        if not self.a > 0:
            raise InputError(f"group element needs a > 0, got a={self.a}")

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [0.0, 1.0 / self.a]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "UT2Element":
        return cls(float(m[0, 0]), float(m[0, 1]))

    def __mul__(self, other: "UT2Element") -> "UT2Element":
        return group_mul(self, other)

    def inverse(self) -> "UT2Element":
        return group_inv(self)


IDENTITY = UT2Element(1.0, 0.0)


@dataclass(frozen=True)
class HVector:
    x: float
    y: float

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y], dtype=dtype or float)

    def matrix(self) -> np.ndarray:
        return np.array([[self.x, self.y], [0.0, -self.x]])

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "HVector":
        return cls(float(m[0, 0]), float(m[0, 1]))


Vec = Union[HVector, Sequence[float], np.ndarray]


def group_mul(g1: UT2Element, g2: UT2Element) -> UT2Element:
    return UT2Element(g1.a * g2.a, g1.a * g2.b + g1.b / g2.a)


def group_inv(g: UT2Element) -> UT2Element:
    return UT2Element(1.0 / g.a, -g.b)


def conj_action(g: UT2Element, h: UT2Element) -> UT2Element:
    return g * h * g.inverse()


def h_coords(m: np.ndarray) -> np.ndarray:
    """Coordinates of a traceless upper-triangular matrix in (e1, e2)."""
    return np.array([m[0, 0], m[0, 1]])


def adjoint(g: UT2Element, u: Vec) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    m = g.matrix() @ HVector(u[0], u[1]).matrix() @ g.inverse().matrix()
    return h_coords(m)


def adjoint_matrix(g: UT2Element) -> np.ndarray:
    """Ad(g) in (e1, e2) coordinates: [[1, 0], [-2ab, a^2]]."""
    return np.array([[1.0, 0.0], [-2.0 * g.a * g.b, g.a * g.a]])


def ad_matrix(u: Vec) -> np.ndarray:
    """ad_u for the bracket [e1, e2] = 2 e2."""
    x, y = np.asarray(u, dtype=float)
    return np.array([[0.0, 0.0], [-2.0 * y, 2.0 * x]])


def exp_curve(u: Vec, t: float, proof_curve: bool = False) -> UT2Element:
    """exp(t u) in closed form; ``proof_curve`` uses (e^{tx}, t y) instead.

    Both curves have the same tangent at t = 0; they differ at O(t^2).
    """
    x, y = (float(c) for c in np.asarray(u, dtype=float))
    if proof_curve:
        return UT2Element(math.exp(t * x), t * y)
    if x == 0.0:
        return UT2Element(1.0, t * y)
    return UT2Element(math.exp(t * x), y * math.sinh(t * x) / x)


# ---------------------------------------------------------------- families


@dataclass(frozen=True)
class Gamma1:
    """D(a, b) = (1/a, -b + q a ln a); q = 0 is the inverse map."""

    q: float
    tag = "g1"


@dataclass(frozen=True)
class Gamma2:
    """D(a, b) = (1, mu a b + lam/2 (a^2 - 1))."""

    mu: float
    lam: float
    tag = "g2"


@dataclass(frozen=True)
class Gamma3:
    """D(a, b) = (a^p, q (a^{2+p} - a^{-p}) / (2(p+1)) - b a^{1+p}), p not in {0, -1}."""

    p: float
    q: float
    tag = "g3"

    def __post_init__(self):
        if self.p == 0 or self.p == -1:
            raise InputError(f"Gamma3 requires p not in {{0, -1}}, got p={self.p}")


FamilySpec = Union[Gamma1, Gamma2, Gamma3]


def eval_family(F: FamilySpec, g: UT2Element) -> UT2Element:
    a, b = g.a, g.b
    if isinstance(F, Gamma1):
        return UT2Element(1.0 / a, -b + F.q * a * math.log(a))
    if isinstance(F, Gamma2):
        return UT2Element(1.0, F.mu * a * b + F.lam / 2.0 * (a * a - 1.0))
    if isinstance(F, Gamma3):
        p, q = F.p, F.q
        return UT2Element(a**p, q * (a ** (2 + p) - a ** (-p)) / (2 * (p + 1)) - b * a ** (1 + p))
    raise InputError(f"unknown family {F!r}")


def family_map(F: FamilySpec) -> Callable[[UT2Element], UT2Element]:
    return lambda g: eval_family(F, g)


def family_from_params(tag: str, **params) -> FamilySpec:
    tag = tag.lower()
    if tag == "g1":
        return Gamma1(float(params["q"]))
    if tag == "g2":
        return Gamma2(float(params["mu"]), float(params["lam"]))
    if tag == "g3":
        return Gamma3(float(params["p"]), float(params["q"]))
    raise InputError(f"unknown family tag {tag!r}; expected g1, g2 or g3")


def expected_tangent(F: FamilySpec) -> np.ndarray:
    """Algebra crossed homomorphism of each family, columns d(e1), d(e2)."""
    if isinstance(F, Gamma1):
        return np.array([[-1.0, 0.0], [F.q, -1.0]])
    if isinstance(F, Gamma2):
        return np.array([[0.0, 0.0], [F.lam, F.mu]])
    return np.array([[F.p, 0.0], [F.q, -1.0]])


# ------------------------------------------------------------------- grids


def default_elements() -> list[UT2Element]:
    return [UT2Element(a, b) for a, b in product(GRID_A, GRID_B)]


def default_pairs(dense: bool = False) -> list[tuple[UT2Element, UT2Element]]:
    """All 625 pairs of the 25-element grid, or every 6th pair (first 100)."""
    pairs = list(product(default_elements(), repeat=2))
    if dense:
        return pairs
    return pairs[::PAIR_STRIDE][:N_PAIRS]


def random_elements(rng: np.random.Generator, n: int, a_range=(0.2, 5.0), b_range=(-5.0, 5.0)) -> list[UT2Element]:
    return [UT2Element(float(a), float(b)) for a, b in zip(rng.uniform(*a_range, n), rng.uniform(*b_range, n))]


# ------------------------------------------------------------------ checks


def check_crossed_hom_group(D: Callable[[UT2Element], UT2Element], samples=None) -> float:
    """max over pairs of |D(gh) - D(g) g D(h) g^{-1}| (entrywise)."""
    if samples is None:
        samples = default_pairs()
    worst = 0.0
    for g, h in samples:
        lhs = D(g * h).matrix()
        rhs = D(g).matrix() @ g.matrix() @ D(h).matrix() @ g.inverse().matrix()
        worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst


def scaled_residual(lhs, rhs) -> float:
    """max |lhs - rhs| divided by max(1, max |lhs|, max |rhs|).

    Equals the absolute residual whenever the entries are O(1); for large
    entries (Gamma3 with p >= 2 reaches ~1e8 at a = 5) it is the error
    relative to the magnitude actually being compared.
    """
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    scale = max(1.0, float(np.abs(lhs).max(initial=0.0)), float(np.abs(rhs).max(initial=0.0)))
    return float(np.abs(lhs - rhs).max(initial=0.0)) / scale


def tilde_theta(g: UT2Element) -> np.ndarray:
    """Derivative of conjugation by g at the identity, i.e. Ad(g)."""
    return adjoint_matrix(g)


def theta_D(F: FamilySpec, g: UT2Element) -> np.ndarray:
    """Ad(D(g)) Ad(g), the representation of G on h twisted by D."""
    return adjoint_matrix(eval_family(F, g)) @ tilde_theta(g)


def theta_D_of(D: Callable[[UT2Element], UT2Element], g: UT2Element) -> np.ndarray:
    return adjoint_matrix(D(g)) @ tilde_theta(g)


def tangent_of_curve(curve: Callable[[float], UT2Element]) -> np.ndarray:
    """h-coordinates of d/ds curve(s) at s = 0 for a curve through the identity."""
    return central_diff(lambda s: np.array([curve(s).a, curve(s).b]))


def tangent_map(F: FamilySpec, proof_curve: bool = False) -> np.ndarray:
    cols = []
    for u in ((1.0, 0.0), (0.0, 1.0)):
        cols.append(tangent_of_curve(lambda s, u=u: eval_family(F, exp_curve(u, s, proof_curve))))
    return np.column_stack(cols)


def twisted_rep_float(d: np.ndarray, x: Vec) -> np.ndarray:
    """theta_d(x) = ad_x + ad_{d x} for the adjoint action, floats."""
    x = np.asarray(x, dtype=float)
    return ad_matrix(x) + ad_matrix(d @ x)


def theta_D_derivative(F: FamilySpec, x: Vec) -> np.ndarray:
    return central_diff(lambda s: theta_D(F, exp_curve(x, s)))


# ------------------------------------------------------- group coboundaries


def group_coboundary(rep: Callable[[UT2Element], np.ndarray], alpha, k: int) -> Callable:
    """d alpha for a k-cochain; for k = 0, ``alpha`` is a constant vector."""
    if k == 0:
        w = np.asarray(alpha, dtype=float)
        return lambda g: rep(g) @ w - w

    def d_alpha(*gs):
        if len(gs) != k + 1:
            raise InputError(f"expected {k + 1} group arguments")
        total = rep(gs[0]) @ np.asarray(alpha(*gs[1:]), dtype=float)
        total = total + (-1) ** (k + 1) * np.asarray(alpha(*gs[:k]), dtype=float)
        for i in range(k):
            merged = gs[:i] + (gs[i] * gs[i + 1],) + gs[i + 2:]
            total = total + (-1) ** (i + 1) * np.asarray(alpha(*merged), dtype=float)
        return total

    return d_alpha


def group_coboundary0(F: FamilySpec, w: Vec, g: UT2Element) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    return theta_D(F, g) @ w - w


def group_coboundary1(F: FamilySpec, alpha: Callable, g1: UT2Element, g2: UT2Element) -> np.ndarray:
    return theta_D(F, g1) @ np.asarray(alpha(g2)) - np.asarray(alpha(g1 * g2)) + np.asarray(alpha(g1))


# ----------------------------------------------------------------- van Est


def van_est1(c: Callable[[UT2Element], np.ndarray], x: Vec, F: FamilySpec | None = None) -> np.ndarray:
    """d/dt c(exp(t x)) at t = 0."""
    return central_diff(lambda t: np.asarray(c(exp_curve(x, t)), dtype=float))


def van_est2(c: Callable[[UT2Element, UT2Element], np.ndarray], x1: Vec, x2: Vec, F: FamilySpec | None = None) -> np.ndarray:
    """Antisymmetrised mixed derivative of c(exp(t1 x1), exp(t2 x2))."""
    direct = mixed_second(lambda t1, t2: c(exp_curve(x1, t1), exp_curve(x2, t2)))
    swapped = mixed_second(lambda t1, t2: c(exp_curve(x2, t2), exp_curve(x1, t1)))
    return direct - swapped


def ce_coboundary1_float(d: np.ndarray, alpha1: Callable[[np.ndarray], np.ndarray], x1: Vec, x2: Vec) -> np.ndarray:
    """(d_CE alpha)(x1, x2) for a linear 1-cochain given as a function on g."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    br = ad_matrix(x1) @ x2
    return twisted_rep_float(d, x1) @ alpha1(x2) - twisted_rep_float(d, x2) @ alpha1(x1) - alpha1(br)
