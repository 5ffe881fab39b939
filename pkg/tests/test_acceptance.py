"""Acceptance criteria 1-9, one test each; every test prints a PASS/FAIL line."""

import random
from fractions import Fraction

import pytest
import sympy

from crossedhom import exprlang as ex
from crossedhom import section4 as s4
from crossedhom.algebra_core import LieAlgebraSpec, ad_matrix, bracket
from crossedhom.ratlinalg import RatMatrix, bareiss_rank, nullspace

SEED = 20240601
N_PROPERTY = 200


@pytest.fixture
def report(capsys):
    def emit(number, title, checks):
        ok = all(c.passed for c in checks)
        worst = [c for c in checks if c.residual is not None]
        extra = f" (worst {max(c.residual for c in worst):.2e})" if worst else ""
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}{extra}")
            for c in checks:
                if not c.passed:
                    print(f"         failing: {c.name} residual={c.residual} tol={c.tolerance} {c.detail}")
        assert ok, [c.name for c in checks if not c.passed]

    return emit


@pytest.fixture(scope="module")
def cfg():
    return s4.Section4Config()


def test_criterion_1_classification(report, cfg):
    report(1, "group families on 100 pairs < 1e-9, algebra families exact on 20x20", s4.criterion_1(cfg))


def test_criterion_2_tangents(report, cfg):
    report(2, "tangent maps match the classification within 1e-6", s4.criterion_2(cfg))


def test_criterion_3_complex(report, cfg):
    report(3, "d∘d = 0 exactly (algebra) and < 1e-9 (group)", s4.criterion_3(cfg))


def test_criterion_4_representation(report, cfg):
    report(4, "Theta_D multiplicative < 1e-9, derivative = theta_d within 1e-5", s4.criterion_4(cfg))


def test_criterion_5_cocycles(report, cfg):
    report(5, "dhat numeric vs closed < 1e-5, cocycle identity < 1e-6", s4.criterion_5(cfg))


def test_criterion_6_verdict_table(report, cfg):
    report(6, "rigidity verdicts match the expected table", s4.criterion_6(cfg))


def test_criterion_7_moser(report, cfg):
    report(7, "Moser flow gauges < 1e-6, closed form within 1e-6", s4.criterion_7(cfg))


def test_criterion_8_van_est(report, cfg):
    report(8, "van Est degree 0->1 within 1e-5", s4.criterion_8(cfg))


# ------------------------------------------------------------ criterion 9


def _random_algebra(rng):
    """Random member of a few 3-dimensional Lie algebra families."""
    lam = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
    kind = rng.choice(["r3", "heisenberg", "sl2", "borel+abelian"])
    if kind == "r3":
        return LieAlgebraSpec.from_brackets(3, {(2, 0): (1, 0, 0), (2, 1): (0, lam, 0)})
    if kind == "heisenberg":
        return LieAlgebraSpec.from_brackets(3, {(0, 1): (0, 0, lam or 1)})
    if kind == "sl2":
        return LieAlgebraSpec.from_brackets(3, {(0, 1): (0, 2, 0), (0, 2): (0, 0, -2), (1, 2): (1, 0, 0)})
    return LieAlgebraSpec.from_brackets(3, {(0, 1): (0, lam or 1, 0)})


def _rand_vec(rng, n):
    return tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n))


def _algebra_invariants(rng):
    A = _random_algebra(rng)
    u, v, w = (_rand_vec(rng, 3) for _ in range(3))
    anti = bracket(A, u, v) == tuple(-x for x in bracket(A, v, u))
    jac = [Fraction(0)] * 3
    for x, y, z in ((u, v, w), (v, w, u), (w, u, v)):
        jac = [a + b for a, b in zip(jac, bracket(A, bracket(A, x, y), z))]
    ad = ad_matrix(A, u)
    der = ad.apply(bracket(A, v, w)) == tuple(
        a + b for a, b in zip(bracket(A, ad.apply(v), w), bracket(A, v, ad.apply(w)))
    )
    return anti and not any(jac) and der


def _rank_nullity(rng):
    r, c = rng.randint(1, 6), rng.randint(1, 6)
    rank_target = rng.randint(0, min(r, c))
    # product of random factors gives matrices of controlled rank
    left = [[Fraction(rng.randint(-4, 4)) for _ in range(rank_target)] for _ in range(r)]
    right = [[Fraction(rng.randint(-4, 4)) for _ in range(c)] for _ in range(rank_target)]
    rows = [[sum((left[i][k] * right[k][j] for k in range(rank_target)), Fraction(0)) for j in range(c)] for i in range(r)]
    m = RatMatrix.from_rows(rows, c)
    expected = sympy.Matrix(rows).rank() if rank_target else 0
    return bareiss_rank(m) == expected and bareiss_rank(m) + len(nullspace(m)) == c


def _random_ast(rng, depth=0):
    roll = rng.random()
    if depth > 3 or roll < 0.3:
        return ex.Var("s") if rng.random() < 0.5 else ex.Num(float(rng.choice([0, 1, 2, 3.5, 0.25, 10])))
    if roll < 0.4:
        return ex.Neg(_random_ast(rng, depth + 1))
    if roll < 0.55:
        return ex.Call(rng.choice(ex.FUNCTIONS), _random_ast(rng, depth + 1))
    return ex.BinOp(rng.choice("+-*/^"), _random_ast(rng, depth + 1), _random_ast(rng, depth + 1))


def _round_trip(rng):
    e = _random_ast(rng)
    return ex.parse(ex.to_text(e)) == e


def _poly_derivative(rng):
    s = sympy.Symbol("s")
    coeffs = [rng.randint(-5, 5) for _ in range(rng.randint(1, 6))]
    text = " + ".join(f"({c})*s^{i}" for i, c in enumerate(coeffs))
    poly = sum(c * s**i for i, c in enumerate(coeffs))
    x = rng.uniform(-1, 1)
    return abs(ex.derivative(ex.parse(text), x) - float(sympy.diff(poly, s).subs(s, x))) < 1e-12


def test_criterion_9_property_suite(report):
    rng = random.Random(SEED)
    checks = []
    for name, prop in (
        ("Jacobi/derivation/antisymmetry", _algebra_invariants),
        ("rank-nullity", _rank_nullity),
        ("parser round-trip", _round_trip),
        ("dual vs symbolic derivative < 1e-12", _poly_derivative),
    ):
        failures = sum(1 for _ in range(N_PROPERTY) if not prop(rng))
        checks.append(s4.Check(f"9 {name}", failures == 0, None, None, f"{failures}/{N_PROPERTY} failures"))
    report(9, f"property suite on {N_PROPERTY} randomized instances per property", checks)
