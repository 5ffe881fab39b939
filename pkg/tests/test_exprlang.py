import math
import random

import pytest
import sympy
from hypothesis import given, strategies as st

from crossedhom import exprlang as ex
from crossedhom.exprlang import Add, BinOp, Call, Neg, Num, Pow, Var, parse, to_text

S = Var("s")

# ------------------------------------------------------------------ parsing


def test_parse_examples():
    assert parse("1 + s") == Add(Num(1.0), S)
    assert parse("-1 + s^3") == Add(Neg(Num(1.0)), Pow(S, Num(3.0)))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2*s+1", Add(BinOp("*", Num(2.0), S), Num(1.0))),
        ("s^2^3", Pow(S, Pow(Num(2.0), Num(3.0)))),
        ("-s^2", Neg(Pow(S, Num(2.0)))),
        ("s-1-2", BinOp("-", BinOp("-", S, Num(1.0)), Num(2.0))),
        ("s/2/4", BinOp("/", BinOp("/", S, Num(2.0)), Num(4.0))),
        ("2^-s", Pow(Num(2.0), Neg(S))),
        ("exp(-1/s^2)", Call("exp", BinOp("/", Neg(Num(1.0)), Pow(S, Num(2.0))))),
        ("1.5e-3*s", BinOp("*", Num(1.5e-3), S)),
    ],
)
def test_precedence(text, expected):
    assert parse(text) == expected


@pytest.mark.parametrize(
    "text, fragment",
    [("1 + ", "unexpected end"), ("(s + 1", ""), ("s + 1)", ""), ("foo(s)", "unknown"), ("t + 1", "unknown"), ("exp(s, s)", "")],
)
def test_syntax_errors(text, fragment):
    with pytest.raises(ex.ExprSyntaxError) as info:
        parse(text)
    assert fragment in str(info.value)
    assert info.value.offset >= 0


atoms = st.one_of(st.just(S), st.floats(0, 100, allow_nan=False).map(Num), st.integers(0, 9).map(lambda i: Num(float(i))))


def extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(ex.FUNCTIONS), children).map(lambda t: Call(*t)),
    )


exprs = st.recursive(atoms, extend, max_leaves=12)


@given(exprs)
def test_round_trip(e):
    assert parse(to_text(e)) == e


@given(exprs)
def test_print_parse_print(e):
    text = to_text(e)
    assert to_text(parse(text)) == text


# --------------------------------------------------------------- evaluation


def test_dual_examples():
    v = ex.eval_dual(parse("1 + s"), 2.0)
    assert (v.value, v.deriv) == (3.0, 1.0)
    v = ex.eval_dual(parse("s^3"), 0.0)
    assert (v.value, v.deriv) == (0.0, 0.0)


def test_flatbump_against_analytic():
    s = 0.5
    v = ex.eval_dual(parse("flatbump(s)"), s)
    assert v.value == pytest.approx(math.exp(-4), rel=1e-14)
    assert v.deriv == pytest.approx(2 * s**-3 * math.exp(-1 / s**2), rel=1e-14)
    z = ex.eval_dual(parse("flatbump(s)"), 0.0)
    assert (z.value, z.deriv) == (0.0, 0.0)


def test_domain_error_names_subexpression():
    with pytest.raises(ex.ExprEvalError, match="1 / s"):
        ex.evaluate(parse("exp(-1/s^2)"), 0.0)
    with pytest.raises(ex.ExprEvalError, match="ln"):
        ex.evaluate(parse("ln(s)"), -1.0)


@pytest.mark.parametrize(
    "text, sym",
    [
        ("exp(2*s)", sympy.exp(2 * sympy.Symbol("s"))),
        ("sin(s)*cos(s)", sympy.sin(sympy.Symbol("s")) * sympy.cos(sympy.Symbol("s"))),
        ("sqrt(1+s^2)", sympy.sqrt(1 + sympy.Symbol("s") ** 2)),
        ("ln(2+s)/(1+s)", sympy.log(2 + sympy.Symbol("s")) / (1 + sympy.Symbol("s"))),
        ("(1+s)^s", (1 + sympy.Symbol("s")) ** sympy.Symbol("s")),
    ],
)
def test_elementary_derivatives(text, sym):
    s = sympy.Symbol("s")
    for x in (-0.3, 0.1, 0.7):
        v = ex.eval_dual(parse(text), x)
        assert v.value == pytest.approx(float(sym.subs(s, x)), rel=1e-12)
        assert v.deriv == pytest.approx(float(sympy.diff(sym, s).subs(s, x)), rel=1e-12, abs=1e-14)


def random_polynomial(rng):
    coeffs = [rng.randint(-5, 5) for _ in range(rng.randint(1, 6))]
    text = " + ".join(f"({c})*s^{i}" for i, c in enumerate(coeffs))
    s = sympy.Symbol("s")
    return text, sum(c * s**i for i, c in enumerate(coeffs))


def test_fifty_random_polynomials_match_symbolic():
    rng = random.Random(7)
    s = sympy.Symbol("s")
    for _ in range(50):
        text, poly = random_polynomial(rng)
        node = parse(text)
        for x in (-1.0, -0.25, 0.5, 1.5):
            assert abs(ex.derivative(node, x) - float(sympy.diff(poly, s).subs(s, x))) < 1e-12


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=6), st.floats(-1, 1))
def test_polynomial_derivative_property(coeffs, x):
    s = sympy.Symbol("s")
    text = " + ".join(f"({c})*s^{i}" for i, c in enumerate(coeffs))
    poly = sum(c * s**i for i, c in enumerate(coeffs))
    assert abs(ex.derivative(parse(text), x) - float(sympy.diff(poly, s).subs(s, x))) < 1e-12


# ------------------------------------------------------------- derivatives at 0


def test_cubic_derivatives():
    node = parse("-1 + s^3")
    for n, expected in ((1, 0.0), (2, 0.0), (3, 6.0)):
        est = ex.nth_deriv_at_zero(node, n)
        assert abs(est.value - expected) <= max(est.error, 1e-9)
    assert ex.lowest_nonvanishing_order(node)[0] == 3


@pytest.mark.parametrize("m", range(1, 7))
def test_monomial_derivatives(m):
    node = parse(f"s^{m}")
    est = ex.nth_deriv_at_zero(node, m)
    assert est.value == pytest.approx(math.factorial(m), rel=1e-4)
    for n in range(1, m):
        low = ex.nth_deriv_at_zero(node, n)
        assert not low.is_nonzero()


def test_constant_and_flat():
    for n in range(1, 7):
        assert ex.nth_deriv_at_zero(parse("-1"), n).value == 0.0
        est = ex.nth_deriv_at_zero(parse("flatbump(s)"), n)
        assert est.flat and est.value == 0.0
    assert ex.lowest_nonvanishing_order(parse("-1 + flatbump(s)")) is None
    assert not ex.is_flat_at_zero(parse("-1"))  # constants alone are not reported as flat


@pytest.mark.parametrize(
    "text, flat",
    [
        ("flatbump(s)", True),
        ("-1 + flatbump(s)", True),  # constant plus flat
        ("s*flatbump(s)", True),
        ("flatbump(s)^2", True),
        ("flatbump(s)/s", True),
        ("1/flatbump(s)", False),
        ("flatbump(s)^s", False),
        ("flatbump(s) + s", False),
        ("s^3", False),
    ],
)
def test_structural_flatness(text, flat):
    assert ex.is_flat_at_zero(parse(text)) == flat


def test_order_out_of_range():
    with pytest.raises(ValueError):
        ex.nth_deriv_at_zero(parse("s"), 7)
