"""Expressions in one variable ``s`` for deformation parameters.

Grammar (precedence low to high; ``^`` is right-associative and binds tighter
than unary minus, so ``-s^2`` is ``-(s^2)``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | 's' | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := exp | ln | sqrt | sin | cos | flatbump

``flatbump(u)`` is exp(-1/u^2) for u != 0 and 0 at u = 0. It is the only way
to state a flat function: ``exp(-1/s^2)`` is a domain error at s = 0.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from math import comb
from typing import Union

FUNCTIONS = ("exp", "ln", "sqrt", "sin", "cos", "flatbump")
MAX_DERIV_ORDER = 6


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ExprEvalError(ArithmeticError):
    def __init__(self, message: str, node: "Expr"):
        super().__init__(f"{message} in '{to_text(node)}'")
        self.node = node


# ------------------------------------------------------------------- AST


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = "s"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]


def Add(a, b):
    return BinOp("+", a, b)


def Pow(a, b):
    return BinOp("^", a, b)


# ----------------------------------------------------------------- parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)

# binding power and right-associativity
_BINARY = {"+": (10, False), "-": (10, False), "*": (20, False), "/": (20, False), "^": (40, True)}
_UNARY_BP = 30


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.advance()
        if val != value:
            if kind == "end":
                raise ExprSyntaxError(f"expected '{value}' but input ended", pos)
            raise ExprSyntaxError(f"expected '{value}', found {val!r}", pos)

    def parse(self) -> Expr:
        node = self.expression(0)
        kind, val, pos = self.peek()
        if kind != "end":
            if val == ")":
                raise ExprSyntaxError("unbalanced ')'", pos)
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expression(self, min_bp: int) -> Expr:
        left = self.prefix()
        while True:
            kind, val, pos = self.peek()
            if kind != "op" or val not in _BINARY:
                break
            bp, right_assoc = _BINARY[val]
            if bp < min_bp:
                break
            self.advance()
            if val == "^":
                # exponent may carry its own unary minus: s^-2
                right = self.expression(_UNARY_BP)
            else:
                right = self.expression(bp if right_assoc else bp + 1)
            left = BinOp(val, left, right)
        return left

    def prefix(self) -> Expr:
        kind, val, pos = self.advance()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "-":
            return Neg(self.expression(_UNARY_BP))
        if kind == "op" and val == "(":
            inner = self.expression(0)
            kind2, val2, pos2 = self.peek()
            if val2 != ")":
                raise ExprSyntaxError("unbalanced '(': missing ')'", pos)
            self.advance()
            return inner
        if kind == "name":
            if val == "s":
                return Var("s")
            if val in FUNCTIONS:
                kind2, val2, pos2 = self.peek()
                if val2 != "(":
                    raise ExprSyntaxError(f"function '{val}' takes exactly one argument in parentheses", pos2)
                self.advance()
                if self.peek()[1] == ")":
                    raise ExprSyntaxError(f"function '{val}' takes exactly one argument", self.peek()[2])
                arg = self.expression(0)
                kind3, val3, pos3 = self.peek()
                if val3 == ",":
                    raise ExprSyntaxError(f"function '{val}' takes exactly one argument", pos3)
                if val3 != ")":
                    raise ExprSyntaxError("unbalanced '(': missing ')'", pos2)
                self.advance()
                return Call(val, arg)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "end":
            raise ExprSyntaxError("unexpected end of input", pos)
        raise ExprSyntaxError(f"unexpected {val!r}", pos)


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# ---------------------------------------------------------------- printer

_PREC = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}


def to_text(node: Expr) -> str:
    """Render so that ``parse(to_text(e)) == e``."""
    if isinstance(node, Num):
        v = node.value
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    if isinstance(node, Neg):
        inner = to_text(node.operand)
        if isinstance(node.operand, BinOp) and node.operand.op != "^":
            inner = f"({inner})"
        return f"-{inner}"
    p = _PREC[node.op]
    left = to_text(node.left)
    right = to_text(node.right)
    if node.op == "^":
        if isinstance(node.left, (BinOp, Neg)):
            left = f"({left})"
        if isinstance(node.right, BinOp) and node.right.op != "^":
            right = f"({right})"
        return f"{left}^{right}"
    if isinstance(node.left, BinOp) and _PREC[node.left.op] < p:
        left = f"({left})"
    if isinstance(node.right, BinOp) and _PREC[node.right.op] <= p:
        right = f"({right})"
    if isinstance(node.right, Neg):
        right = f"({right})"
    return f"{left} {node.op} {right}"


# ------------------------------------------------------------ dual numbers


@dataclass(frozen=True)
class DualValue:
    value: float
    deriv: float

    def __add__(self, o: "DualValue") -> "DualValue":
        return DualValue(self.value + o.value, self.deriv + o.deriv)

    def __sub__(self, o: "DualValue") -> "DualValue":
        return DualValue(self.value - o.value, self.deriv - o.deriv)

    def __mul__(self, o: "DualValue") -> "DualValue":
        return DualValue(self.value * o.value, self.value * o.deriv + self.deriv * o.value)

    def __truediv__(self, o: "DualValue") -> "DualValue":
        v = self.value / o.value
        return DualValue(v, (self.deriv - v * o.deriv) / o.value)

    def __neg__(self) -> "DualValue":
        return DualValue(-self.value, -self.deriv)


def _flatbump(u: float) -> tuple[float, float]:
    """Value and derivative of exp(-1/u^2)."""
    if u == 0.0:
        return 0.0, 0.0
    inv2 = 1.0 / (u * u)
    if inv2 > 745.0:
        return 0.0, 0.0
    v = math.exp(-inv2)
    return v, 2.0 * v / (u * u * u)


def _call_dual(func: str, x: DualValue, node: Expr) -> DualValue:
    u = x.value
    if func == "exp":
        try:
            v = math.exp(u)
        except OverflowError:
            raise ExprEvalError("overflow", node) from None
        return DualValue(v, v * x.deriv)
    if func == "ln":
        if u <= 0:
            raise ExprEvalError(f"ln of non-positive value {u}", node)
        return DualValue(math.log(u), x.deriv / u)
    if func == "sqrt":
        if u < 0 or (u == 0 and x.deriv != 0):
            raise ExprEvalError(f"sqrt not differentiable at {u}", node)
        v = math.sqrt(u)
        return DualValue(v, 0.0 if u == 0 else x.deriv / (2 * v))
    if func == "sin":
        return DualValue(math.sin(u), math.cos(u) * x.deriv)
    if func == "cos":
        return DualValue(math.cos(u), -math.sin(u) * x.deriv)
    if func == "flatbump":
        v, dv = _flatbump(u)
        return DualValue(v, dv * x.deriv)
    raise ExprEvalError(f"unknown function {func}", node)


def _pow_dual(base: DualValue, expo: DualValue, node: Expr) -> DualValue:
    u, c = base.value, expo.value
    try:
        if expo.deriv == 0.0 and c == 0:
            return DualValue(1.0, 0.0)
        if expo.deriv == 0.0:
            if u == 0.0:
                if c < 0:
                    raise ExprEvalError("division by zero", node)
                if c < 1 and base.deriv != 0:
                    raise ExprEvalError("power not differentiable at 0", node)
                return DualValue(0.0, c * (u ** (c - 1)) * base.deriv if c >= 1 else 0.0)
            if u < 0 and not float(c).is_integer():
                raise ExprEvalError(f"non-integer power of negative value {u}", node)
            v = u**c
            return DualValue(v, c * u ** (c - 1) * base.deriv)
        if u <= 0:
            raise ExprEvalError(f"variable exponent needs a positive base, got {u}", node)
        v = u**c
        return DualValue(v, v * (expo.deriv * math.log(u) + c * base.deriv / u))
    except OverflowError:
        raise ExprEvalError("overflow", node) from None


def eval_dual(node: Expr, s: float, seed: float = 1.0) -> DualValue:
    """Value and d/ds at ``s``."""
    if isinstance(node, Num):
        return DualValue(node.value, 0.0)
    if isinstance(node, Var):
        return DualValue(float(s), seed)
    if isinstance(node, Neg):
        return -eval_dual(node.operand, s, seed)
    if isinstance(node, Call):
        return _call_dual(node.func, eval_dual(node.arg, s, seed), node)
    a = eval_dual(node.left, s, seed)
    b = eval_dual(node.right, s, seed)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        if b.value == 0.0:
            raise ExprEvalError("division by zero", node)
        return a / b
    return _pow_dual(a, b, node)


def evaluate(node: Expr, s: float) -> float:
    return eval_dual(node, s, 0.0).value


def derivative(node: Expr, s: float) -> float:
    return eval_dual(node, s).deriv


# ------------------------------------------------------- flatness analysis

# classes: const, flat (all derivatives and value 0 at s=0), constflat
# (const + flat), general
_CONST, _FLAT, _CONSTFLAT, _GENERAL = "const", "flat", "constflat", "general"


def _jet_class(node: Expr) -> str:
    if isinstance(node, Num):
        return _CONST
    if isinstance(node, Var):
        return _GENERAL
    if isinstance(node, Neg):
        return _jet_class(node.operand)
    if isinstance(node, Call):
        inner = _jet_class(node.arg)
        if node.func == "flatbump":
            if inner in (_CONST, _CONSTFLAT):
                return inner if _value0(node.arg) != 0 else _FLAT
            try:
                at0 = evaluate(node.arg, 0.0)
            except ExprEvalError:
                return _GENERAL
            return _FLAT if at0 == 0.0 else _GENERAL
        if inner == _FLAT:
            return _CONSTFLAT
        return inner
    lc, rc = _jet_class(node.left), _jet_class(node.right)
    trivial = (_CONST, _FLAT, _CONSTFLAT)
    if node.op in "+-":
        if lc == rc and lc in trivial:
            return lc
        if lc in trivial and rc in trivial:
            return _CONSTFLAT
        return _GENERAL
    if node.op == "*":
        if _FLAT in (lc, rc):
            return _FLAT
        if lc in trivial and rc in trivial:
            return _CONST if lc == rc == _CONST else _CONSTFLAT
        return _GENERAL
    if node.op == "/":
        if rc == _FLAT:
            return _GENERAL
        if lc == _FLAT:
            return _FLAT
        if lc in trivial and rc in trivial:
            return _CONST if lc == rc == _CONST else _CONSTFLAT
        return _GENERAL
    # power
    if lc == _FLAT:
        return _FLAT if rc == _CONST and _value0(node.right) > 0 else _GENERAL
    if lc in trivial and rc in trivial:
        return _CONST if lc == rc == _CONST else _CONSTFLAT
    return _GENERAL


def _value0(node: Expr) -> float:
    try:
        return evaluate(node, 0.0)
    except ExprEvalError:
        return float("nan")


def contains_flatbump(node: Expr) -> bool:
    if isinstance(node, Call):
        return node.func == "flatbump" or contains_flatbump(node.arg)
    if isinstance(node, Neg):
        return contains_flatbump(node.operand)
    if isinstance(node, BinOp):
        return contains_flatbump(node.left) or contains_flatbump(node.right)
    return False


def is_flat_at_zero(node: Expr) -> bool:
    """Structural test: the expression is a constant plus a flat function at 0.

    Only flatness introduced by ``flatbump`` is recognised; constants do not
    count as flat.
    """
    return contains_flatbump(node) and _jet_class(node) in (_FLAT, _CONSTFLAT)


def is_constant(node: Expr) -> bool:
    return _jet_class(node) == _CONST


# --------------------------------------------------- higher derivatives at 0


@dataclass(frozen=True)
class DerivEstimate:
    order: int
    value: float
    error: float
    flat: bool = False

    def is_nonzero(self, threshold: float = 1e-6) -> bool:
        return not self.flat and abs(self.value) > max(threshold, 10.0 * self.error)


def _central(node: Expr, n: int, h: float) -> float:
    total = 0.0
    for j in range(n + 1):
        total += (-1) ** j * comb(n, j) * evaluate(node, (n / 2 - j) * h)
    return total / h**n


# larger steps for higher orders keep rounding (~eps / h^n) under control
_STEPS = {1: 1e-3, 2: 2e-3, 3: 4e-3, 4: 6e-3, 5: 8e-3, 6: 1e-2}


def nth_deriv_at_zero(node: Expr, n: int) -> DerivEstimate:
    """n-th derivative at s = 0 by central differences with one Richardson level."""
    if not 1 <= n <= MAX_DERIV_ORDER:
        raise ValueError(f"derivative order must be in 1..{MAX_DERIV_ORDER}")
    if is_flat_at_zero(node) or is_constant(node):
        return DerivEstimate(n, 0.0, 0.0, flat=is_flat_at_zero(node))
    h = _STEPS[n]
    d1 = _central(node, n, h)
    d2 = _central(node, n, h / 2)
    rich = (4.0 * d2 - d1) / 3.0
    scale = max(abs(evaluate(node, x * h)) for x in (-n / 2, 0.0, n / 2)) + 1.0
    rounding = 2.0**n * 2.2e-16 * scale / (h / 2) ** n
    error = abs(rich - d2) / 3.0 + rounding
    return DerivEstimate(n, rich, error)


def lowest_nonvanishing_order(node: Expr, max_order: int = MAX_DERIV_ORDER, threshold: float = 1e-6):
    """First n >= 1 with a clearly nonzero derivative at 0, else ``None``."""
    if is_flat_at_zero(node):
        return None
    for n in range(1, max_order + 1):
        est = nth_deriv_at_zero(node, n)
        if est.is_nonzero(threshold):
            return n, est
    return None

