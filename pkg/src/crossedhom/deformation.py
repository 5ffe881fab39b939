"""Deformations of the crossed homomorphisms on G and their rigidity.

A deformation path keeps the family of its base point and only moves the
parameters (family Gamma1: f(s); Gamma2: k(s), m(s); Gamma3: g(s), h(s)).
The deformation cocycle is the right-translated s-derivative

    dhat_s(a) = (d/ds D_s(a)) D_s(a)^{-1}   (as an element of h),

and a gauge is a curve tau(s) with D_s(a) = tau(s) D(a) a tau(s)^{-1} a^{-1}.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np

from . import exprlang as ex
from .errors import FlowError, InputError, PathError
from .matrix_group import (
    E,
    FamilySpec,
    Gamma1,
    Gamma2,
    Gamma3,
    IDENTITY,
    UT2Element,
    check_crossed_hom_group,
    default_elements,
    default_pairs,
    eval_family,
    group_coboundary1,
    h_coords,
    theta_D,
)
from .numdiff import central_diff

PARAM_NAMES = {"g1": ("f",), "g2": ("k", "m"), "g3": ("g", "h")}
ZERO_TOL = 1e-9
N_S_SAMPLES = 41
N_G3_SAMPLES = 101
G3_MARGIN = 1e-6
GAUGE_TOL = 1e-6
DEFAULT_EPS = 0.5


@dataclass(frozen=True)
class DeformationPath:
    family: str
    params: dict = field(default_factory=dict)  # name -> Expr
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if self.family not in PARAM_NAMES:
            raise InputError(f"unknown family {self.family!r}; expected one of g1, g2, g3")
        missing = [n for n in PARAM_NAMES[self.family] if n not in self.params]
        if missing:
            raise InputError(f"family {self.family} needs parameter(s) {', '.join(missing)}")
        if not self.eps > 0:
            raise InputError("eps must be positive")

    @classmethod
    def from_strings(cls, family: str, eps: float = DEFAULT_EPS, **texts: str) -> "DeformationPath":
        family = family.lower()
        names = PARAM_NAMES.get(family, ())
        params = {}
        for name in names:
            if name not in texts:
                raise InputError(f"family {family} needs parameter {name}")
            params[name] = ex.parse(str(texts[name]))
        return cls(family, params, float(eps))

    def text(self, name: str) -> str:
        return ex.to_text(self.params[name])

    def value(self, name: str, s: float) -> float:
        return ex.evaluate(self.params[name], s)

    def dual(self, name: str, s: float) -> ex.DualValue:
        return ex.eval_dual(self.params[name], s)

    def to_json(self) -> dict:
        out = {"family": self.family}
        out.update({n: self.text(n) for n in PARAM_NAMES[self.family]})
        out["eps"] = self.eps
        return out


def path_from_json(data) -> DeformationPath:
    """``{"family": "g2", "k": "s", "m": "0", "eps": 0.5}``."""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict) or "family" not in data:
        raise InputError("deformation JSON needs a 'family' field")
    family = str(data["family"]).lower()
    texts = {n: data[n] for n in PARAM_NAMES.get(family, ()) if n in data}
    return DeformationPath.from_strings(family, float(data.get("eps", DEFAULT_EPS)), **texts)


def s_grid(eps: float, n: int = N_S_SAMPLES) -> np.ndarray:
    """n equispaced points strictly inside (-eps, eps)."""
    return np.linspace(-eps, eps, n + 2)[1:-1]


def family_at(P: DeformationPath, s: float) -> FamilySpec:
    try:
        if P.family == "g1":
            return Gamma1(P.value("f", s))
        if P.family == "g2":
            return Gamma2(P.value("k", s), P.value("m", s))
        g = P.value("g", s)
        if abs(g) <= G3_MARGIN or abs(g + 1) <= G3_MARGIN:
            raise PathError(f"Gamma3 parameter g(s)={g} hits the excluded set {{0, -1}} at s={s}")
        return Gamma3(g, P.value("h", s))
    except ex.ExprEvalError as exc:
        raise PathError(f"parameter not evaluable at s={s}: {exc}") from exc


def base_family(P: DeformationPath) -> FamilySpec:
    return family_at(P, 0.0)


def validate_path(P: DeformationPath) -> None:
    """Evaluate the base point; for Gamma3 also keep g(s) away from {0, -1}.

    A sign change of g or g + 1 between neighbouring samples is a crossing
    even when no sample lands within the margin.
    """
    base_family(P)
    if P.family == "g3":
        prev = None
        for s in s_grid(P.eps, N_G3_SAMPLES):
            F = family_at(P, float(s))
            if prev is not None:
                for shift in (0.0, 1.0):
                    if (prev.p + shift) * (F.p + shift) < 0:
                        raise PathError(f"Gamma3 parameter g(s) crosses {-int(shift)} before s={float(s):g}")
            prev = F


def eval_path(P: DeformationPath, g: UT2Element, s: float) -> UT2Element:
    return eval_family(family_at(P, s), g)


# ------------------------------------------------------------- the cocycle


def dhat_closed(P: DeformationPath, g: UT2Element, s: float) -> np.ndarray:
    a, b = g.a, g.b
    la = math.log(a)
    try:
        if P.family == "g1":
            return np.array([0.0, P.dual("f", s).deriv * la])
        if P.family == "g2":
            k, m = P.dual("k", s), P.dual("m", s)
            return np.array([0.0, k.deriv * a * b + m.deriv / 2 * (a * a - 1)])
        family_at(P, s)
        gg, hh = P.dual("g", s), P.dual("h", s)
    except ex.ExprEvalError as exc:
        raise PathError(str(exc)) from exc
    p, dp, q, dq = gg.value, gg.deriv, hh.value, hh.deriv
    grow = a ** (2 + 2 * p) - 1
    y = q * dp * la / (p + 1) + dq * grow / (2 * p + 2) - 2 * q * dp * grow / (2 * p + 2) ** 2
    return np.array([dp * la, y])


def right_log_derivative(curve: Callable[[float], np.ndarray], s: float) -> np.ndarray:
    """h-coordinates of M'(s) M(s)^{-1} for a matrix-valued curve M."""
    dm = central_diff(curve, s)
    return h_coords(dm @ np.linalg.inv(curve(s)))


def dhat_numeric(P: DeformationPath, g: UT2Element, s: float) -> np.ndarray:
    return right_log_derivative(lambda t: eval_path(P, g, t).matrix(), s)


def cocycle_residual(P: DeformationPath, s: float, pairs=None, dhat=dhat_closed) -> float:
    """max |d^{D_s} dhat_s (g1, g2)| over pairs."""
    F = family_at(P, s)
    pairs = default_pairs() if pairs is None else pairs
    alpha = lambda g: dhat(P, g, s)  # noqa: E731
    return max(float(np.abs(group_coboundary1(F, alpha, g1, g2)).max()) for g1, g2 in pairs)


# ------------------------------------------------------------------ kappa


@dataclass(frozen=True)
class KappaSolution:
    kappa: np.ndarray | None
    free: tuple = ()
    reason: str = ""

    @property
    def ok(self) -> bool:
        return self.kappa is not None


def solve_kappa(P: DeformationPath, s: float) -> KappaSolution:
    """0-cochain kappa(s) with d^{D_s} kappa = dhat_s, free components set to 0."""
    try:
        if P.family == "g1":
            f = P.dual("f", s)
            if abs(f.value) > ZERO_TOL:
                return KappaSolution(np.array([-f.deriv / (2 * f.value), 0.0]), ("kappa2",))
            if abs(f.deriv) <= ZERO_TOL:
                return KappaSolution(np.zeros(2), ("kappa1", "kappa2"))
            return KappaSolution(None, reason=f"f({s:g})=0 while f'({s:g})={f.deriv:g}: f' + 2 kappa1 f = 0 has no solution")
        if P.family == "g2":
            k, m = P.dual("k", s), P.dual("m", s)
            if abs(k.value + 1) > ZERO_TOL:
                k1 = -k.deriv / (2 * (k.value + 1))
                return KappaSolution(np.array([k1, m.deriv / 2 + m.value * k1]))
            if abs(k.deriv) <= ZERO_TOL:
                return KappaSolution(np.array([0.0, m.deriv / 2]), ("kappa1",))
            return KappaSolution(None, reason=f"k({s:g})=-1 while k'({s:g})={k.deriv:g}: 2(k+1) kappa1 = -k' has no solution")
        F = family_at(P, s)
        gg, hh = P.dual("g", s), P.dual("h", s)
    except ex.ExprEvalError as exc:
        raise PathError(str(exc)) from exc
    if abs(gg.deriv) > ZERO_TOL:
        return KappaSolution(None, reason=f"g'({s:g})={gg.deriv:g} != 0: the e1-component of dhat is not a coboundary")
    return KappaSolution(np.array([0.0, hh.deriv / (2 * (F.p + 1))]), ("kappa1",))


def kappa_coboundary(P: DeformationPath, kappa: np.ndarray, g: UT2Element, s: float) -> np.ndarray:
    return theta_D(family_at(P, s), g) @ kappa - kappa


def kappa_matrix(kappa: np.ndarray) -> np.ndarray:
    return np.array([[kappa[0], kappa[1]], [0.0, -kappa[0]]])


# ------------------------------------------------------------------- gauges


def gauge_apply(D: FamilySpec, tau: UT2Element, g: UT2Element) -> UT2Element:
    """tau D(g) g tau^{-1} g^{-1}."""
    return tau * eval_family(D, g) * g * tau.inverse() * g.inverse()


def gauge_s_grid(P: DeformationPath, n: int = 21) -> np.ndarray:
    return np.linspace(-P.eps / 2, P.eps / 2, n)


def gauge_verify(P: DeformationPath, tau: Callable[[float], UT2Element], s_values=None, elements=None) -> float:
    """max entrywise |D_s(g) - tau(s) D(g) g tau(s)^{-1} g^{-1}| over the grids."""
    t0 = tau(0.0)
    if abs(t0.a - 1) > 1e-12 or abs(t0.b) > 1e-12:
        raise InputError(f"gauge must start at the identity, got tau(0)=({t0.a}, {t0.b})")
    s_values = gauge_s_grid(P) if s_values is None else s_values
    elements = default_elements() if elements is None else elements
    D = base_family(P)
    worst = 0.0
    for s in s_values:
        t = tau(float(s))
        for g in elements:
            diff = eval_path(P, g, float(s)).matrix() - gauge_apply(D, t, g).matrix()
            worst = max(worst, float(np.abs(diff).max()))
    return worst


def closed_form_gauge(P: DeformationPath) -> tuple[str, Callable[[float], UT2Element], Callable[[float], bool]] | None:
    """(description, tau, valid(s)) for the trivial cases, else ``None``."""
    if P.family == "g1":
        f0 = P.value("f", 0.0)
        if abs(f0) <= ZERO_TOL:
            return None
        return (
            "tau(s) = (sqrt(f(s)/f(0)), 0)",
            lambda s: UT2Element(math.sqrt(P.value("f", s) / f0), 0.0),
            lambda s: P.value("f", s) / f0 > 0,
        )
    if P.family == "g2":
        k0, m0 = P.value("k", 0.0), P.value("m", 0.0)
        if abs(k0 + 1) > ZERO_TOL:
            def tau(s):
                ks, ms = P.value("k", s), P.value("m", s)
                r = math.sqrt((ks + 1) / (k0 + 1))
                return UT2Element(r, (-ms * (k0 + 1) + m0 * (ks + 1)) / (2 * math.sqrt((k0 + 1) * (ks + 1))))

            return (
                "tau(s) = (sqrt((k(s)+1)/(k(0)+1)), (m(0)(k(s)+1) - m(s)(k(0)+1)) / (2 sqrt((k(0)+1)(k(s)+1))))",
                tau,
                lambda s: (P.value("k", s) + 1) / (k0 + 1) > 0,
            )
        if all(abs(P.value("k", float(s)) + 1) <= ZERO_TOL for s in s_grid(P.eps)):
            return (
                "tau(s) = (1, (lambda - m(s))/2) with lambda = m(0)",
                lambda s: UT2Element(1.0, (m0 - P.value("m", s)) / 2),
                lambda s: True,
            )
        return None
    if all(abs(P.dual("g", float(s)).deriv) <= ZERO_TOL for s in s_grid(P.eps)):
        F0 = base_family(P)
        return (
            "tau(s) = (1, (q - h(s)) / (2(p+1))) with p = g(0), q = h(0)",
            lambda s: UT2Element(1.0, (F0.q - P.value("h", s)) / (2 * (F0.p + 1))),
            lambda s: True,
        )
    return None


def valid_radius(P: DeformationPath, valid: Callable[[float], bool]) -> float:
    """Largest r on the sample grid with valid(s) for every sample |s| <= r."""
    grid = s_grid(P.eps)
    radii = sorted({abs(float(s)) for s in grid})
    best = 0.0
    for r in radii:
        pts = [float(s) for s in grid if abs(s) <= r + 1e-15]
        try:
            if all(valid(s) for s in pts):
                best = r
            else:
                break
        except (ex.ExprEvalError, ValueError, ZeroDivisionError):
            break
    return best


def kappa_from_gauge(tau: Callable[[float], UT2Element], s: float) -> np.ndarray:
    """-tau'(s) tau(s)^{-1} in h-coordinates."""
    return -right_log_derivative(lambda t: tau(t).matrix(), s)


# ----------------------------------------------------------------- verdicts


@dataclass(frozen=True)
class RigidityVerdict:
    kind: ClassVar[str] = ""

    def summary(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Trivial(RigidityVerdict):
    gauge: str
    tau: Callable = field(repr=False, compare=False)
    interval: tuple
    residual: float
    kind: ClassVar[str] = "trivial"

    def summary(self) -> str:
        return f"trivial: {self.gauge} on [{self.interval[0]:g}, {self.interval[1]:g}], gauge residual {self.residual:.2e}"


@dataclass(frozen=True)
class Nontrivial(RigidityVerdict):
    obstruction: str
    certificate: dict
    kind: ClassVar[str] = "nontrivial"

    def summary(self) -> str:
        return f"nontrivial: {self.obstruction}"


@dataclass(frozen=True)
class Indeterminate(RigidityVerdict):
    reason: str
    kind: ClassVar[str] = "indeterminate"

    def summary(self) -> str:
        return f"indeterminate: {self.reason}"


@dataclass(frozen=True)
class ConstantPath(RigidityVerdict):
    kind: ClassVar[str] = "constant"

    def summary(self) -> str:
        return "constant path: D_s = D for all sampled s"


def _is_constant_path(P: DeformationPath) -> bool:
    for name in PARAM_NAMES[P.family]:
        if not all(abs(P.dual(name, float(s)).deriv) <= ZERO_TOL for s in s_grid(P.eps)):
            return False
    return True


def _trivial(P: DeformationPath) -> Trivial:
    desc, tau, valid = closed_form_gauge(P)
    r = valid_radius(P, valid)
    s_values = np.linspace(-r, r, 21)
    residual = gauge_verify(P, tau, s_values)
    return Trivial(desc, tau, (-r, r), residual)


def rigidity_verdict(P: DeformationPath) -> RigidityVerdict:
    validate_path(P)
    if _is_constant_path(P):
        return ConstantPath()
    if P.family == "g1":
        f0 = P.dual("f", 0.0)
        if abs(f0.value) > ZERO_TOL:
            return _trivial(P)
        order = ex.lowest_nonvanishing_order(P.params["f"])
        cert = {"f(0)": f0.value, "f'(0)": f0.deriv}
        if order is not None:
            cert["lowest_order"] = order[0]
            cert["derivative"] = order[1].value
        return Nontrivial(
            f"q = f(0) = 0 and f is not identically zero (f'(0) = {f0.deriv:g}); "
            "f(s) exp(2 int_0^s kappa1) = f(0) = 0 has no smooth solution",
            cert,
        )
    if P.family == "g2":
        k0 = P.value("k", 0.0)
        if abs(k0 + 1) > ZERO_TOL or closed_form_gauge(P) is not None:
            return _trivial(P)
        if ex.is_flat_at_zero(P.params["k"]):
            return Indeterminate("k(0) = -1 and k is flat at 0 (structural flatbump): the cohomological test is inconclusive")
        found = ex.lowest_nonvanishing_order(P.params["k"])
        if found is None:
            return Indeterminate(
                f"k(0) = -1 and no derivative of order 1..{ex.MAX_DERIV_ORDER} is numerically nonzero (heuristic flatness)"
            )
        n, est = found
        return Nontrivial(
            f"k(0) = -1 and k^({n})(0) = {est.value:.6g} != 0: 2(k+1) kappa1 = -k' forces a pole of order 1 at s = 0",
            {"k(0)": k0, "order": n, "derivative": est.value, "error": est.error},
        )
    if closed_form_gauge(P) is not None:
        return _trivial(P)
    worst = max(s_grid(P.eps), key=lambda s: abs(P.dual("g", float(s)).deriv))
    gp = P.dual("g", float(worst)).deriv
    return Nontrivial(
        f"g'(s) is not identically zero (g'({worst:g}) = {gp:g}); the e1-component g'(s) ln a of dhat is never a coboundary",
        {"s": float(worst), "g'(s)": gp},
    )


# -------------------------------------------------------------- Moser flow


@dataclass(frozen=True)
class MoserTrace:
    s: np.ndarray
    tau: np.ndarray  # (n, 2, 2)

    def element(self, i: int) -> UT2Element:
        return UT2Element(float(self.tau[i, 0, 0]), float(self.tau[i, 0, 1]))

    def as_function(self) -> Callable[[float], UT2Element]:
        """Lookup at integration nodes only."""
        index = {float(s): i for i, s in enumerate(self.s)}

        def tau(s: float) -> UT2Element:
            if s not in index:
                raise KeyError(f"s={s} is not an integration node")
            return self.element(index[s])

        return tau

    def rows(self) -> list[tuple[float, float, float]]:
        return [(float(s), float(t[0, 0]), float(t[0, 1])) for s, t in zip(self.s, self.tau)]


def moser_flow(P: DeformationPath, s_max: float, steps: int = 1000) -> MoserTrace:
    """RK4 for tau'(s) = -kappa(s) tau(s), tau(0) = I."""
    if steps < 10:
        raise InputError("moser_flow needs at least 10 steps")

    def field_at(s: float, y: np.ndarray) -> np.ndarray:
        sol = solve_kappa(P, s)
        if not sol.ok:
            raise FlowError(f"kappa unavailable at s={s:g}: {sol.reason}", s)
        return -kappa_matrix(sol.kappa) @ y

    h = s_max / steps
    ss = np.linspace(0.0, s_max, steps + 1)
    ys = np.empty((steps + 1, 2, 2))
    y = np.eye(2)
    ys[0] = y
    for i in range(steps):
        s = i * h
        k1 = field_at(s, y)
        k2 = field_at(s + h / 2, y + h / 2 * k1)
        k3 = field_at(s + h / 2, y + h / 2 * k2)
        k4 = field_at(s + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
    return MoserTrace(ss, ys)


def moser_gauge_residual(P: DeformationPath, trace: MoserTrace, every: int = 10, elements=None) -> float:
    nodes = [float(s) for s in trace.s[::every]]
    if trace.s[-1] not in nodes:
        nodes.append(float(trace.s[-1]))
    return gauge_verify(P, trace.as_function(), nodes, elements)


# ---------------------------------------------------------- identification


def identify_family(D: Callable[[UT2Element], UT2Element], tol: float = 1e-6) -> FamilySpec | None:
    """Recover the family and parameters of a black-box crossed homomorphism."""
    try:
        if check_crossed_hom_group(D) > tol:
            return None
        a2 = D(UT2Element(2.0, 0.0))
        if abs(a2.a - 1.0) < 1e-9:
            lam = 2 * a2.b / 3
            mu = D(UT2Element(1.0, 1.0)).b
            cand: FamilySpec = Gamma2(mu, lam)
        elif abs(a2.a - 0.5) < 1e-9:
            cand = Gamma1(D(UT2Element(E, 0.0)).b / E)
        else:
            p = math.log2(a2.a)
            be = D(UT2Element(E, 0.0)).b
            q = be * 2 * (p + 1) / (math.exp(2 + p) - math.exp(-p))
            cand = Gamma3(p, q)
    except (InputError, ValueError, ZeroDivisionError, OverflowError):
        return None
    for g in default_elements():
        if np.abs(D(g).matrix() - eval_family(cand, g).matrix()).max() > tol:
            return None
    return cand
