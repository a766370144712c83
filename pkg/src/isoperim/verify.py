"""Quadrature verification of the functional inequalities.

Every check integrates against a centered Gaussian N(0, sigma^2 I) in n
dimensions; the curvature parameter is R = 1/sigma^2 and gradient terms are
penalized by 1/sqrt(R) = sigma. Margins are rhs - lhs, and a check passes
when the margin clears -tolerance. Whenever a margin lands within 1e-7 of
zero the quadrature order is doubled once to confirm the sign is stable
against integration error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, IntegrationError, PreconditionError, RootBracketError
from .special import QuadratureRule, gauss_hermite_rule, isoperimetric_profile
from .surfaces import MSurface
from .testfunctions import TestFunction

DEFAULT_ORDER = 64
DEFAULT_TOL = 1e-9
DOUBLING_THRESHOLD = 1e-7


@dataclass(frozen=True)
class MeasureSpec:
    """Isotropic Gaussian N(0, sigma^2 I); R = 1/sigma^2 so R*sigma^2 = 1."""

    dimension: int = 1
    sigma: float = 1.0
    family: str = "gaussian_isotropic"

    def __post_init__(self):
        if self.sigma <= 0:
            raise DomainError("sigma must be positive")
        if self.family != "gaussian_isotropic":
            raise DomainError("only the isotropic Gaussian family is supported")

    @property
    def R(self) -> float:
        return 1.0 / (self.sigma * self.sigma)


@dataclass
class VerificationReport:
    case: str
    surface: str
    test_function: str
    n: int
    sigma: float
    order: int
    lhs: float
    rhs: float
    margin: float
    passed: bool
    tolerance: float
    notes: str = ""

    def to_json_dict(self) -> dict:
        return {
            "case": self.case,
            "surface": self.surface,
            "test_function": self.test_function,
            "n": self.n,
            "sigma": self.sigma,
            "order": self.order,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
            "notes": self.notes,
        }


def _rule_for(spec: MeasureSpec, order: int) -> QuadratureRule:
    return gauss_hermite_rule(order, spec.dimension)


def integrate(g: Callable, spec: MeasureSpec, order: int = DEFAULT_ORDER) -> float:
    """Integrate g against N(0, sigma^2 I) by scaling the standard rule's nodes."""
    rule = _rule_for(spec, order)
    pts = spec.sigma * rule.nodes
    vals = np.asarray(g(pts), dtype=float)
    if np.any(~np.isfinite(vals)):
        bad = int(np.argmax(~np.isfinite(vals)))
        raise IntegrationError(
            f"integrand not finite at node {bad} = {pts[bad].tolist()}"
        )
    return float(rule.weights @ vals)


def _nodes(spec: MeasureSpec, order: int):
    rule = _rule_for(spec, order)
    return spec.sigma * rule.nodes, rule.weights


def _report(case, surface, f, spec, order, computer, tol) -> VerificationReport:
    """Evaluate a computer at the working order, doubling once near the margin.

    computer(order) returns (lhs, rhs, margin, notes); margin is rhs - lhs for
    plain two-sided checks and the worst of several margins for compound ones.
    """
    lhs, rhs, margin, notes = computer(order)
    used = order
    if abs(margin) < DOUBLING_THRESHOLD:
        lhs2, rhs2, margin2, notes2 = computer(2 * order)
        stable = (margin2 >= -tol) == (margin >= -tol)
        note = f"order doubled to {2 * order}; sign {'stable' if stable else 'UNSTABLE'}"
        notes2 = f"{notes2}; {note}" if notes2 else note
        lhs, rhs, margin, notes, used = lhs2, rhs2, margin2, notes2, 2 * order
    passed = margin >= -tol
    notes = f"tol={tol:g}" + (f"; {notes}" if notes else "")
    return VerificationReport(case, surface, f.name if f is not None else "",
                              spec.dimension, spec.sigma, used,
                              lhs, rhs, margin, passed, tol, notes)


# ----------------------------------------------------------------------------
# master inequality and its named specializations
# ----------------------------------------------------------------------------

def _check_codomain(f: TestFunction, lo: float, hi: float, label: str):
    if f.codomain[0] < lo - 1e-12 or f.codomain[1] > hi + 1e-12:
        raise PreconditionError(
            f"{f.name} has codomain {f.codomain}, outside {label}"
        )


def verify_master(M: MSurface, f: TestFunction, spec: MeasureSpec,
                  order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """integral M(f, |grad f|/sqrt(R)) dmu <= M(mean f, 0) for elliptic M."""
    if not M.elliptic:
        raise PreconditionError(f"surface {M.name!r} fails the matrix condition")
    lo, hi = M.domain_x
    _check_codomain(f, lo, hi, f"the surface domain [{lo}, {hi}]")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        g = spec.sigma * f.grad_norm(pts)
        vals = np.asarray(M.m(v, g), dtype=float)
        if np.any(~np.isfinite(vals)):
            bad = int(np.argmax(~np.isfinite(vals)))
            raise IntegrationError(
                f"M({v[bad]:g}, {g[bad]:g}) is not finite at node {bad}"
            )
        lhs = float(w @ vals)
        rhs = float(M.m(float(w @ v), 0.0))
        return lhs, rhs, rhs - lhs, ""

    return _report("master", M.name, f, spec, order, computer, tol)


def verify_log_sobolev(f: TestFunction, spec: MeasureSpec,
                       order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Ent(f^2) <= (2/R) integral |grad f|^2 dmu for positive f.

    The entropy side is the x*ln(x) surface applied to f^2, which is how the
    bound drops out of the master inequality.
    """
    if f.codomain[0] < 0:
        raise PreconditionError(f"{f.name} is not nonnegative")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        if np.any(v <= 0):
            raise PreconditionError(f"{f.name} is not positive at the quadrature nodes")
        g2 = np.sum(f.grad(pts) ** 2, axis=1)
        v2 = v * v
        mean_sq = float(w @ v2)
        lhs = float(w @ (v2 * np.log(v2))) - mean_sq * math.log(mean_sq)
        rhs = (2.0 / spec.R) * float(w @ g2)
        return lhs, rhs, rhs - lhs, ""

    return _report("log_sobolev", "gross", f, spec, order, computer, tol)


def verify_poincare(f: TestFunction, spec: MeasureSpec,
                    order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Var(f) <= (1/R) integral |grad f|^2 dmu."""

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        g2 = np.sum(f.grad(pts) ** 2, axis=1)
        var = float(w @ (v * v)) - float(w @ v) ** 2
        rhs = float(w @ g2) / spec.R
        return var, rhs, rhs - var, ""

    return _report("poincare", "nash", f, spec, order, computer, tol)


def verify_bobkov(f: TestFunction, spec: MeasureSpec,
                  order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """I(mean f) <= integral sqrt(I(f)^2 + |grad f|^2/R) dmu for f into [0, 1]."""
    _check_codomain(f, 0.0, 1.0, "[0, 1]")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = np.clip(f.value(pts), 0.0, 1.0)
        g2 = np.sum(f.grad(pts) ** 2, axis=1)
        prof = isoperimetric_profile(v)
        rhs = float(w @ np.sqrt(prof * prof + g2 / spec.R))
        lhs = float(isoperimetric_profile(float(w @ f.value(pts))))
        return lhs, rhs, rhs - lhs, ""

    return _report("bobkov", "bobkov", f, spec, order, computer, tol)


def verify_beckner(f: TestFunction, p: float, spec: MeasureSpec,
                   order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """integral |f|^2 - (integral |f|^p)^(2/p) <= ((2-p)/R) integral |grad f|^2.

    Stated for p in [1, 2]; p = 1 is the Poincare bound for positive f and the
    p -> 2 limit of the form divided by (2-p) is half the log-Sobolev bound.
    """
    if not 1.0 <= p <= 2.0:
        raise DomainError(f"Beckner exponent must lie in [1, 2], got {p}")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = np.abs(f.value(pts))
        g2 = np.sum(f.grad(pts) ** 2, axis=1)
        lhs = float(w @ (v * v)) - float(w @ v**p) ** (2.0 / p)
        rhs = (2.0 - p) / spec.R * float(w @ g2)
        note = "" if f.codomain[0] > 0 else "sign kink possible at far nodes"
        return lhs, rhs, rhs - lhs, note

    return _report(f"beckner[p={p:g}]", "beckner", f, spec, order, computer, tol)


def beckner_divided_form(f: TestFunction, p: float, spec: MeasureSpec,
                         order: int = DEFAULT_ORDER) -> tuple[float, float]:
    """(lhs, rhs) of the Beckner bound divided by (2 - p); probes the p -> 2 limit."""
    rep = verify_beckner(f, p, spec, order)
    return rep.lhs / (2.0 - p), rep.rhs / (2.0 - p)


def verify_three_halves(f: TestFunction, spec: MeasureSpec,
                        order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Sharp 3/2-moment bound, plus its two weaker companions and their ordering.

    lhs = integral f^(3/2) - (integral f)^(3/2); the sharp right side uses the
    three_halves surface, the weak one is (3/8) integral f^(-1/2) |grad f|^2,
    and the gradient-only one is 2^(-1/2) integral |grad f|^(3/2). The sharp
    right side never exceeds the weak one (pointwise domination).
    """
    if f.codomain[0] < 0:
        raise PreconditionError(f"{f.name} is not nonnegative")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        gn = spec.sigma * f.grad_norm(pts)
        s = np.hypot(v, gn)
        m32 = (2.0 * v - s) * np.sqrt(v + s) / math.sqrt(2.0)
        v32 = v**1.5
        lhs = float(w @ v32) - float(w @ v) ** 1.5
        rhs_sharp = float(w @ (v32 - m32))
        with np.errstate(divide="ignore", invalid="ignore"):
            weak_integrand = np.where(gn > 0.0, 0.375 * gn * gn / np.sqrt(v), 0.0)
        rhs_weak = float(w @ weak_integrand)
        rhs_grad = float(w @ gn**1.5) / math.sqrt(2.0)
        margin = min(rhs_sharp - lhs, rhs_weak - lhs, rhs_grad - lhs,
                     rhs_weak - rhs_sharp)
        note = (f"rhs_weak={rhs_weak:.17g}; rhs_grad={rhs_grad:.17g}; "
                f"margin is the worst of the sharp, weak, gradient and ordering margins")
        return lhs, rhs_sharp, margin, note

    return _report("three_halves", "three_halves", f, spec, order, computer, tol)


def arccos_r_root(f_values, grad_sq, max_r: float = 20.0) -> np.ndarray:
    """Solve |grad f|^2 = r (e^r - f^2) for r >= 0 by monotone bisection.

    At a root with positive target, e^r > f^2, so the arccos formulas stay
    real even when |f| wanders past 1 in a negligible-weight tail. r = 0
    exactly where the gradient vanishes.
    """
    v = np.asarray(f_values, dtype=float)
    g2 = np.asarray(grad_sq, dtype=float)
    if np.any(g2 < 0):
        raise DomainError("gradient squared must be nonnegative")
    hi_val = max_r * (math.exp(max_r) - np.min(v * v))
    if np.any(g2 > hi_val):
        raise RootBracketError(f"gradient too large for the r bracket [0, {max_r}]")
    lo = np.zeros_like(g2)
    hi = np.full_like(g2, max_r)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        below = mid * (np.exp(mid) - v * v) <= g2
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    r = 0.5 * (lo + hi)
    return np.where(g2 == 0.0, 0.0, r)


def verify_arccos(f: TestFunction, spec: MeasureSpec,
                  order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Arccos entropy bound for f into (-1, 1) under the standard Gaussian.

    Per node r >= 0 solves |grad f|^2 = r (e^r - f^2), and the bound reads
    integral f arccos(-f e^(-r/2)) + (1-r) sqrt(e^r - f^2) dg <= m(mean f)
    with m(c) = c arccos(-c) + sqrt(1 - c^2).
    """
    if abs(spec.sigma - 1.0) > 1e-14:
        raise PreconditionError("the arccos bound is verified at sigma = 1")
    note_prefix = ""
    if f.codomain[0] < -1.0 or f.codomain[1] > 1.0:
        note_prefix = "codomain exceeds (-1, 1); far-node excursions tolerated"

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        g2 = np.sum(f.grad(pts) ** 2, axis=1)
        r = arccos_r_root(v, g2)
        root = np.sqrt(np.maximum(np.exp(r) - v * v, 0.0))
        arg = np.clip(-v * np.exp(-0.5 * r), -1.0, 1.0)
        lhs = float(w @ (v * np.arccos(arg) + (1.0 - r) * root))
        mean = float(w @ v)
        if not -1.0 < mean < 1.0:
            raise PreconditionError("mean of f left (-1, 1)")
        rhs = mean * math.acos(-mean) + math.sqrt(1.0 - mean * mean)
        return lhs, rhs, rhs - lhs, note_prefix

    return _report("arccos", "arccos", f, spec, order, computer, tol)


def arccos_deficit(f: TestFunction, eps: float, spec: MeasureSpec,
                   order: int = DEFAULT_ORDER) -> float:
    """Margin of the arccos bound for eps * f; scales like eps^2 for small eps."""
    rep = verify_arccos(f.scaled_by(eps), spec, order=order)
    return rep.margin


def verify_b_theorem_even(f: TestFunction, spec: MeasureSpec,
                          order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Var(f) <= (1/2) integral |grad f|^2 dmu for even f, even measure.

    Twice as strong as the Poincare bound; only available with the evenness
    flag set, and evenness is additionally probed numerically at the nodes.
    """
    if not f.even:
        raise PreconditionError(f"{f.name} is not flagged even")
    if abs(spec.sigma - 1.0) > 1e-14:
        raise PreconditionError("the even-case bound is verified at sigma = 1")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        v_ref = f.value(-pts)
        if float(np.max(np.abs(v - v_ref))) > 1e-10:
            raise PreconditionError(f"{f.name} failed the numeric evenness probe")
        g2 = np.sum(f.grad(pts) ** 2, axis=1)
        var = float(w @ (v * v)) - float(w @ v) ** 2
        rhs = 0.5 * float(w @ g2)
        return var, rhs, rhs - var, ""

    return _report("b_theorem_even", "b_theorem", f, spec, order, computer, tol)


def verify_houdre_kagan(f: TestFunction, d: int, spec: MeasureSpec,
                        order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Alternating higher-derivative sandwich around the Gaussian variance.

    sum_{k=1}^{2d} (-1)^(k+1)/k! E[(f^(k))^2] <= Var f
                  <= sum_{k=1}^{2d-1} (-1)^(k+1)/k! E[(f^(k))^2],

    in one dimension with sigma = 1; needs derivatives up to order 2d.
    """
    if spec.dimension != 1 or abs(spec.sigma - 1.0) > 1e-14:
        raise PreconditionError("the sandwich is verified in 1D at sigma = 1")
    if d < 1:
        raise DomainError("d must be >= 1")
    if f.derivs_1d is None or f.order < 2 * d:
        raise PreconditionError(
            f"{f.name} does not expose derivatives up to order {2 * d}"
        )

    def computer(o):
        pts, w = _nodes(spec, o)
        x = pts[:, 0]
        v = f.value(pts)
        var = float(w @ (v * v)) - float(w @ v) ** 2
        terms = []
        for k in range(1, 2 * d + 1):
            dk = f.deriv(k, x)
            terms.append(((-1.0) ** (k + 1) / math.factorial(k)) * float(w @ (dk * dk)))
        lower = sum(terms)
        upper = sum(terms[:-1])
        # lhs/rhs are the sandwich sides; margin is the worse of the two gaps
        # so that pass <=> margin >= -tol keeps its meaning.
        margin = min(var - lower, upper - var)
        note = f"lower={lower:.17g}; var={var:.17g}; upper={upper:.17g}"
        return lower, upper, margin, note

    return _report(f"houdre_kagan[d={d}]", "", f, spec, order, computer, tol)


def phi_entropy_bound(M: MSurface, f: TestFunction, spec: MeasureSpec,
                      order: int = DEFAULT_ORDER, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Jensen deficit of Phi(x) = M(x, 0) bounded by the surface error term.

    integral Phi(f) dmu - Phi(mean f) <= integral [M(f, 0) - M(f, |grad f|/sqrt(R))],
    algebraically the master inequality rearranged; computed independently so
    the two paths can be compared.
    """
    if not M.elliptic:
        raise PreconditionError(f"surface {M.name!r} fails the matrix condition")
    lo, hi = M.domain_x
    _check_codomain(f, lo, hi, f"the surface domain [{lo}, {hi}]")

    def computer(o):
        pts, w = _nodes(spec, o)
        v = f.value(pts)
        g = spec.sigma * f.grad_norm(pts)
        phi_vals = np.asarray(M.m(v, np.zeros_like(v)), dtype=float)
        lhs = float(w @ phi_vals) - float(M.m(float(w @ v), 0.0))
        rhs = float(w @ (phi_vals - np.asarray(M.m(v, g), dtype=float)))
        return lhs, rhs, rhs - lhs, ""

    return _report("phi_entropy", M.name, f, spec, order, computer, tol)


# ----------------------------------------------------------------------------
# higher-derivative interpolation condition (1D, Gaussian generator)
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SmoothMultivariate:
    """A C^2 function of (u_0, ..., u_m) given by value/gradient/Hessian."""

    m: int
    value: Callable
    grad: Callable
    hess: Callable


def houdre_kagan_b(m: int) -> SmoothMultivariate:
    """B(u) = sum_k (-1)^k u_k^2 / k!, the alternating-variance functional."""
    signs = np.array([(-1.0) ** k / math.factorial(k) for k in range(m + 1)])

    def value(u):
        u = np.asarray(u, dtype=float)
        return float(np.sum(signs * u * u))

    def grad(u):
        u = np.asarray(u, dtype=float)
        return 2.0 * signs * u

    def hess(u):
        return np.diag(2.0 * signs)

    return SmoothMultivariate(m, value, grad, hess)


@dataclass
class ErtiResult:
    matrix: np.ndarray
    form_value: float
    cleared_form_value: float
    b_mm: float
    nsd_precondition_ok: bool


def erti_condition_matrix(B: SmoothMultivariate, u) -> ErtiResult:
    """Matrix and quadratic form of the semigroup-interpolation condition.

    For the Gaussian generator the commutator term is L_j(u) = (j+1) B_{j+1}(u),
    and the condition reads: B_mm <= 0 and

        util { B_mj B_mi - B_mm B_ij - delta_ij (B_mm / u_{j+1}) L_j } util^T <= 0

    with util = (u_1, ..., u_m). The cleared form multiplies the delta term
    through by u_{j+1}, avoiding the division entirely; for the alternating
    functional both evaluate to zero identically.
    """
    u = np.asarray(u, dtype=float)
    m = B.m
    if u.shape != (m + 1,):
        raise DomainError(f"expected a point with {m + 1} coordinates")
    grad = np.asarray(B.grad(u), dtype=float)
    hess = np.asarray(B.hess(u), dtype=float)
    b_mm = hess[m, m]
    if b_mm == 0.0:
        raise PreconditionError("B_mm vanishes at the given point")
    if np.any(u[1:] == 0.0):
        raise PreconditionError("delta term divides by u_{j+1}; zero coordinate excluded")

    util = u[1:]
    mat = np.empty((m, m))
    for i in range(m):
        for j in range(m):
            val = hess[m, j] * hess[m, i] - b_mm * hess[i, j]
            if i == j:
                l_j = (j + 1) * grad[j + 1]
                val -= (b_mm / u[j + 1]) * l_j
            mat[i, j] = val
    form = float(util @ mat @ util)

    cleared = 0.0
    for i in range(m):
        for j in range(m):
            cleared += util[i] * util[j] * (hess[m, j] * hess[m, i] - b_mm * hess[i, j])
        cleared -= util[i] * b_mm * (i + 1) * grad[i + 1]
    return ErtiResult(mat, form, float(cleared), float(b_mm), b_mm <= 0.0)


@dataclass
class ErtiSweepReport:
    m: int
    n_points: int
    seed: int
    max_abs_form: float
    max_abs_cleared: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_abs_form <= self.tol and self.max_abs_cleared <= self.tol


def erti_random_sweep(m: int, n_points: int = 1000, seed: int = 0,
                      tol: float = 1e-10) -> ErtiSweepReport:
    """Seeded sweep of the cancellation identity at random nonzero points."""
    if m % 2 == 0:
        raise DomainError("the alternating functional needs odd m for B_mm <= 0")
    rng = np.random.default_rng(seed)
    B = houdre_kagan_b(m)
    worst = 0.0
    worst_cleared = 0.0
    count = 0
    while count < n_points:
        u = rng.standard_normal(m + 1)
        if np.any(np.abs(u[1:]) < 1e-8):
            continue
        res = erti_condition_matrix(B, u)
        worst = max(worst, abs(res.form_value))
        worst_cleared = max(worst_cleared, abs(res.cleared_form_value))
        count += 1
    return ErtiSweepReport(m, n_points, seed, worst, worst_cleared, tol)
