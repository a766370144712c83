"""Ornstein-Uhlenbeck semigroup through its exact Gaussian substitution form.

P_t f(x) = integral of f(exp(-t) x + sqrt(1 - exp(-2t)) z) dg(z),

evaluated with a Gauss-Hermite rule, so no time stepping and no stability
constraint enter. For the Gaussian generator the gradient commutes exactly:
grad P_t f = exp(-t) P_t grad f. Times at or beyond EQUILIBRIUM_TIME are
evaluated as the exact limit, the mean of f.

Used to check the pointwise interpolation bound

    P_t M(f, |grad f|) <= M(P_t f, |grad P_t f|)

and the monotonicity of t -> integral M(P_t f, |grad P_t f|) dg for surfaces
satisfying the matrix condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .special import QuadratureRule, gauss_hermite_rule
from .surfaces import MSurface
from .testfunctions import TestFunction

EQUILIBRIUM_TIME = 40.0


@dataclass(frozen=True)
class OUOperator:
    """The semigroup at a fixed time, carrying the rule for its integral."""

    t: float
    rule: QuadratureRule

    def __post_init__(self):
        if self.t < 0:
            raise DomainError("semigroup time must be nonnegative")

    def apply(self, f, x):
        return ou_apply(f, self.t, x, self.rule)


def _value_fn(f):
    if isinstance(f, TestFunction):
        return f.value
    return f


def _points(x, dim):
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if pts.shape[1] != dim:
        raise DomainError(f"points must have {dim} columns to match the rule")
    return pts


def equilibrium_mean(f, rule: QuadratureRule) -> float:
    vals = np.asarray(_value_fn(f)(rule.nodes), dtype=float)
    return float(rule.weights @ vals)


def ou_apply(f, t: float, x, rule: QuadratureRule):
    """P_t f at one or more points; f is a TestFunction or callable on points."""
    if t < 0:
        raise DomainError("semigroup time must be nonnegative")
    fn = _value_fn(f)
    pts = _points(x, rule.dimension)
    if t >= EQUILIBRIUM_TIME or math.isinf(t):
        out = np.full(pts.shape[0], equilibrium_mean(f, rule))
    else:
        decay = math.exp(-t)
        spread = math.sqrt(max(1.0 - decay * decay, 0.0))
        shifted = decay * pts[:, None, :] + spread * rule.nodes[None, :, :]
        flat = shifted.reshape(-1, rule.dimension)
        vals = np.asarray(fn(flat), dtype=float).reshape(pts.shape[0], rule.count)
        out = vals @ rule.weights
    return float(out[0]) if np.ndim(x) == 1 else out


def ou_gradient(f: TestFunction, t: float, x, rule: QuadratureRule):
    """Gradient of P_t f via exact commutation: exp(-t) P_t applied to grad f."""
    if t < 0:
        raise DomainError("semigroup time must be nonnegative")
    pts = _points(x, rule.dimension)
    if t >= EQUILIBRIUM_TIME or math.isinf(t):
        out = np.zeros((pts.shape[0], rule.dimension))
    else:
        decay = math.exp(-t)
        spread = math.sqrt(max(1.0 - decay * decay, 0.0))
        shifted = decay * pts[:, None, :] + spread * rule.nodes[None, :, :]
        flat = shifted.reshape(-1, rule.dimension)
        grads = np.asarray(f.grad(flat), dtype=float).reshape(pts.shape[0], rule.count,
                                                              rule.dimension)
        out = decay * np.einsum("k,nkd->nd", rule.weights, grads)
    return out[0] if np.ndim(x) == 1 else out


def _require_compatible(M: MSurface, f: TestFunction) -> None:
    if not M.elliptic:
        raise DomainError(f"surface {M.name!r} does not satisfy the matrix condition")
    lo, hi = M.domain_x
    if f.codomain[0] < lo - 1e-12 or f.codomain[1] > hi + 1e-12:
        raise PreconditionError(
            f"{f.name} has codomain {f.codomain}, outside the surface domain"
        )


def _surface_of(f: TestFunction, M: MSurface):
    def integrand(pts):
        v = f.value(pts)
        g = f.grad_norm(pts)
        return np.asarray(M.m(v, g), dtype=float)

    return integrand


@dataclass
class InterpolationReport:
    surface: str
    test_function: str
    max_violation: float
    tol: float
    rows: list  # (t, x..., lhs, rhs)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol


def interpolation_check(M: MSurface, f: TestFunction, t_grid, x_grid,
                        rule: QuadratureRule | None = None,
                        tol: float = 1e-8) -> InterpolationReport:
    """Max over the grid of P_t[M(f, |grad f|)](x) - M(P_t f, |grad P_t f|)(x).

    Nonpositive (within tol) whenever the surface passes the matrix condition.
    """
    if rule is None:
        rule = gauss_hermite_rule(64, f.dim)
    _require_compatible(M, f)
    integrand = _surface_of(f, M)
    pts = np.atleast_2d(np.asarray(x_grid, dtype=float))
    rows = []
    worst = -math.inf
    for t in t_grid:
        lhs = np.atleast_1d(ou_apply(integrand, t, pts, rule))
        pf = np.atleast_1d(ou_apply(f, t, pts, rule))
        gf = ou_gradient(f, t, pts, rule)
        gnorm = np.sqrt(np.sum(np.atleast_2d(gf) * np.atleast_2d(gf), axis=1))
        rhs = np.asarray(M.m(pf, gnorm), dtype=float)
        for i in range(pts.shape[0]):
            rows.append((float(t), *pts[i], float(lhs[i]), float(rhs[i])))
        worst = max(worst, float(np.max(lhs - rhs)))
    return InterpolationReport(M.name, f.name, worst, tol, rows)


@dataclass
class MonotonicityReport:
    surface: str
    test_function: str
    trace: list  # (t, G(t)) with math.inf allowed
    equilibrium_value: float
    step_tol: float
    limit_tol: float

    CSV_HEADER = ("t", "G")

    def rows(self):
        return [(t, g) for t, g in self.trace]

    @property
    def monotone(self) -> bool:
        values = [g for _, g in self.trace]
        return all(b >= a - self.step_tol for a, b in zip(values, values[1:]))

    @property
    def limit_ok(self) -> bool:
        return self.trace[-1][1] <= self.equilibrium_value + self.limit_tol

    @property
    def passed(self) -> bool:
        return self.monotone and self.limit_ok


def monotonicity_check(M: MSurface, f: TestFunction, t_grid,
                       rule: QuadratureRule | None = None,
                       step_tol: float = 1e-9,
                       limit_tol: float = 1e-8) -> MonotonicityReport:
    """Trace of G(t) = integral M(P_t f, |grad P_t f|) dg over increasing t.

    G must be nondecreasing step by step and bounded by its equilibrium value
    M(mean f, 0); math.inf in the grid lands exactly on the limit.
    """
    if rule is None:
        rule = gauss_hermite_rule(64, f.dim)
    _require_compatible(M, f)
    mean = equilibrium_mean(f, rule)
    g_inf = float(M.m(mean, 0.0))
    trace = []
    for t in sorted(t_grid):
        if math.isinf(t) or t >= EQUILIBRIUM_TIME:
            trace.append((float(t), g_inf))
            continue
        pf = np.atleast_1d(ou_apply(f, t, rule.nodes, rule))
        gf = ou_gradient(f, t, rule.nodes, rule)
        gnorm = np.sqrt(np.sum(np.atleast_2d(gf) * np.atleast_2d(gf), axis=1))
        vals = np.asarray(M.m(pf, gnorm), dtype=float)
        trace.append((float(t), float(rule.weights @ vals)))
    return MonotonicityReport(M.name, f.name, trace, g_inf, step_tol, limit_tol)
