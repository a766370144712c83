"""Catalog of M(x, y) surfaces and their elliptic constraint matrices.

Each surface carries closed-form first and second derivatives on its domain
Omega x [0, inf). The certificate of interest is negative semidefiniteness of

    [[M_xx + M_y / y, M_xy],
     [M_xy,           M_yy]]

and, for the optimal surfaces, vanishing of the degenerate Monge-Ampere
expression y*(M_xx*M_yy - M_xy^2) + M_y*M_yy.

Catalog:
    gross         x*ln(x) - y^2/(2x)                  log-Sobolev
    nash          x^2 - y^2                           Poincare
    beckner       x^(2/p) - ((2-p)/p^2) x^(2/p-2) y^2 Beckner interpolation
    bobkov        -sqrt(I(x)^2 + y^2)                 Gaussian isoperimetry
    three_halves  (2x - s) sqrt(x + s) / sqrt(2),     sharpened 3/2 bound
                  s = sqrt(x^2 + y^2)
    arccos        x*arccos(-x e^(-q^2/2)) + (1-q^2) sqrt(e^(q^2) - x^2),
                  q <= 0 root of -q sqrt(e^(q^2) - x^2) = y
    b_theorem     x^2 - y^2/2                         even-case variance bound
                  (fails the matrix condition: top-left entry is +1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, RootBracketError, SingularityError
from .special import isoperimetric_profile, std_normal_quantile

CATALOG_NAMES = ("gross", "nash", "beckner", "bobkov", "three_halves", "arccos", "b_theorem")

# Surfaces whose constraint matrix is negative semidefinite everywhere.
ELLIPTIC_NAMES = ("gross", "nash", "beckner", "bobkov", "three_halves", "arccos")

# Surfaces on which the Monge-Ampere expression vanishes identically.
DEGENERATE_NAMES = ("gross", "nash", "bobkov", "three_halves", "arccos")


@dataclass(frozen=True)
class MSurface:
    """A candidate surface with closed-form derivative evaluators.

    Evaluators are vectorized over numpy arrays and pure. epsilon_shift != 0
    replaces M(x, y) by M(x + eps, y) exactly, which regularizes surfaces
    singular at the left edge of a half-line domain.
    """

    name: str
    domain_x: tuple[float, float]
    m: Callable
    m_x: Callable
    m_y: Callable
    m_xx: Callable
    m_xy: Callable
    m_yy: Callable
    epsilon_shift: float = 0.0
    parameters: dict = field(default_factory=dict)
    elliptic: bool = True
    degenerate: bool = True
    log_x_grid: bool = False
    x_clip: float = 0.0
    formula: str = ""
    inequality: str = ""

    def contains_x(self, x) -> bool:
        lo, hi = self.domain_x
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= lo) & (x <= hi)))


def _shifted(fn, eps):
    return lambda x, y: fn(np.asarray(x, dtype=float) + eps, y)


def _as_float_pair(x, y):
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


# ----------------------------------------------------------------------------
# closed forms
# ----------------------------------------------------------------------------

def _gross_evals():
    def m(x, y):
        x, y = _as_float_pair(x, y)
        return x * np.log(x) - y * y / (2.0 * x)

    def m_x(x, y):
        x, y = _as_float_pair(x, y)
        return np.log(x) + 1.0 + y * y / (2.0 * x * x)

    def m_y(x, y):
        x, y = _as_float_pair(x, y)
        return -y / x

    def m_xx(x, y):
        x, y = _as_float_pair(x, y)
        return 1.0 / x - y * y / x**3

    def m_xy(x, y):
        x, y = _as_float_pair(x, y)
        return y / (x * x)

    def m_yy(x, y):
        x, y = _as_float_pair(x, y)
        return -1.0 / x + 0.0 * y

    return m, m_x, m_y, m_xx, m_xy, m_yy


def _nash_evals():
    return (
        lambda x, y: np.asarray(x, float) ** 2 - np.asarray(y, float) ** 2,
        lambda x, y: 2.0 * np.asarray(x, float) + 0.0 * np.asarray(y, float),
        lambda x, y: -2.0 * np.asarray(y, float) + 0.0 * np.asarray(x, float),
        lambda x, y: 2.0 + 0.0 * np.asarray(x, float) * np.asarray(y, float),
        lambda x, y: 0.0 * np.asarray(x, float) * np.asarray(y, float),
        lambda x, y: -2.0 + 0.0 * np.asarray(x, float) * np.asarray(y, float),
    )


def _b_theorem_evals():
    return (
        lambda x, y: np.asarray(x, float) ** 2 - np.asarray(y, float) ** 2 / 2.0,
        lambda x, y: 2.0 * np.asarray(x, float) + 0.0 * np.asarray(y, float),
        lambda x, y: -np.asarray(y, float) + 0.0 * np.asarray(x, float),
        lambda x, y: 2.0 + 0.0 * np.asarray(x, float) * np.asarray(y, float),
        lambda x, y: 0.0 * np.asarray(x, float) * np.asarray(y, float),
        lambda x, y: -1.0 + 0.0 * np.asarray(x, float) * np.asarray(y, float),
    )


def _beckner_evals(p: float):
    a = 2.0 / p
    c = (2.0 - p) / (p * p)

    def m(x, y):
        x, y = _as_float_pair(x, y)
        return x**a - c * x ** (a - 2.0) * y * y

    def m_x(x, y):
        x, y = _as_float_pair(x, y)
        return a * x ** (a - 1.0) - c * (a - 2.0) * x ** (a - 3.0) * y * y

    def m_y(x, y):
        x, y = _as_float_pair(x, y)
        return -2.0 * c * x ** (a - 2.0) * y

    def m_xx(x, y):
        x, y = _as_float_pair(x, y)
        return a * (a - 1.0) * x ** (a - 2.0) - c * (a - 2.0) * (a - 3.0) * x ** (a - 4.0) * y * y

    def m_xy(x, y):
        x, y = _as_float_pair(x, y)
        return -2.0 * c * (a - 2.0) * x ** (a - 3.0) * y

    def m_yy(x, y):
        x, y = _as_float_pair(x, y)
        return -2.0 * c * x ** (a - 2.0) + 0.0 * y

    return m, m_x, m_y, m_xx, m_xy, m_yy


def _bobkov_parts(x):
    x = np.asarray(x, dtype=float)
    prof = isoperimetric_profile(x)
    interior = (x > 0.0) & (x < 1.0)
    dprof = np.zeros_like(np.asarray(prof))
    if np.any(interior):
        dprof = np.where(interior, -std_normal_quantile(np.clip(x, 1e-300, 1 - 1e-16)), 0.0)
    return np.asarray(prof, float), dprof


def _bobkov_evals():
    # The identity I * I'' = -1 is used analytically, so only I and I' = -quantile
    # appear; this keeps the entries finite-precision stable near the edges.
    def m(x, y):
        prof, _ = _bobkov_parts(x)
        y = np.asarray(y, float)
        return -np.sqrt(prof * prof + y * y)

    def m_x(x, y):
        prof, dprof = _bobkov_parts(x)
        y = np.asarray(y, float)
        s = np.sqrt(prof * prof + y * y)
        return -prof * dprof / s

    def m_y(x, y):
        prof, _ = _bobkov_parts(x)
        y = np.asarray(y, float)
        return -y / np.sqrt(prof * prof + y * y)

    def m_xx(x, y):
        prof, dprof = _bobkov_parts(x)
        y = np.asarray(y, float)
        s = np.sqrt(prof * prof + y * y)
        return -(dprof * dprof - 1.0) / s + (prof * dprof) ** 2 / s**3

    def m_xy(x, y):
        prof, dprof = _bobkov_parts(x)
        y = np.asarray(y, float)
        s = np.sqrt(prof * prof + y * y)
        return prof * dprof * y / s**3

    def m_yy(x, y):
        prof, _ = _bobkov_parts(x)
        y = np.asarray(y, float)
        s = np.sqrt(prof * prof + y * y)
        return -prof * prof / s**3

    return m, m_x, m_y, m_xx, m_xy, m_yy


def _three_halves_evals():
    c = 3.0 * math.sqrt(2.0) / 8.0

    def m(x, y):
        x, y = _as_float_pair(x, y)
        s = np.hypot(x, y)
        return (2.0 * x - s) * np.sqrt(x + s) / math.sqrt(2.0)

    def m_x(x, y):
        x, y = _as_float_pair(x, y)
        s = np.hypot(x, y)
        return (3.0 * math.sqrt(2.0) / 4.0) * np.sqrt(x + s)

    def m_y(x, y):
        x, y = _as_float_pair(x, y)
        s = np.hypot(x, y)
        return -(3.0 * math.sqrt(2.0) / 4.0) * np.sqrt(s - x)

    def m_xx(x, y):
        x, y = _as_float_pair(x, y)
        s = np.hypot(x, y)
        return c * np.sqrt(x + s) / s

    def m_xy(x, y):
        x, y = _as_float_pair(x, y)
        s = np.hypot(x, y)
        return c * y / (s * np.sqrt(x + s))

    def m_yy(x, y):
        x, y = _as_float_pair(x, y)
        s = np.hypot(x, y)
        return -c * np.sqrt(x + s) / s

    return m, m_x, m_y, m_xx, m_xy, m_yy


def arccos_q(x, y, max_depth: float = 10.0):
    """Unique q <= 0 solving -q * sqrt(exp(q^2) - x^2) = y for y >= 0.

    The left side is strictly decreasing in q on (-inf, 0], so bisection with
    geometric bracket expansion converges; a Newton polish brings the residual
    below 1e-12. q = 0 exactly when y = 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y < 0.0):
        raise DomainError("arccos_q needs y >= 0")
    if np.any(np.abs(x) > 1.0 + 1e-12):
        raise DomainError("arccos_q needs x in [-1, 1]")
    shape = np.broadcast(x, y).shape
    xb = np.broadcast_to(x, shape).astype(float)
    yb = np.broadcast_to(y, shape).astype(float)

    def fwd(q):
        return -q * np.sqrt(np.exp(q * q) - xb * xb)

    lo = -np.ones(shape)
    for _ in range(64):
        need = fwd(lo) < yb
        if not np.any(need):
            break
        if np.all(lo[need] <= -max_depth):
            raise RootBracketError(
                f"no root above q = {-max_depth}; y is out of reach"
            )
        lo = np.where(need, np.maximum(2.0 * lo, -max_depth), lo)
    if np.any(fwd(lo) < yb):
        raise RootBracketError(
            f"no root above q = {-max_depth}; y is out of reach"
        )
    hi = np.zeros(shape)
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        lo_side = fwd(mid) >= yb
        lo = np.where(lo_side, mid, lo)
        hi = np.where(lo_side, hi, mid)
    q = 0.5 * (lo + hi)
    for _ in range(3):
        g = np.sqrt(np.exp(q * q) - xb * xb)
        deriv = -(g * g + q * q * np.exp(q * q)) / g
        q = q - (fwd(q) - yb) / deriv
    q = np.minimum(q, 0.0)
    q = np.where(yb == 0.0, 0.0, q)
    return float(q) if shape == () else q


def _arccos_evals():
    def parts(x, y):
        x, y = _as_float_pair(x, y)
        q = np.asarray(arccos_q(x, y), dtype=float)
        eq = np.exp(q * q)
        g = np.sqrt(eq - x * x)
        d = g * g + q * q * eq
        return q, eq, g, d

    def m(x, y):
        x, y = _as_float_pair(x, y)
        q, eq, g, _ = parts(x, y)
        return x * np.arccos(np.clip(-x / np.sqrt(eq), -1.0, 1.0)) + (1.0 - q * q) * g

    def m_x(x, y):
        x, y = _as_float_pair(x, y)
        q, eq, _, _ = parts(x, y)
        return np.arccos(np.clip(-x / np.sqrt(eq), -1.0, 1.0))

    def m_y(x, y):
        q, _, _, _ = parts(x, y)
        return q

    def m_xx(x, y):
        q, _, g, d = parts(x, y)
        return g * (1.0 + q * q) / d

    def m_xy(x, y):
        x, y = _as_float_pair(x, y)
        q, _, _, d = parts(x, y)
        return q * x / d

    def m_yy(x, y):
        q, _, g, d = parts(x, y)
        return -g / d

    return m, m_x, m_y, m_xx, m_xy, m_yy


def make_catalog_surface(name: str, p: float | None = None,
                         epsilon_shift: float = 0.0) -> MSurface:
    """Build a catalog surface by name; beckner additionally needs p in [1, 2]."""
    if name not in CATALOG_NAMES:
        raise DomainError(f"unknown surface {name!r}; choose from {CATALOG_NAMES}")
    if name == "beckner":
        if p is None:
            raise DomainError("beckner surface needs the exponent p")
        if not 1.0 <= p <= 2.0:
            raise DomainError(f"beckner exponent must lie in [1, 2], got {p}")
    elif p is not None:
        raise DomainError(f"surface {name!r} takes no exponent parameter")

    specs = {
        "gross": dict(evals=_gross_evals(), domain=(0.0, math.inf), log_x=True,
                      x_clip=1e-6,
                      formula="x*ln(x) - y^2/(2x)",
                      inequality="logarithmic Sobolev inequality"),
        "nash": dict(evals=_nash_evals(), domain=(-math.inf, math.inf), log_x=False,
                     formula="x^2 - y^2",
                     inequality="Poincare inequality (spectral gap)"),
        "bobkov": dict(evals=_bobkov_evals(), domain=(0.0, 1.0), log_x=False,
                       formula="-sqrt(I(x)^2 + y^2)",
                       inequality="Bobkov functional form of Gaussian isoperimetry"),
        "three_halves": dict(evals=_three_halves_evals(), domain=(0.0, math.inf),
                             log_x=True, x_clip=1e-6,
                             formula="(2x - sqrt(x^2+y^2)) * sqrt(x + sqrt(x^2+y^2)) / sqrt(2)",
                             inequality="sharpened 3/2-moment bound"),
        "arccos": dict(evals=_arccos_evals(), domain=(-1.0, 1.0), log_x=False,
                       formula="x*arccos(-x*e^(-q^2/2)) + (1-q^2)*sqrt(e^(q^2)-x^2),"
                               " q(x,y) <= 0 root of -q*sqrt(e^(q^2)-x^2) = y",
                       inequality="arccos entropy bound (implies Poincare)"),
        "b_theorem": dict(evals=_b_theorem_evals(), domain=(-math.inf, math.inf),
                          log_x=False,
                          formula="x^2 - y^2/2",
                          inequality="even-case variance bound behind the (B) theorem"),
    }
    if name == "beckner":
        spec = dict(evals=_beckner_evals(p), domain=(0.0, math.inf), log_x=True,
                    x_clip=1e-6,
                    formula="x^(2/p) - ((2-p)/p^2) * x^(2/p-2) * y^2",
                    inequality=f"Beckner interpolation at p={p:g}")
    else:
        spec = specs[name]

    evals = spec["evals"]
    if epsilon_shift:
        if epsilon_shift < 0:
            raise DomainError("epsilon_shift must be nonnegative")
        evals = tuple(_shifted(fn, epsilon_shift) for fn in evals)

    degenerate = name in DEGENERATE_NAMES or (name == "beckner" and p in (1.0, 2.0))
    return MSurface(
        name=name,
        domain_x=spec["domain"],
        m=evals[0], m_x=evals[1], m_y=evals[2],
        m_xx=evals[3], m_xy=evals[4], m_yy=evals[5],
        epsilon_shift=epsilon_shift,
        parameters={} if p is None else {"p": p},
        elliptic=name in ELLIPTIC_NAMES,
        degenerate=degenerate,
        log_x_grid=spec.get("log_x", False),
        x_clip=spec.get("x_clip", 0.0),
        formula=spec["formula"],
        inequality=spec["inequality"],
    )


# ----------------------------------------------------------------------------
# constraint matrix and degeneracy
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintMatrix:
    """Entries of the symmetric 2x2 certificate matrix at a point (x, y)."""

    a11: float
    a12: float
    a22: float
    x: float
    y: float

    @property
    def trace(self) -> float:
        return self.a11 + self.a22

    @property
    def det(self) -> float:
        return self.a11 * self.a22 - self.a12 * self.a12

    def eigenvalues(self) -> tuple[float, float]:
        half = 0.5 * self.trace
        disc = math.sqrt(max(half * half - self.det, 0.0))
        return half - disc, half + disc


def _constraint_entries(surface: MSurface, x, y):
    """a11, a12, a22 arrays; the y = 0 row uses the limit M_y/y -> M_yy(x, 0)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        a22 = np.asarray(surface.m_yy(x, y), dtype=float)
        a12 = np.asarray(surface.m_xy(x, y), dtype=float)
        mxx = np.asarray(surface.m_xx(x, y), dtype=float)
        shape = np.broadcast(x, y).shape
        yb = np.broadcast_to(y, shape)
        ratio = np.asarray(surface.m_y(x, y), dtype=float) / yb
    ratio = np.where(yb == 0.0, np.broadcast_to(a22, shape), ratio)
    a11 = mxx + ratio
    return a11, np.broadcast_to(a12, shape), np.broadcast_to(a22, shape)


def constraint_matrix(surface: MSurface, x: float, y: float) -> ConstraintMatrix:
    """Evaluate the certificate matrix at one point; y = 0 uses the limit rule."""
    if y < 0:
        raise DomainError("constraint matrix needs y >= 0")
    if not surface.contains_x(x):
        raise DomainError(f"x={x} outside domain of surface {surface.name!r}")
    a11, a12, a22 = _constraint_entries(surface, x, y)
    vals = (float(a11), float(a12), float(a22))
    if not all(math.isfinite(v) for v in vals):
        raise SingularityError(
            f"surface {surface.name!r} has non-finite derivatives at ({x}, {y})"
        )
    return ConstraintMatrix(vals[0], vals[1], vals[2], float(x), float(y))


def is_nsd(matrix: ConstraintMatrix, tol: float = 1e-9) -> bool:
    """Negative semidefinite within slack: trace <= tol and det >= -tol."""
    if tol < 0:
        raise DomainError("tolerance must be nonnegative")
    return matrix.trace <= tol and matrix.det >= -tol


def degeneracy_residual(surface: MSurface, x: float, y: float) -> float:
    """Left side of y*(M_xx M_yy - M_xy^2) + M_y M_yy = 0 at a point with y > 0."""
    if y <= 0:
        raise DomainError("degeneracy residual is defined for y > 0")
    res, _ = degeneracy_residuals(surface, x, y)
    val = float(res)
    if not math.isfinite(val):
        raise SingularityError(
            f"surface {surface.name!r} has non-finite derivatives at ({x}, {y})"
        )
    return val


def degeneracy_residuals(surface: MSurface, x, y):
    """Residual and scale-relative residual arrays for y > 0 nodes.

    The relative form divides by the magnitude of the combined terms so that
    cancellation error from large entries is judged fairly.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mxx = np.asarray(surface.m_xx(x, y), dtype=float)
    mxy = np.asarray(surface.m_xy(x, y), dtype=float)
    myy = np.asarray(surface.m_yy(x, y), dtype=float)
    my = np.asarray(surface.m_y(x, y), dtype=float)
    res = y * (mxx * myy - mxy * mxy) + my * myy
    scale = np.abs(y) * (np.abs(mxx * myy) + mxy * mxy) + np.abs(my * myy)
    rel = np.abs(res) / np.maximum(scale, 1.0)
    return res, rel


# ----------------------------------------------------------------------------
# grid sweeps
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    nx: int
    y_min: float
    y_max: float
    ny: int
    log_x: bool = False

    def x_values(self) -> np.ndarray:
        if self.log_x:
            if self.x_min <= 0:
                raise DomainError("log-spaced grid needs x_min > 0")
            return np.geomspace(self.x_min, self.x_max, self.nx)
        return np.linspace(self.x_min, self.x_max, self.nx)

    def y_values(self) -> np.ndarray:
        return np.linspace(self.y_min, self.y_max, self.ny)


def default_grid(surface: MSurface, nx: int = 100, ny: int = 100,
                 y_max: float = 10.0) -> GridSpec:
    """Default sweep grid: log-spaced x on half-lines, linear on bounded domains."""
    lo, hi = surface.domain_x
    if math.isinf(hi):
        x_min, x_max = max(0.1, surface.x_clip), 10.0
        log_x = surface.log_x_grid
    elif math.isinf(lo):
        x_min, x_max, log_x = -10.0, 10.0, False
    else:
        pad = 1e-3 * (hi - lo)
        x_min, x_max, log_x = lo + pad, hi - pad, False
    return GridSpec(x_min, x_max, nx, 0.0, y_max, ny, log_x)


@dataclass
class SweepReport:
    """Node-wise certificate data over a grid, with the violation list."""

    surface: str
    grid: GridSpec
    tol: float
    x: np.ndarray
    y: np.ndarray
    a11: np.ndarray
    a12: np.ndarray
    a22: np.ndarray
    eig_max: np.ndarray
    residual: np.ndarray
    rel_residual: np.ndarray
    violations: list[tuple[float, float, tuple[float, float]]]

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def max_eig(self) -> float:
        return float(np.max(self.eig_max))

    @property
    def max_rel_residual(self) -> float:
        return float(np.max(self.rel_residual))

    def positive_residual_fraction(self, y_floor: float = 0.0) -> float:
        """Fraction of nodes with y > y_floor where the residual is > 0."""
        mask = self.y > y_floor
        if not np.any(mask):
            return 0.0
        return float(np.mean(self.residual[mask] > 0.0))

    def rows(self):
        cols = (self.x, self.y, self.a11, self.a12, self.a22, self.eig_max, self.residual)
        return list(zip(*(np.asarray(c).ravel() for c in cols)))

    CSV_HEADER = ("x", "y", "a11", "a12", "a22", "eig_max", "residual")


def nsd_grid_sweep(surface: MSurface, grid: GridSpec | None = None,
                   tol: float = 1e-9) -> SweepReport:
    """Check negative semidefiniteness node by node over a grid.

    The report is empty of violations iff is_nsd holds at every node.
    """
    if grid is None:
        grid = default_grid(surface)
    xs = grid.x_values()
    ys = grid.y_values()
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    a11, a12, a22 = _constraint_entries(surface, X, Y)
    tr = a11 + a22
    det = a11 * a22 - a12 * a12
    half = 0.5 * tr
    disc = np.sqrt(np.maximum(half * half - det, 0.0))
    eig_max = half + disc
    eig_min = half - disc
    ok = (tr <= tol) & (det >= -tol)
    res = np.zeros_like(a11)
    rel = np.zeros_like(a11)
    pos = Y > 0
    if np.any(pos):
        r_all, rel_all = degeneracy_residuals(surface, X, Y)
        res = np.where(pos, r_all, 0.0)
        rel = np.where(pos, rel_all, 0.0)
    bad = np.argwhere(~ok)
    violations = [
        (float(X[i, j]), float(Y[i, j]), (float(eig_min[i, j]), float(eig_max[i, j])))
        for i, j in bad
    ]
    return SweepReport(
        surface=surface.name, grid=grid, tol=tol,
        x=X.ravel(), y=Y.ravel(),
        a11=a11.ravel(), a12=a12.ravel(), a22=a22.ravel(),
        eig_max=eig_max.ravel(), residual=res.ravel(), rel_residual=rel.ravel(),
        violations=violations,
    )


# ----------------------------------------------------------------------------
# pointwise inequalities attached to the catalog
# ----------------------------------------------------------------------------

def three_halves_pointwise_margin(x, y):
    """Margin of the pointwise bound relating the 3/2 surface to its weak form.

    Returns (3/8) x^(-1/2) y^2 - [x^(3/2) - M(x, y)] for the three_halves M,
    nonnegative for x, y >= 0 and strictly positive when y > 0.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = np.hypot(x, y)
    m = (2.0 * x - s) * np.sqrt(x + s) / math.sqrt(2.0)
    gap = x**1.5 - m
    bound = 0.375 * y * y / np.sqrt(x)
    return bound - gap


def bobkov_two_point_margin(a, b):
    """Margin of the two-point profile inequality on [0, 1]^2.

    Returns the average of sqrt(I(a)^2 + ((a-b)/2)^2) and the same with b,
    minus I((a+b)/2); nonnegative on the unit square.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half_diff = 0.5 * np.abs(a - b)
    ia = isoperimetric_profile(a)
    ib = isoperimetric_profile(b)
    rhs = 0.5 * np.sqrt(ia * ia + half_diff**2) + 0.5 * np.sqrt(ib * ib + half_diff**2)
    return rhs - isoperimetric_profile(0.5 * (a + b))
