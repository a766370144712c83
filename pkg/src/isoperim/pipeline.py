"""Reduction of the degenerate surface equation to the backwards heat equation.

Pipeline: boundary values M(x, 0) = Phi(x) with convex Phi are Legendre
transformed into heat boundary data u(p, 0), extended to a solution of

    u_pp + u_t = 0,   u_t <= 0,

checked for the ellipticity certificate u_t^2 - 2t det(Hess u) >= 0, and
finally mapped back to the surface through the characteristic parametrization

    x = u_p(p, q^2/2),  y = q u_t(p, q^2/2),
    M  = p x + q y - u(p, q^2/2),   q <= 0.

Backwards heat flow is ill-posed for generic data; the closed-form and
polynomial routes below are exact, while the spectral route caps mode
amplification and refuses horizons beyond it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DomainError,
    IllPosedError,
    NonInvertibleGradientError,
    ReconstructionError,
    RegionError,
    RootBracketError,
)
from .special import (
    gauss_hermite_rule,
    heat_polynomial,
    hermite_he,
    std_normal_cdf,
    std_normal_pdf,
    std_normal_quantile,
)

BOUNDARY_NAMES = ("gross", "nash", "bobkov", "three_halves", "arccos", "exp", "neglog")

# Boundary names with a closed-form or polynomial backwards solution and a
# closed-form catalog surface to compare against.
RECONSTRUCTIBLE = ("gross", "nash", "bobkov", "three_halves", "arccos")

DEFAULT_HORIZON = 8.0
AMPLIFICATION_CAP = 1e6


@dataclass(frozen=True)
class BoundaryData:
    """Convex boundary values Phi on Omega together with two derivatives."""

    name: str
    omega: tuple[float, float]
    phi: Callable
    dphi: Callable
    d2phi: Callable
    p_domain: tuple[float, float]

    def sample_interior(self, count: int = 201) -> np.ndarray:
        # window clipped to +-8: wide enough to catch flat pieces, inside the
        # floating-point invertible range of cdf-type gradients
        lo, hi = self.omega
        lo = max(lo, -8.0)
        hi = min(hi, 8.0)
        width = hi - lo
        return np.linspace(lo + 1e-3 * width, hi - 1e-3 * width, count)


def catalog_boundary(name: str) -> BoundaryData:
    """Boundary data Phi(x) = M(x, 0) for the named catalog surface."""
    if name == "gross":
        return BoundaryData(
            "gross", (0.0, math.inf),
            phi=lambda x: x * np.log(x),
            dphi=lambda x: np.log(x) + 1.0,
            d2phi=lambda x: 1.0 / np.asarray(x, float),
            p_domain=(-math.inf, math.inf),
        )
    if name == "nash":
        return BoundaryData(
            "nash", (-math.inf, math.inf),
            phi=lambda x: np.asarray(x, float) ** 2,
            dphi=lambda x: 2.0 * np.asarray(x, float),
            d2phi=lambda x: 2.0 + 0.0 * np.asarray(x, float),
            p_domain=(-math.inf, math.inf),
        )
    if name == "bobkov":
        return BoundaryData(
            "bobkov", (0.0, 1.0),
            phi=lambda x: -std_normal_pdf(std_normal_quantile(x)),
            dphi=std_normal_quantile,
            d2phi=lambda x: 1.0 / std_normal_pdf(std_normal_quantile(x)),
            p_domain=(-math.inf, math.inf),
        )
    if name == "three_halves":
        return BoundaryData(
            "three_halves", (0.0, math.inf),
            phi=lambda x: np.asarray(x, float) ** 1.5,
            dphi=lambda x: 1.5 * np.sqrt(np.asarray(x, float)),
            d2phi=lambda x: 0.75 / np.sqrt(np.asarray(x, float)),
            p_domain=(0.0, math.inf),
        )
    if name == "arccos":
        return BoundaryData(
            "arccos", (-1.0, 1.0),
            phi=lambda x: np.asarray(x, float) * np.arccos(-np.asarray(x, float))
            + np.sqrt(1.0 - np.asarray(x, float) ** 2),
            dphi=lambda x: np.arccos(-np.asarray(x, float)),
            d2phi=lambda x: 1.0 / np.sqrt(1.0 - np.asarray(x, float) ** 2),
            p_domain=(0.0, math.pi),
        )
    if name == "exp":
        return BoundaryData(
            "exp", (-math.inf, math.inf),
            phi=lambda x: np.exp(np.asarray(x, float)),
            dphi=lambda x: np.exp(np.asarray(x, float)),
            d2phi=lambda x: np.exp(np.asarray(x, float)),
            p_domain=(0.0, math.inf),
        )
    if name == "neglog":
        return BoundaryData(
            "neglog", (0.0, math.inf),
            phi=lambda x: -np.log(np.asarray(x, float)),
            dphi=lambda x: -1.0 / np.asarray(x, float),
            d2phi=lambda x: 1.0 / np.asarray(x, float) ** 2,
            p_domain=(-math.inf, 0.0),
        )
    raise DomainError(f"unknown boundary {name!r}; choose from {BOUNDARY_NAMES}")


def power_boundary(exponent: float) -> BoundaryData:
    """Convex power boundary on the half-line: x^p off [0, 1], -x^p inside (0, 1).

    These have no closed-form backwards extension here; they feed the spectral
    route as demonstrations.
    """
    p = float(exponent)
    if p in (0.0, 1.0):
        raise DomainError("exponents 0 and 1 give affine data with no convexity")
    sign = -1.0 if 0.0 < p < 1.0 else 1.0

    def phi(x):
        return sign * np.asarray(x, float) ** p

    def dphi(x):
        return sign * p * np.asarray(x, float) ** (p - 1.0)

    def d2phi(x):
        return sign * p * (p - 1.0) * np.asarray(x, float) ** (p - 2.0)

    if p > 1.0:
        p_domain = (0.0, math.inf)
    else:
        # p < 0 or p in (0, 1): the slope increases through negative values
        p_domain = (-math.inf, 0.0)
    return BoundaryData(f"power[{p:g}]", (0.0, math.inf), phi, dphi, d2phi, p_domain)


# ----------------------------------------------------------------------------
# Legendre transform
# ----------------------------------------------------------------------------

def _invert_monotone(fn, targets: np.ndarray, omega: tuple[float, float],
                     iterations: int = 90) -> np.ndarray:
    """Solve fn(x) = target for increasing fn on the interval omega."""
    targets = np.asarray(targets, dtype=float)
    lo_bound, hi_bound = omega
    shape = targets.shape
    t = targets.ravel()

    resolved = np.zeros(t.shape, dtype=bool)
    if math.isfinite(lo_bound) and math.isfinite(hi_bound):
        lo = np.full_like(t, np.nextafter(lo_bound, hi_bound))
        hi = np.full_like(t, np.nextafter(hi_bound, lo_bound))
        # on a compact interval the monotone gradient attains its edge values:
        # targets beyond them resolve to the endpoint (sup-envelope behavior)
        f_lo, f_hi = fn(lo), fn(hi)
        at_lo = f_lo >= t
        at_hi = f_hi <= t
        hi = np.where(at_lo, lo, hi)
        lo = np.where(at_hi, hi, lo)
        resolved = at_lo | at_hi
    elif math.isfinite(lo_bound):
        # half line (lo, inf): approach the edge geometrically
        lo = np.full_like(t, lo_bound + 1.0)
        for _ in range(1200):
            need = fn(lo) > t
            if not np.any(need):
                break
            lo = np.where(need, lo_bound + (lo - lo_bound) * 0.5, lo)
        hi = np.full_like(t, lo_bound + 1.0)
        for _ in range(1200):
            need = fn(hi) < t
            if not np.any(need):
                break
            hi = np.where(need, lo_bound + (hi - lo_bound) * 2.0, hi)
    elif math.isfinite(hi_bound):
        hi = np.full_like(t, hi_bound - 1.0)
        for _ in range(1200):
            need = fn(hi) < t
            if not np.any(need):
                break
            hi = np.where(need, hi_bound - (hi_bound - hi) * 0.5, hi)
        lo = np.full_like(t, hi_bound - 1.0)
        for _ in range(1200):
            need = fn(lo) > t
            if not np.any(need):
                break
            lo = np.where(need, hi_bound - (hi_bound - lo) * 2.0, lo)
    else:
        lo = np.full_like(t, -1.0)
        hi = np.full_like(t, 1.0)
        for _ in range(1200):
            need_lo = fn(lo) > t
            need_hi = fn(hi) < t
            if not (np.any(need_lo) or np.any(need_hi)):
                break
            lo = np.where(need_lo, 2.0 * lo, lo)
            hi = np.where(need_hi, 2.0 * hi, hi)

    open_miss = (~resolved) & ((fn(lo) > t + 1e-9) | (fn(hi) < t - 1e-9))
    if np.any(open_miss):
        raise RootBracketError("could not bracket the gradient equation on omega")

    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = fn(mid) <= t
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return (0.5 * (lo + hi)).reshape(shape)


class LegendreTransform:
    """Convex conjugate of boundary data, evaluated by inverting the gradient.

    Calling the object gives u0(p) = x(p) * p - Phi(x(p)) where x(p) solves
    Phi'(x) = p; slope(p) returns x(p), which is the conjugate's derivative.
    """

    def __init__(self, boundary: BoundaryData):
        self.boundary = boundary
        self.p_domain = boundary.p_domain

    def slope(self, p):
        x = _invert_monotone(self.boundary.dphi, np.asarray(p, float), self.boundary.omega)
        return float(x) if np.ndim(p) == 0 else x

    def __call__(self, p):
        p_arr = np.asarray(p, dtype=float)
        x = _invert_monotone(self.boundary.dphi, p_arr, self.boundary.omega)
        out = x * p_arr - np.asarray(self.boundary.phi(x), dtype=float)
        return float(out) if p_arr.ndim == 0 else out

    def curvature(self, p):
        x = _invert_monotone(self.boundary.dphi, np.asarray(p, float), self.boundary.omega)
        out = 1.0 / np.asarray(self.boundary.d2phi(x), dtype=float)
        return float(out) if np.ndim(p) == 0 else out

    def as_boundary(self) -> BoundaryData:
        """Package the conjugate as boundary data, enabling the involution."""
        return BoundaryData(
            name=f"{self.boundary.name}*",
            omega=self.p_domain,
            phi=self.__call__,
            dphi=self.slope,
            d2phi=self.curvature,
            p_domain=self.boundary.omega,
        )


def legendre_boundary(boundary: BoundaryData, samples: int = 201) -> LegendreTransform:
    """Heat boundary data u0(p) = x Phi'(x) - Phi(x) with p = Phi'(x).

    Requires strictly convex Phi; a vanishing second derivative anywhere on
    the sampled interior makes the gradient non-invertible and is refused.
    """
    probe = boundary.sample_interior(samples)
    curv = np.asarray(boundary.d2phi(probe), dtype=float)
    # cdf-type conjugates have curvature decaying to zero in the tails, so
    # only an exact zero (a flat piece) disqualifies
    if np.any(~np.isfinite(curv)) or np.any(curv <= 0.0):
        raise NonInvertibleGradientError(
            f"boundary {boundary.name!r} is not strictly convex on its interior"
        )
    return LegendreTransform(boundary)


# ----------------------------------------------------------------------------
# heat solutions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class HeatSolution:
    """A solution of u_pp + u_t = 0 on an explicit (p, t) region.

    Evaluators are vectorized; calls outside the region raise RegionError.
    The t interval may be open on the right (the cdf-based solution blows up
    at t = 1/2).
    """

    name: str
    method: str
    p_interval: tuple[float, float]
    t_interval: tuple[float, float]
    t_open_right: bool
    u: Callable = field(repr=False)
    u_p: Callable = field(repr=False)
    u_t: Callable = field(repr=False)
    u_pp: Callable = field(repr=False)
    u_pt: Callable = field(repr=False)
    u_tt: Callable = field(repr=False)
    notes: dict = field(default_factory=dict)

    @property
    def t_sup(self) -> float:
        return self.t_interval[1]

    def check_region(self, p, t) -> None:
        pad = 1e-9
        lo_p, hi_p = self.p_interval
        hi = self.t_interval[1]
        if isinstance(p, float) and isinstance(t, float):
            # scalar fast path: the Newton loop hits this many times per node
            if t < self.t_interval[0] - pad:
                raise RegionError(f"{self.name}: t below the validity region")
            if self.t_open_right:
                if t >= hi:
                    raise RegionError(f"{self.name}: t must stay strictly below {hi}")
            elif t > hi + pad:
                raise RegionError(f"{self.name}: t beyond the horizon {hi}")
            if p < lo_p - 1e-6 or p > hi_p + 1e-6:
                raise RegionError(f"{self.name}: p outside [{lo_p}, {hi_p}]")
            return
        p = np.asarray(p, dtype=float)
        t = np.asarray(t, dtype=float)
        if np.any(t < self.t_interval[0] - pad):
            raise RegionError(f"{self.name}: t below the validity region")
        if self.t_open_right:
            if np.any(t >= hi):
                raise RegionError(f"{self.name}: t must stay strictly below {hi}")
        elif np.any(t > hi + pad):
            raise RegionError(f"{self.name}: t beyond the horizon {hi}")
        if np.any(p < lo_p - 1e-6) or np.any(p > hi_p + 1e-6):
            raise RegionError(f"{self.name}: p outside [{lo_p}, {hi_p}]")

    def max_q(self) -> float:
        """Largest |q| consistent with the t region (q^2/2 inside it)."""
        hi = self.t_interval[1]
        if self.t_open_right:
            hi = hi * (1.0 - 1e-9)
        return math.sqrt(2.0 * hi)


def _guarded(sol_fields, fn):
    def wrapped(p, t):
        if isinstance(p, float) and isinstance(t, float):
            sol_fields["self"].check_region(p, t)
            return float(fn(p, t))
        sol_fields["self"].check_region(p, t)
        out = fn(np.asarray(p, float), np.asarray(t, float))
        return float(out) if np.ndim(out) == 0 else out

    return wrapped


def _build_solution(name, method, p_interval, t_interval, t_open_right,
                    raw, notes=None) -> HeatSolution:
    holder: dict = {}
    fns = tuple(_guarded(holder, f) for f in raw)
    sol = HeatSolution(name, method, p_interval, t_interval, t_open_right,
                       *fns, notes=notes or {})
    holder["self"] = sol
    return sol


def exponential_heat_solution(horizon: float = DEFAULT_HORIZON) -> HeatSolution:
    """u(p, t) = exp(p - t - 1); det(Hess u) = 0 identically."""
    e = lambda p, t: np.exp(p - t - 1.0)
    return _build_solution(
        "exponential", "closed_form", (-math.inf, math.inf), (0.0, horizon), False,
        (e, e, lambda p, t: -e(p, t), e, lambda p, t: -e(p, t), e),
    )


def quadratic_heat_solution(horizon: float = DEFAULT_HORIZON) -> HeatSolution:
    """u(p, t) = p^2/4 - t/2."""
    z = lambda p, t: 0.0 * p * t
    return _build_solution(
        "quadratic", "closed_form", (-math.inf, math.inf), (0.0, horizon), False,
        (
            lambda p, t: 0.25 * p * p - 0.5 * t,
            lambda p, t: 0.5 * p + 0.0 * t,
            lambda p, t: -0.5 + z(p, t),
            lambda p, t: 0.5 + z(p, t),
            z,
            z,
        ),
    )


def sine_heat_solution(horizon: float = DEFAULT_HORIZON) -> HeatSolution:
    """u(p, t) = -exp(t) sin(p) on p in [0, pi]; u_t <= 0 there."""
    return _build_solution(
        "sine", "closed_form", (0.0, math.pi), (0.0, horizon), False,
        (
            lambda p, t: -np.exp(t) * np.sin(p),
            lambda p, t: -np.exp(t) * np.cos(p),
            lambda p, t: -np.exp(t) * np.sin(p),
            lambda p, t: np.exp(t) * np.sin(p),
            lambda p, t: -np.exp(t) * np.cos(p),
            lambda p, t: -np.exp(t) * np.sin(p),
        ),
    )


def bobkov_heat_solution() -> HeatSolution:
    """u(p, t) = sqrt(1-2t) pdf(p/sqrt(1-2t)) + p cdf(p/sqrt(1-2t)), t < 1/2.

    u_p is the Gaussian cdf of the rescaled argument and det(Hess u) < 0,
    so the ellipticity certificate reduces to pdf(z)^2 / (1-2t)^2 >= 0.
    """

    def parts(p, t):
        s = np.sqrt(1.0 - 2.0 * t)
        z = p / s
        return s, z

    def u(p, t):
        s, z = parts(p, t)
        return s * std_normal_pdf(z) + p * std_normal_cdf(z)

    def u_p(p, t):
        _, z = parts(p, t)
        return std_normal_cdf(z)

    def u_pp(p, t):
        s, z = parts(p, t)
        return std_normal_pdf(z) / s

    def u_t(p, t):
        return -u_pp(p, t)

    def u_pt(p, t):
        s, z = parts(p, t)
        return z * std_normal_pdf(z) / (s * s)

    def u_tt(p, t):
        s, z = parts(p, t)
        return (z * z - 1.0) * std_normal_pdf(z) / s**3

    return _build_solution(
        "bobkov_cdf", "closed_form", (-math.inf, math.inf), (0.0, 0.5), True,
        (u, u_p, u_t, u_pp, u_pt, u_tt),
    )


def polynomial_heat_solution(coeffs: Sequence[float],
                             horizon: float = DEFAULT_HORIZON,
                             p_interval: tuple[float, float] = (-math.inf, math.inf),
                             name: str = "polynomial") -> HeatSolution:
    """Exact caloric extension of polynomial data sum c_k p^k."""
    c = [float(v) for v in coeffs]
    deg = len(c) - 1

    def combo(shift: int, p, t):
        total = np.zeros(np.broadcast(p, t).shape)
        for k in range(shift, deg + 1):
            factor = 1.0
            for j in range(shift):
                factor *= k - j
            if c[k] != 0.0:
                total = total + c[k] * factor * heat_polynomial(k - shift, p, t)
        return total

    return _build_solution(
        name, "polynomial", p_interval, (0.0, horizon), False,
        (
            lambda p, t: combo(0, p, t),
            lambda p, t: combo(1, p, t),
            lambda p, t: -combo(2, p, t),
            lambda p, t: combo(2, p, t),
            lambda p, t: -combo(3, p, t),
            lambda p, t: combo(4, p, t),
        ),
    )


def spectral_heat_solution(u0: Callable, sigma: float = 1.0, center: float = 0.0,
                           modes: int = 24, horizon: float = 0.25,
                           quad_order: int | None = None) -> HeatSolution:
    """Truncated Hermite-mode backwards extension of square-integrable data.

    The data is expanded against the Gaussian weight N(center, sigma^2); mode
    k evolves exactly into ((sigma^2+2t)/sigma^2)^(k/2) He_k(z) with
    z = (p-center)/sqrt(sigma^2+2t), so the top mode is amplified by
    ((sigma^2+2T)/sigma^2)^(K/2) at the horizon. Amplification past 1e6 is
    refused with the safe horizon reported: this is where the backwards flow
    stops being trustworthy for truncated data.
    """
    if sigma <= 0:
        raise DomainError("spectral weight needs sigma > 0")
    if modes < 1:
        raise DomainError("need at least one mode")
    amplification = ((sigma * sigma + 2.0 * horizon) / (sigma * sigma)) ** (modes / 2.0)
    if amplification > AMPLIFICATION_CAP:
        safe = 0.5 * sigma * sigma * (AMPLIFICATION_CAP ** (2.0 / modes) - 1.0)
        raise IllPosedError(
            f"mode amplification {amplification:.3e} exceeds {AMPLIFICATION_CAP:.0e} "
            f"at horizon {horizon:g}",
            safe_horizon=safe,
        )

    order = quad_order or max(2 * modes + 8, 64)
    rule = gauss_hermite_rule(order, 1)
    z_nodes = rule.nodes[:, 0]
    data = np.asarray(u0(center + sigma * z_nodes), dtype=float)
    coeffs = np.empty(modes + 1)
    for k in range(modes + 1):
        coeffs[k] = float(rule.weights @ (data * hermite_he(k, z_nodes))) / math.factorial(k)

    def mode_sum(p, t, drop: int):
        p = np.asarray(p, float)
        t = np.asarray(t, float)
        tau = sigma * sigma + 2.0 * t
        z = (p - center) / np.sqrt(tau)
        total = np.zeros(np.broadcast(p, t).shape)
        for k in range(drop, modes + 1):
            he = hermite_he(k - drop, z)
            factor = 1.0
            for j in range(drop):
                factor *= k - j
            total = total + coeffs[k] * factor * sigma ** (-k) * tau ** ((k - drop) / 2.0) * he
        return total

    return _build_solution(
        "spectral", "spectral", (center - 12.0 * sigma, center + 12.0 * sigma),
        (0.0, horizon), False,
        (
            lambda p, t: mode_sum(p, t, 0),
            lambda p, t: mode_sum(p, t, 1),
            lambda p, t: -mode_sum(p, t, 2),
            lambda p, t: mode_sum(p, t, 2),
            lambda p, t: -mode_sum(p, t, 3),
            lambda p, t: mode_sum(p, t, 4),
        ),
        notes={"modes": modes, "sigma": sigma, "center": center,
               "amplification": amplification},
    )


_CLOSED_FORM_FAMILIES = {
    "exponential": exponential_heat_solution,
    "quadratic": quadratic_heat_solution,
    "sine": sine_heat_solution,
}
_BOUNDARY_TO_FAMILY = {"gross": "exponential", "nash": "quadratic",
                       "bobkov": "bobkov_cdf", "arccos": "sine"}
_POLYNOMIAL_BOUNDARY_COEFFS = {
    "nash": (0.0, 0.0, 0.25),
    "three_halves": (0.0, 0.0, 0.0, 4.0 / 27.0),
}


def solve_backward_heat(data, method: str = "closed_form",
                        horizon: float | None = None, **spectral_kwargs) -> HeatSolution:
    """Extend boundary data backwards in heat time by the requested method.

    data may be a BoundaryData, a boundary name, a closed-form family name,
    a coefficient sequence (polynomial method), or a callable (spectral).
    An explicit horizon at or past 1/2 for the cdf family is a region error.
    """
    name = None
    if isinstance(data, BoundaryData):
        name = data.name
    elif isinstance(data, str):
        name = data

    if method == "closed_form":
        family = _BOUNDARY_TO_FAMILY.get(name, name)
        if family == "bobkov_cdf":
            if horizon is not None and horizon >= 0.5:
                raise RegionError("the cdf-based solution exists only for t < 1/2")
            return bobkov_heat_solution()
        if family not in _CLOSED_FORM_FAMILIES:
            raise DomainError(
                f"closed_form covers exponential, quadratic, bobkov_cdf, sine; got {data!r}"
            )
        return _CLOSED_FORM_FAMILIES[family](horizon if horizon is not None else DEFAULT_HORIZON)

    if method == "polynomial":
        T = horizon if horizon is not None else DEFAULT_HORIZON
        if name is not None:
            if name not in _POLYNOMIAL_BOUNDARY_COEFFS:
                raise DomainError(f"no polynomial boundary data for {name!r}")
            p_int = (0.0, math.inf) if name == "three_halves" else (-math.inf, math.inf)
            return polynomial_heat_solution(_POLYNOMIAL_BOUNDARY_COEFFS[name], T,
                                            p_interval=p_int, name=name)
        return polynomial_heat_solution(tuple(data), T)

    if method == "spectral":
        T = horizon if horizon is not None else 0.25
        if isinstance(data, BoundaryData):
            u0 = legendre_boundary(data)
            lo, hi = data.p_domain
            lo_c = lo + 1e-9 * max(1.0, abs(lo)) if math.isfinite(lo) else -math.inf
            hi_c = hi - 1e-9 * max(1.0, abs(hi)) if math.isfinite(hi) else math.inf

            def windowed(p):
                # expansion nodes may leave the conjugate's domain; clamp to
                # its edge (constant continuation, demonstration quality)
                return u0(np.clip(np.asarray(p, float), lo_c, hi_c))

            return spectral_heat_solution(windowed, horizon=T, **spectral_kwargs)
        if callable(data):
            return spectral_heat_solution(data, horizon=T, **spectral_kwargs)
        raise DomainError("spectral method needs boundary data or a callable")

    raise DomainError(f"unknown method {method!r}")


def heat_solution_for_boundary(name: str, horizon: float | None = None) -> HeatSolution:
    """The exact backwards solution used to reconstruct a catalog boundary."""
    if name == "three_halves":
        return solve_backward_heat(catalog_boundary(name), "polynomial", horizon)
    if name in _BOUNDARY_TO_FAMILY:
        return solve_backward_heat(catalog_boundary(name), "closed_form", horizon)
    raise DomainError(f"no exact backwards solution for boundary {name!r}")


# ----------------------------------------------------------------------------
# ellipticity certificate
# ----------------------------------------------------------------------------

@dataclass
class EllipticityReport:
    solution: str
    min_certificate: float
    max_u_t: float
    n_nodes: int
    n_near_singular: int
    tol: float

    @property
    def passed(self) -> bool:
        return self.min_certificate >= -self.tol and self.max_u_t <= self.tol


def ellipticity_check(solution: HeatSolution, p_values=None, t_values=None,
                      tol: float = 1e-9) -> EllipticityReport:
    """Evaluate u_t^2 - 2t det(Hess u) and the sign of u_t over a grid.

    Nodes where the certificate sits at zero (within 1e-12) are counted
    separately: there the surface slope M_yy degenerates and downstream
    consumers must treat the node as singular rather than interpolate.
    """
    if p_values is None:
        lo = max(solution.p_interval[0], -4.0)
        hi = min(solution.p_interval[1], 4.0)
        p_values = np.linspace(lo, hi, 41)
    if t_values is None:
        hi = solution.t_sup
        if solution.t_open_right:
            hi *= 0.999
        t_values = np.linspace(solution.t_interval[0], min(hi, 4.0), 41)
    P, T = np.meshgrid(np.asarray(p_values, float), np.asarray(t_values, float),
                       indexing="ij")
    ut = np.asarray(solution.u_t(P, T), float)
    upp = np.asarray(solution.u_pp(P, T), float)
    upt = np.asarray(solution.u_pt(P, T), float)
    utt = np.asarray(solution.u_tt(P, T), float)
    cert = ut * ut - 2.0 * T * (upp * utt - upt * upt)
    return EllipticityReport(
        solution=solution.name,
        min_certificate=float(np.min(cert)),
        max_u_t=float(np.max(ut)),
        n_nodes=int(cert.size),
        n_near_singular=int(np.sum(np.abs(cert) <= 1e-12)),
        tol=tol,
    )


# ----------------------------------------------------------------------------
# reconstruction
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ReconstructionResult:
    M_value: float
    p: float
    q: float
    newton_iterations: int
    residual: float


def _characteristic_residual(sol: HeatSolution, p: float, q: float,
                             x: float, y: float) -> tuple[float, float]:
    t = 0.5 * q * q
    f1 = float(sol.u_p(p, t)) - x
    f2 = q * float(sol.u_t(p, t)) - y
    return f1, f2


def _clamp_p(sol: HeatSolution, p: float) -> float:
    lo, hi = sol.p_interval
    if math.isfinite(lo):
        p = max(p, lo)
    if math.isfinite(hi):
        p = min(p, hi)
    return p


def _solve_p_for_q(sol: HeatSolution, q: float, x: float, p_seed: float) -> float:
    """1D solve of u_p(p, q^2/2) = x; u_pp >= 0 on the catalog solutions."""
    t = 0.5 * q * q
    lo, hi = sol.p_interval
    a = _clamp_p(sol, p_seed - 1.0)
    b = _clamp_p(sol, p_seed + 1.0)
    for _ in range(200):
        if float(sol.u_p(a, t)) <= x:
            break
        a = _clamp_p(sol, a - max(1.0, abs(a)))
        if math.isfinite(lo) and a <= lo:
            break
    for _ in range(200):
        if float(sol.u_p(b, t)) >= x:
            break
        b = _clamp_p(sol, b + max(1.0, abs(b)))
        if math.isfinite(hi) and b >= hi:
            break
    for _ in range(200):
        mid = 0.5 * (a + b)
        if float(sol.u_p(mid, t)) <= x:
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def reconstruct_point(sol: HeatSolution, x: float, y: float,
                      boundary: BoundaryData | None = None,
                      seed: tuple[float, float] | None = None,
                      tol: float = 1e-12, max_iterations: int = 100,
                      q_limit: float | None = None) -> ReconstructionResult:
    """Recover M(x, y) by solving the characteristic system for (p, q).

    Damped Newton on (u_p - x, q u_t - y) over the half-plane q <= 0, with a
    nested-bisection fallback; y = 0 short-circuits to q = 0 and the boundary
    slope. The value returned is M = p x + q y - u(p, q^2/2).
    """
    if y < 0:
        raise DomainError("reconstruction needs y >= 0")
    q_max = q_limit if q_limit is not None else sol.max_q()

    if y == 0.0:
        p = float(boundary.dphi(x)) if boundary is not None else _solve_p_for_q(sol, 0.0, x, 0.0)
        p = _clamp_p(sol, p)
        residual = abs(float(sol.u_p(p, 0.0)) - x)
        m = p * x - float(sol.u(p, 0.0))
        return ReconstructionResult(m, p, 0.0, 0, residual)

    if seed is not None:
        p, q = seed
    else:
        p = float(boundary.dphi(x)) if boundary is not None else _solve_p_for_q(sol, 0.0, x, 0.0)
        q = -min(1e-3, 0.5 * q_max)
    p = _clamp_p(sol, p)
    q = float(np.clip(q, -q_max, 0.0))

    scale = max(1.0, abs(x), abs(y))
    f1, f2 = _characteristic_residual(sol, p, q, x, y)
    norm = max(abs(f1), abs(f2))
    its = 0
    while norm > tol * scale and its < max_iterations:
        its += 1
        t = 0.5 * q * q
        j11 = float(sol.u_pp(p, t))
        j12 = q * float(sol.u_pt(p, t))
        j21 = j12
        j22 = float(sol.u_t(p, t)) + q * q * float(sol.u_tt(p, t))
        det = j11 * j22 - j12 * j21
        if not math.isfinite(det) or abs(det) < 1e-300:
            break
        dp = -(j22 * f1 - j12 * f2) / det
        dq = -(-j21 * f1 + j11 * f2) / det
        lam = 1.0
        improved = False
        while lam > 1e-6:
            p_new = _clamp_p(sol, p + lam * dp)
            q_new = float(np.clip(q + lam * dq, -q_max, 0.0))
            g1, g2 = _characteristic_residual(sol, p_new, q_new, x, y)
            new_norm = max(abs(g1), abs(g2))
            if new_norm < norm * (1.0 - 0.25 * lam) or new_norm < tol * scale:
                p, q, f1, f2, norm = p_new, q_new, g1, g2, new_norm
                improved = True
                break
            lam *= 0.5
        if not improved:
            break

    if norm > tol * scale:
        # nested bisection in q: q -> q * u_t(p(q), q^2/2) is monotone down
        a, b = -q_max, 0.0
        pa = _solve_p_for_q(sol, a, x, p)
        ga = a * float(sol.u_t(pa, 0.5 * a * a)) - y
        gb = -y
        if ga < 0.0 and gb < 0.0:
            raise ReconstructionError(
                f"({x}, {y}) is outside the reachable characteristic image", norm, its,
                reason="unreachable",
            )
        for _ in range(200):
            mid = 0.5 * (a + b)
            pm = _solve_p_for_q(sol, mid, x, p)
            gm = mid * float(sol.u_t(pm, 0.5 * mid * mid)) - y
            if gm >= 0.0:
                a = mid
            else:
                b = mid
        q = 0.5 * (a + b)
        p = _solve_p_for_q(sol, q, x, p)
        f1, f2 = _characteristic_residual(sol, p, q, x, y)
        norm = max(abs(f1), abs(f2))
        if norm > 100.0 * tol * scale:
            raise ReconstructionError("bisection fallback did not converge", norm, its)

    t = 0.5 * q * q
    m = p * x + q * y - float(sol.u(p, t))
    return ReconstructionResult(m, p, q, its, norm)


@dataclass
class ReconstructionTable:
    """Per-node reconstruction over a grid, with optional closed-form deviations."""

    boundary: str
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    q: np.ndarray
    M: np.ndarray
    residual: np.ndarray
    iterations: np.ndarray
    status: np.ndarray  # "ok" | "skipped" | "failed"
    deviation: np.ndarray | None = None
    fd_max_eig: float | None = None
    fd_max_residual: float | None = None

    CSV_HEADER = ("x", "y", "p", "q", "M", "residual", "iterations")

    def rows(self):
        return list(zip(self.x.ravel(), self.y.ravel(), self.p.ravel(),
                        self.q.ravel(), self.M.ravel(), self.residual.ravel(),
                        self.iterations.ravel()))

    @property
    def n_failed(self) -> int:
        return int(np.sum(self.status == "failed"))

    @property
    def n_skipped(self) -> int:
        return int(np.sum(self.status == "skipped"))

    @property
    def n_ok(self) -> int:
        return int(np.sum(self.status == "ok"))

    @property
    def max_deviation(self) -> float:
        if self.deviation is None:
            return math.nan
        ok = self.status == "ok"
        return float(np.max(np.abs(self.deviation[ok]))) if np.any(ok) else math.nan

    @property
    def max_iterations(self) -> int:
        ok = self.status == "ok"
        return int(np.max(self.iterations[ok])) if np.any(ok) else 0


def reconstruct_grid(sol: HeatSolution, x_values, y_values,
                     boundary: BoundaryData | None = None,
                     reference: Callable | None = None,
                     tol: float = 1e-12, t_max: float | None = None,
                     fd_check: bool = False, fd_step: float = 1e-4,
                     fd_stride: int = 5) -> ReconstructionTable:
    """Reconstruct M over a grid with continuation seeding along each column.

    Columns share increasing y; each node seeds Newton from the previous
    solution, starting at the y = 0 limit q = 0, p = Phi'(x). Nodes whose
    characteristic time q^2/2 would leave the allowed region are flagged
    skipped, not failed.
    """
    xs = np.asarray(x_values, dtype=float)
    ys = np.asarray(y_values, dtype=float)
    q_allow = sol.max_q()
    if t_max is not None:
        if t_max > sol.t_sup + 1e-12 or (sol.t_open_right and t_max >= sol.t_sup):
            raise RegionError(
                f"requested t_max {t_max} exceeds the region of {sol.name}"
            )
        q_allow = min(q_allow, math.sqrt(2.0 * t_max))

    nx, ny = xs.size, ys.size
    P = np.zeros((nx, ny))
    Q = np.zeros((nx, ny))
    M = np.full((nx, ny), np.nan)
    R = np.full((nx, ny), np.nan)
    IT = np.zeros((nx, ny), dtype=int)
    status = np.full((nx, ny), "ok", dtype=object)

    for i, x in enumerate(xs):
        seed = None
        for j, y in enumerate(np.sort(ys)):
            try:
                res = reconstruct_point(sol, float(x), float(y), boundary=boundary,
                                        seed=seed, tol=tol, q_limit=q_allow)
            except ReconstructionError as exc:
                status[i, j] = "skipped" if exc.reason == "unreachable" else "failed"
                seed = None
                continue
            except (RegionError, RootBracketError):
                status[i, j] = "failed"
                seed = None
                continue
            pinned = abs(res.q) >= q_allow * (1.0 - 1e-9) and res.residual > 100 * tol
            if pinned:
                status[i, j] = "skipped"
                seed = None
                continue
            if res.residual > 1e-8:
                status[i, j] = "failed"
                seed = None
                continue
            P[i, j], Q[i, j], M[i, j] = res.p, res.q, res.M_value
            R[i, j], IT[i, j] = res.residual, res.newton_iterations
            seed = (res.p, res.q)

    deviation = None
    if reference is not None:
        X, Y = np.meshgrid(xs, np.sort(ys), indexing="ij")
        ref = np.asarray(reference(X, Y), dtype=float)
        deviation = np.where(status == "ok", M - ref, 0.0)

    table = ReconstructionTable(
        boundary=sol.name,
        x=np.repeat(xs, ny), y=np.tile(np.sort(ys), nx),
        p=P.ravel(), q=Q.ravel(), M=M.ravel(), residual=R.ravel(),
        iterations=IT.ravel(), status=status.ravel(),
        deviation=None if deviation is None else deviation.ravel(),
    )

    if fd_check:
        max_eig, max_res = _fd_constraint_check(sol, xs, ys, P, Q, status,
                                                boundary, tol, q_allow,
                                                fd_step, fd_stride)
        table.fd_max_eig = max_eig
        table.fd_max_residual = max_res
    return table


def _fd_constraint_check(sol, xs, ys, P, Q, status, boundary, tol, q_allow,
                         h, stride):
    """Certificate entries from first differences of the solved (p, q) fields.

    The slope identities M_x = p, M_y = q hold exactly on the reconstruction,
    so second derivatives come from differencing p and q; this avoids dividing
    Newton noise by h^2.
    """
    ys_sorted = np.sort(ys)
    max_eig = -math.inf
    max_res = 0.0

    def solve(x, y, seed):
        return reconstruct_point(sol, x, y, boundary=boundary, seed=seed,
                                 tol=tol, q_limit=q_allow)

    for i in range(1, len(xs) - 1, stride):
        for j in range(1, len(ys_sorted) - 1, stride):
            if status[i, j] != "ok":
                continue
            x, y = float(xs[i]), float(ys_sorted[j])
            if y <= h:
                continue
            seed = (P[i, j], Q[i, j])
            try:
                rxp = solve(x + h, y, seed)
                rxm = solve(x - h, y, seed)
                ryp = solve(x, y + h, seed)
                rym = solve(x, y - h, seed)
            except (ReconstructionError, RegionError, RootBracketError):
                continue
            m_xx = (rxp.p - rxm.p) / (2.0 * h)
            m_xy = (ryp.p - rym.p) / (2.0 * h)
            m_yy = (ryp.q - rym.q) / (2.0 * h)
            q = Q[i, j]
            a11 = m_xx + q / y
            half = 0.5 * (a11 + m_yy)
            disc = math.sqrt(max(half * half - (a11 * m_yy - m_xy * m_xy), 0.0))
            max_eig = max(max_eig, half + disc)
            res = y * (m_xx * m_yy - m_xy * m_xy) + q * m_yy
            scale = abs(y) * (abs(m_xx * m_yy) + m_xy * m_xy) + abs(q * m_yy)
            max_res = max(max_res, abs(res) / max(scale, 1.0))
    return max_eig, max_res
