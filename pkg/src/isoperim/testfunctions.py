"""Smooth test functions with analytic derivatives for the verification suite.

A TestFunction maps R^n into a declared codomain interval and exposes its
value, gradient, and (for n = 1) derivatives up to order 4. Multivariate
entries are built either by composing a 1D profile with a unit direction,
which preserves every Gaussian integral of the 1D case, or as genuinely
additive combinations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, PreconditionError
from .special import std_normal_cdf, std_normal_pdf

INF = math.inf


@dataclass(frozen=True)
class TestFunction:
    name: str
    dim: int
    codomain: tuple[float, float]
    even: bool
    order: int
    value_fn: Callable[[np.ndarray], np.ndarray]
    grad_fn: Callable[[np.ndarray], np.ndarray]
    derivs_1d: Optional[tuple[Callable, ...]] = None

    def value(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise DomainError(f"{self.name}: points must have {self.dim} columns")
        return np.asarray(self.value_fn(pts), dtype=float)

    def grad(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.dim:
            raise DomainError(f"{self.name}: points must have {self.dim} columns")
        return np.asarray(self.grad_fn(pts), dtype=float)

    def grad_norm(self, points: np.ndarray) -> np.ndarray:
        g = self.grad(points)
        return np.sqrt(np.sum(g * g, axis=1))

    def deriv(self, k: int, x) -> np.ndarray:
        """k-th derivative along the line, only for 1D entries."""
        if self.derivs_1d is None:
            raise PreconditionError(f"{self.name} carries no scalar derivative stack")
        if not 0 <= k < len(self.derivs_1d):
            raise PreconditionError(
                f"{self.name} exposes derivatives up to order {len(self.derivs_1d) - 1}"
            )
        return np.asarray(self.derivs_1d[k](np.asarray(x, dtype=float)), dtype=float)

    @property
    def positive(self) -> bool:
        return self.codomain[0] >= 0.0

    def rescaled(self, c: float) -> "TestFunction":
        """The function x -> f(c x); used for measure-scaling covariance."""
        value_fn = self.value_fn
        grad_fn = self.grad_fn

        def val(pts):
            return value_fn(c * pts)

        def grd(pts):
            return c * grad_fn(c * pts)

        derivs = None
        if self.derivs_1d is not None:
            derivs = tuple(
                (lambda k: (lambda x, _k=k: c**_k * self.derivs_1d[_k](c * x)))(k)
                for k in range(len(self.derivs_1d))
            )
        return replace(self, name=f"{self.name}~scale{c:g}", value_fn=val,
                       grad_fn=grd, derivs_1d=derivs)

    def scaled_by(self, eps: float) -> "TestFunction":
        """The function eps * f, with codomain scaled accordingly."""
        value_fn = self.value_fn
        grad_fn = self.grad_fn
        lo, hi = sorted((eps * self.codomain[0], eps * self.codomain[1]))

        def val(pts):
            return eps * value_fn(pts)

        def grd(pts):
            return eps * grad_fn(pts)

        derivs = None
        if self.derivs_1d is not None:
            derivs = tuple(
                (lambda k: (lambda x, _k=k: eps * self.derivs_1d[_k](x)))(k)
                for k in range(len(self.derivs_1d))
            )
        return replace(self, name=f"{eps:g}*{self.name}", codomain=(lo, hi),
                       value_fn=val, grad_fn=grd, derivs_1d=derivs)

    def squared(self) -> "TestFunction":
        """f^2 with gradient 2 f grad(f); needs a nonnegative codomain."""
        value_fn = self.value_fn
        grad_fn = self.grad_fn
        lo, hi = self.codomain
        lo2 = 0.0 if lo <= 0.0 <= hi else min(lo * lo, hi * hi)
        hi2 = max(lo * lo, hi * hi) if math.isfinite(lo) and math.isfinite(hi) else INF

        def val(pts):
            v = value_fn(pts)
            return v * v

        def grd(pts):
            return 2.0 * value_fn(pts)[:, None] * grad_fn(pts)

        return replace(self, name=f"{self.name}^2", codomain=(lo2, hi2),
                       value_fn=val, grad_fn=grd, derivs_1d=None,
                       even=self.even)


def _from_profile(name: str, dim: int, derivs: tuple[Callable, ...],
                  codomain: tuple[float, float], even: bool,
                  direction: tuple[float, ...] | None = None) -> TestFunction:
    """Lift a 1D derivative stack to dimension dim along a unit direction."""
    if dim == 1:
        def val(pts):
            return derivs[0](pts[:, 0])

        def grd(pts):
            return derivs[1](pts[:, 0])[:, None]

        return TestFunction(name, 1, codomain, even, len(derivs) - 1, val, grd, derivs)

    w = np.asarray(direction if direction is not None else (0.6, 0.8), dtype=float)
    if w.shape != (dim,):
        raise DomainError("direction length must match dim")
    if abs(float(w @ w) - 1.0) > 1e-12:
        raise DomainError("direction must be a unit vector")

    def val(pts):
        return derivs[0](pts @ w)

    def grd(pts):
        return derivs[1](pts @ w)[:, None] * w[None, :]

    return TestFunction(f"{name}@{dim}d", dim, codomain, even, len(derivs) - 1,
                        val, grd, None)


# ----------------------------------------------------------------------------
# 1D profiles (value plus four derivatives)
# ----------------------------------------------------------------------------

def _const(c):
    z = lambda x: np.zeros_like(x)
    return (lambda x: np.full_like(x, c), z, z, z, z)


def _affine(b):
    z = lambda x: np.zeros_like(x)
    return (lambda x: x + b, lambda x: np.ones_like(x), z, z, z)


def _exp(a):
    return tuple((lambda k: (lambda x, _k=k: a**_k * np.exp(a * x)))(k) for k in range(5))


def _poly(coeffs):
    """Polynomial sum c_j x^j with exact derivative stacks."""
    c = np.asarray(coeffs, dtype=float)

    def deriv(k):
        ck = c.copy()
        for _ in range(k):
            ck = ck[1:] * np.arange(1, len(ck))
        return lambda x, _ck=ck: np.polynomial.polynomial.polyval(x, _ck) if len(_ck) else np.zeros_like(x)

    return tuple(deriv(k) for k in range(5))


def _logistic(a, b):
    def sig(x):
        return 1.0 / (1.0 + np.exp(-(a * x + b)))

    def d1(x):
        s = sig(x)
        return a * s * (1.0 - s)

    def d2(x):
        s = sig(x)
        return a * a * s * (1.0 - s) * (1.0 - 2.0 * s)

    def d3(x):
        s = sig(x)
        return a**3 * s * (1.0 - s) * (1.0 - 6.0 * s + 6.0 * s * s)

    def d4(x):
        s = sig(x)
        return a**4 * s * (1.0 - s) * (1.0 - 14.0 * s + 36.0 * s * s - 24.0 * s**3)

    return (sig, d1, d2, d3, d4)


def _normcdf(a, b):
    # d^k/dx^k CDF(ax+b) = a^k * (-1)^(k-1) He_{k-1}(ax+b) * pdf(ax+b)
    def u(x):
        return a * x + b

    return (
        lambda x: std_normal_cdf(u(x)),
        lambda x: a * std_normal_pdf(u(x)),
        lambda x: -(a**2) * u(x) * std_normal_pdf(u(x)),
        lambda x: a**3 * (u(x) ** 2 - 1.0) * std_normal_pdf(u(x)),
        lambda x: a**4 * (3.0 * u(x) - u(x) ** 3) * std_normal_pdf(u(x)),
    )


def _tanh(scale, shift, slope):
    """shift + scale * tanh(slope * x), with derivatives via T' = 1 - T^2."""
    def t(x):
        return np.tanh(slope * x)

    def d0(x):
        return shift + scale * t(x)

    def d1(x):
        T = t(x)
        return scale * slope * (1.0 - T * T)

    def d2(x):
        T = t(x)
        return -2.0 * scale * slope**2 * T * (1.0 - T * T)

    def d3(x):
        T = t(x)
        return -2.0 * scale * slope**3 * (1.0 - T * T) * (1.0 - 3.0 * T * T)

    def d4(x):
        T = t(x)
        return 8.0 * scale * slope**4 * T * (1.0 - T * T) * (2.0 - 3.0 * T * T)

    return (d0, d1, d2, d3, d4)


_PROFILES: dict[str, tuple[tuple, tuple[float, float], bool]] = {
    # name: (derivative stack, codomain, even)
    "const_03": (_const(0.3), (0.3, 0.3), True),
    "const_07": (_const(0.7), (0.7, 0.7), True),
    "x": (_affine(0.0), (-INF, INF), False),
    "x_plus_5": (_affine(5.0), (-INF, INF), False),
    "exp_025": (_exp(0.25), (0.0, INF), False),
    "exp_03": (_exp(0.3), (0.0, INF), False),
    "exp_04": (_exp(0.4), (0.0, INF), False),
    "exp_05": (_exp(0.5), (0.0, INF), False),
    "quad_02": (_poly([1.0, 0.0, 0.2]), (1.0, INF), True),
    "x2": (_poly([0.0, 0.0, 1.0]), (0.0, INF), True),
    "x2_plus_1": (_poly([1.0, 0.0, 1.0]), (1.0, INF), True),
    "x2_minus_1": (_poly([-1.0, 0.0, 1.0]), (-1.0, INF), True),
    "x4": (_poly([0.0, 0.0, 0.0, 0.0, 1.0]), (0.0, INF), True),
    "x3_plus_x": (_poly([0.0, 1.0, 0.0, 1.0]), (-INF, INF), False),
    "poly_sq": (_poly([1.0, 0.6, 0.09]), (0.0, INF), False),  # (1 + 0.3 x)^2
    "hermite_mix": (_poly([1.75, 0.5, 0.25]), (1.5, INF), False),  # 2 + He1/2 + He2/4
    "logistic_1": (_logistic(1.0, 0.0), (0.0, 1.0), False),
    "logistic_2": (_logistic(2.0, 0.0), (0.0, 1.0), False),
    "normcdf_1": (_normcdf(1.0, 0.0), (0.0, 1.0), False),
    "normcdf_h": (_normcdf(0.5, 0.2), (0.0, 1.0), False),
    "half_tanh": (_tanh(0.5, 0.0, 1.0), (-0.5, 0.5), False),
    "tanh_half": (_tanh(1.0, 0.0, 0.5), (-1.0, 1.0), False),
    "one_plus_half_tanh": (_tanh(0.5, 1.0, 1.0), (0.5, 1.5), False),
}


def _additive_logistic(dim: int) -> TestFunction:
    s1 = _logistic(1.0, 0.0)
    s2 = _logistic(2.0, -1.0)

    def val(pts):
        return 0.5 * s1[0](pts[:, 0]) + 0.5 * s2[0](pts[:, 1])

    def grd(pts):
        g = np.empty_like(pts)
        g[:, 0] = 0.5 * s1[1](pts[:, 0])
        g[:, 1] = 0.5 * s2[1](pts[:, 1])
        return g

    return TestFunction("logistic_add@2d", dim, (0.0, 1.0), False, 1, val, grd)


def _radial_quad(dim: int) -> TestFunction:
    def val(pts):
        return 1.0 + 0.1 * np.sum(pts * pts, axis=1)

    def grd(pts):
        return 0.2 * pts

    return TestFunction("radial_quad@2d", dim, (1.0, INF), True, 2, val, grd)


def catalog_function(name: str, dim: int = 1) -> TestFunction:
    """Look up a catalog test function at the requested dimension."""
    if dim not in (1, 2):
        raise DomainError("test function catalog covers dimensions 1 and 2")
    if name == "logistic_add" and dim == 2:
        return _additive_logistic(2)
    if name == "radial_quad" and dim == 2:
        return _radial_quad(2)
    if name not in _PROFILES:
        raise DomainError(f"unknown test function {name!r}")
    derivs, codomain, even = _PROFILES[name]
    return _from_profile(name, dim, derivs, codomain, even)


def catalog_names(dim: int = 1) -> list[str]:
    names = sorted(_PROFILES)
    if dim == 2:
        names += ["logistic_add", "radial_quad"]
    return names


def hermite_variance(coeffs_by_mode: dict[int, float]) -> float:
    """Variance of sum a_k He_k under the standard Gaussian: sum_{k>=1} a_k^2 k!."""
    return float(sum(a * a * math.factorial(k) for k, a in coeffs_by_mode.items() if k >= 1))
