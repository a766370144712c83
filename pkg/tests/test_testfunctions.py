import numpy as np
import pytest

from isoperim.errors import DomainError, PreconditionError
from isoperim.special import gauss_hermite_rule
from isoperim.testfunctions import catalog_function, catalog_names, hermite_variance


def all_entries():
    for dim in (1, 2):
        for name in catalog_names(dim):
            yield catalog_function(name, dim)


@pytest.mark.parametrize("f", list(all_entries()), ids=lambda f: f"{f.name}")
def test_range_stays_in_codomain(f):
    rule = gauss_hermite_rule(64, f.dim)
    vals = f.value(rule.nodes)
    lo, hi = f.codomain
    assert np.all(vals >= lo - 1e-12)
    assert np.all(vals <= hi + 1e-12)


@pytest.mark.parametrize("f", list(all_entries()), ids=lambda f: f"{f.name}")
def test_gradient_matches_differences(f):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-2.0, 2.0, size=(40, f.dim))
    g = f.grad(pts)
    h = 1e-6
    for axis in range(f.dim):
        shift = np.zeros((1, f.dim))
        shift[0, axis] = h
        fd = (f.value(pts + shift) - f.value(pts - shift)) / (2 * h)
        err = np.abs(g[:, axis] - fd) / np.maximum(np.abs(g[:, axis]), 1.0)
        assert np.max(err) < 1e-6


@pytest.mark.parametrize("f", list(all_entries()), ids=lambda f: f"{f.name}")
def test_evenness_flag_is_honest(f):
    rng = np.random.default_rng(11)
    pts = rng.uniform(-3.0, 3.0, size=(60, f.dim))
    symmetric = np.max(np.abs(f.value(pts) - f.value(-pts)))
    if f.even:
        assert symmetric < 1e-12
    else:
        assert symmetric > 1e-8  # flag must not overclaim


def test_higher_derivatives_match_differences():
    # derivative stacks to order 4, checked pairwise: d/dx of deriv(k) = deriv(k+1)
    xs = np.linspace(-2.0, 2.0, 17)
    h = 1e-5
    for name in catalog_names(1):
        f = catalog_function(name, 1)
        for k in range(f.order):
            fd = (f.deriv(k, xs + h) - f.deriv(k, xs - h)) / (2 * h)
            err = np.abs(fd - f.deriv(k + 1, xs))
            scale = np.maximum(np.abs(f.deriv(k + 1, xs)), 1.0)
            assert np.max(err / scale) < 1e-8, (name, k)


def test_deriv_order_guard():
    f = catalog_function("x2", 1)
    with pytest.raises(PreconditionError):
        f.deriv(5, 0.0)
    f2 = catalog_function("logistic_add", 2)
    with pytest.raises(PreconditionError):
        f2.deriv(1, 0.0)


def test_dimension_guard():
    f = catalog_function("x", 1)
    with pytest.raises(DomainError):
        f.value(np.zeros((3, 2)))
    with pytest.raises(DomainError):
        catalog_function("x", 3)
    with pytest.raises(DomainError):
        catalog_function("nope", 1)


def test_directional_lift_preserves_integrals():
    # unit-direction composition leaves every Gaussian integral unchanged
    rule1 = gauss_hermite_rule(48, 1)
    rule2 = gauss_hermite_rule(48, 2)
    for name in ("exp_03", "logistic_1", "quad_02"):
        f1 = catalog_function(name, 1)
        f2 = catalog_function(name, 2)
        m1 = float(rule1.weights @ f1.value(rule1.nodes))
        m2 = float(rule2.weights @ f2.value(rule2.nodes))
        assert m1 == pytest.approx(m2, abs=1e-13)


def test_rescaled_matches_substitution():
    f = catalog_function("exp_03", 1)
    g = f.rescaled(0.5)
    xs = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(g.value(xs), np.exp(0.3 * 0.5 * xs[:, 0]))
    assert np.allclose(g.grad(xs)[:, 0], 0.15 * np.exp(0.15 * xs[:, 0]))
    assert np.allclose(g.deriv(2, xs[:, 0]), 0.15**2 * np.exp(0.15 * xs[:, 0]))


def test_scaled_by_shrinks_codomain():
    f = catalog_function("x2_minus_1", 1).scaled_by(0.01)
    assert f.codomain[0] == pytest.approx(-0.01)
    xs = np.array([[2.0]])
    assert f.value(xs)[0] == pytest.approx(0.03)


def test_squared_combinator():
    f = catalog_function("logistic_1", 1)
    sq = f.squared()
    xs = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(sq.value(xs), f.value(xs) ** 2)
    assert np.allclose(sq.grad(xs), 2 * f.value(xs)[:, None] * f.grad(xs))
    assert sq.codomain == (0.0, 1.0)


def test_hermite_variance_oracle():
    # x^3 + x = He_3 + 4 He_1; 2 + He_1/2 + He_2/4 has variance 1/4 + 1/8
    assert hermite_variance({3: 1.0, 1: 4.0}) == pytest.approx(22.0)
    assert hermite_variance({0: 2.0, 1: 0.5, 2: 0.25}) == pytest.approx(0.375)
    rule = gauss_hermite_rule(32, 1)
    f = catalog_function("hermite_mix", 1)
    v = f.value(rule.nodes)
    var = float(rule.weights @ (v * v)) - float(rule.weights @ v) ** 2
    assert var == pytest.approx(0.375, abs=1e-12)
