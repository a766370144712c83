import math

import numpy as np
import pytest

from isoperim.errors import DomainError
from isoperim.semigroup import (
    EQUILIBRIUM_TIME,
    OUOperator,
    equilibrium_mean,
    interpolation_check,
    monotonicity_check,
    ou_apply,
    ou_gradient,
)
from isoperim.special import gauss_hermite_rule, isoperimetric_profile
from isoperim.surfaces import make_catalog_surface
from isoperim.testfunctions import catalog_function

RULE = gauss_hermite_rule(64, 1)
T_GRID = (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, math.inf)


class TestApply:
    def test_identity_at_zero(self):
        f = catalog_function("logistic_1", 1)
        x = np.array([0.7])
        assert ou_apply(f, 0.0, x, RULE) == pytest.approx(f.value(x[None, :])[0],
                                                          abs=1e-14)

    def test_linear_contraction(self):
        f = catalog_function("x", 1)
        for t in (0.1, 0.7, 2.0):
            val = ou_apply(f, t, np.array([1.3]), RULE)
            assert val == pytest.approx(math.exp(-t) * 1.3, abs=1e-13)

    def test_equilibrium_cutoff(self):
        f = catalog_function("logistic_1", 1)
        val = ou_apply(f, 50.0, np.array([2.0]), RULE)
        assert val == pytest.approx(equilibrium_mean(f, RULE), abs=1e-10)
        assert 50.0 > EQUILIBRIUM_TIME

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            ou_apply(catalog_function("x", 1), -0.1, np.array([0.0]), RULE)

    def test_operator_wrapper(self):
        op = OUOperator(0.3, RULE)
        f = catalog_function("quad_02", 1)
        assert op.apply(f, np.array([0.5])) == pytest.approx(
            ou_apply(f, 0.3, np.array([0.5]), RULE), abs=1e-15)
        with pytest.raises(DomainError):
            OUOperator(-1.0, RULE)

    def test_batch_evaluation(self):
        f = catalog_function("exp_03", 1)
        pts = np.linspace(-1, 1, 7)[:, None]
        batch = ou_apply(f, 0.4, pts, RULE)
        single = [ou_apply(f, 0.4, p, RULE) for p in pts]
        assert np.allclose(batch, single, atol=1e-15)


class TestGradient:
    def test_identity_at_zero(self):
        f = catalog_function("x2", 1)
        g = ou_gradient(f, 0.0, np.array([1.2]), RULE)
        assert g[0] == pytest.approx(2.4, abs=1e-13)

    def test_quadratic_decay(self):
        f = catalog_function("x2", 1)
        for t in (0.2, 1.0):
            g = ou_gradient(f, t, np.array([1.3]), RULE)
            assert g[0] == pytest.approx(2.0 * math.exp(-2.0 * t) * 1.3, abs=1e-13)

    def test_commutation_against_differences(self):
        f = catalog_function("logistic_2", 1)
        t = 0.6
        for x in (-1.0, 0.3, 2.0):
            h = 1e-6
            fd = (ou_apply(f, t, np.array([x + h]), RULE)
                  - ou_apply(f, t, np.array([x - h]), RULE)) / (2 * h)
            assert ou_gradient(f, t, np.array([x]), RULE)[0] == pytest.approx(fd, abs=1e-6)

    def test_norm_bound(self):
        # |grad P_t f| <= e^{-t} P_t |grad f| pointwise
        f = catalog_function("half_tanh", 1)

        def grad_norm(pts):
            return f.grad_norm(pts)

        for t in (0.1, 0.5, 2.0):
            for x in (-1.5, 0.0, 0.8):
                lhs = abs(ou_gradient(f, t, np.array([x]), RULE)[0])
                rhs = math.exp(-t) * ou_apply(grad_norm, t, np.array([x]), RULE)
                assert lhs <= rhs + 1e-9


class TestSemigroupLaws:
    @pytest.mark.parametrize("fname", ["logistic_1", "exp_03", "quad_02",
                                       "half_tanh", "normcdf_1"])
    @pytest.mark.parametrize("s", [0.1, 0.5])
    @pytest.mark.parametrize("t", [0.1, 0.5])
    def test_composition(self, fname, s, t):
        f = catalog_function(fname, 1)

        def smoothed(pts):
            return np.atleast_1d(ou_apply(f, s, pts, RULE))

        for x in (-1.0, 0.4, 1.7):
            lhs = ou_apply(smoothed, t, np.array([x]), RULE)
            rhs = ou_apply(f, s + t, np.array([x]), RULE)
            assert lhs == pytest.approx(rhs, abs=1e-9)

    @pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 5.0])
    def test_mass_conservation(self, t):
        f = catalog_function("tanh_half", 1)

        def smoothed(pts):
            return np.atleast_1d(ou_apply(f, t, pts, RULE))

        assert equilibrium_mean(smoothed, RULE) == pytest.approx(
            equilibrium_mean(f, RULE), abs=1e-10)


class TestInterpolation:
    def test_zero_time_is_tight(self):
        surf = make_catalog_surface("gross")
        f = catalog_function("one_plus_half_tanh", 1)
        report = interpolation_check(surf, f, (0.0,), np.array([[0.3]]), RULE)
        assert abs(report.max_violation) < 1e-12

    def test_entropy_surface_holds(self):
        surf = make_catalog_surface("gross")
        f = catalog_function("one_plus_half_tanh", 1)
        report = interpolation_check(surf, f, (0.1, 0.5, 1.0, 2.0),
                                     np.linspace(-2, 2, 5)[:, None], RULE)
        assert report.passed
        assert report.max_violation <= 1e-8

    def test_constant_function_flat(self):
        surf = make_catalog_surface("gross")
        f = catalog_function("const_07", 1)
        report = interpolation_check(surf, f, T_GRID, np.array([[0.0]]), RULE)
        assert abs(report.max_violation) < 1e-12

    def test_non_elliptic_surface_rejected(self):
        with pytest.raises(DomainError):
            interpolation_check(make_catalog_surface("b_theorem"),
                                catalog_function("x2", 1), (0.1,),
                                np.array([[0.0]]), RULE)


class TestMonotonicity:
    def test_entropy_surface_trace(self):
        surf = make_catalog_surface("gross")
        f = catalog_function("one_plus_half_tanh", 1)
        report = monotonicity_check(surf, f, T_GRID, RULE)
        assert report.monotone
        assert report.passed
        values = [g for _, g in report.trace]
        assert values[0] < values[-1]

    def test_exponential_family_is_flat(self):
        # exponentials are the entropy extremals: the trace never moves
        surf = make_catalog_surface("gross")
        f = catalog_function("exp_03", 1)
        report = monotonicity_check(surf, f, T_GRID, RULE)
        values = np.array([g for _, g in report.trace])
        assert report.monotone
        assert np.max(np.abs(values - values[0])) < 1e-12

    def test_profile_surface_limit(self):
        surf = make_catalog_surface("bobkov")
        f = catalog_function("logistic_1", 1)
        report = monotonicity_check(surf, f, T_GRID, RULE)
        assert report.monotone
        mean = equilibrium_mean(f, RULE)
        assert report.trace[-1][1] == pytest.approx(-isoperimetric_profile(mean),
                                                    abs=1e-12)
        assert report.equilibrium_value == pytest.approx(-isoperimetric_profile(mean),
                                                         abs=1e-12)

    def test_constant_trace_flat(self):
        surf = make_catalog_surface("gross")
        f = catalog_function("const_07", 1)
        report = monotonicity_check(surf, f, T_GRID, RULE)
        values = np.array([g for _, g in report.trace])
        assert np.max(np.abs(values - values[0])) < 1e-12

    def test_rows_export(self):
        surf = make_catalog_surface("gross")
        f = catalog_function("exp_03", 1)
        report = monotonicity_check(surf, f, (0.0, 1.0), RULE)
        rows = report.rows()
        assert len(rows) == 2 and len(rows[0]) == len(report.CSV_HEADER)
