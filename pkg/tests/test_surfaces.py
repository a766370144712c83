import math

import numpy as np
import pytest

from isoperim.errors import DomainError, RootBracketError, SingularityError
from isoperim.special import isoperimetric_profile
from isoperim.surfaces import (
    CATALOG_NAMES,
    ConstraintMatrix,
    GridSpec,
    arccos_q,
    bobkov_two_point_margin,
    constraint_matrix,
    default_grid,
    degeneracy_residual,
    degeneracy_residuals,
    is_nsd,
    make_catalog_surface,
    nsd_grid_sweep,
    three_halves_pointwise_margin,
)

from conftest import mixed_d2, partial_d1, partial_d2

INTERIOR_GRIDS = {
    "gross": (np.geomspace(0.3, 5.0, 9), np.linspace(0.1, 4.0, 9)),
    "nash": (np.linspace(-3.0, 3.0, 9), np.linspace(0.1, 4.0, 9)),
    "beckner": (np.geomspace(0.3, 5.0, 9), np.linspace(0.1, 4.0, 9)),
    "bobkov": (np.linspace(0.1, 0.9, 9), np.linspace(0.1, 3.0, 9)),
    "three_halves": (np.geomspace(0.3, 5.0, 9), np.linspace(0.1, 4.0, 9)),
    "arccos": (np.linspace(-0.85, 0.85, 9), np.linspace(0.1, 2.0, 9)),
    "b_theorem": (np.linspace(-3.0, 3.0, 9), np.linspace(0.1, 4.0, 9)),
}


def surfaces_under_test():
    for name in CATALOG_NAMES:
        if name == "beckner":
            for p in (1.0, 1.25, 1.5, 1.75, 2.0):
                yield make_catalog_surface(name, p=p), f"{name}[p={p}]"
        else:
            yield make_catalog_surface(name), name


class TestCatalogValues:
    def test_gross_at_one(self):
        surf = make_catalog_surface("gross")
        assert surf.m(1.0, 0.0) == 0.0

    def test_bobkov_at_half(self):
        surf = make_catalog_surface("bobkov")
        assert surf.m(0.5, 0.0) == pytest.approx(-1.0 / math.sqrt(2 * math.pi), abs=1e-14)
        assert surf.m(0.5, 0.0) == pytest.approx(-isoperimetric_profile(0.5), abs=1e-15)

    def test_nash_closed_form(self):
        surf = make_catalog_surface("nash")
        assert surf.m(2.0, 1.0) == 3.0

    def test_unknown_name(self):
        with pytest.raises(DomainError):
            make_catalog_surface("parabola")

    def test_beckner_needs_p(self):
        with pytest.raises(DomainError):
            make_catalog_surface("beckner")
        with pytest.raises(DomainError):
            make_catalog_surface("beckner", p=2.5)
        with pytest.raises(DomainError):
            make_catalog_surface("gross", p=1.5)

    def test_beckner_p1_is_nash_on_half_line(self):
        surf = make_catalog_surface("beckner", p=1.0)
        xs = np.linspace(0.2, 4.0, 13)
        assert np.allclose(surf.m(xs, 1.3), xs**2 - 1.69, rtol=1e-13)

    def test_epsilon_shift_is_exact_translation(self):
        base = make_catalog_surface("gross")
        shifted = make_catalog_surface("gross", epsilon_shift=0.25)
        assert shifted.m(1.0, 0.5) == base.m(1.25, 0.5)
        assert shifted.epsilon_shift == 0.25


class TestSurfaceSmoothness:
    @pytest.mark.parametrize("surf,label", list(surfaces_under_test()),
                             ids=lambda v: v if isinstance(v, str) else "")
    def test_boundary_row_finite_and_flat(self, surf, label):
        name = surf.name
        xs = INTERIOR_GRIDS[name][0]
        vals = np.asarray(surf.m(xs, 0.0), dtype=float)
        assert np.all(np.isfinite(vals))
        slopes = np.asarray(surf.m_y(xs, 0.0), dtype=float)
        assert np.max(np.abs(slopes)) < 1e-12

    @pytest.mark.parametrize("surf,label", list(surfaces_under_test()),
                             ids=lambda v: v if isinstance(v, str) else "")
    def test_derivatives_match_finite_differences(self, surf, label):
        xs, ys = INTERIOR_GRIDS[surf.name]
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        checks = [
            (surf.m_x, partial_d1(surf.m, X, Y, axis=0)),
            (surf.m_y, partial_d1(surf.m, X, Y, axis=1)),
            (surf.m_xx, partial_d2(surf.m, X, Y, axis=0)),
            (surf.m_yy, partial_d2(surf.m, X, Y, axis=1)),
            (surf.m_xy, mixed_d2(surf.m, X, Y)),
        ]
        for analytic_fn, fd in checks:
            analytic = np.asarray(analytic_fn(X, Y), dtype=float)
            err = np.abs(analytic - fd) / np.maximum(np.abs(analytic), 1.0)
            assert np.max(err) < 1e-6

    @pytest.mark.parametrize("name", ["gross", "nash", "bobkov", "three_halves",
                                      "arccos"])
    def test_m_y_nonpositive(self, name):
        surf = make_catalog_surface(name)
        xs, ys = INTERIOR_GRIDS[name]
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        assert np.max(np.asarray(surf.m_y(X, Y))) <= 1e-14


class TestConstraintMatrix:
    def test_gross_at_one_one(self):
        C = constraint_matrix(make_catalog_surface("gross"), 1.0, 1.0)
        assert (C.a11, C.a12, C.a22) == pytest.approx((-1.0, 1.0, -1.0), abs=1e-14)
        assert is_nsd(C, 1e-12)
        lo, hi = C.eigenvalues()
        assert (lo, hi) == pytest.approx((-2.0, 0.0), abs=1e-14)

    def test_nash_everywhere(self):
        surf = make_catalog_surface("nash")
        for x, y in [(0.0, 0.5), (-2.0, 3.0), (4.0, 0.0)]:
            C = constraint_matrix(surf, x, y)
            assert (C.a11, C.a12, C.a22) == (0.0, 0.0, -2.0)

    def test_b_theorem_fails(self):
        C = constraint_matrix(make_catalog_surface("b_theorem"), 2.7, 1.3)
        assert (C.a11, C.a12, C.a22) == (1.0, 0.0, -1.0)
        assert not is_nsd(C, 1e-9)

    def test_y_zero_limit_rule(self):
        # at y = 0 the singular ratio is replaced by M_yy(x, 0)
        surf = make_catalog_surface("gross")
        C = constraint_matrix(surf, 2.0, 0.0)
        assert C.a11 == pytest.approx(surf.m_xx(2.0, 0.0) + surf.m_yy(2.0, 0.0), abs=1e-14)

    def test_singularity_error(self):
        with pytest.raises(SingularityError):
            constraint_matrix(make_catalog_surface("gross"), 0.0, 1.0)

    def test_domain_error(self):
        with pytest.raises(DomainError):
            constraint_matrix(make_catalog_surface("bobkov"), 1.5, 1.0)
        with pytest.raises(DomainError):
            constraint_matrix(make_catalog_surface("gross"), 1.0, -0.5)


class TestIsNsd:
    def test_diag_negative(self):
        assert is_nsd(ConstraintMatrix(0.0, 0.0, -2.0, 0, 0), 0.0)

    def test_positive_eigenvalue(self):
        assert not is_nsd(ConstraintMatrix(1.0, 0.0, -1.0, 0, 0), 1e-9)

    def test_rank_one_negative(self):
        assert is_nsd(ConstraintMatrix(-1.0, 1.0, -1.0, 0, 0), 0.0)

    def test_tolerance_slack(self):
        assert is_nsd(ConstraintMatrix(5e-10, 0.0, -1.0, 0, 0), 1e-9)
        with pytest.raises(DomainError):
            is_nsd(ConstraintMatrix(0, 0, 0, 0, 0), -1.0)


class TestDegeneracy:
    @pytest.mark.parametrize("name", ["gross", "nash", "bobkov", "three_halves",
                                      "arccos"])
    def test_optimal_surfaces_degenerate(self, name):
        surf = make_catalog_surface(name)
        xs, ys = INTERIOR_GRIDS[name]
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        _, rel = degeneracy_residuals(surf, X, Y)
        assert np.max(rel) < 1e-9

    def test_gross_pointwise(self):
        assert abs(degeneracy_residual(make_catalog_surface("gross"), 0.8, 2.5)) < 1e-10

    def test_nash_exact(self):
        # y*(M_xx M_yy - M_xy^2) + M_y M_yy = -4y + 4y
        assert degeneracy_residual(make_catalog_surface("nash"), 2.0, 3.0) == 0.0

    @pytest.mark.parametrize("p", [1.25, 1.5, 1.75])
    def test_beckner_interior_not_degenerate(self, p):
        surf = make_catalog_surface("beckner", p=p)
        assert degeneracy_residual(surf, 1.0, 1.0) > 0.0

    @pytest.mark.parametrize("p", [1.0, 2.0])
    def test_beckner_ends_degenerate(self, p):
        surf = make_catalog_surface("beckner", p=p)
        assert abs(degeneracy_residual(surf, 1.3, 0.7)) < 1e-12

    def test_requires_positive_y(self):
        with pytest.raises(DomainError):
            degeneracy_residual(make_catalog_surface("nash"), 1.0, 0.0)


class TestGridSweep:
    def test_gross_clean(self):
        report = nsd_grid_sweep(make_catalog_surface("gross"),
                                GridSpec(0.1, 10.0, 100, 0.0, 10.0, 100, log_x=True),
                                tol=1e-9)
        assert report.passed
        assert report.violations == []
        assert report.max_rel_residual < 1e-9

    def test_b_theorem_all_nodes_violate(self):
        report = nsd_grid_sweep(make_catalog_surface("b_theorem"), tol=1e-9)
        assert len(report.violations) == report.x.size

    def test_beckner_p1_clean(self):
        report = nsd_grid_sweep(make_catalog_surface("beckner", p=1.0), tol=1e-9)
        assert report.passed

    def test_rows_match_header(self):
        report = nsd_grid_sweep(make_catalog_surface("nash"),
                                GridSpec(-1.0, 1.0, 5, 0.0, 2.0, 5))
        rows = report.rows()
        assert len(rows) == 25
        assert len(rows[0]) == len(report.CSV_HEADER)

    def test_default_grid_shapes(self):
        grid = default_grid(make_catalog_surface("gross"))
        assert grid.log_x and grid.x_min > 0
        grid = default_grid(make_catalog_surface("bobkov"))
        assert not grid.log_x and 0.0 < grid.x_min < grid.x_max < 1.0


class TestArccosRoot:
    def test_zero_gradient(self):
        assert arccos_q(0.3, 0.0) == 0.0
        assert arccos_q(-0.9, 0.0) == 0.0

    def test_strictly_negative_off_axis(self):
        # q = 0 exactly when y = 0
        ys = np.array([1e-300, 1e-12, 0.3, 7.0])
        assert np.all(arccos_q(0.2, ys) < 0.0)

    def test_closed_form_point(self):
        # q = -1 makes -q*sqrt(e - x^2) = sqrt(e) at x = 0
        assert arccos_q(0.0, math.sqrt(math.e)) == pytest.approx(-1.0, abs=1e-13)

    def test_residual_against_bisection_oracle(self):
        x, y = 0.5, 2.0
        q = arccos_q(x, y)
        assert -q * math.sqrt(math.exp(q * q) - x * x) - y == pytest.approx(0.0, abs=1e-12)

        lo, hi = -10.0, 0.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if -mid * math.sqrt(math.exp(mid * mid) - x * x) >= y:
                lo = mid
            else:
                hi = mid
        assert q == pytest.approx(0.5 * (lo + hi), abs=1e-12)

    def test_deep_root_inside_cap(self):
        # needs q near -9.4, still inside the q = -10 cap
        y = 1e20
        q = arccos_q(0.0, y)
        assert -10.0 < q < -8.0
        assert abs(-q * math.sqrt(math.exp(q * q)) - y) / y < 1e-12

    def test_bracket_overflow(self):
        with pytest.raises(RootBracketError):
            arccos_q(0.0, 1e40)

    def test_negative_y_rejected(self):
        with pytest.raises(DomainError):
            arccos_q(0.0, -1.0)


class TestPointwiseInequalities:
    def test_three_halves_domination_grid(self):
        xs = np.linspace(0.05, 10.0, 200)
        ys = np.linspace(0.0, 10.0, 200)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        margin = three_halves_pointwise_margin(X, Y)
        assert np.min(margin) >= -1e-12
        assert np.all(margin[Y > 0] > 0.0)

    def test_two_point_profile_grid(self):
        ab = np.linspace(0.0, 1.0, 200)
        A, B = np.meshgrid(ab, ab, indexing="ij")
        margin = bobkov_two_point_margin(A, B)
        assert np.min(margin) >= -1e-12

    def test_two_point_diagonal_equality(self):
        a = np.linspace(0.0, 1.0, 21)
        assert np.max(np.abs(bobkov_two_point_margin(a, a))) < 1e-15
