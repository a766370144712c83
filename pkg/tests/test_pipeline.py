import math

import numpy as np
import pytest

from isoperim.errors import (
    DomainError,
    IllPosedError,
    NonInvertibleGradientError,
    ReconstructionError,
    RegionError,
)
from isoperim.pipeline import (
    RECONSTRUCTIBLE,
    BoundaryData,
    bobkov_heat_solution,
    catalog_boundary,
    ellipticity_check,
    heat_solution_for_boundary,
    legendre_boundary,
    polynomial_heat_solution,
    reconstruct_grid,
    reconstruct_point,
    solve_backward_heat,
    spectral_heat_solution,
)
from isoperim.special import std_normal_cdf, std_normal_pdf
from isoperim.surfaces import make_catalog_surface
from suite_grids import RECON_GRIDS

from conftest import (partial_d1_richardson, partial_d2,
                      partial_d2_richardson)


class TestLegendre:
    def test_entropy_boundary(self):
        u0 = legendre_boundary(catalog_boundary("gross"))
        p = np.linspace(-2.0, 3.0, 11)
        assert np.allclose(u0(p), np.exp(p - 1.0), atol=1e-12)

    def test_quadratic_boundary(self):
        u0 = legendre_boundary(catalog_boundary("nash"))
        p = np.linspace(-4.0, 4.0, 9)
        assert np.allclose(u0(p), p * p / 4.0, atol=1e-13)

    def test_three_halves_boundary(self):
        u0 = legendre_boundary(catalog_boundary("three_halves"))
        p = np.linspace(0.3, 4.0, 9)
        assert np.allclose(u0(p), 4.0 / 27.0 * p**3, atol=1e-12)

    def test_sine_boundary(self):
        u0 = legendre_boundary(catalog_boundary("arccos"))
        p = np.linspace(0.15, math.pi - 0.15, 11)
        assert np.allclose(u0(p), -np.sin(p), atol=1e-12)

    def test_cdf_boundary(self):
        u0 = legendre_boundary(catalog_boundary("bobkov"))
        p = np.linspace(-3.0, 3.0, 13)
        expected = p * std_normal_cdf(p) + std_normal_pdf(p)
        assert np.allclose(u0(p), expected, atol=1e-12)

    def test_slope_inverts_gradient(self):
        boundary = catalog_boundary("gross")
        u0 = legendre_boundary(boundary)
        xs = np.linspace(0.2, 5.0, 11)
        assert np.allclose(u0.slope(boundary.dphi(xs)), xs, atol=1e-11)

    @pytest.mark.parametrize("name,xs", [
        ("gross", np.linspace(0.4, 3.0, 9)),
        ("nash", np.linspace(-2.0, 2.0, 9)),
        ("three_halves", np.linspace(0.4, 3.0, 9)),
        ("bobkov", np.linspace(0.15, 0.85, 9)),
        ("arccos", np.linspace(-0.8, 0.8, 9)),
    ])
    def test_involution_recovers_phi(self, name, xs):
        boundary = catalog_boundary(name)
        conjugate = legendre_boundary(boundary)
        double = legendre_boundary(conjugate.as_boundary())
        assert np.max(np.abs(double(xs) - np.asarray(boundary.phi(xs)))) < 1e-10

    def test_flat_boundary_rejected(self):
        flat = BoundaryData("line", (-math.inf, math.inf),
                            phi=lambda x: 2.0 * np.asarray(x, float),
                            dphi=lambda x: 2.0 + 0.0 * np.asarray(x, float),
                            d2phi=lambda x: 0.0 * np.asarray(x, float),
                            p_domain=(2.0, 2.0))
        with pytest.raises(NonInvertibleGradientError):
            legendre_boundary(flat)


class TestHeatSolutions:
    def test_exponential_form(self):
        sol = solve_backward_heat("gross", "closed_form")
        assert sol.u(1.2, 0.7) == pytest.approx(math.exp(1.2 - 0.7 - 1.0), rel=1e-15)

    def test_quadratic_form(self):
        sol = solve_backward_heat("nash", "closed_form")
        assert sol.u(3.0, 1.5) == pytest.approx(9.0 / 4.0 - 0.75, rel=1e-15)

    def test_sine_form(self):
        sol = solve_backward_heat("arccos", "closed_form")
        assert sol.u(1.0, 0.4) == pytest.approx(-math.exp(0.4) * math.sin(1.0), rel=1e-15)

    def test_polynomial_three_halves(self):
        sol = heat_solution_for_boundary("three_halves")
        p, t = 2.0, 0.8
        assert sol.u(p, t) == pytest.approx(4.0 / 27.0 * (p**3 - 6 * t * p), rel=1e-14)

    def test_bobkov_boundary_values(self):
        sol = bobkov_heat_solution()
        p = 0.3
        assert sol.u(p, 0.0) == pytest.approx(p * std_normal_cdf(p) + std_normal_pdf(p),
                                              rel=1e-14)
        assert sol.u_p(p, 0.2) == pytest.approx(std_normal_cdf(p / math.sqrt(0.6)),
                                                rel=1e-14)

    def test_bobkov_region_error(self):
        sol = bobkov_heat_solution()
        with pytest.raises(RegionError):
            sol.u(0.0, 0.5)
        with pytest.raises(RegionError):
            solve_backward_heat("bobkov", "closed_form", horizon=0.6)

    def test_bobkov_pde_residual_by_differences(self):
        sol = bobkov_heat_solution()
        p, t = 0.3, 0.2
        upp = partial_d2_richardson(sol.u, p, t, axis=0)
        ut = partial_d1_richardson(sol.u, p, t, axis=1)
        assert abs(upp + ut) < 1e-10

    @pytest.mark.parametrize("name", RECONSTRUCTIBLE)
    def test_pde_residual_and_ut_sign(self, name):
        sol = heat_solution_for_boundary(name)
        lo = max(sol.p_interval[0], -3.0) + 0.05
        hi = min(sol.p_interval[1], 3.0) - 0.05
        ps = np.linspace(lo, hi, 13)
        # keep the difference stencils away from the open edge of the region
        t_hi = 0.8 * sol.t_sup if sol.t_open_right else min(sol.t_sup, 2.0)
        ts = np.linspace(0.01, t_hi, 11)
        P, T = np.meshgrid(ps, ts, indexing="ij")
        upp_fd = partial_d2_richardson(sol.u, P, T, axis=0)
        ut_fd = partial_d1_richardson(sol.u, P, T, axis=1)
        assert np.max(np.abs(upp_fd + ut_fd)) < 1e-8
        assert np.max(np.abs(np.asarray(sol.u_pp(P, T)) - upp_fd)) < 1e-6
        assert np.max(np.asarray(sol.u_t(P, T))) <= 1e-9

    def test_unknown_family(self):
        with pytest.raises(DomainError):
            solve_backward_heat("heatwave", "closed_form")


class TestEllipticity:
    def test_exponential_passes_with_flat_hessian(self):
        sol = solve_backward_heat("gross", "closed_form")
        P, T = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(0, 2, 9), indexing="ij")
        det = np.asarray(sol.u_pp(P, T)) * np.asarray(sol.u_tt(P, T)) \
            - np.asarray(sol.u_pt(P, T)) ** 2
        assert np.max(np.abs(det)) < 1e-12
        assert ellipticity_check(sol).passed

    def test_bobkov_passes(self):
        assert ellipticity_check(bobkov_heat_solution()).passed

    def test_sine_certificate_value(self):
        sol = solve_backward_heat("arccos", "closed_form")
        p, t = 1.1, 0.7
        cert = (sol.u_t(p, t) ** 2
                - 2.0 * t * (sol.u_pp(p, t) * sol.u_tt(p, t) - sol.u_pt(p, t) ** 2))
        assert cert == pytest.approx(math.exp(2 * t) * (2 * t + math.sin(p) ** 2),
                                     rel=1e-12)
        assert ellipticity_check(sol).passed


class TestSpectral:
    def test_polynomial_data_recovered_exactly(self):
        exact = polynomial_heat_solution((0.0, 0.0, 0.0, 4.0 / 27.0), horizon=0.2)
        spectral = spectral_heat_solution(lambda p: 4.0 / 27.0 * p**3, sigma=1.0,
                                          modes=8, horizon=0.2)
        ps = np.linspace(-1.5, 1.5, 11)
        for t in (0.0, 0.1, 0.2):
            assert np.allclose(spectral.u(ps, t), exact.u(ps, t), atol=1e-12)
            assert np.allclose(spectral.u_p(ps, t), exact.u_p(ps, t), atol=1e-12)

    def test_pde_exact_for_truncated_modes(self):
        sol = spectral_heat_solution(lambda p: np.exp(-np.abs(p)), sigma=1.0,
                                     modes=12, horizon=0.3)
        ps = np.linspace(-2.0, 2.0, 9)
        for t in (0.05, 0.2):
            assert np.allclose(sol.u_pp(ps, t) + sol.u_t(ps, t), 0.0, atol=1e-10)

    def test_amplification_bound_recorded(self):
        sol = spectral_heat_solution(lambda p: p * p, sigma=1.0, modes=10,
                                     horizon=0.3)
        assert sol.notes["amplification"] == pytest.approx(1.6**5)
        assert sol.notes["modes"] == 10

    def test_amplification_cap(self):
        with pytest.raises(IllPosedError) as err:
            spectral_heat_solution(lambda p: np.exp(p), sigma=0.5, modes=40,
                                   horizon=4.0)
        assert 0.0 < err.value.safe_horizon < 4.0
        # the reported safe horizon must itself be accepted
        spectral_heat_solution(lambda p: np.exp(p), sigma=0.5, modes=40,
                               horizon=err.value.safe_horizon * 0.999)

    @pytest.mark.parametrize("p,center", [(3.0, 4.0), (0.5, -2.0), (-1.0, -3.0)])
    def test_power_boundaries_accepted_as_demos(self, p, center):
        from isoperim.pipeline import power_boundary

        boundary = power_boundary(p)
        u0 = legendre_boundary(boundary)
        xs = np.linspace(0.5, 2.0, 5)
        slopes = np.asarray(boundary.dphi(xs))
        envelope = xs * slopes - np.asarray(boundary.phi(xs))
        assert np.max(np.abs(u0(slopes) - envelope)) < 1e-10
        sol = solve_backward_heat(boundary, "spectral", horizon=0.05,
                                  modes=12, sigma=0.6, center=center)
        ps = np.linspace(center - 0.5, center + 0.5, 7)
        residual = np.asarray(sol.u_pp(ps, 0.03)) + np.asarray(sol.u_t(ps, 0.03))
        assert np.max(np.abs(residual)) < 1e-10

    def test_affine_power_exponents_rejected(self):
        from isoperim.pipeline import power_boundary

        for p in (0.0, 1.0):
            with pytest.raises(DomainError):
                power_boundary(p)

    @pytest.mark.parametrize("name,center,sigma", [("exp", 2.0, 1.0),
                                                   ("neglog", -3.0, 0.6)])
    def test_entropy_type_boundaries_accepted_as_demos(self, name, center, sigma):
        # half-line conjugate domains get windowed; the truncated extension
        # still solves the equation exactly and tracks the data in the bulk,
        # with the weight kept away from the conjugate's edge singularity
        boundary = catalog_boundary(name)
        sol = solve_backward_heat(boundary, "spectral", horizon=0.05,
                                  modes=16, sigma=sigma, center=center)
        ps = np.linspace(center - 0.5, center + 0.5, 9)
        residual = np.asarray(sol.u_pp(ps, 0.03)) + np.asarray(sol.u_t(ps, 0.03))
        assert np.max(np.abs(residual)) < 1e-10
        u0 = legendre_boundary(boundary)
        assert np.max(np.abs(np.asarray(sol.u(ps, 0.0)) - u0(ps))) < 0.05


class TestReconstructPoint:
    def test_quadratic_characteristics(self):
        sol = heat_solution_for_boundary("nash")
        res = reconstruct_point(sol, 1.5, 0.7, boundary=catalog_boundary("nash"))
        assert res.p == pytest.approx(3.0, abs=1e-12)
        assert res.q == pytest.approx(-1.4, abs=1e-12)
        assert res.M_value == pytest.approx(1.5**2 - 0.7**2, abs=1e-12)

    def test_entropy_characteristics(self):
        sol = heat_solution_for_boundary("gross")
        x, y = 2.0, 1.0
        res = reconstruct_point(sol, x, y, boundary=catalog_boundary("gross"))
        assert res.q == pytest.approx(-y / x, abs=1e-11)
        assert res.p == pytest.approx(math.log(x) + y**2 / (2 * x**2) + 1.0, abs=1e-11)
        assert res.M_value == pytest.approx(x * math.log(x) - y**2 / (2 * x), abs=1e-11)

    @pytest.mark.parametrize("name", RECONSTRUCTIBLE)
    def test_boundary_row_reproduces_phi(self, name):
        sol = heat_solution_for_boundary(name)
        boundary = catalog_boundary(name)
        xs = RECON_GRIDS[name][0][::7]
        for x in xs:
            res = reconstruct_point(sol, float(x), 0.0, boundary=boundary)
            assert res.q == 0.0
            assert res.M_value == pytest.approx(float(boundary.phi(x)), abs=1e-10)

    def test_invariants_of_result(self):
        sol = heat_solution_for_boundary("three_halves")
        res = reconstruct_point(sol, 1.2, 0.8, boundary=catalog_boundary("three_halves"))
        assert res.q <= 0.0
        assert res.residual <= 1e-10
        assert res.newton_iterations <= 15

    @pytest.mark.parametrize("name", RECONSTRUCTIBLE)
    def test_random_interior_points_match_closed_form(self, name, rng):
        xs, ys = RECON_GRIDS[name]
        sol = heat_solution_for_boundary(name)
        boundary = catalog_boundary(name)
        surf = make_catalog_surface(name)
        x_samples = rng.uniform(xs[0], xs[-1], 25)
        y_samples = rng.uniform(ys[1], ys[-1], 25)
        for x, y in zip(x_samples, y_samples):
            res = reconstruct_point(sol, float(x), float(y), boundary=boundary)
            assert res.M_value == pytest.approx(float(surf.m(x, y)), abs=1e-9)
            assert res.q <= 0.0

    def test_horizon_restricts_reachable_q(self):
        sol = heat_solution_for_boundary("gross", horizon=2.0)
        assert sol.max_q() == pytest.approx(2.0)
        # q = -y/x = -3 needs t = 4.5 beyond the horizon
        with pytest.raises(ReconstructionError) as err:
            reconstruct_point(sol, 1.0, 3.0, boundary=catalog_boundary("gross"))
        assert err.value.reason == "unreachable"


class TestReconstructGrid:
    @pytest.mark.parametrize("name", RECONSTRUCTIBLE)
    def test_matches_catalog_closed_form(self, name):
        xs, ys = RECON_GRIDS[name]
        sol = heat_solution_for_boundary(name)
        table = reconstruct_grid(sol, xs[::2], ys[::2],
                                 boundary=catalog_boundary(name),
                                 reference=make_catalog_surface(name).m)
        assert table.n_failed == 0
        assert table.max_deviation < 1e-8
        assert table.max_iterations <= 15

    @pytest.mark.parametrize("name", ["gross", "arccos"])
    def test_gradient_consistency(self, name):
        # differencing reconstructed values reproduces the multipliers (p, q)
        sol = heat_solution_for_boundary(name)
        boundary = catalog_boundary(name)
        h = 1e-4
        for x, y in [(0.8, 0.4), (0.5, 0.6)] if name == "gross" else [(0.2, 0.5), (-0.4, 0.8)]:
            center = reconstruct_point(sol, x, y, boundary=boundary)
            mp = reconstruct_point(sol, x + h, y, boundary=boundary).M_value
            mm = reconstruct_point(sol, x - h, y, boundary=boundary).M_value
            assert (mp - mm) / (2 * h) == pytest.approx(center.p, abs=1e-6)
            mp = reconstruct_point(sol, x, y + h, boundary=boundary).M_value
            mm = reconstruct_point(sol, x, y - h, boundary=boundary).M_value
            assert (mp - mm) / (2 * h) == pytest.approx(center.q, abs=1e-6)

    @pytest.mark.parametrize("name", RECONSTRUCTIBLE)
    def test_fd_certificate_on_reconstruction(self, name):
        xs, ys = RECON_GRIDS[name]
        sol = heat_solution_for_boundary(name)
        table = reconstruct_grid(sol, xs[::4], ys[::4],
                                 boundary=catalog_boundary(name),
                                 fd_check=True, fd_stride=3)
        assert table.fd_max_eig <= 1e-6
        assert table.fd_max_residual <= 1e-6

    def test_region_restriction_skips_nodes(self):
        sol = bobkov_heat_solution()
        xs = np.linspace(0.05, 0.95, 12)
        ys = np.linspace(0.0, 2.0, 12)
        table = reconstruct_grid(sol, xs, ys, boundary=catalog_boundary("bobkov"),
                                 reference=make_catalog_surface("bobkov").m,
                                 t_max=0.45)
        assert table.n_skipped > 0
        assert table.n_failed == 0
        assert table.max_deviation < 1e-8  # deviations judged on solved nodes only

    def test_t_max_beyond_region_rejected(self):
        sol = bobkov_heat_solution()
        with pytest.raises(RegionError):
            reconstruct_grid(sol, np.linspace(0.2, 0.8, 4), np.linspace(0, 1, 4),
                             boundary=catalog_boundary("bobkov"), t_max=0.6)
