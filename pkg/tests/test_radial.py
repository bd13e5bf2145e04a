import math

import numpy as np
import pytest

from pointwave.errors import InvalidParameterError, ShapeError
from pointwave.radial import (
    SQRT_4PI,
    ChargedField,
    PhaseState,
    RadialGrid,
    ReducedField,
    Regime,
    charged,
    decompose_coulomb,
    inner,
    lambda_domain_defect,
    make_coupling,
    reg_origin_value,
    sample_g_lambda,
    support_radius,
    to_lambda_representation,
    zero_field,
)


class TestCoupling:

    def test_regimes(self):
        assert make_coupling(0.3).regime == Regime.POSITIVE
        assert make_coupling(0.0).regime == Regime.ZERO
        assert make_coupling(-0.1).regime == Regime.NEGATIVE

    def test_bound_state_constants(self):
        c = make_coupling(-1.0 / (4.0 * math.pi))
        assert c.kappa == pytest.approx(1.0)
        assert c.lambda0 == pytest.approx(1.0)
        assert c.robin == pytest.approx(-1.0)

    def test_non_finite_alpha_rejected(self):
        with pytest.raises(InvalidParameterError):
            make_coupling(float('nan'))


class TestRadialGrid:

    def test_nodes(self):
        grid = RadialGrid(10.0, 100)
        assert grid.h == pytest.approx(0.1)
        assert grid.nodes.shape == (101,)
        assert grid.nodes[-1] == pytest.approx(10.0)

    @pytest.mark.parametrize("r_max, n_r", [(0.0, 100), (-1.0, 100), (10.0, 2), (10.0, 10.5)])
    def test_invalid_grid(self, r_max, n_r):
        with pytest.raises(ValueError):
            RadialGrid(r_max, n_r)


class TestChargedField:

    def test_regular_part_must_vanish_at_origin(self, grid):
        with pytest.raises(ShapeError):
            ChargedField(ReducedField(grid, np.ones(grid.n_r + 1)), 0.0)

    def test_wrong_sample_count(self, grid):
        with pytest.raises(ShapeError):
            ReducedField(grid, np.zeros(grid.n_r))

    def test_g_lambda_has_unit_charge(self, grid):
        g = sample_g_lambda(1.0, grid)
        field = decompose_coulomb(g, origin_value=1.0 / SQRT_4PI)
        assert field.charge == pytest.approx(1.0)
        assert field.regular.u[0] == 0.0

    def test_extrapolated_charge(self):
        grid = RadialGrid(20.0, 2000)
        field = decompose_coulomb(sample_g_lambda(1.0, grid))
        assert field.charge == pytest.approx(1.0, abs=1e-5)

    def test_full_profile_round_trip(self, grid):
        u = np.exp(-grid.nodes) + 0.5
        field = charged(grid, u, origin_value=u[0])
        np.testing.assert_allclose(field.full().u, u, atol=1e-14)

    def test_arithmetic(self, grid, bump):
        s = PhaseState(bump, 2.0 * bump)
        doubled = s + s
        np.testing.assert_allclose((doubled - s).velocity.regular.u, s.velocity.regular.u)
        np.testing.assert_allclose((-s).position.regular.u, -bump.regular.u)

    def test_grid_mismatch(self, grid, bump):
        other = zero_field(RadialGrid(20.0, 400))
        with pytest.raises(ShapeError):
            PhaseState(bump, other)


class TestLambdaRepresentation:

    def test_g_lambda_is_pure_charge(self, grid):
        g = charged(grid, sample_g_lambda(0.25, grid).u, origin_value=1.0 / SQRT_4PI)
        phi_lam, q = to_lambda_representation(g, 0.25)
        assert q == pytest.approx(1.0)
        np.testing.assert_allclose(phi_lam.u, 0.0, atol=1e-14)

    def test_nonpositive_lambda_rejected(self, grid, bump):
        with pytest.raises(InvalidParameterError):
            to_lambda_representation(bump, 0.0)

    @pytest.mark.parametrize("lam", [1.0, 4.0, 9.0])
    def test_g_lambda0_is_in_the_domain(self, lam):
        grid = RadialGrid(20.0, 2000)
        c = make_coupling(-1.0 / (4.0 * math.pi))
        g = charged(grid, sample_g_lambda(c.lambda0, grid).u, origin_value=1.0 / SQRT_4PI)
        assert lambda_domain_defect(c, g, lam) < 1e-3

    def test_regular_origin_value_of_g(self):
        grid = RadialGrid(20.0, 2000)
        g = charged(grid, sample_g_lambda(1.0, grid).u, origin_value=1.0 / SQRT_4PI)
        # phi_reg(0) = -sqrt(lambda) / (4 pi) for G_lambda
        assert reg_origin_value(g) == pytest.approx(-1.0 / (4.0 * math.pi), abs=1e-4)


class TestInner:

    def test_bump_l2_norm(self, bump):
        assert inner('l2', bump, bump) == pytest.approx(2.0 * math.sqrt(math.pi), rel=1e-6)

    def test_h1_seminorm_of_bump(self, bump):
        # |u'|^2 integrates to sqrt(pi) / (2 w) for a Gaussian of width w
        assert inner('h1_seminorm', bump, bump) == pytest.approx(math.sqrt(math.pi) / 4.0, rel=5e-3)

    def test_against_g_lambda0_needs_lambda(self, bump):
        with pytest.raises(InvalidParameterError):
            inner('against_g_lambda0', bump)

    def test_unknown_kind(self, bump):
        with pytest.raises(InvalidParameterError):
            inner('h2', bump, bump)


class TestBump:

    def test_bump_is_charge_free(self, bump):
        assert bump.charge == 0.0
        assert abs(bump.full().u[0]) < 1e-14

    def test_support_radius(self, bump):
        # threshold 1e-8 of the peak sits sqrt(2 ln 1e8) widths out
        expected = 12.0 + 2.0 * math.sqrt(2.0 * math.log(1e8))
        assert support_radius(bump, 1e-8) == pytest.approx(expected, abs=0.2)

    def test_support_of_zero_field(self, grid):
        assert support_radius(zero_field(grid), 1e-8) == 0.0
