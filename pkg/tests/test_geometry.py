import math

import numpy as np
import pytest

from pointwave.dynamics import project_nonrunaway, propagate_free, propagate_point
from pointwave.errors import InvalidParameterError, InvalidStateError, ShapeError
from pointwave.geometry import (
    bound_complex_structure,
    c_map,
    c_map_inverse,
    complex_structure,
    default_variant,
    energy,
    energy_norm,
    energy_spectral,
    evolve_complex,
    form_F,
    hamiltonian,
    hermitian_product,
    scalar_product,
    symplectic_form,
    symplectic_form_standard,
)
from pointwave.radial import SQRT_4PI, PhaseState, charged, gaussian_bump, make_coupling, zero_field, zero_state

NEGATIVE = -1.0 / (4.0 * math.pi)


@pytest.fixture
def second_state(grid):
    return PhaseState(gaussian_bump(grid, 10.0, 1.5, 0.5), gaussian_bump(grid, 15.0, 2.0, -0.2))


class TestEnergy:

    @pytest.mark.parametrize("alpha", [0.1, 0.0])
    def test_quadrature_matches_spectral(self, alpha, moving_state):
        c = make_coupling(alpha)
        assert energy(c, moving_state) == pytest.approx(energy_spectral(c, moving_state), rel=5e-3)

    def test_norm_of_zero_state(self, coupling, grid):
        assert energy_norm(coupling, zero_state(grid)) == 0.0

    def test_norm_is_positive_with_bound_component(self, grid):
        c = make_coupling(NEGATIVE)
        amplitude = math.sqrt(2.0 * c.kappa)
        mode = charged(grid, amplitude * np.exp(-c.kappa * grid.nodes), origin_value=amplitude)
        state = PhaseState(mode, zero_field(grid))
        # runaway direction: negative energy, positive norm
        assert energy_spectral(c, state) == pytest.approx(-0.5 * c.lambda0, rel=1e-8)
        assert energy_norm(c, state) == pytest.approx(math.sqrt(c.lambda0), rel=1e-8)

    def test_hamiltonian_is_positive(self, moving_state):
        assert hamiltonian(make_coupling(0.1), moving_state) > 0


class TestForms:

    def test_nr_form_equals_full_form_on_nonrunaway_states(self, grid):
        c = make_coupling(NEGATIVE)
        near_origin = PhaseState(gaussian_bump(grid, 3.0, 1.0), zero_field(grid))
        phi = project_nonrunaway(c, near_origin).position
        assert form_F(c, 'nr', phi, phi) == pytest.approx(form_F(c, 'full', phi, phi), rel=5e-2)
        assert form_F(c, 'nr', phi, phi) > 0

    def test_nr_form_needs_negative_alpha(self, bump):
        with pytest.raises(InvalidParameterError):
            form_F(make_coupling(0.1), 'nr', bump, bump)

    def test_unknown_variant(self, bump):
        with pytest.raises(InvalidParameterError):
            form_F(make_coupling(0.1), 'half', bump, bump)


class TestScalarProduct:

    def test_default_variants(self):
        assert default_variant(None) == 'free'
        assert default_variant(make_coupling(0.1)) == 'alpha_pos'
        assert default_variant(make_coupling(0.0)) == 'zero'
        assert default_variant(make_coupling(NEGATIVE)) == 'nr'

    def test_variant_must_match_regime(self, moving_state):
        with pytest.raises(InvalidParameterError):
            scalar_product(make_coupling(0.1), 'nr', moving_state, moving_state)
        with pytest.raises(InvalidParameterError):
            scalar_product(make_coupling(0.1), 'bogus', moving_state, moving_state)

    def test_symmetric(self, coupling, moving_state, second_state):
        variant = default_variant(coupling)
        a = scalar_product(coupling, variant, moving_state, second_state)
        b = scalar_product(coupling, variant, second_state, moving_state)
        assert a == pytest.approx(b, rel=1e-12)

    def test_flow_is_unitary(self, coupling, moving_state, second_state):
        variant = default_variant(coupling)
        s1 = project_nonrunaway(coupling, moving_state)
        s2 = project_nonrunaway(coupling, second_state)
        before = scalar_product(coupling, variant, s1, s2)
        after = scalar_product(coupling, variant, propagate_point(coupling, 3.0, s1),
                               propagate_point(coupling, 3.0, s2))
        assert after == pytest.approx(before, rel=1e-9)


class TestComplexStructure:

    def test_squares_to_minus_one(self, coupling, moving_state):
        s = project_nonrunaway(coupling, moving_state)
        twice = complex_structure(coupling, complex_structure(coupling, s))
        assert energy_norm(coupling, twice + s) <= 1e-10 * energy_norm(coupling, s)

    def test_bound_pair(self):
        assert bound_complex_structure(*bound_complex_structure(0.3, 0.7)) == (-0.3, -0.7)

    def test_commutes_with_flow(self, coupling, moving_state):
        s = project_nonrunaway(coupling, moving_state)
        a = complex_structure(coupling, propagate_point(coupling, 2.0, s))
        b = propagate_point(coupling, 2.0, complex_structure(coupling, s))
        assert energy_norm(coupling, a - b) <= 1e-9 * energy_norm(coupling, s)

    def test_is_an_isometry(self, coupling, moving_state):
        s = project_nonrunaway(coupling, moving_state)
        assert energy_norm(coupling, complex_structure(coupling, s)) == pytest.approx(
            energy_norm(coupling, s), rel=1e-10)


class TestSymplecticForm:

    def test_positivity(self, coupling, moving_state):
        s = project_nonrunaway(coupling, moving_state)
        js = complex_structure(coupling, s)
        norm2 = scalar_product(coupling, default_variant(coupling), s, s)
        assert symplectic_form(coupling, js, s) == pytest.approx(norm2, rel=1e-10)
        assert symplectic_form(coupling, s, js) == pytest.approx(-norm2, rel=1e-10)

    def test_antisymmetric(self, coupling, moving_state, second_state):
        a = symplectic_form(coupling, moving_state, second_state)
        b = symplectic_form(coupling, second_state, moving_state)
        assert a == pytest.approx(-b, rel=1e-12)

    def test_conserved_by_flow(self, coupling, moving_state, second_state):
        before = symplectic_form(coupling, moving_state, second_state)
        after = symplectic_form(coupling, propagate_point(coupling, 2.5, moving_state),
                                propagate_point(coupling, 2.5, second_state))
        assert after == pytest.approx(before, rel=1e-8, abs=1e-12)

    def test_standard_form_conserved_by_free_flow(self, moving_state, second_state):
        before = symplectic_form_standard(moving_state, second_state)
        after = symplectic_form_standard(propagate_free(3.0, moving_state), propagate_free(3.0, second_state))
        assert after == pytest.approx(before, rel=1e-9, abs=1e-12)

    def test_standard_form_rejects_charge(self, grid, moving_state):
        value = 1.0 / SQRT_4PI
        charged_state = PhaseState(charged(grid, np.full(grid.n_r + 1, value), origin_value=value), zero_field(grid))
        with pytest.raises(InvalidStateError):
            symplectic_form_standard(charged_state, moving_state)


class TestComplexMap:

    def test_round_trip(self, coupling, moving_state):
        s = project_nonrunaway(coupling, moving_state)
        back = c_map_inverse(coupling, c_map(coupling, s))
        assert energy_norm(coupling, back - s) <= 1e-10 * energy_norm(coupling, s)

    def test_runaway_component_rejected(self, moving_state):
        with pytest.raises(InvalidStateError):
            c_map(make_coupling(NEGATIVE), moving_state)

    def test_hermitian_product(self, coupling, moving_state, second_state):
        s1 = project_nonrunaway(coupling, moving_state)
        s2 = project_nonrunaway(coupling, second_state)
        value = hermitian_product(c_map(coupling, s1), c_map(coupling, s2))
        assert value.real == pytest.approx(scalar_product(coupling, default_variant(coupling), s1, s2), rel=1e-9)
        assert value.imag == pytest.approx(symplectic_form(coupling, s1, s2), rel=1e-9, abs=1e-12)

    def test_hermitian_product_needs_one_basis(self, moving_state):
        w_free = c_map(None, moving_state)
        w_point = c_map(make_coupling(0.1), moving_state)
        with pytest.raises(ShapeError):
            hermitian_product(w_free, w_point)

    def test_schrodinger_form(self, coupling, moving_state):
        s = project_nonrunaway(coupling, moving_state)
        lhs = evolve_complex(c_map(coupling, s), 2.0).w
        rhs = c_map(coupling, propagate_point(coupling, 2.0, s)).w
        np.testing.assert_allclose(lhs, rhs, atol=1e-10 * np.abs(rhs).max())
