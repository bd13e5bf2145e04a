"""
Energy, scalar products, complex structures and symplectic forms.

Spectral-coordinate formulas use the channel amplitudes of
``spectral.transform_state``; with C(phi, phi_dot) = B phi - i phi_dot and
B = (-Delta_alpha)^{1/2}, every map here is a diagonal multiplier on the
continuous channel plus an explicit 2x2 map on the bound pair.
"""
import logging
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from pointwave.config import CHARGE_TOLERANCE, RUNAWAY_TOLERANCE
from pointwave.errors import InvalidParameterError, InvalidStateError, ShapeError
from pointwave.radial import ChargedField, Coupling, PhaseState, RadialGrid, Regime, inner
from pointwave.spectral import (
    SpectralDecomposition,
    basis_for,
    complex_coefficients,
    from_complex_coefficients,
    state_from_spectrum,
    transform_state,
)

logger = logging.getLogger(__name__)

_VARIANT_REGIME = {
    'alpha_pos': Regime.POSITIVE,
    'nr': Regime.NEGATIVE,
    'zero': Regime.ZERO,
}


@dataclass(frozen=True, eq=False)
class ComplexHalfLineField:
    """Samples of C(phi, phi_dot), expanded in the basis of ``coupling`` (None: free)."""

    grid: RadialGrid
    w: np.ndarray
    coupling: Optional[Coupling] = None


def energy(c: Coupling, s: PhaseState) -> float:
    """E_alpha = (1/2)(|phi_dot|^2 + |phi_reg|_H1^2 + alpha Q^2), by quadrature."""
    kinetic = inner('l2', s.velocity, s.velocity)
    gradient = inner('h1_seminorm', s.position, s.position)
    return 0.5 * (kinetic + gradient + c.alpha * s.position.charge ** 2)


def energy_spectral(c: Optional[Coupling], s: PhaseState) -> float:
    """Energy in channel coordinates; conserved by the flow to rounding."""
    spec = transform_state(c, s)
    sg = spec.grid
    total = 0.5 * float(np.sum(sg.weights * (sg.k ** 2 * spec.u_hat ** 2 + spec.v_hat ** 2)))
    if spec.x is not None:
        total += 0.5 * (-c.lambda0 * spec.x ** 2 + spec.xdot ** 2)
    return total


def energy_norm(c: Optional[Coupling], s: PhaseState) -> float:
    """Positive norm on the whole phase space, used for distances."""
    spec = transform_state(c, s)
    sg = spec.grid
    total = float(np.sum(sg.weights * (sg.k ** 2 * spec.u_hat ** 2 + spec.v_hat ** 2)))
    if spec.x is not None:
        total += c.lambda0 * spec.x ** 2 + spec.xdot ** 2
    if spec.zero_mode:
        total += spec.zero_mode ** 2
    return math.sqrt(total)


def form_F(c: Coupling, variant: str, a: ChargedField, b: ChargedField) -> float:
    """Quadrature form F_alpha, or its non-negative non-runaway rewrite."""
    base = inner('h1_seminorm', a, b)
    if variant == 'full':
        return base + c.alpha * a.charge * b.charge
    if variant == 'nr':
        if c.regime != Regime.NEGATIVE:
            raise InvalidParameterError("the nr form exists only for alpha < 0")
        pa = inner('against_g_lambda0', a.regular, lambda0=c.lambda0)
        pb = inner('against_g_lambda0', b.regular, lambda0=c.lambda0)
        return base - 4.0 * math.pi * c.lambda0 ** 1.5 * pa * pb
    raise InvalidParameterError(f"unknown form variant {variant!r}")


def _continuous_product(spec1: SpectralDecomposition, spec2: SpectralDecomposition) -> float:
    sg = spec1.grid
    return float(np.sum(sg.weights * (sg.k ** 2 * spec1.u_hat * spec2.u_hat + spec1.v_hat * spec2.v_hat)))


def scalar_product(c: Optional[Coupling], variant: str, s1: PhaseState, s2: PhaseState) -> float:
    """<<s1, s2>> on the continuous channel; variant 'free' uses the Dirichlet basis."""
    if variant == 'free':
        c = None
    elif variant not in _VARIANT_REGIME:
        raise InvalidParameterError(f"unknown scalar product variant {variant!r}")
    elif c is None or c.regime != _VARIANT_REGIME[variant]:
        raise InvalidParameterError(f"variant {variant!r} does not match the coupling regime")
    return _continuous_product(transform_state(c, s1), transform_state(c, s2))


def default_variant(c: Optional[Coupling]) -> str:
    if c is None:
        return 'free'
    return {Regime.POSITIVE: 'alpha_pos', Regime.NEGATIVE: 'nr', Regime.ZERO: 'zero'}[c.regime]


def c_map(c: Optional[Coupling], s: PhaseState) -> ComplexHalfLineField:
    """C_alpha(phi, phi_dot) = (-Delta_alpha)^{1/2} phi - i phi_dot as grid samples.

    For alpha = 0 the zero-mode coordinate is not part of the image.
    """
    spec = transform_state(c, s)
    if spec.x is not None:
        scale = max(1.0, math.sqrt(_continuous_product(spec, spec)))
        if max(abs(spec.x), abs(spec.xdot)) > RUNAWAY_TOLERANCE * scale:
            raise InvalidStateError("C_alpha is defined on non-runaway states only")
    basis = basis_for(c, s.grid)
    return ComplexHalfLineField(s.grid, basis.synthesize(complex_coefficients(spec)), c)


def analyze_complex(c: Optional[Coupling], w: ComplexHalfLineField) -> np.ndarray:
    """Continuous-channel amplitudes of a complex field in the basis of c."""
    chat, _ = basis_for(c, w.grid).analyze(w.w)
    return chat


def c_map_inverse(c: Optional[Coupling], w: ComplexHalfLineField) -> PhaseState:
    """Read the samples of w in the basis of c and undo the C map."""
    basis = basis_for(c, w.grid)
    chat = analyze_complex(c, w)
    u_hat, v_hat = from_complex_coefficients(basis.sg, chat)
    bound = 0.0 if basis.sg.has_bound else None
    spec = SpectralDecomposition(basis.sg, u_hat, v_hat, bound, bound)
    return state_from_spectrum(c, spec, w.grid)


def hermitian_product(w1: ComplexHalfLineField, w2: ComplexHalfLineField) -> complex:
    """[w1, w2], linear in the first slot; Re is <<.,.>> and Im is <<., J .>>."""
    if w1.grid != w2.grid or w1.coupling != w2.coupling:
        raise ShapeError("complex fields live in different bases")
    sg = basis_for(w1.coupling, w1.grid).sg
    c1 = analyze_complex(w1.coupling, w1)
    c2 = analyze_complex(w2.coupling, w2)
    return complex(np.sum(sg.weights * c1 * np.conj(c2)))


def evolve_complex(w: ComplexHalfLineField, t: float) -> ComplexHalfLineField:
    """Schrodinger form of the flow: multiply amplitudes by exp(i k t)."""
    basis = basis_for(w.coupling, w.grid)
    chat = analyze_complex(w.coupling, w) * np.exp(1j * basis.sg.k * t)
    return replace(w, w=basis.synthesize(chat))


def bound_complex_structure(x: float, xdot: float):
    """j(x, x_dot) = (x_dot, -x)."""
    return xdot, -x


def complex_structure(c: Optional[Coupling], s: PhaseState) -> PhaseState:
    """J_alpha = C^{-1} i C on the continuous channel, times j on the bound pair.

    For alpha = 0 the zero-mode factor is sent to zero.
    """
    spec = transform_state(c, s)
    u_hat, v_hat = from_complex_coefficients(spec.grid, 1j * complex_coefficients(spec))
    x, xdot = spec.x, spec.xdot
    if x is not None:
        x, xdot = bound_complex_structure(x, xdot)
    rotated = SpectralDecomposition(spec.grid, u_hat, v_hat, x, xdot, None)
    return state_from_spectrum(c, rotated, s.grid)


def symplectic_form(c: Optional[Coupling], s1: PhaseState, s2: PhaseState) -> float:
    """Omega_alpha(s1, s2) = <<psi1, J psi2>> + (z1, j z2)."""
    a = transform_state(c, s1)
    b = transform_state(c, s2)
    sg = a.grid
    total = float(np.sum(sg.weights * sg.k * (a.u_hat * b.v_hat - a.v_hat * b.u_hat)))
    if a.x is not None:
        total += a.x * b.xdot - a.xdot * b.x
    return total


def symplectic_form_standard(s1: PhaseState, s2: PhaseState) -> float:
    """omega(s1, s2) = <phi1, phi2_dot> - <phi2, phi1_dot> for charge-free positions."""
    for s in (s1, s2):
        if abs(s.position.charge) > CHARGE_TOLERANCE:
            raise InvalidStateError("omega needs square-integrable (charge-free) positions")
    return inner('l2', s1.position, s2.velocity) - inner('l2', s2.position, s1.velocity)


def hamiltonian(c: Optional[Coupling], s: PhaseState) -> float:
    """H = (1/2)(|B^{1/2} v|^2 + |B^{3/2} u|^2) + (1/2)(L0 z, z)."""
    spec = transform_state(c, s)
    sg = spec.grid
    total = 0.5 * float(np.sum(sg.weights * sg.k * (sg.k ** 2 * spec.u_hat ** 2 + spec.v_hat ** 2)))
    if spec.x is not None:
        total += 0.5 * (-c.lambda0 * spec.x ** 2 + spec.xdot ** 2)
    return total
