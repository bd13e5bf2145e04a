"""
Evolution groups of the free and point-interaction wave equations.

Time enters only through spectral multipliers: the continuous channel is
conjugated by C_alpha to multiplication by exp(i k t), the bound pair of
alpha < 0 follows exp(t Lambda0). For alpha = 0 the pair (phi_reg, phi_dot)
goes through the free C map and the Neumann multiplier while the charge is
held fixed.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np
from scipy.integrate import trapezoid

from pointwave.config import (
    CHARGE_TOLERANCE,
    CORE_LEVELS,
    CORE_TAPER_CELLS,
    CORE_TAPER_FRACTION,
    DOMAIN_TOLERANCE,
    LIGHTCONE_THRESHOLD,
)
from pointwave.errors import DomainError, InvalidParameterError, InvalidStateError
from pointwave.geometry import energy_norm
from pointwave.radial import (
    ChargedField,
    Coupling,
    PhaseState,
    Regime,
    charged,
    inner,
    reg_origin_value,
    support_radius,
)
from pointwave.spectral import (
    complex_coefficients,
    from_complex_coefficients,
    functional_calculus,
    state_from_spectrum,
    transform_forward,
    transform_inverse,
    transform_state,
)

logger = logging.getLogger(__name__)

POSITION_PI_NR = 'position_Pi_nr'
VELOCITY_P_NR = 'velocity_P_nr'
FULL_P_AC = 'full_P_ac'


@dataclass(frozen=True)
class BoundChannelState:
    """Coordinates (x, x_dot) along the normalized eigenvector."""

    x: float
    xdot: float


@dataclass(frozen=True)
class DomainReport:
    in_domain: bool
    defect: float
    h2_seminorm: float


@dataclass
class CoreApproximationReport:
    radii: List[float] = field(default_factory=list)
    distances: List[float] = field(default_factory=list)

    @property
    def decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.distances, self.distances[1:]))


def lambda0_flow(lambda0: float, t: float, z: BoundChannelState) -> BoundChannelState:
    """exp(t Lambda0) with Lambda0(x, x_dot) = (x_dot, lambda0 x)."""
    if not lambda0 > 0:
        raise InvalidParameterError(f"lambda0 must be positive, got {lambda0}")
    w = math.sqrt(lambda0)
    ch, sh = math.cosh(w * t), math.sinh(w * t)
    return BoundChannelState(ch * z.x + sh / w * z.xdot, w * sh * z.x + ch * z.xdot)


def domain_membership(c: Coupling, s: PhaseState, tol: float = DOMAIN_TOLERANCE) -> DomainReport:
    """Boundary defect |alpha Q - phi_reg(0)| of the position plus an H2 finiteness check."""
    pos = s.position
    defect = abs(c.alpha * pos.charge - reg_origin_value(pos))
    h = pos.grid.h
    second = np.gradient(np.gradient(pos.regular.u, h, edge_order=2), h, edge_order=2)
    h2 = float(trapezoid(second * second, dx=h))
    return DomainReport(bool(math.isfinite(h2) and defect <= tol), defect, h2)


def apply_generator(c: Coupling, s: PhaseState, tol: float = DOMAIN_TOLERANCE) -> PhaseState:
    """W_alpha(phi, phi_dot) = (phi_dot, Delta phi_reg).

    On the domain Delta phi_reg equals Delta_alpha phi, which is applied in
    the eigenbasis of -Delta_alpha; for alpha = 0 the regular part is
    differentiated in the free basis.
    """
    report = domain_membership(c, s, tol)
    if not report.in_domain:
        raise DomainError(f"state violates alpha Q = phi_reg(0) by {report.defect:.3e}")
    if c.regime == Regime.ZERO:
        regular = ChargedField(s.position.regular, 0.0)
        laplacian = functional_calculus(None, lambda lam: -lam, regular, zero_mode=False)
    else:
        laplacian = functional_calculus(c, lambda lam: -lam, s.position)
    return PhaseState(s.velocity, laplacian)


def light_cone_horizon(s: PhaseState) -> float:
    """Time after which the cut at r_max can reach the state's support."""
    reach = max(support_radius(s.position, LIGHTCONE_THRESHOLD),
                support_radius(s.velocity, LIGHTCONE_THRESHOLD))
    return s.grid.r_max - reach


def _warn_light_cone(s: PhaseState, t: float):
    horizon = light_cone_horizon(s)
    if abs(t) > horizon:
        logger.warning("t = %g exceeds the truncation light cone (%.3g); results near r_max are not trusted",
                       t, horizon)


def _evolve_spectrum(c: Optional[Coupling], s: PhaseState, t: float) -> PhaseState:
    spec = transform_state(c, s)
    chat = complex_coefficients(spec) * np.exp(1j * spec.grid.k * t)
    u_hat, v_hat = from_complex_coefficients(spec.grid, chat)
    x, xdot = spec.x, spec.xdot
    if x is not None:
        z = lambda0_flow(c.lambda0, t, BoundChannelState(x, xdot))
        x, xdot = z.x, z.xdot
    evolved = replace(spec, u_hat=u_hat, v_hat=v_hat, x=x, xdot=xdot)
    return state_from_spectrum(c, evolved, s.grid)


def propagate_free(t: float, s: PhaseState) -> PhaseState:
    """Free flow U^t in the Dirichlet sine basis; positions must be charge-free."""
    if abs(s.position.charge) > CHARGE_TOLERANCE:
        raise InvalidStateError(f"free flow needs Q = 0, got Q = {s.position.charge:.3e}")
    _warn_light_cone(s, t)
    return _evolve_spectrum(None, s, t)


def propagate_point(c: Coupling, t: float, s: PhaseState) -> PhaseState:
    """U_alpha^t on the finite-energy phase space; an alpha = 0 charge never moves."""
    _warn_light_cone(s, t)
    return _evolve_spectrum(c, s, t)


def project_nonrunaway(c: Coupling, s: PhaseState, which: str = FULL_P_AC) -> PhaseState:
    """Remove the bound direction (alpha < 0) or the charge (alpha = 0).

    position_Pi_nr acts on the position, velocity_P_nr on the velocity and
    full_P_ac on both; for alpha > 0 every variant is the identity. For
    alpha = 0 the position variants map (phi, phi_dot) to (phi_reg, phi_dot).
    """
    if which not in (POSITION_PI_NR, VELOCITY_P_NR, FULL_P_AC):
        raise InvalidParameterError(f"unknown projection {which!r}")
    if c.regime == Regime.POSITIVE:
        return s
    if c.regime == Regime.ZERO:
        if which == VELOCITY_P_NR:
            return s
        return PhaseState(ChargedField(s.position.regular, 0.0), s.velocity)
    position, velocity = s.position, s.velocity
    if which in (POSITION_PI_NR, FULL_P_AC):
        spec = transform_forward(c, position)
        position = transform_inverse(c, replace(spec, x=0.0), s.grid)
    if which in (VELOCITY_P_NR, FULL_P_AC):
        spec = transform_forward(c, velocity, zero_mode=False)
        velocity = transform_inverse(c, replace(spec, x=0.0), s.grid)
    return PhaseState(position, velocity)


def nonrunaway_defect(c: Coupling, field: ChargedField) -> float:
    """|Q + 4 pi sqrt(lambda0) <phi_reg, G_lambda0>|, zero on the non-runaway subspace."""
    if c.regime != Regime.NEGATIVE:
        raise InvalidParameterError("non-runaway subspaces exist only for alpha < 0")
    pairing = inner('against_g_lambda0', field.regular, lambda0=c.lambda0)
    return abs(field.charge + 4.0 * math.pi * math.sqrt(c.lambda0) * pairing)


def taper(r: np.ndarray, start: float, width: float) -> np.ndarray:
    """1 up to start, cosine ramp to 0 over width, 0 beyond."""
    ramp = np.clip((r - start) / width, 0.0, 1.0)
    return 0.5 * (1.0 + np.cos(math.pi * ramp))


def core_approximation_check(c: Coupling, s: PhaseState, t: float,
                             n_levels: int = CORE_LEVELS) -> CoreApproximationReport:
    """Evolve tail-cut approximants phi_n and measure their distance to U_alpha^t s.

    The cut radii approach r_max minus the taper geometrically. A tail that
    has not decayed before r_max leaves a floor of order u(r_max - h)^2 / h.
    """
    grid = s.grid
    width = max(CORE_TAPER_CELLS * grid.h, CORE_TAPER_FRACTION * grid.r_max)
    reach = grid.r_max - width - grid.h
    reference = propagate_point(c, t, s)
    report = CoreApproximationReport()
    full = s.position.full().u
    for n in range(1, n_levels + 1):
        radius = reach * (1.0 - 0.5 ** (n + 1))
        cut = charged(grid, taper(grid.nodes, radius, width) * full, origin_value=full[0])
        evolved = propagate_point(c, t, PhaseState(cut, s.velocity))
        report.radii.append(radius)
        report.distances.append(energy_norm(c, evolved - reference))
        logger.debug("core level %d radius %.3f distance %.3e", n, radius, report.distances[-1])
    return report
