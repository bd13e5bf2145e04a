"""
Two-space scattering theory for the pair (free flow, point-interaction flow).

Time-limit Moller approximants are built from the flows and the
identification operators; the stationary operator carries the
C_alpha-image amplitudes onto the free sine lattice through the orthogonal
part of the exact mode overlaps, then applies the unimodular factor
exp(-+ i delta(k)).
"""
import functools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from pointwave.config import CHECK_TOLERANCES, INTERTWINING_TIME, LIGHTCONE_THRESHOLD, MOLLER_SCHEDULE, MOLLER_SIGN
from pointwave.dynamics import FULL_P_AC, project_nonrunaway, propagate_free, propagate_point
from pointwave.errors import InvalidParameterError, LightConeError
from pointwave.geometry import c_map, c_map_inverse, default_variant, energy_norm, scalar_product
from pointwave.radial import ChargedField, Coupling, PhaseState, RadialGrid, support_radius
from pointwave.settings import thread_count
from pointwave.spectral import (
    SpectralDecomposition,
    basis_for,
    complex_coefficients,
    from_complex_coefficients,
    phase_shift,
    state_from_spectrum,
    transform_state,
)
from pointwave.stats import CheckResult

logger = logging.getLogger(__name__)

J_ALPHA = 'J_alpha'
J_ALPHA_PRIME = 'J_alpha_prime'
J_SIMPLE = 'J_simple'
J_SIMPLE_PRIME = 'J_simple_prime'
DIRECTIONS = {'plus': 1.0, 'minus': -1.0}


@dataclass
class MollerReport:
    direction: str
    times: List[float] = field(default_factory=list)
    defects: List[float] = field(default_factory=list)
    cauchy: List[float] = field(default_factory=list)
    isometry_defect: float = 0.0
    intertwining_defect: float = 0.0
    extrapolated_limit: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _sign(direction: str) -> float:
    try:
        return DIRECTIONS[direction]
    except KeyError:
        raise InvalidParameterError(f"direction must be 'plus' or 'minus', got {direction!r}") from None


def identify(c: Coupling, which: str, s: PhaseState) -> PhaseState:
    """Identification operators between the point and free phase spaces.

    J_alpha = C^{-1} C_alpha P_ac, i.e. (-Delta)^{-1/2} (-Delta_alpha)^{1/2} on
    positions; J_alpha_prime = C_alpha^{-1} C goes the other way; J_simple
    strips the Coulomb charge and J_simple_prime is the identity.
    """
    if which == J_ALPHA:
        return c_map_inverse(None, c_map(c, project_nonrunaway(c, s, FULL_P_AC)))
    if which == J_ALPHA_PRIME:
        return c_map_inverse(c, c_map(None, s))
    if which == J_SIMPLE:
        return PhaseState(ChargedField(s.position.regular, 0.0), s.velocity)
    if which == J_SIMPLE_PRIME:
        return s
    raise InvalidParameterError(f"unknown identification {which!r}")


@functools.lru_cache(maxsize=8)
def polar_transfer(c: Coupling, grid: RadialGrid) -> np.ndarray:
    """Orthogonal part of the overlaps between the modes of c and the phase-shifted sines on the free lattice.

    Entry (n, j) is sqrt(w0_n w_j) times the exact integral over (0, r_max) of
    e_j(r) sqrt(2/pi) sin(k_n r + delta(k_n)); both sides are Parseval-normalized.
    """
    target = basis_for(c, grid).sg
    free = basis_for(None, grid).sg
    R = grid.r_max

    def cosine_integral(x, d):
        return R * np.cos(0.5 * x * R + d) * np.sinc(0.5 * x * R / math.pi)

    k_a, k_b = target.k[None, :], free.k[:, None]
    p_a, p_b = target.delta[None, :], phase_shift(c, free.k)[:, None]
    overlap = (cosine_integral(k_a - k_b, p_a - p_b) - cosine_integral(k_a + k_b, p_a + p_b)) / math.pi
    scaled = np.sqrt(free.weights)[:, None] * overlap * np.sqrt(target.weights)[None, :]
    left, _, right = np.linalg.svd(scaled, full_matrices=False)
    logger.debug("polar transfer %s for alpha=%g", scaled.shape, c.alpha)
    return left @ right


def _moller_factor(c: Coupling, direction: str, k: np.ndarray) -> np.ndarray:
    return np.exp(-1j * _sign(direction) * MOLLER_SIGN * phase_shift(c, k))


def moller_stationary(c: Coupling, direction: str, s: PhaseState) -> PhaseState:
    """C^{-1} Omega(-Delta, -Delta_alpha) C_alpha P_ac applied to s."""
    spec = transform_state(c, project_nonrunaway(c, s, FULL_P_AC))
    free = basis_for(None, s.grid).sg
    normalized = polar_transfer(c, s.grid) @ (np.sqrt(spec.grid.weights) * complex_coefficients(spec))
    chat = _moller_factor(c, direction, free.k) * normalized / np.sqrt(free.weights)
    u_hat, v_hat = from_complex_coefficients(free, chat)
    return state_from_spectrum(None, SpectralDecomposition(free, u_hat, v_hat), s.grid)


def moller_stationary_reverse(c: Coupling, direction: str, s: PhaseState) -> PhaseState:
    """Stationary form of Omega(W_alpha, W; J'_alpha), the adjoint of moller_stationary."""
    spec = transform_state(None, s)
    target = basis_for(c, s.grid).sg
    normalized = np.sqrt(spec.grid.weights) * complex_coefficients(spec)
    shifted = np.conj(_moller_factor(c, direction, spec.grid.k)) * normalized
    chat = (polar_transfer(c, s.grid).T @ shifted) / np.sqrt(target.weights)
    u_hat, v_hat = from_complex_coefficients(target, chat)
    bound = 0.0 if target.has_bound else None
    return state_from_spectrum(c, SpectralDecomposition(target, u_hat, v_hat, bound, bound), s.grid)


def check_light_cone(s: PhaseState, t_max: float):
    reach = max(support_radius(s.position, LIGHTCONE_THRESHOLD), support_radius(s.velocity, LIGHTCONE_THRESHOLD))
    required = reach + 2.0 * t_max
    if required > s.grid.r_max:
        raise LightConeError(f"horizon {t_max} needs r_max >= {required:.3f}, have {s.grid.r_max}", required)


def aitken_limit(values: Sequence[float]) -> float:
    """Delta-squared extrapolation of the last three terms of a sequence."""
    if len(values) < 3:
        return float(values[-1])
    a, b, c = values[-3:]
    denom = (c - b) - (b - a)
    if denom == 0.0:
        return float(c)
    return float(c - (c - b) ** 2 / denom)


def _validated_times(schedule: Sequence[float]) -> List[float]:
    times = [float(t) for t in schedule]
    if not times or any(t <= 0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise InvalidParameterError(f"T schedule must be positive and strictly increasing, got {times}")
    return times


def _relative(value: float, scale: float) -> float:
    return value / scale if scale > 0 else value


def stationary_intertwining(c: Coupling, direction: str, s: PhaseState, t: float) -> float:
    """|Omega U_alpha^t s - U^t Omega s| relative to |P_ac s|."""
    lhs = moller_stationary(c, direction, propagate_point(c, t, s))
    rhs = propagate_free(t, moller_stationary(c, direction, s))
    return _relative(energy_norm(None, lhs - rhs), energy_norm(c, project_nonrunaway(c, s)))


def moller_time(c: Coupling, direction: str, T_schedule: Sequence[float],
                s: PhaseState) -> Tuple[PhaseState, MollerReport]:
    """U^{-T} J_alpha U_alpha^T P_ac s for each T, compared with the stationary operator."""
    sign = _sign(direction)
    times = _validated_times(T_schedule)
    check_light_cone(s, times[-1])
    ac = project_nonrunaway(c, s, FULL_P_AC)
    stationary = moller_stationary(c, direction, s)
    report = MollerReport(direction, times)
    previous = None
    out = ac
    for T in times:
        out = propagate_free(-sign * T, identify(c, J_ALPHA, propagate_point(c, sign * T, ac)))
        report.defects.append(energy_norm(None, out - stationary))
        if previous is not None:
            report.cauchy.append(energy_norm(None, out - previous))
        previous = out
        logger.debug("moller %s T=%g defect %.3e", direction, T, report.defects[-1])
    scale = energy_norm(c, ac) ** 2
    report.isometry_defect = _relative(abs(energy_norm(None, out) ** 2 - scale), scale)
    report.intertwining_defect = stationary_intertwining(c, direction, s, INTERTWINING_TIME)
    report.extrapolated_limit = aitken_limit(report.defects)
    return out, report


def moller_time_reverse(c: Coupling, direction: str, T_schedule: Sequence[float],
                        s: PhaseState) -> Tuple[PhaseState, MollerReport]:
    """U_alpha^{-T} J'_alpha U^T s for a free state s."""
    sign = _sign(direction)
    times = _validated_times(T_schedule)
    check_light_cone(s, times[-1])
    stationary = moller_stationary_reverse(c, direction, s)
    report = MollerReport(direction, times)
    previous = None
    out = s
    for T in times:
        out = propagate_point(c, -sign * T, identify(c, J_ALPHA_PRIME, propagate_free(sign * T, s)))
        report.defects.append(energy_norm(c, out - stationary))
        if previous is not None:
            report.cauchy.append(energy_norm(c, out - previous))
        previous = out
    scale = energy_norm(None, s) ** 2
    report.isometry_defect = _relative(abs(energy_norm(c, out) ** 2 - scale), scale)
    report.extrapolated_limit = aitken_limit(report.defects)
    return out, report


def equivalence_defects(c: Coupling, s: PhaseState, times: Sequence[float]) -> List[float]:
    """|(J_alpha - J) U_alpha^T P_ac s| in the free energy norm, per T."""
    ac = project_nonrunaway(c, s, FULL_P_AC)
    defects = []
    for T in times:
        evolved = propagate_point(c, T, ac)
        diff = identify(c, J_ALPHA, evolved) - identify(c, J_SIMPLE, evolved)
        defects.append(energy_norm(None, diff))
    return defects


def left_inverse_defects(c: Coupling, s: PhaseState, times: Sequence[float]) -> List[float]:
    """|(J'_alpha J_alpha - 1) U_alpha^T P_ac s| in the point energy norm, per T."""
    ac = project_nonrunaway(c, s, FULL_P_AC)
    defects = []
    for T in times:
        evolved = propagate_point(c, T, ac)
        back = identify(c, J_ALPHA_PRIME, identify(c, J_ALPHA, evolved))
        defects.append(energy_norm(c, back - evolved))
    return defects


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))


def _sample_checks(c: Coupling, index: int, s: PhaseState, partner: PhaseState,
                   times: List[float], exact_tol: float, limit_tol: float) -> List[CheckResult]:
    results = []
    ac = project_nonrunaway(c, s, FULL_P_AC)
    scale = energy_norm(c, ac)
    for direction in DIRECTIONS:
        omega_s = moller_stationary(c, direction, s)
        iso = _relative(abs(energy_norm(None, omega_s) ** 2 - scale ** 2), scale ** 2)
        results.append(CheckResult(f"sample{index}.{direction}.isometry", exact_tol, iso))
        back = moller_stationary_reverse(c, direction, omega_s)
        results.append(CheckResult(f"sample{index}.{direction}.adjoint_product_is_P_ac", exact_tol,
                                   _relative(energy_norm(c, back - ac), scale)))
        f = moller_stationary(c, direction, partner)
        lhs = scalar_product(None, 'free', omega_s, f)
        rhs = scalar_product(c, default_variant(c), ac, moller_stationary_reverse(c, direction, f))
        results.append(CheckResult(f"sample{index}.{direction}.adjoint_pairing", exact_tol,
                                   _relative(abs(lhs - rhs), scale * energy_norm(None, f))))
        results.append(CheckResult(f"sample{index}.{direction}.intertwining",
                                   CHECK_TOLERANCES['scattering_intertwining'],
                                   stationary_intertwining(c, direction, s, INTERTWINING_TIME)))
        _, report = moller_time(c, direction, times, s)
        results.append(CheckResult(f"sample{index}.{direction}.time_limit", limit_tol,
                                   _relative(report.defects[-1], scale),
                                   _strictly_decreasing(report.defects)))
    equivalence = equivalence_defects(c, s, times)
    results.append(CheckResult(f"sample{index}.equivalence", limit_tol, _relative(equivalence[-1], scale),
                               _strictly_decreasing(equivalence)))
    t_last = times[-1]
    evolved = propagate_point(c, t_last, ac)
    via_alpha = propagate_free(-t_last, identify(c, J_ALPHA, evolved))
    via_simple = propagate_free(-t_last, identify(c, J_SIMPLE, evolved))
    results.append(CheckResult(f"sample{index}.simple_identification_limit", limit_tol,
                               _relative(energy_norm(None, via_alpha - via_simple), scale)))
    left = left_inverse_defects(c, s, times)
    results.append(CheckResult(f"sample{index}.left_inverse", limit_tol, _relative(left[-1], scale)))
    return results


def verify_scattering(c: Coupling, samples: Sequence[PhaseState],
                      times: Sequence[float] = MOLLER_SCHEDULE,
                      threads: Optional[int] = None) -> List[CheckResult]:
    """Isometry, adjoint, intertwining and time-limit checks on each sample."""
    times = _validated_times(times)
    exact_tol = CHECK_TOLERANCES['scattering_exact']
    limit_tol = CHECK_TOLERANCES['scattering_limit']
    samples = list(samples)
    for s in samples:
        check_light_cone(s, times[-1])
    workers = threads or thread_count()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_sample_checks, c, i, s, samples[(i + 1) % len(samples)], times, exact_tol, limit_tol)
                   for i, s in enumerate(samples)]
        return [result for fut in futures for result in fut.result()]


def moller_asymmetry(c: Coupling, s: PhaseState) -> float:
    """|Omega_+ s - Omega_- s|; nonzero whenever delta(k) does not vanish."""
    return energy_norm(None, moller_stationary(c, 'plus', s) - moller_stationary(c, 'minus', s))
