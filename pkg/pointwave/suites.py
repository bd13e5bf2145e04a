"""
Verification suites run by ``pointwave verify``.

Each suite takes the coupling, the initial state and the run settings and
returns CheckResults; suites that do not apply to the coupling regime
return an empty list.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List

import numpy as np

from pointwave.config import (
    CHECK_TOLERANCES,
    CORE_ROUNDING_FLOOR,
    KREIN_LAMBDAS,
    RANDOM_STATE_COUNT,
    VERIFY_SUITES,
)
from pointwave.dynamics import (
    core_approximation_check,
    project_nonrunaway,
    propagate_point,
)
from pointwave.geometry import (
    complex_structure,
    default_variant,
    energy_norm,
    energy_spectral,
    scalar_product,
    symplectic_form,
)
from pointwave.oracle import (
    build,
    build_free,
    fitted_phase,
    ground_coefficient,
    krein_singular_values,
    lowest_eigenvalue,
    oracle_project_ac,
    oracle_propagate,
    wrap_phase,
)
from pointwave.radial import Coupling, PhaseState, RadialGrid, Regime, charged, zero_field
from pointwave.scattering import verify_scattering
from pointwave.settings import RunConfig, random_states, thread_count
from pointwave.spectral import phase_shift, transform_state
from pointwave.stats import CheckResult

logger = logging.getLogger(__name__)

Suite = Callable[[Coupling, PhaseState, RunConfig], List[CheckResult]]


def _relative(value: float, scale: float) -> float:
    return value / scale if scale > 0 else value


def _sweep(c: Coupling, s: PhaseState, run: RunConfig) -> List[PhaseState]:
    """The run's initial state followed by the seeded random states."""
    rng = np.random.default_rng(run.seed)
    return [s] + random_states(c, run.grid, rng, RANDOM_STATE_COUNT)


def eigenvalue_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Oracle bound eigenvalue against -lambda0, plus its O(h^2) exponent over three grids."""
    if c.regime != Regime.NEGATIVE:
        return []
    errors = [abs(lowest_eigenvalue(c, RadialGrid(run.r_max, m * run.n_r)) + c.lambda0) for m in (1, 2, 4)]
    rates = [math.log2(a / b) if b > 0 else 2.0 for a, b in zip(errors, errors[1:])]
    logger.debug("bound eigenvalue errors %s, rates %s", errors, rates)
    return [
        CheckResult('eigenvalue', CHECK_TOLERANCES['eigenvalue'], errors[0] / c.lambda0),
        CheckResult('eigenvalue_rate', CHECK_TOLERANCES['eigenvalue_rate'], max(abs(r - 2.0) for r in rates)),
    ]


def runaway_rate_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Growth of the bound mode over t_max: spectral flow and oracle against cosh."""
    if c.regime != Regime.NEGATIVE:
        return []
    grid = run.grid
    t = run.t_max
    amplitude = math.sqrt(2.0 * c.kappa)
    mode = charged(grid, amplitude * np.exp(-c.kappa * grid.nodes), origin_value=amplitude)
    state = PhaseState(mode, zero_field(grid))
    x_t = transform_state(c, propagate_point(c, t, state)).x
    expected = math.cosh(math.sqrt(c.lambda0) * t)
    results = [CheckResult('runaway_rate_spectral', CHECK_TOLERANCES['runaway_rate_spectral'],
                           abs(x_t - expected) / expected)]

    op = build(c, grid)
    ratio = ground_coefficient(op, oracle_propagate(op, t, state).position) / ground_coefficient(op, mode)
    results.append(CheckResult('runaway_rate_oracle', CHECK_TOLERANCES['runaway_rate_oracle'],
                               abs(ratio - expected) / expected))
    return results


def energy_drift_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    e0 = energy_spectral(c, s)
    scale = max(abs(e0), energy_norm(c, s) ** 2, 1e-300)
    drift = max(abs(energy_spectral(c, propagate_point(c, t, s)) - e0) for t in run.sample_times)
    return [CheckResult('energy_drift', CHECK_TOLERANCES['energy_drift'], drift / scale)]


def _l2_distance(run: RunConfig, a: PhaseState, b: PhaseState) -> float:
    """Relative L2 distance of the positions, measured against b."""
    h = run.grid.h
    u, v = a.position.full().u, b.position.full().u
    return _relative(math.sqrt(h * float(np.sum((u - v) ** 2))), math.sqrt(h * float(np.sum(v ** 2))))


def oracle_baseline(c: Coupling, s: PhaseState, run: RunConfig) -> float:
    """Spectral flow against the oracle at t_max; alpha < 0 compares the continuous channels."""
    op = build(c, run.grid)
    if c.regime == Regime.NEGATIVE:
        spectral = propagate_point(c, run.t_max, project_nonrunaway(c, s))
        oracle = oracle_propagate(op, run.t_max, oracle_project_ac(op, s))
    else:
        spectral = propagate_point(c, run.t_max, s)
        oracle = oracle_propagate(op, run.t_max, s)
    return _l2_distance(run, spectral, oracle)


def oracle_equivalence_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Spectral flow against the finite-difference oracle at t_max, plus the bound channel for alpha < 0."""
    results = [CheckResult('oracle_equivalence', CHECK_TOLERANCES['oracle_equivalence'],
                           oracle_baseline(c, s, run))]
    if c.regime != Regime.NEGATIVE:
        return results
    op = build(c, run.grid)
    t = run.t_max
    w = math.sqrt(c.lambda0)
    x_spectral = transform_state(c, propagate_point(c, t, s)).x
    x_oracle = ground_coefficient(op, oracle_propagate(op, t, s).position)
    envelope = math.cosh(w * t) * (abs(ground_coefficient(op, s.position))
                                   + abs(ground_coefficient(op, s.velocity)) / w)
    results.append(CheckResult('oracle_bound_channel', CHECK_TOLERANCES['runaway_rate_oracle'],
                               _relative(abs(x_spectral - x_oracle), envelope)))
    return results


def group_law_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """U(t1) U(t2) = U(t1 + t2) and U(-t) U(t) = id over the sweep states."""
    t1 = 0.5 * run.t_max
    t2 = 0.25 * run.t_max
    composition, reversal = 0.0, 0.0
    for state in _sweep(c, s, run):
        direct = propagate_point(c, t1 + t2, state)
        composed = propagate_point(c, t1, propagate_point(c, t2, state))
        composition = max(composition, _relative(energy_norm(c, composed - direct), energy_norm(c, direct)))
        back = propagate_point(c, -run.t_max, propagate_point(c, run.t_max, state))
        reversal = max(reversal, _relative(energy_norm(c, back - state), energy_norm(c, state)))
    tol = CHECK_TOLERANCES['group_law']
    return [CheckResult('group_law', tol, composition), CheckResult('time_reversal', tol, reversal)]


def complex_structure_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """J^2 = -1, |J s| = |s| and J U(t) = U(t) J on the continuous channel of the sweep states."""
    square, isometry, commutation = 0.0, 0.0, 0.0
    t = run.t_max
    for state in _sweep(c, s, run):
        ac = project_nonrunaway(c, state)
        js = complex_structure(c, ac)
        # a pure bound state has no continuous channel; measure against the whole state
        scale = max(energy_norm(c, ac), energy_norm(c, state))
        square = max(square, _relative(energy_norm(c, complex_structure(c, js) + ac), scale))
        isometry = max(isometry, _relative(abs(energy_norm(c, js) - energy_norm(c, ac)), scale))
        flowed = complex_structure(c, propagate_point(c, t, ac)) - propagate_point(c, t, js)
        commutation = max(commutation, _relative(energy_norm(c, flowed), scale))
    tol = CHECK_TOLERANCES['complex_structure']
    return [
        CheckResult('complex_structure', tol, square),
        CheckResult('complex_structure_isometry', tol, isometry),
        CheckResult('complex_structure_flow', tol, commutation),
    ]


def symplectic_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Omega(J s, s) = <<s, s>> on the continuous channel, and Omega conserved by the flow."""
    ac = project_nonrunaway(c, s)
    js = complex_structure(c, ac)
    norm2 = scalar_product(c, default_variant(c), ac, ac)
    scale = max(norm2, energy_norm(c, s) ** 2, 1e-300)
    positivity = abs(symplectic_form(c, js, ac) - norm2) / scale
    other = complex_structure(c, s)
    omega0 = symplectic_form(c, s, other)
    t = run.t_max
    omega_t = symplectic_form(c, propagate_point(c, t, s), propagate_point(c, t, other))
    conservation = abs(omega_t - omega0) / max(energy_norm(c, s) ** 2, 1e-300)
    tol = CHECK_TOLERANCES['symplectic']
    return [
        CheckResult('symplectic_positivity', tol, positivity),
        CheckResult('symplectic_conservation', tol, conservation),
    ]


def zero_mode_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """For alpha = 0 the charge coordinate is held fixed by the flow."""
    if c.regime != Regime.ZERO:
        return []
    q0 = transform_state(c, s).zero_mode or 0.0
    drift = max(abs((transform_state(c, propagate_point(c, t, s)).zero_mode or 0.0) - q0)
                for t in run.sample_times)
    return [CheckResult('zero_mode', CHECK_TOLERANCES['zero_mode'], drift)]


def krein_rank_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """The resolvent difference of the oracles is rank one at each resolvent point."""
    point, free = build(c, run.grid), build_free(run.grid)
    results = []
    for lam in KREIN_LAMBDAS:
        sigma = krein_singular_values(point, free, lam)
        results.append(CheckResult(f'krein_rank_lambda_{lam:g}', CHECK_TOLERANCES['krein_rank'],
                                   float(sigma[1] / sigma[0])))
    return results


def phase_shift_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Fitted oracle phase at k near 1 against delta(k)."""
    op = build(c, run.grid)
    h = run.grid.h
    mu_target = (2.0 / h * math.sin(0.5 * h)) ** 2
    index = int(np.argmin(np.abs(op.eigenvalues - mu_target)))
    k, delta_fit = fitted_phase(op, index)
    exact = wrap_phase(float(phase_shift(c, k)))
    error = abs(wrap_phase(delta_fit - exact))
    return [CheckResult('phase_shift', CHECK_TOLERANCES['phase_shift'], error)]


def scattering_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    return verify_scattering(c, [s], run.times, threads=1)


def core_approximation_suite(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Final core-approximant distance, relative to the state, against the oracle baseline."""
    report = core_approximation_check(c, s, run.t_max)
    norm = energy_norm(c, s)
    observed = _relative(report.distances[-1], norm)
    # a tail already below rounding leaves nothing to converge
    converged = _relative(report.distances[0], norm) <= CORE_ROUNDING_FLOOR
    tolerance = max(CHECK_TOLERANCES['core_approximation'] * oracle_baseline(c, s, run), CORE_ROUNDING_FLOOR)
    return [CheckResult('core_approximation', tolerance, observed, report.decreasing or converged)]


SUITES: Dict[str, Suite] = {
    'eigenvalue': eigenvalue_suite,
    'runaway_rate': runaway_rate_suite,
    'energy_drift': energy_drift_suite,
    'oracle_equivalence': oracle_equivalence_suite,
    'group_law': group_law_suite,
    'complex_structure': complex_structure_suite,
    'symplectic': symplectic_suite,
    'zero_mode': zero_mode_suite,
    'krein_rank': krein_rank_suite,
    'phase_shift': phase_shift_suite,
    'scattering': scattering_suite,
    'core_approximation': core_approximation_suite,
}


def run_suites(c: Coupling, s: PhaseState, run: RunConfig) -> List[CheckResult]:
    """Run the configured suites (all when none are named) concurrently, in submission order."""
    names = run.checks or list(VERIFY_SUITES)
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        futures = [(name, pool.submit(SUITES[name], c, s, run)) for name in names]
        results = []
        for name, fut in futures:
            found = fut.result()
            logger.info("suite %s: %d checks, %d failed", name, len(found), sum(not r.passed for r in found))
            results.extend(found)
    return results
