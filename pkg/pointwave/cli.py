"""
Command-line entry point: ``pointwave evolve|verify|scatter|spectrum --config <path>``.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pointwave.config import (
    CHECK_TOLERANCES,
    LOG_FORMAT,
    MOLLER_FILENAME,
    REPORT_FILENAME,
    SERIES_FILENAME,
    SPECTRUM_FILENAME,
)
from pointwave.dynamics import propagate_point
from pointwave.errors import LightConeError, PointWaveError
from pointwave.geometry import complex_structure, energy, energy_spectral, hamiltonian, symplectic_form
from pointwave.oracle import build, fitted_phase, oracle_spectrum, wrap_phase
from pointwave.scattering import check_light_cone, moller_time
from pointwave.settings import RunConfig, initial_state, light_cone_violation, load_config
from pointwave.spectral import phase_shift, transform_state
from pointwave.stats import CheckResult, StatsLogger, export_moller_csv, export_spectrum_csv
from pointwave.suites import run_suites

logger = logging.getLogger(__name__)

COMMANDS = ('evolve', 'verify', 'scatter', 'spectrum')
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def _output_dir(run: RunConfig) -> Path:
    out = Path(run.output_directory)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _enforce_light_cone(run: RunConfig, override: bool, t_max: Optional[float] = None):
    required = light_cone_violation(run, t_max)
    if required is None:
        return
    message = f"r_max = {run.r_max} violates the light-cone rule; need r_max >= {required:.3f}"
    if not override:
        raise LightConeError(message, required)
    logger.warning("%s (overridden)", message)


def evolve(run: RunConfig, override_lightcone: bool = False) -> StatsLogger:
    """Sample the flow at the configured times and record the invariant traces."""
    _enforce_light_cone(run, override_lightcone)
    c = run.coupling
    s0 = initial_state(run)
    js0 = complex_structure(c, s0)
    stats = StatsLogger()
    for t in run.sample_times:
        st = propagate_point(c, float(t), s0)
        spec = transform_state(c, st)
        stats.record(
            float(t),
            energy=energy(c, st),
            energy_spectral=energy_spectral(c, st),
            hamiltonian=hamiltonian(c, st),
            charge=st.position.charge,
            zero_mode=spec.zero_mode or 0.0,
            x=spec.x if spec.x is not None else 0.0,
            xdot=spec.xdot if spec.xdot is not None else 0.0,
            omega_pairing=symplectic_form(c, st, propagate_point(c, float(t), js0)),
        )
    out = _output_dir(run)
    if 'csv' in run.formats:
        stats.export_csv(str(out / SERIES_FILENAME))
    logger.info("evolve: %d samples written to %s", len(stats.history), out)
    return stats


def verify(run: RunConfig, override_lightcone: bool = False) -> StatsLogger:
    c = run.coupling
    s0 = initial_state(run)
    if 'scattering' in (run.checks or ['scattering']):
        _enforce_light_cone(run, override_lightcone, max(run.times))
    stats = StatsLogger()
    stats.extend_checks(run_suites(c, s0, run))
    out = _output_dir(run)
    if 'json' in run.formats:
        stats.export_json(str(out / REPORT_FILENAME), {"alpha": run.alpha, "command": "verify"})
    return stats


def scatter(run: RunConfig, override_lightcone: bool = False) -> StatsLogger:
    c = run.coupling
    s0 = initial_state(run)
    # Moller approximants refuse light-cone violations even with the override
    check_light_cone(s0, max(run.times))
    _, report = moller_time(c, run.direction, run.times, s0)
    stats = StatsLogger()
    decreasing = all(b < a for a, b in zip(report.defects, report.defects[1:]))
    stats.extend_checks([
        CheckResult('isometry', CHECK_TOLERANCES['scattering_exact'], report.isometry_defect),
        CheckResult('intertwining', CHECK_TOLERANCES['scattering_intertwining'], report.intertwining_defect),
        CheckResult('time_limit', CHECK_TOLERANCES['scattering_limit'], report.defects[-1], decreasing),
    ])
    out = _output_dir(run)
    if 'json' in run.formats:
        stats.export_json(str(out / REPORT_FILENAME), {"alpha": run.alpha, "moller": report.to_dict()})
    if 'csv' in run.formats:
        export_moller_csv(str(out / MOLLER_FILENAME), [report])
    return stats


def spectrum(run: RunConfig, override_lightcone: bool = False) -> StatsLogger:
    """Oracle eigenvalues and the fitted-versus-exact phase-shift table."""
    c = run.coupling
    op = build(c, run.grid)
    eigenvalues, _ = oracle_spectrum(op)
    h = run.grid.h
    # well-resolved oscillatory modes only: k h <= pi / 2
    resolved = [i for i, mu in enumerate(eigenvalues) if 0 < mu <= 2.0 / h ** 2]
    ks, fitted, exact = [], [], []
    for i in resolved:
        k, delta = fitted_phase(op, i)
        ks.append(k)
        fitted.append(delta)
        exact.append(wrap_phase(float(phase_shift(c, k))))
    out = _output_dir(run)
    if 'csv' in run.formats:
        export_spectrum_csv(str(out / SPECTRUM_FILENAME), eigenvalues, ks, fitted, exact)
    stats = StatsLogger()
    if ks:
        worst = max(abs(wrap_phase(a - b)) for a, b in zip(fitted, exact))
        stats.record_check(CheckResult('phase_shift', CHECK_TOLERANCES['phase_shift'], worst))
    if 'json' in run.formats:
        stats.export_json(str(out / REPORT_FILENAME), {"alpha": run.alpha, "n_eigenvalues": int(eigenvalues.size)})
    return stats


HANDLERS = {
    'evolve': evolve,
    'verify': verify,
    'scatter': scatter,
    'spectrum': spectrum,
}


def execute(command: str, run: RunConfig, override_lightcone: bool = False) -> int:
    """Run one subcommand and map its outcome to an exit code."""
    stats = HANDLERS[command](run, override_lightcone)
    for failed in stats.failed:
        print(f"FAILED {failed.check}: observed {failed.observed:.3e} > tolerance {failed.tolerance:.1e}",
              file=sys.stderr)
    return EXIT_CHECK_FAILED if stats.failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pointwave", description="Finite-energy waves with a point interaction")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="YAML run configuration")
    parser.add_argument("--override-lightcone", action="store_true",
                        help="downgrade light-cone violations to warnings")
    parser.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)
    try:
        run = load_config(args.config)
        return execute(args.command, run, args.override_lightcone)
    except PointWaveError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
