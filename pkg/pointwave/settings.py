"""
Run configuration: YAML ingestion, validation and initial-state assembly.

Keys absent from the file fall back to the constants in ``config.py``.
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import yaml

from pointwave.config import (
    BUMP_SUPPORT_WIDTHS,
    DEFAULT_THREADS,
    MOLLER_SCHEDULE,
    N_R,
    OUTPUT_DIRECTORY,
    OUTPUT_FORMATS,
    R_MAX,
    RANDOM_SEED,
    THREADS_ENV_VAR,
    VERIFY_SUITES,
)
from pointwave.errors import ConfigError, InvalidParameterError
from pointwave.radial import (
    SQRT_4PI,
    ChargedField,
    Coupling,
    PhaseState,
    RadialGrid,
    Regime,
    charged,
    gaussian_bump,
    make_coupling,
    sample_g_lambda,
    zero_field,
)

logger = logging.getLogger(__name__)

INITIAL_KINDS = ('gaussian_bump', 'g_lambda', 'eigenvector', 'charge')
COMPONENTS = ('position', 'velocity')


@dataclass
class RunConfig:
    alpha: float
    r_max: float = R_MAX
    n_r: int = N_R
    k_max: Optional[float] = None
    n_k: Optional[int] = None
    initial: List[Dict[str, Any]] = field(default_factory=list)
    t_max: float = 1.0
    n_samples: int = 11
    checks: List[str] = field(default_factory=list)
    output_directory: str = OUTPUT_DIRECTORY
    formats: Tuple[str, ...] = OUTPUT_FORMATS
    seed: int = RANDOM_SEED
    direction: str = 'plus'
    times: Tuple[float, ...] = MOLLER_SCHEDULE

    @property
    def grid(self) -> RadialGrid:
        return RadialGrid(self.r_max, self.n_r)

    @property
    def coupling(self) -> Coupling:
        return make_coupling(self.alpha)

    @property
    def sample_times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.n_samples)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if not raw:
        return DEFAULT_THREADS
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("ignoring %s=%r, expected an integer", THREADS_ENV_VAR, raw)
        return DEFAULT_THREADS


def _section(cfg: dict, name: str, required: bool = False) -> dict:
    value = cfg.get(name)
    if value is None:
        if required:
            raise ConfigError(f"missing section '{name}'", name)
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"section '{name}' must be a mapping", name)
    return value


def _number(section: dict, key: str, path: str, kind=float, default=None, required: bool = False):
    if key not in section:
        if required:
            raise ConfigError(f"missing field '{path}'", path)
        return default
    try:
        value = kind(section[key])
    except (TypeError, ValueError):
        raise ConfigError(f"field '{path}' must be {kind.__name__}, got {section[key]!r}", path) from None
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"field '{path}' must be finite", path)
    return value


def _validate_initial(items) -> List[Dict[str, Any]]:
    if items is None:
        return []
    if isinstance(items, dict):
        items = [items]
    out = []
    for i, item in enumerate(items):
        path = f"initial[{i}]"
        if not isinstance(item, dict) or len(item) != 1:
            raise ConfigError(f"'{path}' must be a single-key mapping naming one of {INITIAL_KINDS}", path)
        (kind, params), = item.items()
        if kind not in INITIAL_KINDS:
            raise ConfigError(f"'{path}' has unknown kind {kind!r}", path)
        params = dict(params or {})
        component = params.get('component', 'position')
        if component not in COMPONENTS:
            raise ConfigError(f"'{path}.{kind}.component' must be position or velocity", f"{path}.{kind}.component")
        if kind == 'gaussian_bump':
            for key in ('center', 'width'):
                _number(params, key, f"{path}.{kind}.{key}", required=True)
            if float(params['width']) <= 0:
                raise ConfigError(f"'{path}.{kind}.width' must be positive", f"{path}.{kind}.width")
        elif kind == 'g_lambda':
            lam = _number(params, 'lambda', f"{path}.{kind}.lambda", required=True)
            if lam < 0:
                raise ConfigError(f"'{path}.{kind}.lambda' must be >= 0", f"{path}.{kind}.lambda")
        elif kind == 'charge':
            _number(params, 'Q', f"{path}.{kind}.Q", required=True)
        out.append({'kind': kind, **params, 'component': component})
    return out


def parse_config(cfg: dict) -> RunConfig:
    """Validate a loaded mapping; errors carry the dotted field path."""
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a mapping", "")
    alpha = _number(cfg, 'alpha', 'alpha', required=True)
    grid = _section(cfg, 'grid', required=True)
    r_max = _number(grid, 'r_max', 'grid.r_max', required=True)
    n_r = _number(grid, 'n_r', 'grid.n_r', kind=int, required=True)
    try:
        RadialGrid(r_max, n_r)
    except InvalidParameterError as e:
        raise ConfigError(str(e), 'grid') from None

    spectral = _section(cfg, 'spectral')
    horizon = _section(cfg, 'horizon')
    output = _section(cfg, 'output')
    scatter = _section(cfg, 'scatter')

    checks = list(cfg.get('checks') or [])
    unknown = [c for c in checks if c not in VERIFY_SUITES]
    if unknown:
        raise ConfigError(f"unknown checks {unknown}; available: {list(VERIFY_SUITES)}", 'checks')

    formats = tuple(output.get('formats', OUTPUT_FORMATS))
    bad = [f for f in formats if f not in OUTPUT_FORMATS]
    if bad:
        raise ConfigError(f"unknown output formats {bad}", 'output.formats')

    direction = scatter.get('direction', 'plus')
    if direction not in ('plus', 'minus'):
        raise ConfigError("'scatter.direction' must be plus or minus", 'scatter.direction')
    times = tuple(float(t) for t in scatter.get('times', MOLLER_SCHEDULE))

    run = RunConfig(
        alpha=alpha,
        r_max=r_max,
        n_r=n_r,
        k_max=_number(spectral, 'k_max', 'spectral.k_max'),
        n_k=_number(spectral, 'n_k', 'spectral.n_k', kind=int),
        initial=_validate_initial(cfg.get('initial')),
        t_max=_number(horizon, 't_max', 'horizon.t_max', default=1.0),
        n_samples=_number(horizon, 'n_samples', 'horizon.n_samples', kind=int, default=11),
        checks=checks,
        output_directory=str(output.get('directory', OUTPUT_DIRECTORY)),
        formats=formats,
        seed=_number(cfg, 'seed', 'seed', kind=int, default=RANDOM_SEED),
        direction=direction,
        times=times,
    )
    if run.n_samples < 2:
        raise ConfigError("'horizon.n_samples' must be at least 2", 'horizon.n_samples')
    if run.t_max < 0:
        raise ConfigError("'horizon.t_max' must be non-negative", 'horizon.t_max')
    _warn_spectral(run)
    return run


def _warn_spectral(run: RunConfig):
    # k-nodes are quantized by the grid; the section only reports mismatches
    grid = run.grid
    if run.n_k is not None and run.n_k != grid.n_r:
        logger.warning("spectral.n_k = %d ignored; the quantized basis has %d nodes", run.n_k, grid.n_r)
    if run.k_max is not None and run.k_max > math.pi / grid.h:
        logger.warning("spectral.k_max = %g exceeds the grid cutoff pi/h = %g", run.k_max, math.pi / grid.h)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as f:
            cfg = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", 'path') from None
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        where = f"line {mark.line + 1}" if mark is not None else 'unknown line'
        raise ConfigError(f"cannot parse {path} ({where}): {e}", where) from None
    return parse_config(cfg or {})


def bump_reach(run: RunConfig) -> float:
    """Largest bump support radius center + BUMP_SUPPORT_WIDTHS * width; charges are excluded."""
    reach = 0.0
    for item in run.initial:
        if item['kind'] == 'gaussian_bump':
            reach = max(reach, float(item['center']) + BUMP_SUPPORT_WIDTHS * float(item['width']))
    return reach


def light_cone_violation(run: RunConfig, t_max: Optional[float] = None) -> Optional[float]:
    """Required r_max when the light-cone rule fails, None otherwise."""
    t = run.t_max if t_max is None else t_max
    required = bump_reach(run) + 2.0 * t
    return required if required > run.r_max else None


def _component(c: Coupling, grid: RadialGrid, item: Dict[str, Any]) -> ChargedField:
    kind = item['kind']
    if kind == 'gaussian_bump':
        return gaussian_bump(grid, float(item['center']), float(item['width']), float(item.get('amplitude', 1.0)))
    if kind == 'g_lambda':
        coefficient = float(item.get('coefficient', 1.0))
        g = sample_g_lambda(float(item['lambda']), grid)
        return charged(grid, coefficient * g.u, origin_value=coefficient / SQRT_4PI)
    if kind == 'eigenvector':
        if c.regime != Regime.NEGATIVE:
            raise ConfigError("an eigenvector initial state needs alpha < 0", 'initial.eigenvector')
        coefficient = float(item.get('coefficient', 1.0))
        amplitude = coefficient * math.sqrt(2.0 * c.kappa)
        return charged(grid, amplitude * np.exp(-c.kappa * grid.nodes), origin_value=amplitude)
    q = float(item['Q'])
    return charged(grid, np.full(grid.n_r + 1, q / SQRT_4PI), origin_value=q / SQRT_4PI)


def initial_state(run: RunConfig) -> PhaseState:
    """Sum of the configured components."""
    grid = run.grid
    c = run.coupling
    position, velocity = zero_field(grid), zero_field(grid)
    for item in run.initial:
        piece = _component(c, grid, item)
        if item['component'] == 'velocity':
            velocity = velocity + piece
        else:
            position = position + piece
    return PhaseState(position, velocity)


def random_states(c: Coupling, grid: RadialGrid, rng: np.random.Generator, count: int) -> List[PhaseState]:
    """Seeded sweep states: bumps in both slots plus a G_lambda charge, and the eigenvector for alpha < 0."""
    states = []
    for _ in range(count):
        position = gaussian_bump(grid, rng.uniform(0.2, 0.45) * grid.r_max, rng.uniform(1.0, 3.0), rng.normal())
        velocity = gaussian_bump(grid, rng.uniform(0.2, 0.45) * grid.r_max, rng.uniform(1.0, 3.0), rng.normal())
        position = position + _component(c, grid, {'kind': 'g_lambda', 'lambda': rng.uniform(0.5, 2.0),
                                                   'coefficient': 0.5 * rng.normal()})
        if c.regime == Regime.NEGATIVE:
            position = position + _component(c, grid, {'kind': 'eigenvector', 'coefficient': 0.5 * rng.normal()})
        states.append(PhaseState(position, velocity))
    return states
