"""
Generalized eigenfunction transform of the point-interaction Laplacian.

In the s-wave reduction -Delta_alpha becomes -d^2/dr^2 on (0, r_max) with
the Robin condition u'(0) = 4 pi alpha u(0) and u(r_max) = 0. Its
eigenfunctions are phase-shifted sines sqrt(2/pi) sin(k r + delta(k)) on
quantized k-nodes plus, for alpha < 0, the bound state sqrt(2 kappa) e^{-kappa r}.
Passing ``None`` instead of a Coupling selects the free Dirichlet basis.

For alpha = 0 a position is split into its charge, kept as the zero-mode
coordinate, and its regular part, which is carried through the free map
(-Delta)^{1/2} before being read in the Neumann basis.
"""
import enum
import functools
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.optimize import brentq

from pointwave.config import POLE_TOLERANCE, ROOT_XTOL, RUNAWAY_TOLERANCE
from pointwave.errors import DomainError, InvalidParameterError, ShapeError, SingularResolventError
from pointwave.radial import (
    SQRT_4PI,
    ChargedField,
    Coupling,
    PhaseState,
    RadialGrid,
    ReducedField,
    Regime,
    charged,
    inner,
    sample_g_lambda,
)

logger = logging.getLogger(__name__)


class BasisKind(str, enum.Enum):
    ROBIN = 'robin'
    NEUMANN = 'neumann'
    DIRICHLET = 'dirichlet'


def phase_shift(c: Optional[Coupling], k):
    """delta(k) of the eigenfunctions sin(k r + delta); None means free Dirichlet."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(~(k_arr > 0)):
        raise InvalidParameterError("phase shift needs k > 0")
    if c is None:
        delta = np.zeros_like(k_arr)
    elif c.regime == Regime.ZERO:
        delta = np.full_like(k_arr, 0.5 * math.pi)
    else:
        delta = np.arctan(k_arr / c.robin)
    return float(delta) if np.ndim(k) == 0 else delta


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    """Quantized k-nodes with their Parseval weights."""

    k: np.ndarray
    weights: np.ndarray
    delta: np.ndarray
    kind: BasisKind
    kappa: Optional[float] = None

    @property
    def n_k(self) -> int:
        return self.k.size

    @property
    def k_max(self) -> float:
        return float(self.k[-1])

    @property
    def has_bound(self) -> bool:
        return self.kappa is not None


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Channel amplitudes of a field or of a phase-space state.

    ``zero_mode`` is the charge Q of an alpha = 0 position.
    """

    grid: SpectralGrid
    u_hat: np.ndarray
    v_hat: Optional[np.ndarray] = None
    x: Optional[float] = None
    xdot: Optional[float] = None
    zero_mode: Optional[float] = None

    def norm_squared(self) -> float:
        """Parseval sum x^2 + sum_j w_j |u_hat_j|^2 of the position channel."""
        total = float(np.sum(self.grid.weights * np.abs(self.u_hat) ** 2))
        return total + (self.x ** 2 if self.x is not None else 0.0)


def quantized_grid(c: Optional[Coupling], grid: RadialGrid) -> SpectralGrid:
    """k-nodes solving k r_max + delta(k) = n pi."""
    R, n_r = grid.r_max, grid.n_r
    if c is None:
        n = np.arange(1, n_r)
        k = n * math.pi / R
        return SpectralGrid(k, np.full(k.size, math.pi / R), np.zeros(k.size), BasisKind.DIRICHLET)
    if c.regime == Regime.ZERO:
        # one mode fewer than nodes 0..n_r-1: analysis skips the origin
        n = np.arange(1, n_r)
        k = (n - 0.5) * math.pi / R
        return SpectralGrid(k, np.full(k.size, math.pi / R), np.full(k.size, 0.5 * math.pi),
                            BasisKind.NEUMANN)
    a = c.robin
    if c.regime == Regime.POSITIVE:
        n = np.arange(1, n_r + 1)
        brackets = [((m - 0.5) * math.pi / R, m * math.pi / R) for m in n]
        kappa = None
    else:
        if c.kappa * R <= 1.0:
            raise InvalidParameterError(
                f"r_max = {R} too short for the bound state (need kappa * r_max > 1, kappa = {c.kappa})")
        n = np.arange(1, n_r)
        brackets = [(m * math.pi / R, (m + 0.5) * math.pi / R) for m in n]
        kappa = c.kappa

    def secular(kk, m):
        return kk * R + math.atan(kk / a) - m * math.pi

    k = np.array([brentq(secular, lo, hi, args=(m,), xtol=ROOT_XTOL) for m, (lo, hi) in zip(n, brackets)])
    delta = np.arctan(k / a)
    weights = math.pi / (R + np.sin(2.0 * delta) / (2.0 * k))
    logger.debug("quantized %d nodes for alpha=%g on r_max=%g", k.size, c.alpha, R)
    return SpectralGrid(k, weights, delta, BasisKind.ROBIN, kappa)


class ModeBasis:
    """Sampled eigenfunctions on the grid with an exact discrete inverse.

    Synthesis evaluates u_i = x e_b(r_i) + sum_j w_j u_hat_j e_j(r_i) on the
    free nodes; analysis solves that square system, so the pair is exact to
    rounding. The Neumann basis analyzes nodes 1..n_r-1 but also evaluates
    the origin when synthesizing.
    """

    def __init__(self, c: Optional[Coupling], grid: RadialGrid):
        self.coupling = c
        self.grid = grid
        self.sg = quantized_grid(c, grid)
        self.first = 0 if self.sg.kind == BasisKind.ROBIN else 1
        self.synthesis_first = 1 if self.sg.kind == BasisKind.DIRICHLET else 0
        r = grid.nodes[self.synthesis_first:grid.n_r]
        columns = math.sqrt(2.0 / math.pi) * np.sin(np.outer(r, self.sg.k) + self.sg.delta)
        if self.sg.has_bound:
            bound = math.sqrt(2.0 * self.sg.kappa) * np.exp(-self.sg.kappa * r)
            columns = np.column_stack([bound, columns])
        self.synthesis_matrix = columns
        self.matrix = columns[self.first - self.synthesis_first:]
        self._lu = lu_factor(self.matrix)
        logger.debug("built %s basis with %d modes", self.sg.kind.value, columns.shape[1])

    @property
    def n_bound(self) -> int:
        return 1 if self.sg.has_bound else 0

    def analyze(self, samples: np.ndarray) -> Tuple[np.ndarray, Optional[float]]:
        rhs = samples[self.first:self.grid.n_r]
        if np.iscomplexobj(rhs):
            coeffs = lu_solve(self._lu, rhs.real) + 1j * lu_solve(self._lu, rhs.imag)
        else:
            coeffs = lu_solve(self._lu, rhs)
        x = coeffs[0] if self.sg.has_bound else None
        return coeffs[self.n_bound:] / self.sg.weights, x

    def synthesize(self, u_hat: np.ndarray, x=None) -> np.ndarray:
        coeffs = self.sg.weights * u_hat
        if self.sg.has_bound:
            coeffs = np.concatenate([[0.0 if x is None else x], coeffs])
        out = np.zeros(self.grid.n_r + 1, dtype=np.result_type(coeffs, float))
        out[self.synthesis_first:self.grid.n_r] = self.synthesis_matrix @ coeffs
        return out


@functools.lru_cache(maxsize=16)
def basis_for(c: Optional[Coupling], grid: RadialGrid) -> ModeBasis:
    return ModeBasis(c, grid)


def _check_spectral_grid(basis: ModeBasis, sg: Optional[SpectralGrid]):
    if sg is not None and (sg.kind != basis.sg.kind or sg.n_k != basis.sg.n_k):
        raise ShapeError(f"spectral grid ({sg.kind.value}, {sg.n_k}) does not match the field's basis")


def _holds_zero_mode(basis: ModeBasis, zero_mode: bool) -> bool:
    return zero_mode and basis.sg.kind == BasisKind.NEUMANN


def transform_forward(c: Optional[Coupling], field: ChargedField, sg: Optional[SpectralGrid] = None,
                      *, zero_mode: bool = True) -> SpectralDecomposition:
    """Amplitudes of a single field; zero_mode=False treats it as a velocity.

    An alpha = 0 position is read as u_hat = (-Delta_0)^{-1/2} (-Delta)^{1/2}
    phi_reg with zero_mode = Q, so that k u_hat are the Neumann amplitudes of
    the real part of C(phi_reg, phi_dot).
    """
    basis = basis_for(c, field.grid)
    _check_spectral_grid(basis, sg)
    if _holds_zero_mode(basis, zero_mode):
        free = basis_for(None, field.grid)
        d_hat, _ = free.analyze(field.regular.u)
        u_hat, _ = basis.analyze(free.synthesize(free.sg.k * d_hat))
        return SpectralDecomposition(basis.sg, u_hat / basis.sg.k, zero_mode=field.charge)
    u_hat, x = basis.analyze(field.full().u)
    return SpectralDecomposition(basis.sg, u_hat, x=x)


def transform_inverse(c: Optional[Coupling], spec: SpectralDecomposition, grid: RadialGrid,
                      *, zero_mode: bool = True) -> ChargedField:
    """Inverse of transform_forward with the same zero_mode flag."""
    basis = basis_for(c, grid)
    _check_spectral_grid(basis, spec.grid)
    if _holds_zero_mode(basis, zero_mode):
        free = basis_for(None, grid)
        d_hat, _ = free.analyze(basis.synthesize(basis.sg.k * spec.u_hat))
        regular = ReducedField(grid, free.synthesize(d_hat / free.sg.k))
        return ChargedField(regular, spec.zero_mode or 0.0)
    u = basis.synthesize(spec.u_hat, spec.x)
    return charged(grid, u, origin_value=u[0])


def transform_state(c: Optional[Coupling], s: PhaseState) -> SpectralDecomposition:
    """Phase-space version: position and velocity amplitudes in one record."""
    pos = transform_forward(c, s.position)
    vel = transform_forward(c, s.velocity, zero_mode=False)
    return SpectralDecomposition(pos.grid, pos.u_hat, vel.u_hat, pos.x, vel.x, pos.zero_mode)


def state_from_spectrum(c: Optional[Coupling], spec: SpectralDecomposition, grid: RadialGrid) -> PhaseState:
    position = transform_inverse(c, spec, grid)
    velocity = transform_inverse(c, SpectralDecomposition(spec.grid, spec.v_hat, x=spec.xdot), grid,
                                 zero_mode=False)
    return PhaseState(position, velocity)


def complex_coefficients(spec: SpectralDecomposition) -> np.ndarray:
    """Amplitudes of (-Delta)^{1/2} phi - i phi_dot on the continuous channel."""
    return spec.grid.k * spec.u_hat - 1j * spec.v_hat


def from_complex_coefficients(sg: SpectralGrid, chat: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return chat.real / sg.k, -chat.imag


def _scale_isolated(g: Callable, point: float, amplitude: float, scale: float, where: str) -> float:
    """g(point) times an isolated amplitude; a non-finite g(point) only passes a negligible amplitude."""
    with np.errstate(all='ignore'):
        value = float(g(np.float64(point)))
    if math.isfinite(value):
        return value * amplitude
    if abs(amplitude) > RUNAWAY_TOLERANCE * scale:
        raise DomainError(f"spectral function undefined at {where}")
    return 0.0


def functional_calculus(c: Optional[Coupling], g: Callable, field: ChargedField, *,
                        zero_mode: bool = True) -> ChargedField:
    """Apply g(-Delta_alpha) by transform, multiply and inverse transform.

    The bound amplitude is multiplied by g(-lambda0) and the alpha = 0 charge
    by g(0).
    """
    spec = transform_forward(c, field, zero_mode=zero_mode)
    sg = spec.grid
    scale = math.sqrt(max(spec.norm_squared(), 1.0))
    with np.errstate(all='ignore'):
        gk = np.broadcast_to(np.asarray(g(sg.k ** 2), dtype=float), sg.k.shape)
    if not np.all(np.isfinite(gk)):
        raise DomainError("spectral function is not finite on the continuous spectrum")
    x = spec.x
    if x is not None:
        x = _scale_isolated(g, -c.lambda0, x, scale, f"the eigenvalue -lambda0 = {-c.lambda0}")
    q0 = spec.zero_mode
    if q0 is not None:
        q0 = _scale_isolated(g, 0.0, q0, scale, "the zero-energy resonance")
    return transform_inverse(c, replace(spec, u_hat=gk * spec.u_hat, x=x, zero_mode=q0), field.grid,
                             zero_mode=zero_mode)


def krein_coefficient(c: Coupling, lam: float) -> float:
    """(alpha + sqrt(lambda)/(4 pi))^{-1}, the weight of G_lambda (x) G_lambda."""
    denom = c.alpha + math.sqrt(lam) / (4.0 * math.pi)
    if abs(denom) < POLE_TOLERANCE:
        raise SingularResolventError(f"lambda = {lam} sits on the resolvent pole")
    return 1.0 / denom


def resolvent_apply(c: Coupling, lam: float, f: ChargedField) -> ChargedField:
    """(-Delta_alpha + lambda)^{-1} f as free resolvent plus rank-one correction."""
    if not lam > 0:
        raise InvalidParameterError(f"resolvent needs lambda > 0, got {lam}")
    coeff = krein_coefficient(c, lam)
    free = functional_calculus(None, lambda s: 1.0 / (s + lam), f, zero_mode=False)
    g_lam = sample_g_lambda(lam, f.grid)
    weight = coeff * inner('l2', g_lam, f)
    return free + charged(f.grid, weight * g_lam.u, origin_value=weight / SQRT_4PI)
