"""
Half-line (s-wave) reduction of radial fields.

A radial field phi on R^3 is stored through its reduced profile
u(r) = sqrt(4 pi) r phi(r), which is a unitary map onto L^2(0, r_max).
The Coulomb potential G = 1/(4 pi |x|) reduces to the constant 1/sqrt(4 pi).
"""
import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.integrate import trapezoid

from pointwave.errors import InvalidParameterError, ShapeError

logger = logging.getLogger(__name__)

SQRT_4PI = math.sqrt(4.0 * math.pi)


class Regime(str, enum.Enum):
    POSITIVE = 'positive'
    ZERO = 'zero'
    NEGATIVE = 'negative'


@dataclass(frozen=True)
class Coupling:
    """Interaction strength alpha with its derived spectral constants."""

    alpha: float
    regime: Regime
    lambda0: Optional[float] = None
    kappa: Optional[float] = None

    @property
    def robin(self) -> float:
        """Coefficient a of the reduced boundary condition u'(0) = a u(0)."""
        return 4.0 * math.pi * self.alpha


def make_coupling(alpha: float) -> Coupling:
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise InvalidParameterError(f"alpha must be finite, got {alpha}")
    if alpha > 0:
        return Coupling(alpha, Regime.POSITIVE)
    if alpha == 0:
        return Coupling(0.0, Regime.ZERO)
    kappa = -4.0 * math.pi * alpha
    return Coupling(alpha, Regime.NEGATIVE, lambda0=kappa * kappa, kappa=kappa)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_i = i h on [0, r_max], i = 0..n_r."""

    r_max: float
    n_r: int

    def __post_init__(self):
        if not (self.r_max > 0 and math.isfinite(self.r_max)):
            raise InvalidParameterError(f"r_max must be positive, got {self.r_max}")
        if int(self.n_r) != self.n_r or self.n_r < 4:
            raise InvalidParameterError(f"n_r must be an integer >= 4, got {self.n_r}")

    @property
    def h(self) -> float:
        return self.r_max / self.n_r

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n_r + 1) * self.h


@dataclass(frozen=True, eq=False)
class ReducedField:
    grid: RadialGrid
    u: np.ndarray

    def __post_init__(self):
        if self.u.shape != (self.grid.n_r + 1,):
            raise ShapeError(f"expected {self.grid.n_r + 1} samples, got shape {self.u.shape}")

    def __add__(self, other: "ReducedField") -> "ReducedField":
        _check_grids(self.grid, other.grid)
        return ReducedField(self.grid, self.u + other.u)

    def __sub__(self, other: "ReducedField") -> "ReducedField":
        _check_grids(self.grid, other.grid)
        return ReducedField(self.grid, self.u - other.u)

    def __mul__(self, scalar: float) -> "ReducedField":
        return ReducedField(self.grid, scalar * self.u)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class ChargedField:
    """phi = phi_reg + Q G, with the regular reduced profile vanishing at 0."""

    regular: ReducedField
    charge: float

    def __post_init__(self):
        if self.regular.u[0] != 0.0:
            raise ShapeError("regular profile must vanish at the origin")

    @property
    def grid(self) -> RadialGrid:
        return self.regular.grid

    def full(self) -> ReducedField:
        """Reduced profile of the whole field, u_reg + Q / sqrt(4 pi)."""
        return ReducedField(self.grid, self.regular.u + self.charge / SQRT_4PI)

    def __add__(self, other: "ChargedField") -> "ChargedField":
        return ChargedField(self.regular + other.regular, self.charge + other.charge)

    def __sub__(self, other: "ChargedField") -> "ChargedField":
        return ChargedField(self.regular - other.regular, self.charge - other.charge)

    def __mul__(self, scalar: float) -> "ChargedField":
        return ChargedField(self.regular * scalar, scalar * self.charge)

    __rmul__ = __mul__

    def __neg__(self) -> "ChargedField":
        return self * -1.0


@dataclass(frozen=True, eq=False)
class PhaseState:
    """A finite-energy state (phi, phi_dot)."""

    position: ChargedField
    velocity: ChargedField

    def __post_init__(self):
        _check_grids(self.position.grid, self.velocity.grid)

    @property
    def grid(self) -> RadialGrid:
        return self.position.grid

    def __add__(self, other: "PhaseState") -> "PhaseState":
        return PhaseState(self.position + other.position, self.velocity + other.velocity)

    def __sub__(self, other: "PhaseState") -> "PhaseState":
        return PhaseState(self.position - other.position, self.velocity - other.velocity)

    def __mul__(self, scalar: float) -> "PhaseState":
        return PhaseState(self.position * scalar, self.velocity * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "PhaseState":
        return self * -1.0


def zero_field(grid: RadialGrid) -> ChargedField:
    return ChargedField(ReducedField(grid, np.zeros(grid.n_r + 1)), 0.0)


def zero_state(grid: RadialGrid) -> PhaseState:
    return PhaseState(zero_field(grid), zero_field(grid))


def _check_grids(a: RadialGrid, b: RadialGrid):
    if a != b:
        raise ShapeError(f"grid mismatch: {a} vs {b}")


def sample_g_lambda(lam: float, grid: RadialGrid) -> ReducedField:
    """Reduced profile of G_lambda = exp(-sqrt(lambda)|x|) / (4 pi |x|)."""
    if not lam >= 0:
        raise InvalidParameterError(f"lambda must be >= 0, got {lam}")
    return ReducedField(grid, np.exp(-math.sqrt(lam) * grid.nodes) / SQRT_4PI)


def extrapolate_origin(u: np.ndarray) -> float:
    """Value at r = 0 of the parabola through nodes 1, 2, 3."""
    return float(3.0 * u[1] - 3.0 * u[2] + u[3])


def decompose_coulomb(full: ReducedField, origin_value: Optional[float] = None) -> ChargedField:
    """Split a reduced profile into regular part and Coulomb charge.

    Args:
        full: reduced profile with a finite limit at r = 0
        origin_value: u(0) when it is known exactly; extrapolated otherwise

    Returns:
        ChargedField with Q = sqrt(4 pi) u(0)
    """
    u0 = extrapolate_origin(full.u) if origin_value is None else float(origin_value)
    regular = full.u - u0
    regular[0] = 0.0
    return ChargedField(ReducedField(full.grid, regular), SQRT_4PI * u0)


def charged(grid: RadialGrid, u: np.ndarray, origin_value: Optional[float] = None) -> ChargedField:
    return decompose_coulomb(ReducedField(grid, np.asarray(u, dtype=float).copy()), origin_value)


def reg_origin_value(field: ChargedField) -> float:
    """phi_reg(0), the origin slope of the regular reduced profile over sqrt(4 pi)."""
    u = field.regular.u
    slope = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * field.grid.h)
    return float(slope / SQRT_4PI)


def to_lambda_representation(field: ChargedField, lam: float) -> Tuple[ReducedField, float]:
    """Rewrite phi = phi_lambda + Q G_lambda; returns (phi_lambda, Q)."""
    if not lam > 0:
        raise InvalidParameterError(f"lambda must be > 0, got {lam}")
    grid = field.grid
    tail = (np.exp(-math.sqrt(lam) * grid.nodes) - 1.0) / SQRT_4PI
    return ReducedField(grid, field.regular.u - field.charge * tail), field.charge


def lambda_domain_defect(c: Coupling, field: ChargedField, lam: float) -> float:
    """|(alpha + sqrt(lambda)/(4 pi)) Q - phi_lambda(0)|, zero on the operator domain."""
    phi_lam, q = to_lambda_representation(field, lam)
    phi_lam_origin = reg_origin_value(ChargedField(phi_lam, 0.0))
    return abs((c.alpha + math.sqrt(lam) / (4.0 * math.pi)) * q - phi_lam_origin)


def inner(kind: str, a, b=None, *, lambda0: Optional[float] = None) -> float:
    """Quadrature inner products on the reduced half-line.

    kind is one of 'l2', 'h1_seminorm' or 'against_g_lambda0'; the last one
    pairs ``a`` with G_{lambda0} and ignores ``b``.
    """
    if kind == 'l2':
        ua, ub = _profile(a), _profile(b)
        _check_grids(ua.grid, ub.grid)
        return float(trapezoid(ua.u * ub.u, dx=ua.grid.h))
    if kind == 'h1_seminorm':
        ra, rb = _regular(a), _regular(b)
        _check_grids(ra.grid, rb.grid)
        h = ra.grid.h
        da = np.gradient(ra.u, h, edge_order=2)
        db = np.gradient(rb.u, h, edge_order=2)
        return float(trapezoid(da * db, dx=h))
    if kind == 'against_g_lambda0':
        if lambda0 is None or lambda0 <= 0:
            raise InvalidParameterError("against_g_lambda0 needs a positive lambda0")
        ua = _profile(a)
        return inner('l2', ua, sample_g_lambda(lambda0, ua.grid))
    raise InvalidParameterError(f"unknown inner product kind {kind!r}")


def _profile(x: Union[ReducedField, ChargedField]) -> ReducedField:
    return x.full() if isinstance(x, ChargedField) else x


def _regular(x: Union[ReducedField, ChargedField]) -> ReducedField:
    return x.regular if isinstance(x, ChargedField) else x


def gaussian_bump(grid: RadialGrid, center: float, width: float, amplitude: float = 1.0) -> ChargedField:
    """Charge-free bump: odd-symmetrized Gaussian reduced profile."""
    r = grid.nodes
    u = amplitude * (np.exp(-0.5 * ((r - center) / width) ** 2)
                     - np.exp(-0.5 * ((r + center) / width) ** 2))
    return charged(grid, u, origin_value=0.0)


def support_radius(field: ChargedField, threshold: float) -> float:
    """Largest node where the full profile exceeds threshold * max."""
    u = np.abs(field.full().u)
    peak = u.max()
    if peak == 0.0:
        return 0.0
    idx = np.nonzero(u > threshold * peak)[0]
    return float(field.grid.nodes[idx[-1]])
