"""
Finite-difference ground truth for -Delta_alpha on the reduced half-line.

Unknowns are u_0 .. u_{n_r - 1}; u(r_max) = 0. Row 0 eliminates a ghost
node through the central Robin difference (u_1 - u_{-1}) / 2h = a u_0.
The matrix is self-adjoint for the weights diag(1/2, 1, ..., 1), which is
also the trapezoid rule, and is diagonalized after the similarity
transform with the square root of those weights.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh_tridiagonal, solve_banded, svdvals

from pointwave.config import MIN_ORACLE_NODES, ORACLE_RESOLVENT_GAP, ZERO_EIGENVALUE_TOL
from pointwave.errors import InvalidParameterError, ShapeError, SingularResolventError
from pointwave.radial import ChargedField, Coupling, PhaseState, RadialGrid, ReducedField, Regime, charged

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OracleOperator:
    """Tridiagonal -d^2/dr^2 with its eigenpairs.

    ``first`` is the first unknown node: 0 for the Robin operator, 1 for the
    free Dirichlet one. ``lower``/``diag``/``upper`` hold the unsymmetrized
    matrix, ``weights`` the quadrature weights making it symmetric.
    """

    grid: RadialGrid
    coupling: Optional[Coupling]
    first: int
    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    weights: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # orthonormal vectors of the symmetrized matrix

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)

    def apply(self, u: np.ndarray) -> np.ndarray:
        out = self.diag * u
        out[1:] += self.lower * u[:-1]
        out[:-1] += self.upper * u[1:]
        return out


def _assemble(grid: RadialGrid, c: Optional[Coupling]) -> OracleOperator:
    if grid.n_r < MIN_ORACLE_NODES:
        raise InvalidParameterError(f"oracle needs n_r >= {MIN_ORACLE_NODES}, got {grid.n_r}")
    h = grid.h
    first = 0 if c is not None else 1
    n = grid.n_r - first
    diag = np.full(n, 2.0 / h ** 2)
    lower = np.full(n - 1, -1.0 / h ** 2)
    upper = np.full(n - 1, -1.0 / h ** 2)
    weights = np.ones(n)
    if c is not None:
        diag[0] = 2.0 * (1.0 + h * c.robin) / h ** 2
        upper[0] = -2.0 / h ** 2
        weights[0] = 0.5
    root = np.sqrt(weights)
    # symmetrized off-diagonal: sqrt(w_i) A[i, i+1] / sqrt(w_{i+1})
    off = root[:-1] * upper / root[1:]
    values, vectors = eigh_tridiagonal(diag, off)
    logger.debug("oracle n=%d lowest eigenvalue %.6g", n, values[0])
    return OracleOperator(grid, c, first, diag, lower, upper, weights, values, vectors)


def build(c: Coupling, grid: RadialGrid) -> OracleOperator:
    """Robin-boundary realization of -Delta_alpha, eigendecomposed eagerly."""
    return _assemble(grid, c)


def build_free(grid: RadialGrid) -> OracleOperator:
    """Dirichlet realization of the free Laplacian on nodes 1 .. n_r - 1."""
    return _assemble(grid, None)


def _unknowns(op: OracleOperator, field: ChargedField) -> np.ndarray:
    if field.grid != op.grid:
        raise ShapeError("field and oracle live on different grids")
    return field.full().u[op.first:op.grid.n_r]


def _field(op: OracleOperator, values: np.ndarray) -> ChargedField:
    u = np.zeros(op.grid.n_r + 1)
    u[op.first:op.grid.n_r] = values
    return charged(op.grid, u, origin_value=u[0])


def _to_modes(op: OracleOperator, u: np.ndarray) -> np.ndarray:
    return op.eigenvectors.T @ (np.sqrt(op.weights) * u)


def _from_modes(op: OracleOperator, c: np.ndarray) -> np.ndarray:
    return (op.eigenvectors @ c) / np.sqrt(op.weights)


def _root_free(free: OracleOperator, u: np.ndarray, power: float) -> np.ndarray:
    return free.eigenvectors @ (free.eigenvalues ** power * (free.eigenvectors.T @ u))


def _propagate_split(op: OracleOperator, t: float, s: PhaseState) -> PhaseState:
    # alpha = 0: psi = (A_free)^{1/2} u_reg - i v advances by exp(i t A^{1/2}) in
    # the Neumann scheme, the charge stays put
    grid = op.grid
    free = build_free(grid)
    psi = np.empty(grid.n_r, dtype=complex)
    psi.real[1:] = _root_free(free, s.position.regular.u[1:grid.n_r], 0.5)
    # second-order Neumann closure at the origin node
    psi.real[0] = (4.0 * psi.real[1] - psi.real[2]) / 3.0
    psi.imag = -_unknowns(op, s.velocity)
    modes = op.eigenvectors.T @ (np.sqrt(op.weights) * psi)
    modes *= np.exp(1j * t * np.sqrt(np.clip(op.eigenvalues, 0.0, None)))
    psi = (op.eigenvectors @ modes) / np.sqrt(op.weights)
    regular = np.zeros(grid.n_r + 1)
    regular[1:grid.n_r] = _root_free(free, psi.real[1:], -0.5)
    position = ChargedField(ReducedField(grid, regular), s.position.charge)
    return PhaseState(position, _field(op, -psi.imag))


def oracle_propagate(op: OracleOperator, t: float, s: PhaseState) -> PhaseState:
    """Eigenbasis evolution of phi_tt = -A phi; negative modes grow hyperbolically.

    For alpha = 0 the regular part and the velocity evolve through the split
    scheme and the charge is held fixed.
    """
    if op.coupling is not None and op.coupling.regime == Regime.ZERO:
        return _propagate_split(op, t, s)
    a = _to_modes(op, _unknowns(op, s.position))
    b = _to_modes(op, _unknowns(op, s.velocity))
    mu = op.eigenvalues
    pos = np.empty_like(a)
    vel = np.empty_like(b)

    osc = mu > ZERO_EIGENVALUE_TOL
    w = np.sqrt(mu[osc])
    pos[osc] = np.cos(w * t) * a[osc] + np.sin(w * t) / w * b[osc]
    vel[osc] = -w * np.sin(w * t) * a[osc] + np.cos(w * t) * b[osc]

    run = mu < -ZERO_EIGENVALUE_TOL
    g = np.sqrt(-mu[run])
    pos[run] = np.cosh(g * t) * a[run] + np.sinh(g * t) / g * b[run]
    vel[run] = g * np.sinh(g * t) * a[run] + np.cosh(g * t) * b[run]

    flat = ~(osc | run)
    pos[flat] = a[flat] + t * b[flat]
    vel[flat] = b[flat]
    return PhaseState(_field(op, _from_modes(op, pos)), _field(op, _from_modes(op, vel)))


def oracle_project_ac(op: OracleOperator, s: PhaseState) -> PhaseState:
    """Drop the negative-eigenvalue modes from position and velocity."""
    keep = op.eigenvalues >= -ZERO_EIGENVALUE_TOL
    a = _to_modes(op, _unknowns(op, s.position)) * keep
    b = _to_modes(op, _unknowns(op, s.velocity)) * keep
    return PhaseState(_field(op, _from_modes(op, a)), _field(op, _from_modes(op, b)))


def ground_coefficient(op: OracleOperator, field: ChargedField) -> float:
    """Weighted coefficient of the field along the lowest mode, signed so the mode is positive at 0."""
    _, vectors = oracle_spectrum(op)
    ground = vectors[:, 0] * np.sign(vectors[0, 0])
    return float(math.sqrt(op.grid.h) * np.sum(op.weights * ground * _unknowns(op, field)))


def oracle_energy(op: OracleOperator, s: PhaseState) -> float:
    """Matrix quadratic form (1/2)(|v|^2 + <u, A u>) in the weighted inner product."""
    u = _unknowns(op, s.position)
    v = _unknowns(op, s.velocity)
    h = op.grid.h
    return 0.5 * h * float(np.sum(op.weights * v * v) + np.sum(op.weights * u * op.apply(u)))


def _banded(op: OracleOperator, lam: float) -> np.ndarray:
    ab = np.zeros((3, op.size))
    ab[0, 1:] = op.upper
    ab[1, :] = op.diag + lam
    ab[2, :-1] = op.lower
    return ab


def _check_gap(op: OracleOperator, lam: float):
    gap = float(np.min(np.abs(op.eigenvalues + lam)))
    if gap < ORACLE_RESOLVENT_GAP:
        raise SingularResolventError(f"lambda = {lam} is within {gap:.2e} of an oracle eigenvalue")


def oracle_resolvent(op: OracleOperator, lam: float, f: ChargedField) -> ChargedField:
    """Direct tridiagonal solve of (A + lambda) u = f."""
    _check_gap(op, lam)
    return _field(op, solve_banded((1, 1), _banded(op, lam), _unknowns(op, f)))


def resolvent_matrix(op: OracleOperator, lam: float) -> np.ndarray:
    _check_gap(op, lam)
    return solve_banded((1, 1), _banded(op, lam), np.eye(op.size))


def oracle_spectrum(op: OracleOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Sorted eigenvalues and eigenvectors of A (columns, weight-orthonormal)."""
    return op.eigenvalues, op.eigenvectors / np.sqrt(op.weights)[:, None]


def krein_singular_values(point: OracleOperator, free: OracleOperator, lam: float) -> np.ndarray:
    """Singular values of (A_alpha + lambda)^{-1} - (A_free + lambda)^{-1}.

    The free resolvent is embedded with a zero row and column at the origin
    node; the difference is then exactly rank one by the Schur complement.
    """
    if point.grid != free.grid or point.first != 0 or free.first != 1:
        raise ShapeError("need a Robin and a free oracle on one grid")
    diff = resolvent_matrix(point, lam)
    diff[1:, 1:] -= resolvent_matrix(free, lam)
    return svdvals(diff)


def bound_eigenvalue_exact(kappa: float, h: float) -> float:
    """Bound eigenvalue of the ghost-node scheme on the untruncated half-line."""
    return -4.0 / h ** 2 * math.sinh(0.5 * math.asinh(kappa * h)) ** 2


def fitted_phase(op: OracleOperator, index: int) -> Tuple[float, float]:
    """Fit an oscillatory eigenvector to A sin(theta i) + B cos(theta i).

    Returns (k, delta) with k the discrete wave number of eigenvalue mu,
    mu = (4 / h^2) sin^2(theta / 2), theta = k h, and delta reduced to
    (-pi/2, pi/2].
    """
    h = op.grid.h
    mu = op.eigenvalues[index]
    if mu <= 0:
        raise InvalidParameterError(f"mode {index} is not oscillatory (mu = {mu})")
    theta = 2.0 * math.asin(min(1.0, 0.5 * h * math.sqrt(mu)))
    y = op.eigenvectors[:, index] / np.sqrt(op.weights)
    i = np.arange(op.size)
    design = np.column_stack([np.sin(theta * i), np.cos(theta * i)])
    (amp_sin, amp_cos), *_ = np.linalg.lstsq(design, y, rcond=None)
    delta = math.atan2(amp_cos, amp_sin)
    return theta / h, wrap_phase(delta)


def wrap_phase(delta: float) -> float:
    """Reduce a phase modulo pi into (-pi/2, pi/2]."""
    wrapped = (delta + 0.5 * math.pi) % math.pi - 0.5 * math.pi
    return wrapped if wrapped != -0.5 * math.pi else 0.5 * math.pi


def lowest_eigenvalue(c: Coupling, grid: RadialGrid) -> float:
    """Smallest eigenvalue of the Robin scheme without forming eigenvectors."""
    if grid.n_r < MIN_ORACLE_NODES:
        raise InvalidParameterError(f"oracle needs n_r >= {MIN_ORACLE_NODES}, got {grid.n_r}")
    h = grid.h
    n = grid.n_r
    diag = np.full(n, 2.0 / h ** 2)
    diag[0] = 2.0 * (1.0 + h * c.robin) / h ** 2
    off = np.full(n - 1, -1.0 / h ** 2)
    off[0] = -math.sqrt(2.0) / h ** 2
    values = eigh_tridiagonal(diag, off, eigvals_only=True, select='i', select_range=(0, 0))
    return float(values[0])
