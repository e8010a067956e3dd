# cavitybias/domain/field_solver.py
"""
Abstract interface for dc field solvers and the discrete problem they solve.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Tuple

import numpy as np


def finite_volume_weights(shape: Tuple[int, int, int], spacing: Tuple[float, float, float]):
    """
    Edge weights (dual-face area / edge length) of the 7-point finite-volume Laplacian.

    Dual faces of nodes on a boundary plane are truncated to half, so nodes without a Dirichlet
    condition obey a homogeneous Neumann condition.
    """
    nx, ny, nz = shape
    hx, hy, hz = spacing

    def half_at_ends(n):
        f = np.ones(n)
        f[0] = f[-1] = 0.5
        return f

    fx, fy, fz = half_at_ends(nx), half_at_ends(ny), half_at_ends(nz)
    wx = (hy * hz / hx) * np.ones(nx - 1)[:, None, None] * fy[None, :, None] * fz[None, None, :]
    wy = (hx * hz / hy) * fx[:, None, None] * np.ones(ny - 1)[None, :, None] * fz[None, None, :]
    wz = (hx * hy / hz) * fx[:, None, None] * fy[None, :, None] * np.ones(nz - 1)[None, None, :]
    return wx, wy, wz


def apply_laplacian(phi: np.ndarray, wx: np.ndarray, wy: np.ndarray, wz: np.ndarray) -> np.ndarray:
    """Sum over neighbours of w * (phi_j - phi_i) at every node."""
    out = np.zeros_like(phi)
    d = wx * (phi[1:, :, :] - phi[:-1, :, :])
    out[:-1, :, :] += d
    out[1:, :, :] -= d
    d = wy * (phi[:, 1:, :] - phi[:, :-1, :])
    out[:, :-1, :] += d
    out[:, 1:, :] -= d
    d = wz * (phi[:, :, 1:] - phi[:, :, :-1])
    out[:, :, :-1] += d
    out[:, :, 1:] -= d
    return out


@dataclass(eq=False)
class LinearProblem:
    """
    Discrete Laplace problem on a node grid.

    ``fixed`` marks Dirichlet nodes whose values are taken from ``boundary``; all other nodes are free.
    """
    shape: Tuple[int, int, int]
    spacing: Tuple[float, float, float]
    fixed: np.ndarray
    boundary: np.ndarray
    tolerance: float
    max_iterations: int

    def __post_init__(self):
        self.wx, self.wy, self.wz = finite_volume_weights(self.shape, self.spacing)
        self.diagonal = self.laplacian_diagonal()
        self.free = ~self.fixed

    @property
    def scale(self) -> float:
        """Largest Dirichlet magnitude; residuals are measured relative to it."""
        if not np.any(self.fixed):
            return 1.0
        value = float(np.max(np.abs(self.boundary[self.fixed])))
        return value if value > 0 else 1.0

    @property
    def is_trivial(self) -> bool:
        return not np.any(self.boundary[self.fixed])

    def laplacian(self, phi: np.ndarray) -> np.ndarray:
        return apply_laplacian(phi, self.wx, self.wy, self.wz)

    def laplacian_diagonal(self) -> np.ndarray:
        diag = np.zeros(self.shape)
        diag[:-1, :, :] += self.wx
        diag[1:, :, :] += self.wx
        diag[:, :-1, :] += self.wy
        diag[:, 1:, :] += self.wy
        diag[:, :, :-1] += self.wz
        diag[:, :, 1:] += self.wz
        return diag

    def initial_guess(self) -> np.ndarray:
        return np.where(self.fixed, self.boundary, 0.0)

    def residual(self, phi: np.ndarray) -> float:
        """Max-norm of the scaled discrete Laplacian over free nodes."""
        if not np.any(self.free):
            return 0.0
        r = self.laplacian(phi)[self.free] / self.diagonal[self.free]
        return float(np.max(np.abs(r))) / self.scale


@dataclass(frozen=True)
class SolveReport:
    solver: str
    iterations: int
    residual: float


class FieldSolver(ABC):
    """Abstract interface for Laplace solvers."""

    @abstractmethod
    def solve(self, problem: LinearProblem) -> Tuple[np.ndarray, SolveReport]:
        """
        Solve the discrete Laplace equation.

        Args:
            problem: Grid, Dirichlet nodes and convergence settings

        Returns:
            Potential on every node and a report with iterations and final residual

        Raises:
            SolverError: If the residual stays above the tolerance after max iterations
        """
        pass

    @abstractmethod
    def get_solver_name(self) -> str:
        """
        Get the name of the solver.

        Returns:
            Solver name
        """
        pass
