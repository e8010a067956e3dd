# cavitybias/infrastructure/solvers/relaxation.py
"""
Red-black successive over-relaxation solver.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ...domain.errors import SolverError
from ...domain.field_solver import FieldSolver, LinearProblem, SolveReport

logger = logging.getLogger(__name__)


def optimal_relaxation_factor(problem: LinearProblem) -> float:
    """Relaxation factor from the Jacobi spectral radius of a Dirichlet box with the same grid."""
    hx, hy, hz = problem.spacing
    weights = np.array([1.0 / hx ** 2, 1.0 / hy ** 2, 1.0 / hz ** 2])
    cosines = np.array([np.cos(np.pi / (n - 1)) for n in problem.shape])
    rho = float(np.dot(weights, cosines) / weights.sum())
    return 2.0 / (1.0 + np.sqrt(1.0 - rho ** 2))


class RedBlackSORSolver(FieldSolver):
    """SOR relaxation sweeping nodes of even and odd parity alternately."""

    def __init__(self, omega: Optional[float] = None, check_every: int = 10):
        """
        Initialize the relaxation solver.

        Args:
            omega: Over-relaxation factor in (0, 2); estimated from the grid when omitted
            check_every: Sweeps between residual evaluations
        """
        if omega is not None and not 0.0 < omega < 2.0:
            raise ValueError(f"Relaxation factor must lie in (0, 2), got {omega}")
        self.omega = omega
        self.check_every = check_every
        logger.info(f"RedBlackSORSolver initialized with omega={omega or 'auto'}")

    def solve(self, problem: LinearProblem) -> Tuple[np.ndarray, SolveReport]:
        phi = problem.initial_guess()
        if problem.is_trivial:
            return phi, SolveReport(self.get_solver_name(), 0, 0.0)

        omega = self.omega or optimal_relaxation_factor(problem)
        i, j, k = np.indices(problem.shape)
        parity = (i + j + k) % 2
        colors = [problem.free & (parity == c) for c in (0, 1)]
        inverse_diagonal = np.where(problem.free, 1.0 / problem.diagonal, 0.0)

        residual = problem.residual(phi)
        for iteration in range(1, problem.max_iterations + 1):
            for color in colors:
                update = problem.laplacian(phi) * inverse_diagonal
                phi[color] += omega * update[color]
            if iteration % self.check_every == 0 or iteration == problem.max_iterations:
                residual = problem.residual(phi)
                logger.debug(f"SOR sweep {iteration}: residual {residual:.3e}")
                if residual <= problem.tolerance:
                    logger.info(f"SOR converged in {iteration} sweeps (residual {residual:.3e}, omega {omega:.4f})")
                    return phi, SolveReport(self.get_solver_name(), iteration, residual)

        raise SolverError(
            f"SOR did not converge in {problem.max_iterations} sweeps (residual {residual:.3e} > "
            f"{problem.tolerance:.1e})",
            residual=residual, iterations=problem.max_iterations)

    def get_solver_name(self) -> str:
        return "sor"
