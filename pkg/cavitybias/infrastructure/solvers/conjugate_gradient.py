# cavitybias/infrastructure/solvers/conjugate_gradient.py
"""
Jacobi-preconditioned conjugate gradient solver.
"""

import logging
from typing import Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, cg

from ...domain.errors import SolverError
from ...domain.field_solver import FieldSolver, LinearProblem, SolveReport

logger = logging.getLogger(__name__)


class ConjugateGradientSolver(FieldSolver):
    """Conjugate gradient on the free nodes of the finite-volume Laplacian."""

    def __init__(self, relative_tolerance_factor: float = 1e-3, max_restarts: int = 3):
        """
        Initialize the conjugate gradient solver.

        Args:
            relative_tolerance_factor: CG stopping tolerance as a fraction of the max-norm target
            max_restarts: Restarts with a tighter tolerance when the max-norm target is missed
        """
        self.relative_tolerance_factor = relative_tolerance_factor
        self.max_restarts = max_restarts
        logger.info(f"ConjugateGradientSolver initialized with rtol factor {relative_tolerance_factor}")

    def solve(self, problem: LinearProblem) -> Tuple[np.ndarray, SolveReport]:
        phi = problem.initial_guess()
        if problem.is_trivial or not np.any(problem.free):
            return phi, SolveReport(self.get_solver_name(), 0, 0.0)

        free = problem.free
        n_free = int(free.sum())
        work = np.zeros(problem.shape)

        def matvec(v):
            work[...] = 0.0
            work[free] = np.ravel(v)
            return -problem.laplacian(work)[free]

        operator = LinearOperator((n_free, n_free), matvec=matvec, dtype=float)
        inverse_diagonal = 1.0 / problem.diagonal[free]
        preconditioner = LinearOperator((n_free, n_free), matvec=lambda r: np.ravel(r) * inverse_diagonal,
                                        dtype=float)
        rhs = problem.laplacian(np.where(problem.fixed, problem.boundary, 0.0))[free]

        iterations = 0

        def count(_):
            nonlocal iterations
            iterations += 1

        x = np.zeros(n_free)
        rtol = problem.tolerance * self.relative_tolerance_factor
        residual = np.inf
        for attempt in range(self.max_restarts + 1):
            remaining = max(problem.max_iterations - iterations, 1)
            x, info = cg(operator, rhs, x0=x, rtol=rtol, atol=0.0, maxiter=remaining,
                         M=preconditioner, callback=count)
            phi[free] = x
            residual = problem.residual(phi)
            logger.debug(f"CG attempt {attempt}: info={info}, iterations={iterations}, residual {residual:.3e}")
            if residual <= problem.tolerance:
                logger.info(f"CG converged in {iterations} iterations (residual {residual:.3e})")
                return phi, SolveReport(self.get_solver_name(), iterations, residual)
            if iterations >= problem.max_iterations:
                break
            rtol *= 1e-2

        raise SolverError(
            f"Conjugate gradient did not converge in {iterations} iterations (residual {residual:.3e} > "
            f"{problem.tolerance:.1e})",
            residual=residual, iterations=iterations)

    def get_solver_name(self) -> str:
        return "cg"
