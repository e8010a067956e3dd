# cavitybias/infrastructure/solvers/factory.py
"""
Selection of the linear field solver from its name or the environment.
"""

import logging
import os
from typing import Optional

from ...domain.field_solver import FieldSolver
from .conjugate_gradient import ConjugateGradientSolver
from .relaxation import RedBlackSORSolver

logger = logging.getLogger(__name__)


class SolverFactory:
    """Factory for creating field solvers."""

    @staticmethod
    def create_solver(solver_type: Optional[str] = None) -> FieldSolver:
        """
        Create a field solver based on configuration.

        Args:
            solver_type: 'cg', 'sor', or None to read CAVITY_SOLVER

        Returns:
            FieldSolver instance
        """
        solver_type = (solver_type or os.getenv('CAVITY_SOLVER', 'cg')).lower()

        if solver_type == 'cg':
            return ConjugateGradientSolver()

        elif solver_type == 'sor':
            omega = os.getenv('CAVITY_SOR_OMEGA')
            return RedBlackSORSolver(omega=float(omega) if omega else None)

        else:
            logger.warning(f"Unknown solver type: {solver_type}, falling back to cg")
            return ConjugateGradientSolver()
