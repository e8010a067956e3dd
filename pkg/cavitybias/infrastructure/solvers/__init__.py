# cavitybias/infrastructure/solvers/__init__.py
"""
Field solver implementations for the cavity simulator.
"""

from .conjugate_gradient import ConjugateGradientSolver
from .relaxation import RedBlackSORSolver

__all__ = ['ConjugateGradientSolver', 'RedBlackSORSolver']
