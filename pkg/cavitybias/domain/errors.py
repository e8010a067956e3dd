# cavitybias/domain/errors.py
"""
Exception hierarchy shared by all cavitybias services.
"""

from typing import List, Optional, Tuple


class CavityError(Exception):
    """Base exception for cavitybias operations."""

    def __init__(self, message: str, module: str = None, error_code: str = None):
        self.message = message
        self.module = module
        self.error_code = error_code
        super().__init__(self.message)


class InvalidInputError(CavityError, ValueError):
    """Raised when an operation's preconditions are violated."""

    def __init__(self, message: str, module: str = None, error_code: str = "invalid_input"):
        super().__init__(message, module=module, error_code=error_code)


class UnsupportedModeError(InvalidInputError):
    """Raised for modes outside the TE_m0l family or outside a calibration."""

    def __init__(self, message: str, module: str = None):
        super().__init__(message, module=module, error_code="unsupported_mode")


class ScenarioError(InvalidInputError):
    """Raised when a scenario file fails schema validation."""

    def __init__(self, message: str, diagnostics: Optional[List[Tuple[str, Optional[int], str]]] = None):
        super().__init__(message, module="cli", error_code="invalid_scenario")
        # (field path, line number or None, message)
        self.diagnostics = diagnostics or []

    def format_diagnostics(self) -> str:
        """Render diagnostics one per line."""
        lines = []
        for path, line, text in self.diagnostics:
            location = f"line {line}" if line is not None else "line ?"
            lines.append(f"{location}: {path or '<root>'}: {text}")
        return "\n".join(lines)


class NumericalError(CavityError):
    """Raised when a numerical procedure fails to reach its target accuracy."""

    def __init__(self, message: str, module: str = None, error_code: str = "numerical_failure",
                 residual: Optional[float] = None):
        super().__init__(message, module=module, error_code=error_code)
        self.residual = residual


class SolverError(NumericalError):
    """Raised when a field solve does not converge."""

    def __init__(self, message: str, residual: Optional[float] = None, iterations: Optional[int] = None):
        super().__init__(message, module="fieldsolve", error_code="solver_not_converged", residual=residual)
        self.iterations = iterations


class FitError(NumericalError):
    """Raised when a least-squares fit fails."""

    def __init__(self, message: str, module: str = None, residual: Optional[float] = None):
        super().__init__(message, module=module, error_code="fit_failed", residual=residual)
