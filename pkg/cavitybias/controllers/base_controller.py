# cavitybias/controllers/base_controller.py
"""
Base controller class for common functionality.
"""

from abc import ABC
from typing import Any, Dict, List, Optional, Tuple


class BaseController(ABC):
    """Base controller building response envelopes that carry a process exit code."""

    def __init__(self):
        """Initialize base controller with default exit codes."""
        self.default_exit_codes = {
            "success": 0,
            "io_error": 1,
            "internal_error": 1,
            "validation_error": 2,
            "numerical_error": 3,
        }

    def success_response(self, data: Any, message: str = "Success", exit_code: Optional[int] = None) -> Dict[str, Any]:
        """Create a success response."""
        return {
            "success": True,
            "message": message,
            "data": data,
            "_exit_code": exit_code if exit_code is not None else self.default_exit_codes["success"],
        }

    def error_response(self, message: str, error_code: str = "error", exit_code: Optional[int] = None,
                       diagnostics: Optional[List[Tuple[str, Optional[int], str]]] = None,
                       module: Optional[str] = None) -> Dict[str, Any]:
        """Create an error response; the exit code defaults from the error code."""
        if exit_code is None:
            exit_code = self.default_exit_codes.get(error_code, self.default_exit_codes["internal_error"])
        return {
            "success": False,
            "error": error_code,
            "message": message,
            "module": module,
            "diagnostics": diagnostics or [],
            "_exit_code": exit_code,
        }

    def validation_error_response(self, message: str, diagnostics=None, module: Optional[str] = None) -> Dict[str, Any]:
        return self.error_response(message, "validation_error", diagnostics=diagnostics, module=module)

    def numerical_error_response(self, message: str, module: Optional[str] = None) -> Dict[str, Any]:
        return self.error_response(message, "numerical_error", module=module)

    def io_error_response(self, message: str) -> Dict[str, Any]:
        return self.error_response(message, "io_error")

    def internal_error_response(self, message: str = "Internal error") -> Dict[str, Any]:
        return self.error_response(message, "internal_error")
