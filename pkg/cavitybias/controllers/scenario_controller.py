# cavitybias/controllers/scenario_controller.py
"""
Scenario controller: load, run and export a scenario, translating failures into exit codes.
"""

import logging
from typing import Any, Callable, Dict, Optional

from ..controllers.base_controller import BaseController
from ..domain.errors import InvalidInputError, NumericalError, ScenarioError
from ..domain.repositories import ResultRepository
from ..infrastructure.config_loader import load_scenario
from ..services.scenario_service import ScenarioService

logger = logging.getLogger(__name__)


class ScenarioController(BaseController):
    """Controller for scenario runs."""

    def __init__(self, scenario_service: ScenarioService, repository_factory: Callable[[str], ResultRepository],
                 default_out_dir: str = "results"):
        """
        Initialize scenario controller.

        Args:
            scenario_service: Service running scenarios
            repository_factory: Builds the result repository for an output directory
            default_out_dir: Output directory when neither the config nor the command line names one
        """
        super().__init__()
        self.scenario_service = scenario_service
        self.repository_factory = repository_factory
        self.default_out_dir = default_out_dir
        logger.info(f"ScenarioController initialized with default_out_dir={default_out_dir}")

    def run(self, config_path: str, kind: Optional[str] = None, seed: Optional[int] = None,
            grid: Optional[str] = None, out_dir: Optional[str] = None) -> Dict[str, Any]:
        """
        Run the scenario in ``config_path`` and write its outputs.

        Args:
            config_path: YAML scenario file
            kind: Expected scenario kind (from the subcommand); any kind when None
            seed: Seed override
            grid: Grid override ``NXxNYxNZ``
            out_dir: Output directory override

        Returns:
            Response envelope; ``_exit_code`` is 0, 1 (I/O), 2 (validation) or 3 (numerical)
        """
        try:
            scenario = load_scenario(config_path, seed=seed, grid=grid, out_dir=out_dir)
            if kind is not None and scenario.kind != kind:
                return self.validation_error_response(
                    f"Scenario kind '{scenario.kind}' does not match the '{kind}' command",
                    diagnostics=[("kind", None, f"expected '{kind}'")], module="cli")

            result = self.scenario_service.run_scenario(scenario)
            target = scenario.output.out_dir or self.default_out_dir
            repository = self.repository_factory(target)
            written = self.scenario_service.export_results(result, repository, scenario.output.formats)

            return self.success_response({
                "kind": scenario.kind,
                "out_dir": target,
                "outputs": written,
                "config_hash": result.provenance["config_hash"],
                "summary": result.summary,
            }, f"{scenario.kind} scenario completed")

        except ScenarioError as e:
            logger.error(f"Scenario validation failed: {e.message}")
            return self.validation_error_response(e.message, diagnostics=e.diagnostics, module=e.module)
        except InvalidInputError as e:
            logger.error(f"Invalid input in {e.module or 'scenario'}: {e.message}")
            return self.validation_error_response(e.message, module=e.module)
        except NumericalError as e:
            logger.error(f"Numerical failure in {e.module or 'scenario'}: {e.message}")
            message = e.message if e.residual is None else f"{e.message} (residual {e.residual:.3g})"
            return self.numerical_error_response(message, module=e.module)
        except OSError as e:
            logger.error(f"Output error: {str(e)}")
            return self.io_error_response(f"Cannot write outputs: {str(e)}")
        except Exception as e:
            logger.error(f"Unexpected error in scenario run: {str(e)}")
            return self.internal_error_response(f"An unexpected error occurred: {str(e)}")
