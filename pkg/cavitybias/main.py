# cavitybias/main.py
"""
Command-line entry point: one subcommand per scenario kind plus ``run`` for any kind.
"""

import logging
import os
from typing import Any, Dict

import click
from dotenv import load_dotenv

from .container import Container
from .domain.scenario import SCENARIO_KINDS

logger = logging.getLogger(__name__)


def configure_logging(level: str = None) -> None:
    level = (level or os.getenv("CAVITY_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def emit(result: Dict[str, Any]) -> int:
    """Print a response envelope and return its exit code."""
    if result["success"]:
        data = result["data"]
        click.echo(result["message"])
        click.echo(f"config hash: {data['config_hash']}")
        for location in data["outputs"]:
            click.echo(f"  {location}")
    else:
        origin = f" in {result['module']}" if result.get("module") else ""
        click.echo(f"error [{result['error']}]{origin}: {result['message']}", err=True)
        for path, line, text in result.get("diagnostics", []):
            where = f"line {line}" if line is not None else "line ?"
            click.echo(f"  {where}: {path or '<root>'}: {text}", err=True)
    return result.get("_exit_code", 0)


def scenario_options(function):
    options = [
        click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False),
                     help="YAML scenario file."),
        click.option("--out-dir", default=None, help="Output directory (overrides the config)."),
        click.option("--seed", type=int, default=None, help="Random seed (overrides the config)."),
        click.option("--grid", default=None, help="Grid resolution NXxNYxNZ (overrides the config)."),
    ]
    for option in reversed(options):
        function = option(function)
    return function


@click.group()
@click.option("--log-level", default=None, help="Logging level (default: CAVITY_LOG_LEVEL or INFO).")
@click.pass_context
def cli(ctx, log_level):
    """Simulate a dc-biased superconducting rectangular microwave cavity."""
    load_dotenv()
    configure_logging(log_level)
    ctx.obj = Container()


def _run(ctx, kind, config_path, out_dir, seed, grid):
    container: Container = ctx.obj
    result = container.scenario_controller.run(config_path, kind=kind, seed=seed, grid=grid, out_dir=out_dir)
    ctx.exit(emit(result))


@cli.command("run")
@scenario_options
@click.pass_context
def run(ctx, config_path, out_dir, seed, grid):
    """Run a scenario of any kind."""
    _run(ctx, None, config_path, out_dir, seed, grid)


def _kind_command(kind: str):
    @click.pass_context
    def command(ctx, config_path, out_dir, seed, grid):
        _run(ctx, kind, config_path, out_dir, seed, grid)

    command.__doc__ = f"Run a '{kind}' scenario."
    return cli.command(kind)(scenario_options(command))


for _kind in SCENARIO_KINDS:
    _kind_command(_kind)


@cli.command("info")
@click.pass_context
def info(ctx):
    """Show the version and the configured solver, cache and result store."""
    data = ctx.obj.system_controller.get_environment_info()["data"]
    for key, value in data.items():
        click.echo(f"{key}: {value}")


if __name__ == "__main__":
    cli()
