# cavitybias/infrastructure/config_loader.py
"""
YAML scenario loading with line-numbered schema diagnostics.
"""

import logging
import re
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml
from pydantic import ValidationError

from ..domain.errors import ScenarioError
from ..domain.scenario import Scenario

logger = logging.getLogger(__name__)

_GRID_PATTERN = re.compile(r"^\s*(\d+)\s*[xX]\s*(\d+)\s*[xX]\s*(\d+)\s*$")


def parse_grid_override(text: str) -> Tuple[int, int, int]:
    """Parse ``NXxNYxNZ`` into three integers."""
    match = _GRID_PATTERN.match(text or "")
    if not match:
        raise ScenarioError(f"Grid override must look like 64x32x48, got {text!r}",
                            [("grid", None, f"cannot parse {text!r}")])
    return tuple(int(g) for g in match.groups())


def line_index(text: str) -> Dict[Tuple[Any, ...], int]:
    """Map every key path of a YAML document to its 1-based line number."""
    index: Dict[Tuple[Any, ...], int] = {}
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError:
        return index

    def walk(node, path):
        index[path] = node.start_mark.line + 1
        if isinstance(node, yaml.MappingNode):
            for key_node, value_node in node.value:
                key_path = path + (key_node.value,)
                walk(value_node, key_path)
                # a key's line is where the key is written
                index[key_path] = key_node.start_mark.line + 1
        elif isinstance(node, yaml.SequenceNode):
            for i, item in enumerate(node.value):
                walk(item, path + (i,))

    if root is not None:
        walk(root, ())
    return index


def _line_for(index: Dict[Tuple[Any, ...], int], location: Tuple[Any, ...]) -> Optional[int]:
    # pydantic locations name missing keys; fall back to the closest enclosing key
    path = tuple(str(p) if not isinstance(p, int) else p for p in location)
    while path:
        if path in index:
            return index[path]
        path = path[:-1]
    return None


def apply_overrides(data: Dict[str, Any], seed: Optional[int] = None, grid: Optional[str] = None,
                    out_dir: Optional[str] = None) -> Dict[str, Any]:
    """Apply command-line overrides to the raw document before validation."""
    data = dict(data)
    if seed is not None:
        data["seed"] = int(seed)
    if grid is not None:
        nx, ny, nz = parse_grid_override(grid)
        block = dict(data.get("grid") or {})
        block.update({"nx": nx, "ny": ny, "nz": nz})
        data["grid"] = block
    if out_dir is not None:
        block = dict(data.get("output") or {})
        block["out_dir"] = str(out_dir)
        data["output"] = block
    return data


def load_scenario(path: str, seed: Optional[int] = None, grid: Optional[str] = None,
                  out_dir: Optional[str] = None) -> Scenario:
    """
    Load and validate a scenario file.

    Args:
        path: Path to the YAML scenario
        seed: Overrides the scenario seed
        grid: Overrides the grid resolution, ``NXxNYxNZ``
        out_dir: Overrides the output directory

    Returns:
        Validated Scenario

    Raises:
        ScenarioError: For unreadable files, YAML syntax errors and schema violations
    """
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ScenarioError(f"Cannot read scenario file {path}: {e.strerror or e}",
                            [("", None, f"cannot read {path}")])

    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError(f"Scenario file {path} is not valid YAML", [("", line, str(getattr(e, "problem", e)))])

    if not isinstance(data, dict):
        raise ScenarioError(f"Scenario file {path} must contain a mapping",
                            [("", 1, "top level must be a mapping of blocks")])

    data = apply_overrides(data, seed=seed, grid=grid, out_dir=out_dir)
    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as e:
        index = line_index(text)
        diagnostics = []
        for error in e.errors():
            location = tuple(error["loc"])
            diagnostics.append((".".join(str(p) for p in location), _line_for(index, location), error["msg"]))
        raise ScenarioError(f"Scenario file {path} failed validation with {len(diagnostics)} error(s)",
                            diagnostics)

    logger.info(f"Loaded {scenario.kind} scenario from {path} (hash {scenario.config_hash()[:12]})")
    return scenario
