#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Configuration loading and validation for skin synthesis runs.

A run configuration is a single JSON document carrying a ``version`` field.
Unknown keys are rejected at every level and every value is type- and
range-checked; validation returns a fully defaulted copy.
"""

import copy
import hashlib
import json
import logging
import os
from typing import Any, Callable, Dict, Optional, Tuple

logger = logging.getLogger(__name__)

CONFIG_DIR = os.path.dirname(os.path.abspath(__file__))
SUBSTRATES_PATH = os.path.join(CONFIG_DIR, "substrates.json")
CONFIG_VERSION = 1


class ConfigValidationError(ValueError):
    """Raised when a run configuration fails validation; carries the dotted key path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class _Field:
    def __init__(self, types: Tuple[type, ...], default: Any = None, check: Callable[[Any], bool] = None,
                 rule: str = "", nullable: bool = False, required: bool = False):
        self.types = types
        self.default = default
        self.check = check
        self.rule = rule
        self.nullable = nullable
        self.required = required


_NUMBER = (int, float)


def _positive(value) -> bool:
    return value > 0


def _pair(value) -> bool:
    return len(value) == 2 and all(isinstance(v, _NUMBER) and not isinstance(v, bool) for v in value)


def _open_unit(value) -> bool:
    return 0 < value < 1


INCIDENCE_SCHEMA = {
    "theta_deg": _Field(_NUMBER, 0.0, lambda v: 0 <= v < 90, "in [0, 90)"),
    "phi_deg": _Field(_NUMBER, 0.0),
    "e_te": _Field((list,), [1.0, 0.0], _pair, "a [re, im] pair"),
    "e_tm": _Field((list,), [0.0, 0.0], _pair, "a [re, im] pair"),
}

GRID_SCHEMA = {
    "p": _Field((int,), 15, _positive, "positive"),
    "q": _Field((int,), 15, _positive, "positive"),
    "cell_size_m": _Field(_NUMBER, None, _positive, "positive", nullable=True),
    "center_height_m": _Field(_NUMBER, 0.0),
}

ANGULAR_SCHEMA = {
    "kind": _Field((str,), "angular"),
    "theta_deg": _Field((list,), [1.0, 33.0], lambda v: _pair(v) and 0 <= v[0] <= v[1] <= 90, "[min, max] within [0, 90]"),
    "phi_deg": _Field((list,), [-180.0, 175.0], lambda v: _pair(v) and v[0] <= v[1], "[min, max]"),
    "theta_count": _Field((int,), 33, _positive, "positive"),
    "phi_count": _Field((int,), 72, _positive, "positive"),
}

FLOOR_SCHEMA = {
    "kind": _Field((str,), "floor"),
    "x_m": _Field((list,), None, lambda v: _pair(v) and v[0] <= v[1], "[min, max]", required=True),
    "y_m": _Field((list,), None, lambda v: _pair(v) and 0 < v[0] <= v[1], "[min, max] with min > 0", required=True),
    "x_count": _Field((int,), 41, _positive, "positive"),
    "y_count": _Field((int,), 41, _positive, "positive"),
}

ATOMDB_SCHEMA = {
    "substrate": _Field((str,), "paper"),
    "path": _Field((str,), None, nullable=True),
    "step_m": _Field(_NUMBER, 1e-4, _positive, "positive"),
}

PENCIL_SCHEMA = {
    "kind": _Field((str,), "pencil"),
    "theta_deg": _Field(_NUMBER, 30.0, lambda v: 0 <= v <= 90, "in [0, 90]"),
    "phi_deg": _Field(_NUMBER, -45.0),
    "beamwidth": _Field(_NUMBER, None, _positive, "positive", nullable=True),
    "amplitude": _Field(_NUMBER, 1.0, _positive, "positive"),
}

CONTOUR_SCHEMA = {
    "kind": _Field((str,), "contour"),
    "polygons": _Field((list,), None, nullable=True),
    "polygons_path": _Field((str,), None, nullable=True),
    "inside": _Field(_NUMBER, 1.0, lambda v: v >= 0, "non-negative"),
    "outside": _Field(_NUMBER, 0.0, lambda v: v >= 0, "non-negative"),
    "smoothing_m": _Field(_NUMBER, 0.0, lambda v: v >= 0, "non-negative"),
}

PSO_SCHEMA = {
    "swarm_size": _Field((int,), 40, lambda v: v >= 2, "at least 2"),
    "inertia": _Field(_NUMBER, 0.7298, _open_unit, "in (0, 1)"),
    "cognitive": _Field(_NUMBER, 1.49618, _positive, "positive"),
    "social": _Field(_NUMBER, 1.49618, _positive, "positive"),
    "iterations": _Field((int,), 50, _positive, "positive"),
    "velocity_clamp": _Field(_NUMBER, 0.2, _positive, "positive"),
    "beta_bound": _Field(_NUMBER, 1.0, _positive, "positive"),
    "init_spread": _Field(_NUMBER, 0.1, lambda v: v >= 0, "non-negative"),
}

SYNTHESIS_SCHEMA = {
    "eta_svd": _Field(_NUMBER, 0.1, _open_unit, "in (0, 1)"),
    "eta_phi": _Field(_NUMBER, 1e-4, _open_unit, "in (0, 1)"),
    "max_outer": _Field((int,), 10000, _positive, "at least 1"),
    "ns_mode_cap": _Field((int,), None, lambda v: v >= 0, "non-negative", nullable=True),
    "ns_method": _Field((str,), "pso", lambda v: v in ("pso", "none"), "'pso' or 'none'"),
    "target_scale": _Field(_NUMBER, None, _positive, "positive", nullable=True),
    "stall_patience": _Field((int,), None, _positive, "positive", nullable=True),
    "pso": PSO_SCHEMA,
}

OUTPUT_SCHEMA = {
    "dir": _Field((str,), "output"),
}


def _check_section(section: Any, schema: Dict[str, Any], path: str) -> Dict[str, Any]:
    if not isinstance(section, dict):
        raise ConfigValidationError(path, "must be an object")
    unknown = sorted(set(section) - set(schema))
    if unknown:
        raise ConfigValidationError(path, f"unknown keys {unknown}")

    result = {}
    for key, rule in schema.items():
        key_path = f"{path}.{key}" if path else key
        if isinstance(rule, dict):
            result[key] = _check_section(section.get(key, {}), rule, key_path)
            continue
        if key not in section:
            if rule.required:
                raise ConfigValidationError(key_path, "is required")
            result[key] = copy.deepcopy(rule.default)
            continue
        value = section[key]
        if value is None:
            if not rule.nullable:
                raise ConfigValidationError(key_path, "must not be null")
            result[key] = None
            continue
        if isinstance(value, bool) or not isinstance(value, rule.types):
            names = "/".join(t.__name__ for t in rule.types)
            raise ConfigValidationError(key_path, f"must be of type {names}, got {type(value).__name__}")
        if rule.check is not None and not rule.check(value):
            raise ConfigValidationError(key_path, f"must be {rule.rule}, got {value!r}")
        result[key] = value
    return result


def _check_polygons(polygons: Any, path: str) -> None:
    if not isinstance(polygons, list) or not polygons:
        raise ConfigValidationError(path, "must be a non-empty list of polygons")
    for i, polygon in enumerate(polygons):
        if not isinstance(polygon, list) or not all(isinstance(v, list) and _pair(v) for v in polygon):
            raise ConfigValidationError(f"{path}[{i}]", "must be a list of [x_m, y_m] vertices")


def create_default_config() -> Dict[str, Any]:
    """Create a default configuration: 15x15 broadside skin, pencil beam at (30, -45) deg."""
    return validate_config({
        "version": CONFIG_VERSION,
        "scenario": {"frequency_hz": 5.5e9},
    })


def validate_config(config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Validate a run configuration and fill in defaults.

    Args:
        config: Parsed JSON document

    Returns:
        Validated copy with every field present

    Raises:
        ConfigValidationError: On the first offending key
    """
    if not isinstance(config, dict):
        raise ConfigValidationError("", "configuration must be a JSON object")
    top_schema = {"version", "seed", "scenario", "atomdb", "target", "synthesis", "output"}
    unknown = sorted(set(config) - top_schema)
    if unknown:
        raise ConfigValidationError("", f"unknown keys {unknown}")
    if config.get("version") != CONFIG_VERSION:
        raise ConfigValidationError("version", f"must be {CONFIG_VERSION}, got {config.get('version')!r}")

    seed = config.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
        raise ConfigValidationError("seed", f"must be an unsigned 64-bit integer, got {seed!r}")

    scenario = config.get("scenario")
    if not isinstance(scenario, dict):
        raise ConfigValidationError("scenario", "is required")
    unknown = sorted(set(scenario) - {"frequency_hz", "incidence", "grid", "observation"})
    if unknown:
        raise ConfigValidationError("scenario", f"unknown keys {unknown}")
    frequency = scenario.get("frequency_hz")
    if isinstance(frequency, bool) or not isinstance(frequency, _NUMBER) or frequency <= 0:
        raise ConfigValidationError("scenario.frequency_hz", f"must be a positive number, got {frequency!r}")

    observation = scenario.get("observation", {})
    kind = observation.get("kind", "angular") if isinstance(observation, dict) else None
    if kind == "angular":
        observation_schema = ANGULAR_SCHEMA
    elif kind == "floor":
        observation_schema = FLOOR_SCHEMA
    else:
        raise ConfigValidationError("scenario.observation.kind", f"must be 'angular' or 'floor', got {kind!r}")

    target = config.get("target", {})
    target_kind = target.get("kind", "pencil") if isinstance(target, dict) else None
    if target_kind == "pencil":
        target_schema = PENCIL_SCHEMA
    elif target_kind == "contour":
        target_schema = CONTOUR_SCHEMA
    else:
        raise ConfigValidationError("target.kind", f"must be 'pencil' or 'contour', got {target_kind!r}")

    validated = {
        "version": CONFIG_VERSION,
        "seed": seed,
        "scenario": {
            "frequency_hz": float(frequency),
            "incidence": _check_section(scenario.get("incidence", {}), INCIDENCE_SCHEMA, "scenario.incidence"),
            "grid": _check_section(scenario.get("grid", {}), GRID_SCHEMA, "scenario.grid"),
            "observation": _check_section(observation, observation_schema, "scenario.observation"),
        },
        "atomdb": _check_section(config.get("atomdb", {}), ATOMDB_SCHEMA, "atomdb"),
        "target": _check_section(target, target_schema, "target"),
        "synthesis": _check_section(config.get("synthesis", {}), SYNTHESIS_SCHEMA, "synthesis"),
        "output": _check_section(config.get("output", {}), OUTPUT_SCHEMA, "output"),
    }

    if target_kind == "contour":
        if validated["target"]["polygons"] is None and validated["target"]["polygons_path"] is None:
            raise ConfigValidationError("target", "contour targets need 'polygons' or 'polygons_path'")
        if validated["target"]["polygons"] is not None:
            _check_polygons(validated["target"]["polygons"], "target.polygons")
        if kind != "floor":
            raise ConfigValidationError("target.kind", "contour targets need a floor observation domain")
    elif kind != "angular":
        raise ConfigValidationError("target.kind", "pencil targets need an angular observation domain")

    if kind == "floor" and validated["scenario"]["grid"]["center_height_m"] <= 0:
        raise ConfigValidationError("scenario.grid.center_height_m", "must be positive for floor observation domains")

    if validated["atomdb"]["path"] is None and not get_substrate_defaults(validated["atomdb"]["substrate"]):
        raise ConfigValidationError("atomdb.substrate", f"unknown preset {validated['atomdb']['substrate']!r}")

    return validated


def load_config(config_path: str) -> Dict[str, Any]:
    """
    Load and validate a run configuration file.

    Args:
        config_path: Path to the JSON document

    Returns:
        Validated configuration
    """
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"Configuration file not found: {config_path}")
    with open(config_path, 'r') as f:
        try:
            config = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigValidationError("", f"invalid JSON in {config_path}: {e}") from e
    validated = validate_config(config)
    logger.info(f"Configuration loaded from {config_path}")
    return validated


def save_config(config: Dict[str, Any], config_path: str) -> str:
    """Write a configuration as indented JSON and return the path."""
    directory = os.path.dirname(config_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(config_path, 'w') as f:
        json.dump(config, f, indent=4)
    logger.info(f"Configuration saved to {config_path}")
    return config_path


def config_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON dump of a configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_substrates(path: Optional[str] = None) -> Dict[str, Any]:
    with open(path or SUBSTRATES_PATH, 'r') as f:
        return json.load(f)


def get_substrate_defaults(substrate_name: str) -> Dict[str, Any]:
    """
    Get the model parameters of a named substrate preset.

    Args:
        substrate_name: The name of the preset

    Returns:
        Dictionary of SubstrateModel parameters, empty if unknown
    """
    substrates = load_substrates()
    return dict(substrates.get('substrate_presets', {}).get(substrate_name, {}))
