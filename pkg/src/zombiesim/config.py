"""Run configuration: a flat ``dotted.key = value`` text file.

Every key is optional; defaults reproduce the no-intervention scenario with
the standard behaviour and movement parameters.  Relative ``map.path``
values resolve against the config file's directory, and ``builtin:uusimaa``
names the bundled synthetic Uusimaa map.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields
from pathlib import Path

from .behavior import BehaviorTable
from .engine import DEFAULT_MAX_STEPS
from .intervention import PolicyKind, ScenarioPolicy
from .movement import MovementParams
from .worldmap import Cell, GridWorld, MapFormatError, load_raster, parse_cell

__all__ = ["ConfigError", "RunConfig", "KEYS", "load_config", "parse_config", "dump_config"]

BUILTIN_UUSIMAA = "builtin:uusimaa"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    map_path: str = BUILTIN_UUSIMAA
    origin: Cell | None = None  # None: use the map file's own origin
    policy: ScenarioPolicy = ScenarioPolicy()
    behavior: BehaviorTable = BehaviorTable()
    movement: MovementParams = MovementParams()
    incubation_steps: int = 1
    max_steps: int = DEFAULT_MAX_STEPS
    n_runs: int = 1000
    base_seed: int = 0
    max_parallel_runs: int = 1
    trajectory_stride: int = 1
    output_dir: str = "zombiesim-out"

    def load_world(self) -> GridWorld:
        if self.map_path == BUILTIN_UUSIMAA:
            from .fixtures import fixture_path

            path = fixture_path()
        else:
            path = Path(self.map_path)
        if not path.exists():
            raise ConfigError(f"map file not found: {path}")
        try:
            return load_raster(path, self.origin)
        except MapFormatError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


# key -> (section object attribute, field name, parser)
KEYS: dict[str, tuple[str | None, str, type]] = {
    "map.path": (None, "map_path", str),
    "map.origin": (None, "origin", parse_cell),
    "scenario.kind": ("policy", "kind", PolicyKind.parse),
    "scenario.activation_step": ("policy", "activation_step", int),
    "scenario.leak_probability": ("policy", "leak_probability", float),
    **{f"behavior.{f.name}": ("behavior", f.name, float) for f in fields(BehaviorTable)},
    "movement.base_weight": ("movement", "base_weight", float),
    "movement.bias_per_km": ("movement", "bias_per_km", float),
    "movement.bias_cap_distance": ("movement", "bias_cap_distance", int),
    "movement.full_bias_distance": ("movement", "full_bias_distance", int),
    "engine.incubation_steps": (None, "incubation_steps", int),
    "engine.max_steps": (None, "max_steps", int),
    "batch.n_runs": (None, "n_runs", int),
    "batch.base_seed": (None, "base_seed", int),
    "batch.max_parallel_runs": (None, "max_parallel_runs", int),
    "batch.trajectory_stride": (None, "trajectory_stride", int),
    "output.dir": (None, "output_dir", str),
}

_GROUPS = {"policy": ScenarioPolicy, "behavior": BehaviorTable, "movement": MovementParams}


def parse_config(text: str, base_dir: str | Path = ".") -> RunConfig:
    parser = configparser.ConfigParser(
        interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"), inline_comment_prefixes=("#",)
    )
    parser.optionxform = str
    try:
        parser.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    top: dict[str, object] = {}
    groups: dict[str, dict[str, object]] = {g: {} for g in _GROUPS}
    for key, raw in parser["run"].items():
        if key not in KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        group, name, conv = KEYS[key]
        try:
            value = conv(raw.strip())
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}") from None
        (groups[group] if group else top)[name] = value

    if "map_path" in top:
        path = str(top["map_path"])
        if path != BUILTIN_UUSIMAA and not Path(path).is_absolute():
            top["map_path"] = str((Path(base_dir) / path).resolve())
    try:
        built = {g: cls(**groups[g]) for g, cls in _GROUPS.items()}
        cfg = RunConfig(**top, **built)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    _check(cfg)
    return cfg


def _check(cfg: RunConfig) -> None:
    if cfg.incubation_steps < 1:
        raise ConfigError("engine.incubation_steps must be >= 1")
    if cfg.max_steps < 1:
        raise ConfigError("engine.max_steps must be >= 1")
    if cfg.n_runs < 0:
        raise ConfigError("batch.n_runs must be >= 0")
    if cfg.max_parallel_runs < 1:
        raise ConfigError("batch.max_parallel_runs must be >= 1")
    if cfg.trajectory_stride < 1:
        raise ConfigError("batch.trajectory_stride must be >= 1")


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, base_dir=path.parent)


def dump_config(cfg: RunConfig) -> str:
    """Every key with its effective value; ``parse_config`` of the result gives back ``cfg``."""
    lines = []
    for key, (group, name, _conv) in KEYS.items():
        value = getattr(getattr(cfg, group), name) if group else getattr(cfg, name)
        if value is None:
            continue
        if isinstance(value, PolicyKind):
            value = value.name.lower()
        elif isinstance(value, Cell):
            value = f"{value.x},{value.y}"
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
