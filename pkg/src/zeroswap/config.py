"""Compile configuration: checked-in defaults, optional TOML/JSON overrides."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .hardware import MACHINES, HardwareParams, load_defaults, params_for_machine, tomllib

MACHINE_ENV = "ZEROSWAP_MACHINE"
STRATEGIES = ("parallax", "swap-baseline")
AOD_PARKING = ("corridor", "site")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class AnnealConfig:
    maxiter: int = 100
    initial_temp: float = 5230.0
    visit: float = 2.62
    accept: float = -5.0
    maxfun: int = 20000
    objective: str = "squared+spread"
    spread_weight: float = 1.0

    def __post_init__(self):
        if self.objective not in ("squared", "squared+spread"):
            raise ConfigError(f"unknown anneal objective {self.objective!r}")
        if self.maxiter < 1 or self.maxfun < 1:
            raise ConfigError("anneal maxiter and maxfun must be positive")


@dataclass(frozen=True)
class GridSpec:
    sites_x: int
    sites_y: int
    min_sep_um: float = 4.0
    padding_um: float = 2.0

    def __post_init__(self):
        if self.sites_x < 1 or self.sites_y < 1:
            raise ConfigError("grid needs at least one site per axis")
        if self.min_sep_um <= 0 or self.padding_um <= 0:
            raise ConfigError("min_sep_um and padding_um must be positive")

    @property
    def unit_um(self):
        """Site pitch: room for two separated atoms plus navigation padding."""
        return 2 * self.min_sep_um + self.padding_um

    @property
    def n_sites(self):
        return self.sites_x * self.sites_y


@dataclass(frozen=True)
class CompileConfig:
    machine: str = "quera256"
    strategy: str = "parallax"
    seed: int = 0
    aod_count: int = 20
    trap_change_reserve: int = 1
    homing: bool = True
    shots: int = 8000
    inter_shot_overhead_us: float = 0.0
    layout_density: float = 1.0
    travel_margin: int = 1
    max_recursion: int = 80
    aod_parking: str = "corridor"
    grid: GridSpec = None
    anneal: AnnealConfig = field(default_factory=AnnealConfig)
    hardware: HardwareParams = None

    def __post_init__(self):
        if self.machine not in MACHINES:
            raise ConfigError(f"unknown machine {self.machine!r}; choose from {sorted(MACHINES)}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.aod_count < 1:
            raise ConfigError("aod_count must be at least 1")
        if self.trap_change_reserve < 0 or self.trap_change_reserve > self.aod_count:
            raise ConfigError("trap_change_reserve must lie in [0, aod_count]")
        if self.shots < 1:
            raise ConfigError("shots must be at least 1")
        if not 0 < self.layout_density <= 1:
            raise ConfigError("layout_density must lie in (0, 1]")
        if self.travel_margin < 0:
            raise ConfigError("travel_margin must be non-negative")
        if self.aod_parking not in AOD_PARKING:
            raise ConfigError(f"aod_parking must be one of {AOD_PARKING}")
        if self.max_recursion < 1:
            raise ConfigError("max_recursion must be positive")
        sx, sy = MACHINES[self.machine]
        if self.grid is None:
            object.__setattr__(self, "grid", GridSpec(sx, sy))
        elif (self.grid.sites_x, self.grid.sites_y) != (sx, sy):
            object.__setattr__(self, "grid", replace(self.grid, sites_x=sx, sites_y=sy))
        if self.hardware is None:
            object.__setattr__(self, "hardware", params_for_machine(self.machine))
        elif self.hardware.n_sites != sx * sy:
            object.__setattr__(self, "hardware", replace(self.hardware, n_sites=sx * sy))

    @property
    def aod_capacity(self):
        """AOD rows/columns available to resident atoms (the rest serve trap changes)."""
        return self.aod_count - self.trap_change_reserve

    def with_(self, **changes):
        return replace(self, **changes)


def _read_file(path):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if p.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from exc


def _pick(cls, table, section):
    known = {f.name for f in fields(cls)}
    unknown = set(table) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{section}]: {sorted(unknown)}")
    return table


def build_config(path=None, **overrides):
    """Defaults, then the file at ``path`` (if any), then keyword overrides.

    Keyword overrides set to None are ignored so CLI flags can be passed
    straight through.
    """
    data = load_defaults()
    if path is not None:
        user = _read_file(path)
        for section, table in user.items():
            if not isinstance(table, dict):
                raise ConfigError(f"config entry {section!r} must be a table")
            data.setdefault(section, {}).update(table)
    compile_tab = dict(data.get("compile", {}))
    env_machine = os.environ.get(MACHINE_ENV)
    if env_machine and (path is None or "machine" not in _read_file(path).get("compile", {})):
        compile_tab["machine"] = env_machine
    compile_tab.update({k: v for k, v in overrides.items() if v is not None})
    extra = {"grid", "anneal", "hardware"} & set(compile_tab)
    if extra:
        raise ConfigError(f"use the [{sorted(extra)[0]}] table, not a compile key")
    _pick(CompileConfig, compile_tab, "compile")
    try:
        anneal = AnnealConfig(**_pick(AnnealConfig, data.get("anneal", {}), "anneal"))
        machine = compile_tab.get("machine", "quera256")
        if machine not in MACHINES:
            raise ConfigError(f"unknown machine {machine!r}; choose from {sorted(MACHINES)}")
        sx, sy = MACHINES[machine]
        grid_tab = _pick(GridSpec, data.get("grid", {}), "grid")
        grid = GridSpec(sx, sy, **{k: v for k, v in grid_tab.items() if k not in ("sites_x", "sites_y")})
        hardware = params_for_machine(machine, data.get("hardware", {}))
        return CompileConfig(grid=grid, anneal=anneal, hardware=hardware, **compile_tab)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
