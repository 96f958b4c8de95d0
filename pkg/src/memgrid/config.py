"""Configuration dataclasses, overrides, and config hashing.

Every tunable named in a design decision lives here so that block
definitions and CLI `--set` overrides can reach all of them by dot path
(e.g. ``dm.inject_prob=0.25`` or ``grid.activation_cost=0.2``).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from .errors import ConfigError

ROUTING_MODES = ("hard", "disabled", "disruption", "soft", "fixed")
WRITE_MODES = ("correct", "mismatched", "noise")
SEED_MODES = ("continuous", "oneshot", "noise", "wrong", "off")
SCHEDULE_VARIANTS = ("uniform_block", "markov_sticky", "iid", "zipf",
                     "session_restart")


@dataclass
class GridConfig:
    """Lattice geometry, content dynamics, and energy economy."""

    n_units: int = 256
    dim: int = 16
    lattice_shape: tuple[int, int] = (16, 16)
    content_rate: float = 0.1          # EMA rate of fired-unit content updates
    blend_external: float = 0.8        # external share of the local input blend
    energy_income: float = 0.05        # income per fired cycle
    activation_cost: float = 0.16      # linear cost factor on the activation score
    leak_income: float = 0.0           # income for non-fired units
    e_min: float = 0.05                # death threshold
    e_init: float = 1.0                # energy at (re)birth
    target_rate: float = 0.5           # homeostatic firing-rate target (per candidate cycle)
    threshold_rate: float = 0.01       # threshold adaptation step
    neighborhood_radius: int = 1

    def validate(self):
        rows, cols = self.lattice_shape
        if rows * cols != self.n_units:
            raise ConfigError(
                f"lattice {rows}x{cols} does not cover {self.n_units} units")
        if not (0.0 < self.content_rate <= 1.0):
            raise ConfigError("content_rate must be in (0, 1]")
        if not (0.0 < self.target_rate < 1.0):
            raise ConfigError("target_rate must be in (0, 1)")
        if not (self.e_init > self.e_min >= 0.0):
            raise ConfigError("need e_init > e_min >= 0")
        if not (0.0 <= self.blend_external <= 1.0):
            raise ConfigError("blend_external must be in [0, 1]")
        if self.neighborhood_radius < 1:
            raise ConfigError("neighborhood_radius must be >= 1")


@dataclass
class RoutingConfig:
    mode: str = "hard"
    temperature: float = 0.1           # soft-routing softmax temperature
    centroid_rate: float = 0.05        # EMA rate for input centroids
    claim_novelty: float = 0.5         # max similarity at which an input may
                                       # still claim an uninitialized expert

    def validate(self):
        if self.mode not in ROUTING_MODES:
            raise ConfigError(f"unknown routing mode {self.mode!r}")
        if self.mode == "soft" and self.temperature <= 0:
            raise ConfigError("soft routing needs temperature > 0")
        if not (0.0 < self.centroid_rate <= 1.0):
            raise ConfigError("centroid_rate must be in (0, 1]")


@dataclass
class DMConfig:
    """Deep-memory switches: recording, seeding, anchoring, and the
    pathological write/seed modes used by the ablation blocks."""

    record_on: bool = True
    seed_on: bool = True
    anchor_on: bool = True
    record_rate: float = 0.1
    inject_prob: float = 1.0
    anchor_rate: float = 0.01
    write_mode: str = "correct"
    write_noise: float = 1.5           # noise scale (relative to unit norm) for noise writes
    seed_mode: str = "continuous"
    global_slot: bool = False          # single shared centroid (the global control)

    def validate(self):
        if self.write_mode not in WRITE_MODES:
            raise ConfigError(f"unknown write mode {self.write_mode!r}")
        if self.seed_mode not in SEED_MODES:
            raise ConfigError(f"unknown seed mode {self.seed_mode!r}")
        if not (0.0 <= self.inject_prob <= 1.0):
            raise ConfigError("inject_prob must be in [0, 1]")
        if not (0.0 < self.record_rate <= 1.0):
            raise ConfigError("record_rate must be in (0, 1]")
        if not (0.0 <= self.anchor_rate <= 1.0):
            raise ConfigError("anchor_rate must be in [0, 1]")


@dataclass
class TaskConfig:
    input_noise: float = 0.1
    min_separation: float = 0.3

    def validate(self):
        if not (-1.0 < self.min_separation < 1.0):
            raise ConfigError("min_separation must be in (-1, 1)")
        if self.input_noise < 0:
            raise ConfigError("input_noise must be >= 0")


@dataclass
class ScheduleConfig:
    variant: str = "uniform_block"
    block_size: int = 10
    p_stay: float = 0.9
    zipf_exponent: float = 1.0
    restart_period: int = 1000
    inner_variant: str = "uniform_block"

    def validate(self):
        if self.variant not in SCHEDULE_VARIANTS:
            raise ConfigError(f"unknown schedule variant {self.variant!r}")
        if self.inner_variant not in SCHEDULE_VARIANTS or \
                self.inner_variant == "session_restart":
            raise ConfigError("inner_variant must be a non-restart variant")
        if self.block_size < 1 or self.restart_period < 1:
            raise ConfigError("block_size and restart_period must be >= 1")
        if not (0.0 <= self.p_stay <= 1.0):
            raise ConfigError("p_stay must be in [0, 1]")


@dataclass
class PhaseConfig:
    warmup: int = 500
    operate: int = 2000
    interfere: int = 500
    reconstruct: int = 2000
    eval_window: int = 500

    def validate(self):
        for name in ("warmup", "operate", "interfere", "reconstruct",
                     "eval_window"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")


@dataclass
class RunConfig:
    """Fully resolved configuration for one simulation run."""

    k: int = 3
    grid: GridConfig = field(default_factory=GridConfig)
    routing: RoutingConfig = field(default_factory=RoutingConfig)
    dm: DMConfig = field(default_factory=DMConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    phases: PhaseConfig = field(default_factory=PhaseConfig)

    def validate(self):
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.grid.n_units % self.k != 0:
            raise ConfigError(
                f"n_units={self.grid.n_units} not divisible by k={self.k}")
        for section in (self.grid, self.routing, self.dm, self.task,
                        self.schedule, self.phases):
            section.validate()
        return self

    def to_dict(self):
        return dataclasses.asdict(self)

    def copy(self) -> "RunConfig":
        return from_dict(self.to_dict())

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


_SECTIONS = {
    "grid": GridConfig,
    "routing": RoutingConfig,
    "dm": DMConfig,
    "task": TaskConfig,
    "schedule": ScheduleConfig,
    "phases": PhaseConfig,
}


def from_dict(data: dict) -> RunConfig:
    """Build a RunConfig from a (possibly partial) nested dict."""
    kwargs = {}
    for name, cls in _SECTIONS.items():
        section = dict(data.get(name, {}))
        known = {f.name for f in dataclasses.fields(cls)}
        bad = set(section) - known
        if bad:
            raise ConfigError(f"unknown keys in [{name}]: {sorted(bad)}")
        if name == "grid" and "lattice_shape" in section:
            section["lattice_shape"] = tuple(section["lattice_shape"])
        kwargs[name] = cls(**section)
    if "k" in data:
        kwargs["k"] = int(data["k"])
    return RunConfig(**kwargs)


def parse_override(text: str) -> tuple[str, object]:
    """Parse a ``path.to.key=value`` override; values are JSON-ish."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} must look like key=value")
    path, raw = text.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path.strip(), value


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Return a new RunConfig with dot-path overrides applied."""
    data = cfg.to_dict()
    for item in overrides:
        path, value = item if isinstance(item, tuple) else parse_override(item)
        parts = path.split(".")
        node = data
        for p in parts[:-1]:
            if p not in node or not isinstance(node[p], dict):
                raise ConfigError(f"no config section {p!r} in path {path!r}")
            node = node[p]
        if parts[-1] not in node:
            raise ConfigError(f"unknown config key {path!r}")
        node[parts[-1]] = value
    return from_dict(data)


def load_config_file(path) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return from_dict(data)
