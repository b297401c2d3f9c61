"""``key = value`` run configuration, overridable from the command line."""

from __future__ import annotations

import logging
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, QuinelabError
from .machine import BOUNDARIES, ConventionSet, MachineSpec

log = logging.getLogger(__name__)

CONVENTIONS_FILE = "conventions.txt"
MAP_FILE = "map.napmap"


def parse_kv(text: str, allowed=None) -> dict[str, str]:
    items = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if allowed is not None and key not in allowed:
            raise ConfigError(f"line {n}: unknown key {key!r}")
        items[key] = value
    return items


_CHOICES = {
    "boundary": BOUNDARIES,
    "move_one": ("right", "left"),
    "triplet_order": ("qmw", "wmq"),
    "tape_msb": ("left", "right"),
}


@dataclass
class RunConfig:
    states: int = 2
    symbols: int = 2
    tape_len: str = "auto"
    steps: str = "auto"
    boundary: str = "auto"
    move_one: str = "auto"
    initial_state: str = "auto"
    triplet_order: str = "auto"
    tape_msb: str = "auto"
    workers: int = 1
    shard_size: int = 1 << 16
    out_dir: str = "quinelab-out"

    KEYS = ()  # filled below

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e}") from None
        cfg = cls()
        cfg.update(parse_kv(text, allowed=cls.KEYS))
        return cfg

    def update(self, items: dict):
        for key, value in items.items():
            if value is None:
                continue
            if key not in self.KEYS:
                raise ConfigError(f"unknown key {key!r}")
            setattr(self, key, self._coerce(key, str(value)))

    def _coerce(self, key, value):
        if key in ("states", "symbols", "workers", "shard_size"):
            try:
                v = int(value)
            except ValueError:
                raise ConfigError(f"{key} must be an integer, got {value!r}") from None
            if v < 1:
                raise ConfigError(f"{key} must be >= 1")
            return v
        if key in ("tape_len", "steps", "initial_state") and value != "auto":
            try:
                int(value)
            except ValueError:
                raise ConfigError(f"{key} must be an integer or auto, got {value!r}") from None
        if key in _CHOICES and value not in _CHOICES[key] + ("auto",):
            raise ConfigError(f"{key} must be one of {_CHOICES[key] + ('auto',)}, got {value!r}")
        return value

    @property
    def out_path(self) -> Path:
        return Path(self.out_dir)

    def needs_calibration(self) -> bool:
        return "auto" in (self.boundary, self.move_one, self.initial_state,
                          self.triplet_order, self.tape_msb)

    def conventions(self, calibrated: ConventionSet | None = None) -> ConventionSet:
        base = calibrated or ConventionSet()
        return ConventionSet(
            move_one=base.move_one if self.move_one == "auto" else self.move_one,
            boundary=base.boundary if self.boundary == "auto" else self.boundary,
            initial_state=base.initial_state if self.initial_state == "auto" else int(self.initial_state),
            q_msb=base.q_msb if self.triplet_order == "auto" else self.triplet_order == "qmw",
            tape_msb_left=base.tape_msb_left if self.tape_msb == "auto" else self.tape_msb == "left",
        )

    def machine(self, calibrated: ConventionSet | None = None) -> MachineSpec:
        try:
            return MachineSpec(
                m=self.states,
                n=self.symbols,
                z=None if self.tape_len == "auto" else int(self.tape_len),
                t=None if self.steps == "auto" else int(self.steps),
                conventions=self.conventions(calibrated),
            )
        except QuinelabError as e:
            raise ConfigError(str(e)) from None


RunConfig.KEYS = tuple(f.name for f in fields(RunConfig))


def resolve_conventions(cfg: RunConfig, persist: bool = False) -> ConventionSet | None:
    """Calibrated conventions for any ``auto`` knobs.

    Reuses ``<out_dir>/conventions.txt`` if present; otherwise calibrates the
    2-state machine against the shipped reference and, with ``persist``,
    writes the result there.
    """
    from . import calibration

    if not cfg.needs_calibration():
        return None
    path = cfg.out_path / CONVENTIONS_FILE
    if path.exists():
        return calibration.load_conventions(path)
    conv = calibration.calibrate(calibration.published_reference(), MachineSpec())
    if persist:
        calibration.save_conventions(conv, path)
        log.info("wrote %s", path)
    return conv
