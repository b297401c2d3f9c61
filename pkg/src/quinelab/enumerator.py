"""Exhaustive sweep of the program space into the output map ``f``."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import mapfile
from .errors import MapFileError, MergeError, QuinelabError
from .machine import MachineSpec, run_many

log = logging.getLogger(__name__)

DEFAULT_SHARD_SIZE = 1 << 16
# numpy batch size inside one work unit; bounds temporary memory
_BATCH = 1 << 16


@dataclass(frozen=True)
class Shard:
    spec: MachineSpec
    start: int
    end: int
    entries: np.ndarray

    @property
    def key(self):
        return mapfile.spec_key(self.spec)


@dataclass(frozen=True)
class OutputMap:
    """Dense functional graph: ``entries[p]`` is the output of program ``p``."""

    spec: MachineSpec
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.uint64)
        if len(e) != self.size:
            raise QuinelabError(f"output map needs {self.size} entries, got {len(e)}")
        if len(e) and int(e.max()) >= self.size:
            raise QuinelabError("output map entry outside the program space")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)

    @property
    def size(self) -> int:
        return 1 << self.spec.l

    def __len__(self):
        return self.size

    def __getitem__(self, p):
        return int(self.entries[p])

    @classmethod
    def from_function(cls, l: int, fn) -> "OutputMap":
        """Toy map over ``l``-bit strings, bypassing the machine.

        The attached spec is only a label; dynamics never runs it.
        """
        return cls(_ToySpec(l), np.array([fn(p) for p in range(1 << l)], dtype=np.uint64))

    def to_bytes(self) -> bytes:
        return mapfile.pack_header(self.spec, 0, self.size) + self.entries.astype("<u8").tobytes()


class _ToySpec:
    """Minimal stand-in spec for hand-built maps of arbitrary width."""

    def __init__(self, l):
        self.l = l
        self.m, self.n, self.z, self.t = 0, 2, l, 0
        self.conventions = None

    def __repr__(self):
        return f"ToySpec(l={self.l})"


@dataclass(frozen=True)
class LevelDistribution:
    """Exact counts of strings at meta-level ``level``.

    ``mode`` is ``weighted`` (mass carried forward) or ``support-uniform``
    (every surviving string restarts with count 1).
    """

    level: int
    mode: str
    counts: dict
    l: int

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def support(self) -> list[int]:
        return sorted(self.counts)

    def probability(self, x: int) -> Fraction:
        """count / 2**l; sums to one over a weighted distribution."""
        return Fraction(self.counts.get(x, 0), 1 << self.l)

    def raw_weight(self, x: int) -> Fraction:
        """count * 2**(-level*l): the literal nested weighting, unnormalised."""
        return Fraction(self.counts.get(x, 0), 1 << (self.level * self.l))

    def ranked(self) -> list[tuple[int, int]]:
        """(program, count) by descending count, then ascending program."""
        return sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))


def _check_range(spec, start, end):
    if not 0 <= start <= end <= spec.size:
        raise QuinelabError(f"range [{start}, {end}) outside [0, {spec.size})")


def _run_range(spec: MachineSpec, start: int, end: int) -> np.ndarray:
    out = np.empty(end - start, dtype=np.uint64)
    for lo in range(start, end, _BATCH):
        hi = min(lo + _BATCH, end)
        out[lo - start:hi - start] = run_many(np.arange(lo, hi, dtype=np.uint64), spec)
    return out


def _units(start, end, shard_size):
    return [(lo, min(lo + shard_size, end)) for lo in range(start, end, shard_size)]


def sweep(spec: MachineSpec, range: tuple[int, int] | None = None, workers: int = 1,
          shard_size: int = DEFAULT_SHARD_SIZE):
    """Run every program in ``range`` (default: the whole space).

    Returns an ``OutputMap`` for the full space, otherwise a ``Shard``.
    The result does not depend on ``workers`` or ``shard_size``.
    """
    spec.check_runnable()
    start, end = range if range is not None else (0, spec.size)
    _check_range(spec, start, end)
    t0 = time.perf_counter()
    units = _units(start, end, shard_size)
    if workers > 1 and len(units) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_range, [spec] * len(units), *zip(*units)))
    else:
        parts = [_run_range(spec, lo, hi) for lo, hi in units]
    entries = np.concatenate(parts) if parts else np.empty(0, dtype=np.uint64)
    dt = time.perf_counter() - t0
    if dt > 0:
        log.info("swept %d programs in %.3fs (%.0f programs/s)", end - start, dt, (end - start) / dt)
    if (start, end) == (0, spec.size):
        return OutputMap(spec, entries)
    return Shard(spec, start, end, entries)


def merge_shards(shards) -> OutputMap:
    shards = sorted(shards, key=lambda s: (s.start, s.end))
    if not shards:
        raise MergeError("no shards to merge")
    spec = shards[0].spec
    key = shards[0].key
    pos, prev = 0, None
    for s in shards:
        if s.key != key:
            raise MergeError(f"shard [{s.start}, {s.end}) belongs to a different machine")
        if s.start > pos:
            raise MergeError(f"gap: range [{pos}, {s.start}) is not covered")
        if s.start < pos:
            raise MergeError(
                f"overlap: shard [{s.start}, {s.end}) overlaps shard [{prev.start}, {prev.end})"
            )
        pos, prev = s.end, s
    if pos != spec.size:
        raise MergeError(f"gap: range [{pos}, {spec.size}) is not covered")
    return OutputMap(spec, np.concatenate([s.entries for s in shards]))


def shard_path(out_dir, start, end) -> Path:
    return Path(out_dir) / "shards" / f"shard_{start:012d}_{end:012d}.napmap"


def load_shard(path) -> Shard:
    spec, start, end, entries = mapfile.read(path)
    return Shard(spec, start, end, entries)


def save_shard(shard: Shard, path):
    mapfile.write(path, shard.spec, shard.start, shard.end, shard.entries)


def _shard_job(spec, lo, hi, path):
    save_shard(Shard(spec, lo, hi, _run_range(spec, lo, hi)), path)
    return path


def sweep_to_dir(spec: MachineSpec, out_dir, range=None, workers=1,
                 shard_size=DEFAULT_SHARD_SIZE) -> list[Path]:
    """Write one shard file per work unit; units already on disk are skipped."""
    spec.check_runnable()
    start, end = range if range is not None else (0, spec.size)
    _check_range(spec, start, end)
    shard_path(out_dir, 0, 0).parent.mkdir(parents=True, exist_ok=True)
    paths, todo = [], []
    for lo, hi in _units(start, end, shard_size):
        p = shard_path(out_dir, lo, hi)
        paths.append(p)
        if p.exists():
            try:
                s = load_shard(p)
                if s.key == mapfile.spec_key(spec) and (s.start, s.end) == (lo, hi):
                    continue
            except MapFileError:
                pass
            log.warning("recomputing unusable shard %s", p)
        todo.append((lo, hi, p))
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            list(pool.map(_shard_job, [spec] * len(todo), *zip(*todo)))
    else:
        for lo, hi, p in todo:
            _shard_job(spec, lo, hi, p)
    return paths


def merge_dir(out_dir) -> OutputMap:
    paths = sorted((Path(out_dir) / "shards").glob("shard_*.napmap"))
    return merge_shards(load_shard(p) for p in paths)


def save_map(omap: OutputMap, path):
    mapfile.write(path, omap.spec, 0, omap.size, omap.entries)


def load_map(path) -> OutputMap:
    spec, start, end, entries = mapfile.read(path)
    if (start, end) != (0, spec.size):
        raise MapFileError(f"{path} holds a partial range [{start}, {end})")
    return OutputMap(spec, entries)


def ctm(omap: OutputMap) -> LevelDistribution:
    """Level-1 weighted distribution: how many programs output each string."""
    values, counts = np.unique(omap.entries, return_counts=True)
    return LevelDistribution(1, "weighted", {int(v): int(c) for v, c in zip(values, counts)}, omap.spec.l)
