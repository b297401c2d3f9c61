"""Recover the machine conventions from a published frequency table.

The reference holds the weighted level-1 counts and, optionally, the
support-uniform tables of the following levels. Table 0 alone is invariant
under any relabelling of description numbers (initial state, bit order inside
a rule block), so it cannot single out one convention set by itself; the
follow-up tables can, because they run the survivors as programs.
"""

from __future__ import annotations

import csv
import itertools
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from . import dynamics
from .enumerator import ctm, sweep
from .errors import CalibrationError, QuinelabError
from .machine import BOUNDARIES, ConventionSet, MachineSpec

log = logging.getLogger(__name__)

MAX_CALIBRATION_BITS = 20


@dataclass
class ReferenceTable:
    tables: list[dict[int, int]]

    @property
    def level1(self) -> dict[int, int]:
        return self.tables[0]

    @classmethod
    def load(cls, path) -> "ReferenceTable":
        """CSV ``program,count`` or ``table,program,count`` (table 0 = level 1)."""
        with open(path, newline="") as f:
            return cls._parse(f)

    @classmethod
    def _parse(cls, lines) -> "ReferenceTable":
        rows = csv.reader(lines)
        header = [h.strip() for h in next(rows, [])]
        if header not in (["program", "count"], ["table", "program", "count"]):
            raise QuinelabError(f"reference header must be program,count or table,program,count, got {header}")
        tables: dict[int, dict[int, int]] = {}
        for row in rows:
            if not row or not "".join(row).strip():
                continue
            vals = [int(v) for v in row]
            if len(vals) != len(header):
                raise QuinelabError(f"bad reference row {row}")
            k = vals[0] if len(vals) == 3 else 0
            p, c = vals[-2], vals[-1]
            if p in tables.setdefault(k, {}):
                raise QuinelabError(f"duplicate program {p} in reference table {k}")
            tables[k][p] = c
        if sorted(tables) != list(range(len(tables))) or not tables:
            raise QuinelabError("reference tables must be numbered 0, 1, 2, ... without gaps")
        return cls([tables[k] for k in sorted(tables)])

    def dump(self, path):
        with open(path, "w", newline="") as f:
            f.write("table,program,count\n")
            for k, t in enumerate(self.tables):
                for p, c in sorted(t.items(), key=lambda kv: (-kv[1], kv[0])):
                    f.write(f"{k},{p},{c}\n")


def published_reference() -> ReferenceTable:
    """The shipped 2-state, 2-symbol tables (21 / 3 / 2 entries)."""
    text = resources.files("quinelab.data").joinpath("published_reference.csv").read_text()
    return ReferenceTable._parse(text.splitlines())


def convention_space(m: int = 2) -> list[ConventionSet]:
    return [
        ConventionSet(move_one=mv, boundary=b, initial_state=s, q_msb=q, tape_msb_left=msb)
        for mv, b, s, q, msb in itertools.product(
            ("right", "left"), BOUNDARIES, range(min(m, 2)), (True, False), (True, False)
        )
    ]


def _mismatches(expected: dict, got: dict) -> int:
    return sum(expected.get(k, 0) != got.get(k, 0) for k in expected.keys() | got.keys())


def score(ref: ReferenceTable, spec: MachineSpec) -> int:
    """Number of reference entries the machine gets wrong, over all tables."""
    omap = sweep(spec)
    dist = ctm(omap)
    bad = _mismatches(ref.tables[0], dist.counts)
    for table in ref.tables[1:]:
        dist = dynamics.push_forward(
            dynamics.LevelDistribution(dist.level, dynamics.SUPPORT_UNIFORM, dist.counts, dist.l), omap
        )
        bad += _mismatches(table, dist.counts)
    return bad


class AmbiguousCalibration(CalibrationError):
    def __init__(self, matches):
        self.matches = matches
        lines = "\n".join("  " + c.describe() for c in matches)
        super().__init__(f"{len(matches)} convention sets reproduce the reference:\n{lines}")


class NoCalibration(CalibrationError):
    def __init__(self, scores):
        self.scores = scores
        lines = "\n".join(f"  {bad:4d} mismatched  {c.describe()}" for c, bad in scores)
        super().__init__(f"no convention set reproduces the reference:\n{lines}")


def calibrate(ref: ReferenceTable, base: MachineSpec | None = None) -> ConventionSet:
    """Exhaustive exact-match search over the convention space."""
    base = base or MachineSpec()
    if base.l > MAX_CALIBRATION_BITS:
        raise QuinelabError(f"calibration needs l <= {MAX_CALIBRATION_BITS}, got {base.l}")
    scores = []
    for conv in convention_space(base.m):
        scores.append((conv, score(ref, base.with_conventions(conv))))
    matches = [c for c, bad in scores if bad == 0]
    if not matches:
        raise NoCalibration(scores)
    if len(matches) > 1:
        raise AmbiguousCalibration(matches)
    log.info("calibrated: %s", matches[0].describe())
    return matches[0]


CONVENTION_KEYS = ("move_one", "boundary", "initial_state", "triplet_order", "tape_msb")


def conventions_to_items(conv: ConventionSet) -> dict[str, str]:
    return {
        "move_one": conv.move_one,
        "boundary": conv.boundary,
        "initial_state": str(conv.initial_state),
        "triplet_order": "qmw" if conv.q_msb else "wmq",
        "tape_msb": "left" if conv.tape_msb_left else "right",
    }


def conventions_from_items(items: dict[str, str]) -> ConventionSet:
    try:
        return ConventionSet(
            move_one=items["move_one"],
            boundary=items["boundary"],
            initial_state=int(items["initial_state"]),
            q_msb={"qmw": True, "wmq": False}[items["triplet_order"]],
            tape_msb_left={"left": True, "right": False}[items["tape_msb"]],
        )
    except (KeyError, ValueError) as e:
        raise QuinelabError(f"incomplete or invalid convention set: {e}") from None


def save_conventions(conv: ConventionSet, path):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        f.write(f"# calibrated convention set, flags={conv.to_flags():#04x}\n")
        for k, v in conventions_to_items(conv).items():
            f.write(f"{k} = {v}\n")


def load_conventions(path) -> ConventionSet:
    from .config import parse_kv

    return conventions_from_items(parse_kv(Path(path).read_text(), allowed=CONVENTION_KEYS))
