"""Byte-deterministic CSV and DOT exporters."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .dynamics import AttractorReport, convergence_level, find_cycles
from .enumerator import LevelDistribution, OutputMap

CSV_HEADER = "level,mode,program,count"


def csv_text(obj) -> str:
    if isinstance(obj, AttractorReport):
        level, mode = obj.M, "basin"
        rows = sorted(obj.basins.items(), key=lambda kv: (-kv[1], kv[0]))
    elif isinstance(obj, LevelDistribution):
        level, mode = obj.level, obj.mode
        rows = obj.ranked()
    else:
        raise TypeError(f"cannot export {type(obj).__name__} as CSV")
    lines = [CSV_HEADER] + [f"{level},{mode},{p},{c}" for p, c in rows]
    return "\n".join(lines) + "\n"


def export_csv(obj, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as f:
        f.write(csv_text(obj))
    return path


def dot_text(omap: OutputMap, level: int, cycles=None) -> str:
    """Graph of ``p -> f(p)`` over the strings alive at ``level``.

    Level 1 draws every program; level ``w`` draws ``image(f^(w-1))``. Levels
    past ``M + 1`` all show the same attractor-only graph.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    level = min(level, convergence_level(omap) + 1)
    if cycles is None:
        cycles = find_cycles(omap)
    attractors = {a for c in cycles for a in c}
    nodes = np.arange(omap.size, dtype=np.uint64)
    for _ in range(level - 1):
        nodes = np.unique(omap.entries[nodes.astype(np.int64)])
    nodes = nodes.tolist()
    f = omap.entries
    out = [f'digraph "level{level}" {{', "\trankdir=LR;", "\tnode [shape=ellipse];"]
    for p in nodes:
        shape = ' shape=doublecircle' if p in attractors else ""
        out.append(f'\tP{p} [label="P{p}"{shape}];')
    for p in nodes:
        out.append(f"\tP{p} -> P{int(f[p])};")
    out.append("}")
    return "\n".join(out) + "\n"


def export_dot(omap: OutputMap, level: int, path, cycles=None) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as f:
        f.write(dot_text(omap, level, cycles))
    return path
