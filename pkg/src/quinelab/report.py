"""Human-readable reproduction of the per-level tables, plus report artifacts."""

from __future__ import annotations

from pathlib import Path

from . import export, plotting
from .dynamics import AttractorReport


def _columns(items, width=2):
    cells = [f"P{p:<8d}: {c}" for p, c in items]
    rows = []
    for i in range(0, len(cells), width):
        rows.append("    " + "".join(c.ljust(20) for c in cells[i:i + width]).rstrip())
    return rows


def render(rep: AttractorReport) -> str:
    """Per-level tables (display levels count down to 0), cumulative basins, Q and M.

    Display level ``M + 1 - w`` for meta-level ``w``.
    """
    top = rep.M + 1
    lines = []
    for d in rep.level_chain.support_uniform[:top]:
        lines.append(f"Level {top - d.level}  (w={d.level}, {len(d.counts)} strings, mass {d.total})")
        lines += _columns(d.ranked())
        lines.append("")
    lines.append("Cumulative (weighted) mass per level")
    for d in rep.level_chain.weighted[:top]:
        lines.append(f"  w={d.level}: " + ", ".join(f"P{p}={c}" for p, c in d.ranked()))
    lines.append("")
    lines.append("Basins")
    lines += _columns(sorted(rep.basins.items(), key=lambda kv: (-kv[1], kv[0])))
    lines.append("")
    lines.append("Image sizes: " + " -> ".join(str(s) for s in rep.level_chain.image_sizes))
    cyc = ", ".join("(" + " ".join(str(a) for a in c) + ")" for c in rep.cycles)
    lines.append(f"Cycles: {cyc}")
    lines.append(f"Q={rep.Q}, M={rep.M}")
    return "\n".join(lines) + "\n"


def write_artifacts(rep: AttractorReport, omap, out_dir, figures: bool = True) -> list[Path]:
    """CSV per level and mode, basins CSV, DOT per level, and PNG figures."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "report.txt"]
    (out / "report.txt").write_text(render(rep))
    chain = rep.level_chain
    for d in chain.weighted + chain.support_uniform:
        tag = "weighted" if d.mode == "weighted" else "uniform"
        written.append(export.export_csv(d, out / f"level{d.level}_{tag}.csv"))
    written.append(export.export_csv(rep, out / "basins.csv"))
    for w in range(1, rep.M + 2):
        written.append(export.export_dot(omap, w, out / f"level{w}.dot", rep.cycles))
    if figures:
        written.append(plotting.level_tables(chain, out / "levels.png"))
        written.append(plotting.image_chain(chain, rep.M, out / "image_chain.png"))
        written.append(plotting.basins(rep, out / "basins.png"))
    return written
