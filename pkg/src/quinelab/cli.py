"""Command-line front end.

Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from . import calibration, dynamics, export, mapfile
from .config import MAP_FILE, RunConfig, resolve_conventions
from .enumerator import load_map, merge_dir, save_map, sweep, sweep_to_dir
from .errors import CalibrationError, ConfigError, QuinelabError
from .report import render, write_artifacts

log = logging.getLogger("quinelab")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _config_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("machine and run configuration (override --config)")
    g.add_argument("--config", help="key = value configuration file")
    for key in RunConfig.KEYS:
        flags = [f"--{key}"]
        if "_" in key:
            flags.append(f"--{key.replace('_', '-')}")
        g.add_argument(*flags, dest=key, default=None, metavar=key.upper())
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _config_flags()
    parser = _Parser(prog="quinelab", description="Rule-space laboratory for fixed-length Turing machine programs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", parents=[common], help="sweep programs into shard files")
    p.add_argument("--range", dest="prange", metavar="START:END", help="half-open program range")
    p.add_argument("--merge", action="store_true", help="merge all shards into the output map afterwards")

    sub.add_parser("merge", parents=[common], help="merge shard files into the output map")

    p = sub.add_parser("calibrate", parents=[common], help="recover conventions from a reference table")
    p.add_argument("--reference", help="CSV program,count or table,program,count (default: shipped tables)")

    p = sub.add_parser("nest", parents=[common], help="nested distribution after W levels")
    p.add_argument("--levels", type=int, required=True)
    p.add_argument("--mode", choices=(dynamics.WEIGHTED, dynamics.SUPPORT_UNIFORM), default=dynamics.WEIGHTED)

    p = sub.add_parser("attractors", parents=[common], help="cycles, basins, Q and M")
    p.add_argument("--levels", type=int, default=None)

    p = sub.add_parser("export", parents=[common], help="write CSV or DOT exports")
    p.add_argument("--format", choices=("csv", "dot"), required=True)
    p.add_argument("--level", type=int, default=1)
    p.add_argument("--mode", choices=(dynamics.WEIGHTED, dynamics.SUPPORT_UNIFORM), default=dynamics.WEIGHTED)
    p.add_argument("--basins", action="store_true", help="CSV of attractor basins instead of a level")
    p.add_argument("--output", help="file path, or - for stdout")

    p = sub.add_parser("report", parents=[common], help="per-level tables, basins, Q and M, with figures")
    p.add_argument("--levels", type=int, default=None)
    p.add_argument("--no-figures", action="store_true")
    return parser


def _parse_range(text):
    try:
        a, b = (int(s) for s in text.split(":"))
    except ValueError:
        raise ConfigError(f"range must be START:END, got {text!r}") from None
    return a, b


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    cfg.update({k: getattr(args, k) for k in RunConfig.KEYS})
    return cfg


def _output_map(cfg, spec):
    path = cfg.out_path / MAP_FILE
    if path.exists():
        omap = load_map(path)
        if mapfile.spec_key(omap.spec) == mapfile.spec_key(spec):
            log.info("using %s", path)
            return omap
        log.warning("%s was built for a different machine; re-enumerating in memory", path)
    return sweep(spec, workers=cfg.workers, shard_size=cfg.shard_size)


def _cmd_enumerate(args, cfg, spec):
    rng = _parse_range(args.prange) if args.prange else None
    t0 = time.perf_counter()
    paths = sweep_to_dir(spec, cfg.out_path, rng, workers=cfg.workers, shard_size=cfg.shard_size)
    dt = time.perf_counter() - t0
    start, end = rng or (0, spec.size)
    rate = (end - start) / dt if dt > 0 else float("inf")
    print(f"{len(paths)} shard(s) for [{start}, {end}) in {cfg.out_path / 'shards'} ({rate:.0f} programs/s)")
    if args.merge or rng is None:
        _cmd_merge(args, cfg, spec)
    return 0


def _cmd_merge(args, cfg, spec):
    omap = merge_dir(cfg.out_path)
    path = cfg.out_path / MAP_FILE
    save_map(omap, path)
    print(f"merged {omap.size} entries into {path}")
    return 0


def _cmd_calibrate(args, cfg, spec):
    ref = calibration.ReferenceTable.load(args.reference) if args.reference else calibration.published_reference()
    conv = calibration.calibrate(ref, spec)
    path = cfg.out_path / "conventions.txt"
    calibration.save_conventions(conv, path)
    print(conv.describe())
    print(f"flags={conv.to_flags():#04x} written to {path}")
    return 0


def _write(text, target):
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", newline="") as f:
            f.write(text)
        print(f"wrote {target}")


def _cmd_nest(args, cfg, spec):
    if args.levels < 0:
        raise ConfigError("--levels must be >= 0")
    dist = dynamics.nested(_output_map(cfg, spec), args.levels, args.mode)
    print(f"# level {dist.level} {dist.mode}: {len(dist.counts)} strings, mass {dist.total}")
    sys.stdout.write(export.csv_text(dist))
    return 0


def _cmd_attractors(args, cfg, spec):
    rep = dynamics.attractor_report(_output_map(cfg, spec), args.levels)
    for c in rep.cycles:
        kind = "quine" if len(c) == 1 else f"relay/{len(c)}"
        print(f"{kind:10s} " + " -> ".join(f"P{a}" for a in c) + f"  basin={sum(rep.basins[a] for a in c)}")
    print("image sizes: " + " -> ".join(str(s) for s in rep.level_chain.image_sizes))
    print(f"Q={rep.Q}, M={rep.M}")
    return 0


def _cmd_export(args, cfg, spec):
    omap = _output_map(cfg, spec)
    if args.format == "dot":
        if args.level < 1:
            raise ConfigError("--level must be >= 1 for graph export")
        text = export.dot_text(omap, args.level)
        default = cfg.out_path / f"level{args.level}.dot"
    elif args.basins:
        text = export.csv_text(dynamics.attractor_report(omap))
        default = cfg.out_path / "basins.csv"
    else:
        if args.level < 0:
            raise ConfigError("--level must be >= 0")
        text = export.csv_text(dynamics.nested(omap, args.level, args.mode))
        default = cfg.out_path / f"level{args.level}_{args.mode}.csv"
    _write(text, args.output or str(default))
    return 0


def _cmd_report(args, cfg, spec):
    omap = _output_map(cfg, spec)
    rep = dynamics.attractor_report(omap, args.levels)
    sys.stdout.write(render(rep))
    out = cfg.out_path / "report"
    written = write_artifacts(rep, omap, out, figures=not args.no_figures)
    print(f"wrote {len(written)} files to {out}")
    return 0


COMMANDS = {
    "enumerate": _cmd_enumerate,
    "merge": _cmd_merge,
    "calibrate": _cmd_calibrate,
    "nest": _cmd_nest,
    "attractors": _cmd_attractors,
    "export": _cmd_export,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        print(e, file=sys.stderr)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load_config(args)
        if args.command == "calibrate":
            calibrated = None
        else:
            calibrated = resolve_conventions(cfg, persist=args.command == "enumerate")
        spec = cfg.machine(calibrated)
        return COMMANDS[args.command](args, cfg, spec)
    except ConfigError as e:
        print(f"quinelab: usage error: {e}", file=sys.stderr)
        return 2
    except CalibrationError as e:
        print(f"quinelab: calibration failed: {e}", file=sys.stderr)
        return 1
    except (QuinelabError, OSError) as e:
        print(f"quinelab: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
