"""Exit criteria. Each test appends one PASS/FAIL line to the terminal summary."""

import os
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from quinelab.calibration import calibrate, published_reference
from quinelab.dynamics import (
    SUPPORT_UNIFORM, attractor_report, basin_sizes, convergence_level, find_cycles,
    image_sizes, nested, push_forward, uniform,
)
from quinelab.enumerator import LevelDistribution, OutputMap, ctm, load_shard, sweep, sweep_to_dir
from quinelab.export import csv_text, dot_text
from quinelab.machine import CALIBRATED_CONVENTIONS, MachineSpec, decode_program, encode_table, run, run_many
from quinelab.reference import reference_run

LEVEL1_TABLE = {
    0: 1886, 2048: 1147, 4095: 640, 3072: 110, 1365: 64, 2047: 64, 2730: 64,
    1024: 41, 3840: 17, 128: 11, 3968: 11, 1344: 10, 3584: 10, 4032: 10,
    1792: 2, 1920: 2, 2560: 2, 2688: 2, 192: 1, 1728: 1, 2944: 1,
}


def check(n, title, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {n}. {title}" + (f" ({detail})" if detail else ""))
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


@pytest.fixture(scope="module")
def machine():
    conv = calibrate(published_reference(), MachineSpec())
    return MachineSpec(m=2, n=2, z=12, t=12, conventions=conv)


def test_1_level1_table(machine):
    t0 = time.perf_counter()
    omap = sweep(machine)
    dt = time.perf_counter() - t0
    dist = ctm(omap)
    ok = dist.counts == LEVEL1_TABLE and len(dist.counts) == 21 and dist.total == 4096 and dt < 1.0
    check(1, "weighted level-1 table, 21 exact counts", ok, f"support={len(dist.counts)}, sweep {dt * 1000:.1f} ms")


def test_2_support_uniform_tables(machine):
    omap = sweep(machine)
    d21 = LevelDistribution(1, SUPPORT_UNIFORM, {p: 1 for p in LEVEL1_TABLE}, 12)
    d3 = push_forward(d21, omap)
    d2 = push_forward(d3, omap)
    ok = d3.counts == {0: 16, 4095: 3, 2048: 2} and d2.counts == {0: 2, 4095: 1}
    check(2, "support-uniform tables {P0:16,P4095:3,P2048:2} and {P0:2,P4095:1}", ok, f"{d3.counts} / {d2.counts}")


def test_3_cumulative_basins(machine):
    omap = sweep(machine)
    d = ctm(omap)
    d2 = push_forward(d, omap)
    final = nested(omap, convergence_level(omap))
    ok = (
        d2.counts[4095] == 640 + 64 + 10 == 714
        and final.counts == {0: 3382, 4095: 714}
        and basin_sizes(omap) == {0: 3382, 4095: 714}
    )
    check(3, "cumulative basins {P0:3382, P4095:714}", ok, f"level-2 P4095={d2.counts[4095]}, final={final.counts}")


def test_4_attractor_metrics(machine):
    omap = sweep(machine)
    rep = attractor_report(omap)
    # brute force: iterate the image set with the scalar interpreter until it stops changing
    img, M = set(range(4096)), 0
    while (nxt := {run(x, machine) for x in img}) != img:
        img, M = nxt, M + 1
    ok = rep.Q == 2 and rep.cycles == [(0,), (4095,)] and rep.M == 3 == M and img == {0, 4095}
    check(4, "Q=2, cycles {(0),(4095)}, M=3", ok, f"Q={rep.Q} M={rep.M} brute-force M={M}")


def test_5_oracle_equivalence(machine):
    t0 = time.perf_counter()
    us = np.arange(4096)
    ref12 = [reference_run(int(u), machine) for u in us]
    ok12 = run_many(us, machine).tolist() == ref12 == [run(int(u), machine) for u in us]
    spec4 = MachineSpec(m=4, n=2, conventions=machine.conventions)
    sample = np.random.default_rng(20201118).integers(0, 2**32, 10_000, dtype=np.uint64)
    ref32 = [reference_run(int(u), spec4) for u in sample]
    ok32 = run_many(sample, spec4).tolist() == ref32 == [run(int(u), spec4) for u in sample]
    dt = time.perf_counter() - t0
    check(5, "fast interpreters == naive reference (4096 at l=12, 10000 at l=32)", ok12 and ok32 and dt < 30,
          f"{dt:.1f} s")


def test_6_property_suite():
    spec = MachineSpec()
    bij = all(encode_table(decode_program(u, spec), spec) == u for u in range(4096))
    rng = np.random.default_rng(6)
    props = True
    for i in range(100):
        l = int(rng.integers(1, 9))
        f = rng.integers(0, 1 << l, 1 << l).tolist()
        om = OutputMap.from_function(l, f.__getitem__)
        d = uniform(om)
        for w in range(1, 5):
            d = push_forward(d, om)
            direct = {}
            for p in range(len(f)):
                x = p
                for _ in range(w):
                    x = f[x]
                direct[x] = direct.get(x, 0) + 1
            props &= d.total == len(f) and d.counts == direct
        M = convergence_level(om)
        sizes = image_sizes(om, M + 2)
        props &= all(b >= a for a, b in zip(sizes[1:], sizes)) and sizes[M] == sizes[M + 2]
        props &= sum(basin_sizes(om).values()) == len(f)
        props &= set(nested(om, M).counts) == {a for c in find_cycles(om) for a in c}
    check(6, "bijection, mass conservation, image monotonicity, basin partition, nested==direct", bij and props)


def test_7_scaling_smoke(tmp_path):
    spec4 = MachineSpec(m=4, n=2, z=32, t=32, conventions=CALIBRATED_CONVENTIONS)
    n = 1 << 20
    t0 = time.perf_counter()
    serial = sweep(spec4, (0, n), workers=1)
    serial_rate = n / (time.perf_counter() - t0)

    workers = 4
    t0 = time.perf_counter()
    paths = sweep_to_dir(spec4, tmp_path / "par", (0, n), workers=workers, shard_size=1 << 18)
    par_dt = time.perf_counter() - t0
    cores = min(workers, os.cpu_count() or 1)
    par_rate = n / par_dt / cores
    merged = np.concatenate([load_shard(p).entries for p in paths])
    serial_paths = sweep_to_dir(spec4, tmp_path / "ser", (0, n), workers=1, shard_size=1 << 18)
    same_files = [p.read_bytes() for p in paths] == [p.read_bytes() for p in serial_paths]
    ok = (
        len(paths) == 4
        and merged.astype("<u8").tobytes() == serial.entries.astype("<u8").tobytes()
        and same_files
        and serial_rate >= 1e5
        and par_rate >= 1e5
    )
    check(7, "2^20-program l=32 shard, 4 workers, deterministic merge, >= 1e5 programs/s/core", ok,
          f"serial {serial_rate:.0f}/s, parallel {par_rate:.0f}/s/core on {cores} core(s)")


def test_8_determinism_across_workers(machine):
    outputs = []
    for workers in (1, 2, 8):
        omap = sweep(machine, workers=workers, shard_size=256)
        rep = attractor_report(omap)
        blob = [csv_text(d) for d in rep.level_chain.weighted + rep.level_chain.support_uniform]
        blob += [csv_text(rep)] + [dot_text(omap, w) for w in range(1, rep.M + 2)]
        outputs.append("".join(blob).encode())
    ok = outputs[0] == outputs[1] == outputs[2]
    check(8, "CSV and DOT exports byte-identical for 1, 2, 8 workers", ok, f"{len(outputs[0])} bytes each")
