from fractions import Fraction

import numpy as np
import pytest

from quinelab import mapfile
from quinelab.enumerator import (
    OutputMap, Shard, ctm, load_map, load_shard, merge_dir, merge_shards,
    save_map, save_shard, sweep, sweep_to_dir,
)
from quinelab.errors import MapFileError, MergeError, QuinelabError
from quinelab.machine import ConventionSet, MachineSpec, run

LEVEL1_TABLE = {
    0: 1886, 2048: 1147, 4095: 640, 3072: 110, 1365: 64, 2047: 64, 2730: 64,
    1024: 41, 3840: 17, 128: 11, 3968: 11, 1344: 10, 3584: 10, 4032: 10,
    1792: 2, 1920: 2, 2560: 2, 2688: 2, 192: 1, 1728: 1, 2944: 1,
}


def test_full_sweep(map12):
    assert len(map12.entries) == 4096
    assert len(np.unique(map12.entries)) == 21
    assert map12[0] == 0 and map12[4095] == 4095


def test_sweep_matches_scalar_run(spec, map12):
    assert map12.entries.tolist() == [run(u, spec) for u in range(4096)]


def test_output_map_is_immutable(map12):
    with pytest.raises(ValueError):
        map12.entries[0] = 1


def test_halves_merge_to_full_sweep(spec, map12):
    a = sweep(spec, (0, 2048))
    b = sweep(spec, (2048, 4096))
    assert isinstance(a, Shard)
    merged = merge_shards([b, a])
    assert merged.to_bytes() == map12.to_bytes()


def test_singleton_shards(spec, map12):
    shards = [Shard(spec, i, i + 1, map12.entries[i:i + 1]) for i in range(4096)]
    assert merge_shards(shards).to_bytes() == map12.to_bytes()


@pytest.mark.parametrize("workers,shard_size", [(1, 100), (2, 512), (3, 4096)])
def test_split_does_not_change_result(spec, map12, workers, shard_size):
    assert sweep(spec, workers=workers, shard_size=shard_size).to_bytes() == map12.to_bytes()


def test_merge_overlap(spec):
    with pytest.raises(MergeError, match="overlap"):
        merge_shards([sweep(spec, (0, 2100)), sweep(spec, (2048, 4096))])


def test_merge_gap(spec):
    with pytest.raises(MergeError, match=r"gap: range \[2000, 2048\)"):
        merge_shards([sweep(spec, (0, 2000)), sweep(spec, (2048, 4096))])
    with pytest.raises(MergeError, match="gap"):
        merge_shards([sweep(spec, (0, 2000))])


def test_merge_spec_mismatch(spec):
    other = spec.with_conventions(ConventionSet(boundary="wrap"))
    with pytest.raises(MergeError, match="different machine"):
        merge_shards([sweep(spec, (0, 2048)), sweep(other, (2048, 4096))])


def test_range_out_of_bounds(spec):
    with pytest.raises(QuinelabError):
        sweep(spec, (0, 4097))
    with pytest.raises(QuinelabError):
        sweep(spec, (10, 5))


def test_ctm_matches_published_table(map12):
    dist = ctm(map12)
    assert dist.counts == LEVEL1_TABLE
    assert dist.total == 4096
    assert (dist.level, dist.mode) == (1, "weighted")


def test_ctm_probabilities_sum_to_one(map12):
    dist = ctm(map12)
    assert sum(dist.probability(x) for x in dist.counts) == 1
    assert dist.probability(0) == Fraction(1886, 4096)


def test_ctm_identity_toy():
    dist = ctm(OutputMap.from_function(5, lambda p: p))
    assert dist.counts == {p: 1 for p in range(32)}


def test_map_file_round_trip(tmp_path, map12):
    path = tmp_path / "m.napmap"
    save_map(map12, path)
    data = path.read_bytes()
    assert data[:8] == b"NAPMAP1\0"
    assert len(data) == mapfile.HEADER.size + 8 * 4096
    assert data == map12.to_bytes()
    again = load_map(path)
    assert again.spec == map12.spec
    assert again.to_bytes() == data


def test_map_file_header_layout(spec):
    h = mapfile.pack_header(spec, 16, 32)
    assert len(h) == 52
    assert int.from_bytes(h[8:12], "little") == 1
    assert [int.from_bytes(h[i:i + 4], "little") for i in (12, 16, 20, 24)] == [2, 2, 12, 12]
    assert h[28] == spec.conventions.to_flags() and h[29:32] == b"\0\0\0"
    assert int.from_bytes(h[32:36], "little") == 12
    assert int.from_bytes(h[36:44], "little") == 16
    assert int.from_bytes(h[44:52], "little") == 32


def test_map_file_rejects_garbage(tmp_path, spec):
    bad = tmp_path / "bad.napmap"
    bad.write_bytes(b"NOTAMAP!" + bytes(60))
    with pytest.raises(MapFileError, match="magic"):
        load_map(bad)
    trunc = tmp_path / "trunc.napmap"
    save_shard(sweep(spec, (0, 64)), trunc)
    trunc.write_bytes(trunc.read_bytes()[:-8])
    with pytest.raises(MapFileError, match="expected 64 entries"):
        load_shard(trunc)


def test_partial_file_is_not_a_map(tmp_path, spec):
    p = tmp_path / "part.napmap"
    save_shard(sweep(spec, (0, 64)), p)
    with pytest.raises(MapFileError):
        load_map(p)


def test_sweep_to_dir_resumes(tmp_path, spec, map12):
    paths = sweep_to_dir(spec, tmp_path, (0, 2048), shard_size=1024)
    assert len(paths) == 2
    stamp = paths[0].stat().st_mtime_ns
    sweep_to_dir(spec, tmp_path, (2048, 4096), shard_size=1024, workers=2)
    sweep_to_dir(spec, tmp_path, (0, 2048), shard_size=1024)
    assert paths[0].stat().st_mtime_ns == stamp
    assert merge_dir(tmp_path).to_bytes() == map12.to_bytes()


def test_sweep_to_dir_replaces_corrupt_shard(tmp_path, spec, map12):
    paths = sweep_to_dir(spec, tmp_path, shard_size=2048)
    paths[1].write_bytes(b"junk")
    sweep_to_dir(spec, tmp_path, shard_size=2048)
    assert merge_dir(tmp_path).to_bytes() == map12.to_bytes()


def test_four_state_shard_matches_scalar(spec4):
    shard = sweep(spec4, (2**31, 2**31 + 500))
    assert shard.entries.tolist() == [run(u, spec4) for u in range(2**31, 2**31 + 500)]
    assert int(shard.entries.max()) < 2**32
