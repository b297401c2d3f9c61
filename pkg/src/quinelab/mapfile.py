"""Binary output-map / shard files.

Little-endian layout::

    magic    8s   b"NAPMAP1\\0"
    version  u32
    m n z t  4 x u32
    flags    u8   ConventionSet.to_flags()
    reserved 3 x u8 (zero)
    l        u32
    start    u64
    end      u64
    entries  (end - start) x u64
"""

import struct
from pathlib import Path

import numpy as np

from .errors import MapFileError
from .machine import ConventionSet, MachineSpec

MAGIC = b"NAPMAP1\0"
VERSION = 1
HEADER = struct.Struct("<8sI4IB3xIQQ")


def spec_key(spec: MachineSpec) -> tuple:
    """Hashable identity of a machine as stamped into every file."""
    return (spec.m, spec.n, spec.z, spec.t, spec.conventions.to_flags(), spec.l)


def pack_header(spec: MachineSpec, start: int, end: int) -> bytes:
    return HEADER.pack(
        MAGIC, VERSION, spec.m, spec.n, spec.z, spec.t,
        spec.conventions.to_flags(), spec.l, start, end,
    )


def write(path, spec: MachineSpec, start: int, end: int, entries: np.ndarray):
    entries = np.ascontiguousarray(entries, dtype="<u8")
    if len(entries) != end - start:
        raise MapFileError("entry count does not match range")
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as f:
        f.write(pack_header(spec, start, end))
        f.write(entries.tobytes())
    tmp.replace(path)


def read_header(buf: bytes):
    if len(buf) < HEADER.size:
        raise MapFileError("truncated header")
    magic, version, m, n, z, t, flags, l, start, end = HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise MapFileError(f"bad magic {magic!r}")
    if version != VERSION:
        raise MapFileError(f"unsupported format version {version}")
    spec = MachineSpec(m=m, n=n, z=z, t=t, conventions=ConventionSet.from_flags(flags))
    if spec.l != l:
        raise MapFileError(f"stored l={l} inconsistent with m={m}, n={n}")
    return spec, start, end


def read(path):
    """Return ``(spec, start, end, entries)``; entries is a native uint64 array."""
    buf = Path(path).read_bytes()
    spec, start, end = read_header(buf)
    body = buf[HEADER.size:]
    if len(body) != 8 * (end - start):
        raise MapFileError(f"{path}: expected {end - start} entries, found {len(body) // 8}")
    entries = np.frombuffer(body, dtype="<u8").astype(np.uint64)
    return spec, start, end, entries
