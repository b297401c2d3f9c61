"""Meta-level iteration of the output map: nested distributions, cycles, basins.

Level ``w`` counts, for every string ``x``, the programs ``p`` with
``f^w(p) == x``. Strings lying on a cycle of ``f`` are the attractors
(period 1: quines, longer: quine-relays); everything else drains into them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .enumerator import LevelDistribution, OutputMap

WEIGHTED = "weighted"
SUPPORT_UNIFORM = "support-uniform"


def uniform(omap: OutputMap, mode: str = WEIGHTED) -> LevelDistribution:
    """Level 0: every program once."""
    return LevelDistribution(0, mode, {p: 1 for p in range(omap.size)}, omap.spec.l)


def push_forward(dist: LevelDistribution, omap: OutputMap) -> LevelDistribution:
    xs = np.fromiter(dist.counts.keys(), dtype=np.uint64, count=len(dist.counts))
    if dist.mode == SUPPORT_UNIFORM:
        cs = np.ones(len(xs), dtype=np.int64)
    else:
        cs = np.fromiter(dist.counts.values(), dtype=np.int64, count=len(dist.counts))
    ys = omap.entries[xs.astype(np.int64)] if len(xs) else xs
    targets, inverse = np.unique(ys, return_inverse=True)
    mass = np.zeros(len(targets), dtype=np.int64)
    np.add.at(mass, inverse, cs)
    counts = {int(y): int(c) for y, c in zip(targets, mass)}
    return LevelDistribution(dist.level + 1, dist.mode, counts, dist.l)


def nested(omap: OutputMap, w: int, mode: str = WEIGHTED) -> LevelDistribution:
    """Distribution after ``w`` meta-levels, starting uniform over all programs."""
    if w < 0:
        raise ValueError("level must be >= 0")
    dist = uniform(omap, mode)
    for _ in range(w):
        dist = push_forward(dist, omap)
    return dist


def image_sizes(omap: OutputMap, levels: int) -> list[int]:
    """``|image(f^w)|`` for ``w = 0..levels``."""
    img = np.arange(omap.size, dtype=np.uint64)
    sizes = [len(img)]
    for _ in range(levels):
        img = np.unique(omap.entries[img.astype(np.int64)])
        sizes.append(len(img))
    return sizes


def find_cycles(omap: OutputMap) -> list[tuple[int, ...]]:
    """All cycles of ``f``, each rotated to start at its smallest element, sorted."""
    f = omap.entries.tolist()
    color = [0] * len(f)  # 0 unseen, 1 on current path, 2 done
    cycles = []
    for s in range(len(f)):
        if color[s]:
            continue
        path = []
        x = s
        while not color[x]:
            color[x] = 1
            path.append(x)
            x = f[x]
        if color[x] == 1:
            cyc = path[path.index(x):]
            i = cyc.index(min(cyc))
            cycles.append(tuple(cyc[i:] + cyc[:i]))
        for y in path:
            color[y] = 2
    return sorted(cycles)


def convergence_level(omap: OutputMap) -> int:
    """Smallest ``w`` with ``image(f^w) == image(f^(w+1))``."""
    img = np.arange(omap.size, dtype=np.uint64)
    w = 0
    while True:
        nxt = np.unique(omap.entries[img.astype(np.int64)])
        if len(nxt) == len(img) and np.array_equal(nxt, img):
            return w
        img = nxt
        w += 1


def basin_sizes(omap: OutputMap, cycles=None) -> dict[int, int]:
    """Programs per attractor, credited to the first cycle node each trajectory hits."""
    f = omap.entries.tolist()
    if cycles is None:
        cycles = find_cycles(omap)
    entry = [-1] * len(f)
    for cyc in cycles:
        for a in cyc:
            entry[a] = a
    for s in range(len(f)):
        path = []
        x = s
        while entry[x] < 0:
            path.append(x)
            x = f[x]
        for y in path:
            entry[y] = entry[x]
    basins = {a: 0 for cyc in cycles for a in cyc}
    for a in entry:
        basins[a] += 1
    return basins


@dataclass
class LevelChain:
    """Per-level distributions in both modes plus the image-size chains.

    ``b_chain[w-1] = |image(f^(w-1))|`` is the pool of programs entering level
    ``w`` and ``a_chain[w-1] = |image(f^w)|`` the strings surviving it, so
    ``a <= b`` level by level.
    """

    weighted: list[LevelDistribution]
    support_uniform: list[LevelDistribution]
    image_sizes: list[int]

    @property
    def levels(self) -> int:
        return len(self.weighted)

    @property
    def a_chain(self) -> list[int]:
        return self.image_sizes[1:]

    @property
    def b_chain(self) -> list[int]:
        return self.image_sizes[:-1]


def level_chain(omap: OutputMap, levels: int) -> LevelChain:
    weighted, su = [], []
    dw, du = uniform(omap, WEIGHTED), uniform(omap, SUPPORT_UNIFORM)
    for _ in range(levels):
        dw, du = push_forward(dw, omap), push_forward(du, omap)
        weighted.append(dw)
        su.append(du)
    return LevelChain(weighted, su, image_sizes(omap, levels))


@dataclass
class AttractorReport:
    cycles: list[tuple[int, ...]]
    M: int
    basins: dict[int, int]
    level_chain: LevelChain = field(repr=False)

    @property
    def Q(self) -> int:
        return sum(len(c) for c in self.cycles)

    @property
    def quines(self) -> list[int]:
        return [c[0] for c in self.cycles if len(c) == 1]

    @property
    def relays(self) -> list[tuple[int, ...]]:
        return [c for c in self.cycles if len(c) > 1]


def attractor_report(omap: OutputMap, levels: int | None = None) -> AttractorReport:
    """Cycles, Q, M and basins, with the level chain extended to at least ``M + 1``."""
    cycles = find_cycles(omap)
    M = convergence_level(omap)
    levels = max(levels or 0, M + 1)
    return AttractorReport(cycles, M, basin_sizes(omap, cycles), level_chain(omap, levels))
