"""Exhaustive rule-space laboratory for fixed-length Turing machine programs.

Enumerate every description number of a small halt-free machine, build the
program -> output map, iterate it across meta-levels, and report the
self-replicating attractors (quines and quine-relays) it converges to.
"""

from .machine import (
    CALIBRATED_CONVENTIONS,
    ConventionSet,
    MachineSpec,
    MachineState,
    Rule,
    TransitionTable,
    decode_program,
    encode_table,
    run,
    run_many,
    step,
)
from .reference import reference_run
from .enumerator import LevelDistribution, OutputMap, Shard, ctm, merge_shards, sweep
from .dynamics import (
    AttractorReport,
    LevelChain,
    attractor_report,
    basin_sizes,
    convergence_level,
    find_cycles,
    nested,
    push_forward,
)
from .calibration import ReferenceTable, calibrate, published_reference

__version__ = "0.1.0"
