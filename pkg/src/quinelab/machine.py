"""Halt-free m-state, n-symbol Turing machine over a finite tape.

A program is a description number ``u`` in ``[0, 2**l)``. Its bits hold one
rule block per (state, symbol) pair, most-significant block first, in
descending (state, symbol) order, i.e. for the 2-state machine::

    [QMW](s=1,r=1) [QMW](s=1,r=0) [QMW](s=0,r=1) [QMW](s=0,r=0)

so the block of rule ``k = s*n + r`` sits at bit offset ``k * rule_bits``.
Every run starts on a blank tape and executes a fixed budget of ``t`` steps;
the final tape, read as an ``l``-bit integer, is again a program.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .errors import QuinelabError, UnsupportedConfiguration

RIGHT = 1
LEFT = -1

BOUNDARIES = ("wrap", "clamp", "halt")


def _is_pow2(x: int) -> bool:
    return x >= 1 and x & (x - 1) == 0


def _lg(x: int) -> int:
    return x.bit_length() - 1


@dataclass(frozen=True)
class ConventionSet:
    """The machine details a description number does not pin down.

    ``boundary`` says what happens when a move would take the head off the
    tape: ``wrap`` re-enters from the other end, ``clamp`` leaves the head
    where it is, ``halt`` freezes the machine for the rest of the budget.
    ``q_msb`` puts the next-state bits at the top of a rule block (textual
    QMW order); otherwise the block reads WMQ from the top. ``tape_msb_left``
    makes the leftmost cell the most significant output bit.
    """

    move_one: str = "right"
    boundary: str = "halt"
    initial_state: int = 1
    q_msb: bool = True
    tape_msb_left: bool = True

    def __post_init__(self):
        if self.move_one not in ("right", "left"):
            raise QuinelabError(f"move_one must be right or left, got {self.move_one!r}")
        if self.boundary not in BOUNDARIES:
            raise QuinelabError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if not 0 <= self.initial_state < 8:
            raise QuinelabError("initial_state must fit in 3 bits")

    def to_flags(self) -> int:
        # bit0 move_one=right, bits1-2 boundary, bit3 q_msb, bit4 tape_msb_left,
        # bits5-7 initial_state
        return (
            (self.move_one == "right")
            | BOUNDARIES.index(self.boundary) << 1
            | int(self.q_msb) << 3
            | int(self.tape_msb_left) << 4
            | self.initial_state << 5
        )

    @classmethod
    def from_flags(cls, flags: int) -> "ConventionSet":
        if not 0 <= flags < 256 or (flags >> 1) & 3 >= len(BOUNDARIES):
            raise QuinelabError(f"invalid convention flags {flags:#04x}")
        return cls(
            move_one="right" if flags & 1 else "left",
            boundary=BOUNDARIES[(flags >> 1) & 3],
            q_msb=bool(flags >> 3 & 1),
            tape_msb_left=bool(flags >> 4 & 1),
            initial_state=flags >> 5,
        )

    def describe(self) -> str:
        return (
            f"move_one={self.move_one} boundary={self.boundary} "
            f"initial_state={self.initial_state} "
            f"triplet_order={'qmw' if self.q_msb else 'wmq'} "
            f"tape_msb={'left' if self.tape_msb_left else 'right'}"
        )


# Unique calibration result against the published 2-state tables; see
# quinelab.calibration and tests/test_calibration.py.
CALIBRATED_CONVENTIONS = ConventionSet()


@dataclass(frozen=True)
class MachineSpec:
    m: int = 2
    n: int = 2
    z: int | None = None
    t: int | None = None
    conventions: ConventionSet = field(default_factory=lambda: CALIBRATED_CONVENTIONS)

    def __post_init__(self):
        if not (_is_pow2(self.m) and self.m >= 2):
            raise QuinelabError(f"state count must be a power of two >= 2, got {self.m}")
        if self.n != 2:
            raise UnsupportedConfiguration(f"only 2 symbols are supported, got {self.n}")
        if self.conventions.initial_state >= self.m:
            raise QuinelabError("initial_state out of range for this machine")
        if self.z is None:
            object.__setattr__(self, "z", self.l)
        if self.t is None:
            object.__setattr__(self, "t", self.l)
        if self.z < 1 or self.t < 0:
            raise QuinelabError("tape length must be >= 1 and step budget >= 0")

    @property
    def rule_bits(self) -> int:
        return _lg(self.m) + 1 + _lg(self.n)

    @property
    def n_rules(self) -> int:
        return self.m * self.n

    @property
    def l(self) -> int:
        return self.n_rules * self.rule_bits

    @property
    def size(self) -> int:
        return 1 << self.l

    def with_conventions(self, conventions: ConventionSet) -> "MachineSpec":
        return replace(self, conventions=conventions)

    def check_runnable(self):
        if self.z != self.l:
            raise UnsupportedConfiguration(
                f"tape length {self.z} != description length {self.l}: "
                "outputs cannot be read back as programs"
            )


class Rule(NamedTuple):
    write: int
    move: int  # RIGHT or LEFT
    next_state: int


@dataclass(frozen=True)
class TransitionTable:
    """Rules indexed by ``state * n + symbol``."""

    m: int
    n: int
    rules: tuple[Rule, ...]

    def __post_init__(self):
        if len(self.rules) != self.m * self.n:
            raise QuinelabError("transition table must have exactly m*n rules")
        for r in self.rules:
            if not (0 <= r.write < self.n and r.move in (LEFT, RIGHT) and 0 <= r.next_state < self.m):
                raise QuinelabError(f"malformed rule {r}")

    def rule(self, state: int, symbol: int) -> Rule:
        return self.rules[state * self.n + symbol]


@dataclass(frozen=True)
class MachineState:
    tape: tuple[int, ...]
    head: int = 0
    state: int = 0
    step: int = 0
    halted: bool = False


def _split_block(block: int, spec: MachineSpec) -> tuple[int, int, int]:
    qb = _lg(spec.m)
    if spec.conventions.q_msb:
        return block & 1, (block >> 1) & 1, block >> 2
    return block >> (qb + 1), (block >> qb) & 1, block & (spec.m - 1)


def _join_block(write: int, mbit: int, q: int, spec: MachineSpec) -> int:
    qb = _lg(spec.m)
    if spec.conventions.q_msb:
        return q << 2 | mbit << 1 | write
    return write << (qb + 1) | mbit << qb | q


def decode_program(u: int, spec: MachineSpec) -> TransitionTable:
    if not 0 <= u < spec.size:
        raise QuinelabError(f"description number {u} outside [0, 2**{spec.l})")
    mask = (1 << spec.rule_bits) - 1
    right_bit = 1 if spec.conventions.move_one == "right" else 0
    rules = []
    for k in range(spec.n_rules):
        w, mbit, q = _split_block((u >> (k * spec.rule_bits)) & mask, spec)
        rules.append(Rule(w, RIGHT if mbit == right_bit else LEFT, q))
    return TransitionTable(spec.m, spec.n, tuple(rules))


def encode_table(tbl: TransitionTable, spec: MachineSpec) -> int:
    right_bit = 1 if spec.conventions.move_one == "right" else 0
    u = 0
    for k, r in enumerate(tbl.rules):
        mbit = right_bit if r.move == RIGHT else 1 - right_bit
        u |= _join_block(r.write, mbit, r.next_state, spec) << (k * spec.rule_bits)
    return u


def initial_state(spec: MachineSpec) -> MachineState:
    return MachineState(tape=(0,) * spec.z, head=0, state=spec.conventions.initial_state)


def step(st: MachineState, tbl: TransitionTable, spec: MachineSpec) -> MachineState:
    """One read-write-move-update step. A halted machine is returned unchanged."""
    if st.halted:
        return st
    r = tbl.rule(st.state, st.tape[st.head])
    tape = st.tape[: st.head] + (r.write,) + st.tape[st.head + 1 :]
    head, halted = st.head + r.move, False
    if not 0 <= head < spec.z:
        boundary = spec.conventions.boundary
        if boundary == "wrap":
            head %= spec.z
        else:
            head = st.head
            halted = boundary == "halt"
    return MachineState(tape, head, r.next_state, st.step + 1, halted)


def tape_value(tape, spec: MachineSpec) -> int:
    cells = tape if spec.conventions.tape_msb_left else tape[::-1]
    v = 0
    for c in cells:
        v = v << 1 | c
    return v


def run(u: int, spec: MachineSpec) -> int:
    """Output description number of program ``u`` after ``t`` steps.

    Scalar bit-twiddling interpreter; ``run_many`` is the vectorised twin.
    """
    spec.check_runnable()
    if not 0 <= u < spec.size:
        raise QuinelabError(f"description number {u} outside [0, 2**{spec.l})")
    conv = spec.conventions
    z, rb = spec.z, spec.rule_bits
    mask = (1 << rb) - 1
    right_bit = 1 if conv.move_one == "right" else 0
    wrap, clamp = conv.boundary == "wrap", conv.boundary == "clamp"
    # pre-split the rule blocks: (write, delta, next)
    rules = []
    for k in range(spec.n_rules):
        w, mbit, q = _split_block((u >> (k * rb)) & mask, spec)
        rules.append((w, 1 if mbit == right_bit else -1, q))
    tape = 0  # bit c holds cell c
    head, state = 0, conv.initial_state
    for _ in range(spec.t):
        w, d, q = rules[state << 1 | (tape >> head) & 1]
        tape = tape & ~(1 << head) | w << head
        state = q
        head += d
        if head < 0 or head >= z:
            if wrap:
                head %= z
            elif clamp:
                head -= d
            else:
                break
    if conv.tape_msb_left:
        return _reverse_bits(tape, z)
    return tape


def _reverse_bits(v: int, width: int) -> int:
    return int(format(v, f"0{width}b")[::-1], 2)


def run_many(us, spec: MachineSpec) -> np.ndarray:
    """Vectorised ``run`` over an array of description numbers (uint64 in/out)."""
    spec.check_runnable()
    if spec.l > 64:
        raise UnsupportedConfiguration("description numbers wider than 64 bits")
    u = np.asarray(us, dtype=np.uint64)
    conv = spec.conventions
    z = spec.z
    one = np.uint64(1)
    qb = np.uint64(_lg(spec.m))
    rb = np.uint64(spec.rule_bits)
    mask = np.uint64((1 << spec.rule_bits) - 1)
    right_bit = np.uint64(1 if conv.move_one == "right" else 0)

    tape = np.zeros_like(u)
    head = np.zeros(u.shape, dtype=np.int64)
    state = np.full(u.shape, conv.initial_state, dtype=np.uint64)
    alive = np.ones(u.shape, dtype=bool)
    for _ in range(spec.t):
        h = head.astype(np.uint64)
        read = (tape >> h) & one
        block = (u >> (((state << one) | read) * rb)) & mask
        if conv.q_msb:
            w, mbit, q = block & one, (block >> one) & one, block >> np.uint64(2)
        else:
            w, mbit, q = block >> (qb + one), (block >> qb) & one, block & np.uint64(spec.m - 1)
        new_tape = (tape & ~(one << h)) | (w << h)
        tape = np.where(alive, new_tape, tape)
        state = np.where(alive, q, state)
        nh = head + np.where(mbit == right_bit, 1, -1)
        off = (nh < 0) | (nh >= z)
        if conv.boundary == "wrap":
            nh %= z
        elif conv.boundary == "clamp":
            nh = np.where(off, head, nh)
        else:
            alive &= ~off
            nh = np.where(off, head, nh)
        head = np.where(alive, nh, head)
    if conv.tape_msb_left:
        tape = _reverse_bits_array(tape, z)
    return tape


def _reverse_bits_array(v: np.ndarray, width: int) -> np.ndarray:
    out = np.zeros_like(v)
    one = np.uint64(1)
    for i in range(width):
        out |= ((v >> np.uint64(i)) & one) << np.uint64(width - 1 - i)
    return out
