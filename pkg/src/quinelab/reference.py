"""Deliberately naive simulator used as an oracle for ``machine.run``.

Works on strings and lists, one symbol at a time, and shares no helpers with
the fast interpreters.
"""

from .errors import QuinelabError, UnsupportedConfiguration


def reference_run(u, spec):
    if spec.z != spec.l or spec.n != 2:
        raise UnsupportedConfiguration("output is not a program for this machine")
    if u < 0 or u >= 2 ** spec.l:
        raise QuinelabError("program out of range")
    conv = spec.conventions
    m = spec.m
    qbits = len(bin(m - 1)) - 2
    bits = bin(u)[2:].rjust(spec.l, "0")

    # blocks appear most significant first in descending (state, symbol) order
    pairs = [(s, r) for s in range(m - 1, -1, -1) for r in (1, 0)]
    width = qbits + 2
    table = {}
    for i, pair in enumerate(pairs):
        chunk = bits[i * width:(i + 1) * width]
        if conv.q_msb:
            q_txt, m_txt, w_txt = chunk[:qbits], chunk[qbits], chunk[qbits + 1]
        else:
            w_txt, m_txt, q_txt = chunk[0], chunk[1], chunk[2:]
        if m_txt == "1":
            direction = conv.move_one
        else:
            direction = "left" if conv.move_one == "right" else "right"
        table[pair] = (int(w_txt), direction, int(q_txt, 2))

    tape = ["0"] * spec.z
    pos = 0
    state = conv.initial_state
    stopped = False
    for _ in range(spec.t):
        if stopped:
            continue
        symbol = int(tape[pos])
        write, direction, nxt = table[(state, symbol)]
        tape[pos] = str(write)
        state = nxt
        target = pos + 1 if direction == "right" else pos - 1
        if 0 <= target < spec.z:
            pos = target
        elif conv.boundary == "wrap":
            pos = 0 if target == spec.z else spec.z - 1
        elif conv.boundary == "halt":
            stopped = True

    text = "".join(tape)
    if not conv.tape_msb_left:
        text = text[::-1]
    return int(text, 2)
