#!/usr/bin/env python3
"""Symbolic tracking: each qubit's value as a boolean formula over inputs.

Walks the classic compute/use/uncompute pattern one gate at a time and
prints the formula table, then the two restoration conditions whose
unsatisfiability certifies that borrowing was safe.
"""

from qborrow import (
    apply_gate,
    check_sat,
    cond_restore_plus,
    cond_restore_zero,
    elaborate_source,
    init_state,
    to_prefix,
)

SAFE = """\
borrow@ q1; borrow@ q2; borrow@ q3; borrow a; borrow@ q4;
CCNOT[q1, q2, a];
CCNOT[a, q3, q4];
CCNOT[q1, q2, a];
CCNOT[a, q3, q4];
"""

# drop the final gate: a itself comes back, but q4 keeps a term in a
LEAKY = """\
borrow@ q1; borrow@ q2; borrow@ q3; borrow a; borrow@ q4;
CCNOT[q1, q2, a];
CCNOT[a, q3, q4];
CCNOT[q1, q2, a];
"""


def show(src, title):
    print(f"== {title} ==")
    c = elaborate_source(src)
    state = init_state(c)
    for i, g in enumerate(c.gates, start=1):
        state = apply_gate(state, g)
        print(f"after gate {i}:")
        for q in c.qubits:
            print(f"  b_{q.label:3s} = {to_prefix(state[q])}")

    a = c.qubit("a")
    for name, cond in (
        ("restore |0>", cond_restore_zero(a, state)),
        ("restore |+>", cond_restore_plus(a, state)),
    ):
        res = check_sat(cond)
        line = f"{name}: violation is {to_prefix(cond)} -> {res.status}"
        if res.is_sat:
            line += f", e.g. {{{', '.join(f'{q.label}={int(v)}' for q, v in sorted(res.model.items(), key=lambda kv: kv[0].gid))}}}"
        print(line)
    print()


def main():
    show(SAFE, "paired Toffolis, every formula closes over the inputs")
    show(LEAKY, "one Toffoli short, q4 still depends on a")


if __name__ == "__main__":
    main()
