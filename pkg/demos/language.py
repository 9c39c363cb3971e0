#!/usr/bin/env python3
"""Tour of the input language: lexing, parsing, printing, elaboration."""

from qborrow import (
    ElabError,
    elaborate,
    parse_source,
    print_program,
    tokenize,
)
from qborrow.elaborator import dump_gates

SRC = """\
// swap the low bits of two registers, scratch space borrowed
let w = 2;
borrow@ x[w];
borrow y[w];
alloc t;
for i = 1 to w {
    CNOT[x[i], t];
    CNOT[y[i], x[i]];
    CNOT[t, y[i]];
    CNOT[x[i], t];
}
release t;
release y;
"""


def main():
    print("source:")
    print(SRC)

    print("tokens (first ten):")
    for tok in tokenize(SRC)[:10]:
        print(f"  {tok.kind:12s} {tok.lexeme!r}")

    ast = parse_source(SRC)
    print("\npretty-printed (fixpoint of parse . print):")
    print(print_program(ast))

    circuit = elaborate(ast)
    print(f"elaborated: {circuit.n_qubits} qubits, {len(circuit.gates)} gates")
    print(dump_gates(circuit))

    print("roles:")
    for reg in circuit.registers:
        print(f"  {reg.name}: {reg.role.name.lower()} (size {reg.size})")
    for w in circuit.warnings:
        print(f"warning: {w}")

    # malformed input gets a line:column in the message
    try:
        elaborate(parse_source("borrow q; CNOT[q, q];"))
    except ElabError as e:
        print(f"\nrejected as expected: {e}")


if __name__ == "__main__":
    main()
