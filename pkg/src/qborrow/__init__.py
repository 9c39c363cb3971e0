"""Safety checker for programs that borrow qubits in unknown states.

The library parses a small imperative gate language, tracks each qubit's
value as a Boolean formula, and decides with a SAT solver whether borrowed
qubits are restored exactly, independent of their initial state. A
brute-force simulator over basis permutations provides ground truth at
small sizes.

Typical use:

    from qborrow import elaborate_source, verify_circuit
    report = verify_circuit(elaborate_source(text))
"""

__version__ = "0.1.0"

from .errors import QborrowError, SourceError
from .frontend import (
    LexError,
    ParseError,
    ProgramAst,
    Token,
    parse,
    parse_source,
    print_program,
    tokenize,
)
from .elaborator import (
    BorrowBlock,
    DuplicateOperand,
    ElabError,
    FlatCircuit,
    IfMeasure,
    Init,
    McxGate,
    NotGate,
    QubitId,
    QubitRole,
    Seq,
    Skip,
    Unitary,
    WhileMeasure,
    elaborate,
    elaborate_source,
    idle,
    seq,
)
from .boolform import (
    BoolExpr,
    BoolStore,
    FormulaState,
    apply_gate,
    cond_restore_plus,
    cond_restore_zero,
    count_nodes,
    evaluate,
    init_state,
    to_prefix,
    track,
    variables,
)
from .satcore import (
    Cnf,
    ResourceLimit,
    SolveResult,
    check_sat,
    emit_dimacs,
    emit_smtlib,
    parse_dimacs,
    solve,
    tseitin,
)
from .oracle import (
    FIVE_STATES,
    OracleVerdict,
    TooManyQubits,
    apply_classical,
    check_bell_preservation,
    check_state_restoration,
    exhaustive_safe,
    permutation,
    reduced_density,
    simulate_statevector,
)
from .benchgen import adder_source, mcx_source

__all__ = [
    "QborrowError",
    "SourceError",
    "LexError",
    "ParseError",
    "Token",
    "ProgramAst",
    "tokenize",
    "parse",
    "parse_source",
    "print_program",
    "ElabError",
    "DuplicateOperand",
    "QubitId",
    "QubitRole",
    "NotGate",
    "McxGate",
    "FlatCircuit",
    "elaborate",
    "elaborate_source",
    "Skip",
    "Init",
    "Unitary",
    "Seq",
    "IfMeasure",
    "WhileMeasure",
    "BorrowBlock",
    "seq",
    "idle",
    "BoolExpr",
    "BoolStore",
    "FormulaState",
    "init_state",
    "track",
    "apply_gate",
    "evaluate",
    "variables",
    "count_nodes",
    "to_prefix",
    "cond_restore_zero",
    "cond_restore_plus",
    "Cnf",
    "SolveResult",
    "ResourceLimit",
    "tseitin",
    "solve",
    "check_sat",
    "emit_dimacs",
    "parse_dimacs",
    "emit_smtlib",
    "OracleVerdict",
    "TooManyQubits",
    "FIVE_STATES",
    "apply_classical",
    "permutation",
    "exhaustive_safe",
    "simulate_statevector",
    "reduced_density",
    "check_state_restoration",
    "check_bell_preservation",
    "adder_source",
    "mcx_source",
    "verify_circuit",
]


def verify_circuit(*args, **kwargs):
    """Library entry point for .cli.verify_circuit (imported lazily so the
    core modules stay importable without CLI plumbing)."""
    from .cli import verify_circuit as impl

    return impl(*args, **kwargs)
