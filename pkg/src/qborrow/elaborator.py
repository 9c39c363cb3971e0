"""Elaboration of parsed programs into flat gate lists.

Folds `let` bindings, unrolls `for` loops (bounds evaluated once, direction
inferred from their values), enforces the borrow/release discipline and
resolves every register reference to a concrete qubit.  Also provides the
purely syntactic idle-qubit analysis over an extended statement language that
includes the measurement-guarded constructs absent from the parsed fragment.
"""

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import frontend
from .errors import SourceError
from .frontend import Expr, Loc, ProgramAst, RegRef, Stmt

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1


class ElabError(SourceError):
    pass


class UnboundIdentifier(ElabError):
    pass


class ArithmeticOverflow(ElabError):
    pass


class IndexOutOfRange(ElabError):
    pass


class DuplicateOperand(ElabError):
    pass


class UseAfterRelease(ElabError):
    pass


class RedeclaredRegister(ElabError):
    pass


class NonPositiveSize(ElabError):
    pass


class RedefinedName(ElabError):
    pass


# --------------------------------------------------------------------------
# Circuit data model
# --------------------------------------------------------------------------


class QubitRole(enum.Enum):
    BORROW_VERIFY = "borrow"  # dirty, must be proven safe
    BORROW_SKIP = "borrow@"  # dirty, verification skipped on request
    CLEAN = "alloc"  # starts in |0>


@dataclass(frozen=True)
class QubitId:
    name: str  # register name
    index: int  # 1-based position within the register
    gid: int  # dense global id, declaration order
    label: str  # display name: 'a.3', or bare 'anc' for size-1 registers

    def __repr__(self):
        return f"QubitId({self.label})"


@dataclass(frozen=True)
class NotGate:
    target: QubitId


@dataclass(frozen=True)
class McxGate:
    controls: tuple[QubitId, ...]  # nonempty, pairwise distinct, target excluded
    target: QubitId

    def __post_init__(self):
        ops = [c.gid for c in self.controls] + [self.target.gid]
        if len(set(ops)) != len(ops):
            raise ValueError("gate operands must be pairwise distinct")


Gate = NotGate | McxGate


@dataclass(frozen=True)
class RegisterInfo:
    name: str
    size: int
    role: QubitRole
    first_gid: int
    indexed: bool  # declared with [size] brackets


@dataclass(frozen=True)
class FlatCircuit:
    qubits: tuple[QubitId, ...]  # indexed by gid
    roles: tuple[QubitRole, ...]  # parallel to qubits
    registers: tuple[RegisterInfo, ...]
    gates: tuple[Gate, ...]
    lifetimes: dict[str, tuple[int, int]]  # register -> [start, end) gate indices
    warnings: tuple[str, ...]

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    def role_of(self, q: QubitId) -> QubitRole:
        return self.roles[q.gid]

    def verify_qubits(self) -> list[QubitId]:
        """Dirty qubits whose safe uncomputation must be proven."""
        return [q for q, r in zip(self.qubits, self.roles) if r is QubitRole.BORROW_VERIFY]

    def skipped_qubits(self) -> list[QubitId]:
        return [q for q, r in zip(self.qubits, self.roles) if r is QubitRole.BORROW_SKIP]

    def register(self, name: str) -> RegisterInfo:
        for r in self.registers:
            if r.name == name:
                return r
        raise KeyError(name)

    def qubit(self, name: str, index: int = 1) -> QubitId:
        r = self.register(name)
        if not 1 <= index <= r.size:
            raise KeyError(f"{name}[{index}]")
        return self.qubits[r.first_gid + index - 1]


def gate_operands(g: Gate) -> tuple[QubitId, ...]:
    if isinstance(g, NotGate):
        return (g.target,)
    return g.controls + (g.target,)


def dump_gates(c: FlatCircuit) -> str:
    """One gate per line, e.g. `CCNOT a.1 q.2 a.2`."""
    lines = []
    for g in c.gates:
        if isinstance(g, NotGate):
            lines.append(f"X {g.target.label}")
        elif len(g.controls) == 1:
            lines.append(f"CNOT {g.controls[0].label} {g.target.label}")
        elif len(g.controls) == 2:
            lines.append(
                f"CCNOT {g.controls[0].label} {g.controls[1].label} {g.target.label}"
            )
        else:
            ops = " ".join(q.label for q in gate_operands(g))
            lines.append(f"C{len(g.controls)}NOT {ops}")
    return "\n".join(lines) + ("\n" if lines else "")


# --------------------------------------------------------------------------
# Compile-time arithmetic
# --------------------------------------------------------------------------


def _check64(value: int, loc: Loc) -> int:
    if not INT64_MIN <= value <= INT64_MAX:
        raise ArithmeticOverflow(loc[0], loc[1], f"arithmetic overflow: {value}")
    return value


def eval_expr(e: Expr, env: Mapping[str, int]) -> int:
    """Evaluate a compile-time expression under 64-bit signed semantics."""
    if isinstance(e, frontend.Num):
        return e.value
    if isinstance(e, frontend.Name):
        if e.ident not in env:
            raise UnboundIdentifier(e.loc[0], e.loc[1], f"unbound identifier '{e.ident}'")
        return env[e.ident]
    if isinstance(e, frontend.Neg):
        return _check64(-eval_expr(e.operand, env), e.loc)
    if isinstance(e, frontend.BinOp):
        left = eval_expr(e.left, env)
        right = eval_expr(e.right, env)
        if e.op == "+":
            return _check64(left + right, e.loc)
        if e.op == "-":
            return _check64(left - right, e.loc)
        return _check64(left * right, e.loc)
    raise TypeError(f"not an expression: {e!r}")


def loop_range(start: int, stop: int) -> list[int]:
    """Inclusive range; counts down when start > stop."""
    if start <= stop:
        return list(range(start, stop + 1))
    return list(range(start, stop - 1, -1))


# --------------------------------------------------------------------------
# Elaboration
# --------------------------------------------------------------------------

_ROLE_OF_STMT = {
    frontend.Borrow: QubitRole.BORROW_VERIFY,
    frontend.BorrowSkip: QubitRole.BORROW_SKIP,
    frontend.Alloc: QubitRole.CLEAN,
}


class _Elaborator:
    def __init__(self):
        self.values: dict[str, int] = {}  # let bindings and live loop indices
        self.registers: dict[str, RegisterInfo] = {}
        self.released: set[str] = set()
        self.qubits: list[QubitId] = []
        self.roles: list[QubitRole] = []
        self.gates: list[Gate] = []
        self.lifetimes: dict[str, tuple[int, int]] = {}
        self.starts: dict[str, int] = {}
        self.warnings: list[str] = []

    def run(self, ast: ProgramAst) -> FlatCircuit:
        for s in ast.statements:
            self.stmt(s)
        for name, reg in self.registers.items():
            if name not in self.released:
                self.lifetimes[name] = (self.starts[name], len(self.gates))
                self.warnings.append(
                    f"register '{name}' was never released; "
                    "implicitly released at program end"
                )
        return FlatCircuit(
            qubits=tuple(self.qubits),
            roles=tuple(self.roles),
            registers=tuple(self.registers.values()),
            gates=tuple(self.gates),
            lifetimes=self.lifetimes,
            warnings=tuple(self.warnings),
        )

    def stmt(self, s: Stmt) -> None:
        if isinstance(s, frontend.Let):
            self.define_value(s.name, eval_expr(s.value, self.values), s.loc)
        elif isinstance(s, (frontend.Borrow, frontend.BorrowSkip, frontend.Alloc)):
            self.declare(s.reg, _ROLE_OF_STMT[type(s)], s.loc)
        elif isinstance(s, frontend.Release):
            self.release(s.name, s.loc)
        elif isinstance(s, frontend.GateX):
            self.gates.append(NotGate(self.resolve(s.target)))
        elif isinstance(s, frontend.GateCNOT):
            control = self.resolve(s.control)
            target = self.resolve(s.target)
            self.check_distinct((control, target), s.loc)
            self.gates.append(McxGate((control,), target))
        elif isinstance(s, frontend.GateCCNOT):
            c1 = self.resolve(s.control1)
            c2 = self.resolve(s.control2)
            target = self.resolve(s.target)
            self.check_distinct((c1, c2, target), s.loc)
            self.gates.append(McxGate((c1, c2), target))
        elif isinstance(s, frontend.For):
            self.for_loop(s)
        else:
            raise TypeError(f"not a statement: {s!r}")

    def define_value(self, name: str, value: int, loc: Loc) -> None:
        if name in self.values or name in self.registers:
            raise RedefinedName(loc[0], loc[1], f"'{name}' is already defined")
        self.values[name] = value

    def declare(self, reg: RegRef, role: QubitRole, loc: Loc) -> None:
        if reg.name in self.registers or reg.name in self.values:
            raise RedeclaredRegister(loc[0], loc[1], f"'{reg.name}' is already declared")
        indexed = reg.index is not None
        size = eval_expr(reg.index, self.values) if indexed else 1
        if size < 1:
            raise NonPositiveSize(
                loc[0], loc[1], f"register '{reg.name}' declared with size {size}"
            )
        first_gid = len(self.qubits)
        for i in range(1, size + 1):
            label = f"{reg.name}.{i}" if indexed else reg.name
            self.qubits.append(QubitId(reg.name, i, first_gid + i - 1, label))
            self.roles.append(role)
        self.registers[reg.name] = RegisterInfo(reg.name, size, role, first_gid, indexed)
        self.starts[reg.name] = len(self.gates)

    def release(self, name: str, loc: Loc) -> None:
        if name not in self.registers:
            raise UnboundIdentifier(loc[0], loc[1], f"'{name}' is not a declared register")
        if name in self.released:
            raise UseAfterRelease(loc[0], loc[1], f"register '{name}' is already released")
        self.released.add(name)
        self.lifetimes[name] = (self.starts[name], len(self.gates))

    def resolve(self, ref: RegRef) -> QubitId:
        reg = self.registers.get(ref.name)
        if reg is None:
            kind = "bound to a number, not a register" if ref.name in self.values else "not declared"
            raise UnboundIdentifier(ref.loc[0], ref.loc[1], f"'{ref.name}' is {kind}")
        if ref.name in self.released:
            raise UseAfterRelease(
                ref.loc[0], ref.loc[1], f"register '{ref.name}' was already released"
            )
        index = 1 if ref.index is None else eval_expr(ref.index, self.values)
        if not 1 <= index <= reg.size:
            raise IndexOutOfRange(
                ref.loc[0],
                ref.loc[1],
                f"index {index} out of range for register '{ref.name}' of size {reg.size}",
            )
        return self.qubits[reg.first_gid + index - 1]

    def check_distinct(self, operands: tuple[QubitId, ...], loc: Loc) -> None:
        seen: set[int] = set()
        for q in operands:
            if q.gid in seen:
                raise DuplicateOperand(
                    loc[0], loc[1], f"gate operand '{q.label}' appears twice"
                )
            seen.add(q.gid)

    def for_loop(self, s: frontend.For) -> None:
        if s.var in self.values or s.var in self.registers:
            raise RedefinedName(
                s.loc[0], s.loc[1], f"loop index '{s.var}' shadows an existing name"
            )
        start = eval_expr(s.start, self.values)
        stop = eval_expr(s.stop, self.values)
        for value in loop_range(start, stop):
            self.values[s.var] = value
            for inner in s.body:
                self.stmt(inner)
        self.values.pop(s.var, None)


def elaborate(ast: ProgramAst) -> FlatCircuit:
    """Flatten a parsed program into a loop-free gate list over concrete qubits."""
    return _Elaborator().run(ast)


def elaborate_source(source: str) -> FlatCircuit:
    return elaborate(frontend.parse_source(source))


# --------------------------------------------------------------------------
# Idle-qubit analysis
# --------------------------------------------------------------------------
# The statement forms below extend the parsed language with the
# measurement-guarded constructs needed by the structural rules; they exist
# for analysis only and carry no executable semantics here.  Qubit operands
# may be any hashable values, so tests can model machines larger than one
# program's declaration set.


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Init:
    """Reset one qubit to |0>."""

    qubit: object


@dataclass(frozen=True)
class Unitary:
    qubits: frozenset

    def __init__(self, qubits: Iterable):
        object.__setattr__(self, "qubits", frozenset(qubits))


@dataclass(frozen=True)
class Seq:
    first: "ExtStmt"
    second: "ExtStmt"


@dataclass(frozen=True)
class IfMeasure:
    measured: frozenset
    then_branch: "ExtStmt"
    else_branch: "ExtStmt"

    def __init__(self, measured: Iterable, then_branch, else_branch):
        object.__setattr__(self, "measured", frozenset(measured))
        object.__setattr__(self, "then_branch", then_branch)
        object.__setattr__(self, "else_branch", else_branch)


@dataclass(frozen=True)
class WhileMeasure:
    measured: frozenset
    body: "ExtStmt"

    def __init__(self, measured: Iterable, body):
        object.__setattr__(self, "measured", frozenset(measured))
        object.__setattr__(self, "body", body)


@dataclass(frozen=True)
class BorrowBlock:
    placeholder: object
    body: "ExtStmt"


ExtStmt = Skip | Init | Unitary | Seq | IfMeasure | WhileMeasure | BorrowBlock


def seq(*stmts: ExtStmt) -> ExtStmt:
    """Right-fold a statement list into nested Seq (empty -> Skip)."""
    if not stmts:
        return Skip()
    result = stmts[-1]
    for s in reversed(stmts[:-1]):
        result = Seq(s, result)
    return result


def idle(s: ExtStmt, universe: frozenset | set) -> frozenset:
    """Qubits of `universe` untouched by `s`, by structural induction.

    Borrow placeholders are transparent: a BorrowBlock contributes exactly
    what its body contributes, and operands outside `universe` (such as the
    placeholders themselves) simply do not subtract anything.
    """
    universe = frozenset(universe)
    if isinstance(s, Skip):
        return universe
    if isinstance(s, Init):
        return universe - {s.qubit}
    if isinstance(s, Unitary):
        return universe - s.qubits
    if isinstance(s, Seq):
        return idle(s.first, universe) & idle(s.second, universe)
    if isinstance(s, IfMeasure):
        return (idle(s.then_branch, universe) & idle(s.else_branch, universe)) - s.measured
    if isinstance(s, WhileMeasure):
        return idle(s.body, universe) - s.measured
    if isinstance(s, BorrowBlock):
        return idle(s.body, universe)
    raise TypeError(f"not a statement: {s!r}")
