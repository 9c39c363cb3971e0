"""Symbolic Boolean tracking of classical reversible circuits.

Every qubit q carries a formula b_q over the circuit's input variables; gates
update the formulas (X negates, a multi-controlled NOT xors the conjunction
of its control formulas into the target).  Safety of returning a dirty qubit
then reduces to the unsatisfiability of two conditions built here:

  * cond_restore_zero: b_q AND NOT q   -- the circuit maps q=0 back to 0;
  * cond_restore_plus: some other qubit's final value depends on q.

Expressions are hash-consed into a DAG with canonical constructors, so
structural equality is node identity and the x XOR x = 0 cancellation that
keeps benchmark formulas small happens automatically.
"""

import threading
from dataclasses import dataclass
from typing import Iterable, Mapping

from .elaborator import FlatCircuit, Gate, McxGate, NotGate, QubitId, QubitRole
from .errors import QborrowError

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1

_SALT = {
    "false": 0x9E3779B97F4A7C15,
    "true": 0xC2B2AE3D27D4EB4F,
    "var": 0x165667B19E3779F9,
    "not": 0x27D4EB2F165667C5,
    "and": 0x85EBCA77C2B2AE63,
    "xor": 0xD6E8FEB86659FD93,
}

# pairwise complementary-factor elimination in XOR is quadratic in the child
# count; skip it for very wide nodes (the result stays correct, just folded
# less aggressively)
_ELIM_MAX_CHILDREN = 128


def _fnv(s: str) -> int:
    h = _FNV_OFFSET
    for ch in s:
        h = ((h ^ ord(ch)) * _FNV_PRIME) & _MASK
    return h


class FormulaSizeError(QborrowError):
    pass


class BoolExpr:
    """One hash-consed DAG node; compare with `is` (interning guarantees it)."""

    __slots__ = ("op", "args", "qubit", "shash", "serial")

    def __init__(self, op: str, args: tuple, qubit, shash: int, serial: int):
        self.op = op  # false | true | var | not | and | xor
        self.args = args
        self.qubit = qubit  # QubitId for var nodes, else None
        self.shash = shash
        self.serial = serial

    def __repr__(self):
        return to_prefix(self)

    def sort_key(self) -> tuple[int, int]:
        return (self.shash, self.serial)


class BoolStore:
    """Append-only intern table; all constructors return canonical nodes."""

    def __init__(self, max_nodes: int = 10_000_000):
        self.max_nodes = max_nodes
        self._table: dict = {}
        self._lock = threading.RLock()
        self._n_nodes = 0
        self._sub_cache: dict = {}
        self.false = self._intern("false", (), None)
        self.true = self._intern("true", (), None)

    def _intern(self, op: str, args: tuple, qubit) -> BoolExpr:
        key = (op, args, qubit)
        with self._lock:
            node = self._table.get(key)
            if node is not None:
                return node
            if self._n_nodes >= self.max_nodes:
                raise FormulaSizeError(
                    f"formula store exceeded the {self.max_nodes}-node cap"
                )
            if op == "var":
                shash = (_SALT["var"] ^ _fnv(qubit.label)) & _MASK
            else:
                shash = _SALT[op]
                for a in args:
                    shash = ((shash ^ a.shash) * _FNV_PRIME) & _MASK
            node = BoolExpr(op, args, qubit, shash, self._n_nodes)
            self._table[key] = node
            self._n_nodes += 1
            return node

    def __len__(self) -> int:
        return self._n_nodes

    def var(self, qubit: QubitId) -> BoolExpr:
        return self._intern("var", (), qubit)

    def not_(self, e: BoolExpr) -> BoolExpr:
        if e is self.false:
            return self.true
        if e is self.true:
            return self.false
        if e.op == "not":
            return e.args[0]
        return self._intern("not", (e,), None)

    def and_(self, children: Iterable[BoolExpr]) -> BoolExpr:
        flat: list[BoolExpr] = []
        for c in children:
            if c is self.true:
                continue
            if c is self.false:
                return self.false
            if c.op == "and":
                flat.extend(c.args)
            else:
                flat.append(c)
        uniq: list[BoolExpr] = []
        seen: set[BoolExpr] = set()
        for c in flat:
            if c not in seen:
                seen.add(c)
                uniq.append(c)
        for c in uniq:  # x AND NOT x is unsatisfiable
            if c.op == "not" and c.args[0] in seen:
                return self.false
        if not uniq:
            return self.true
        if len(uniq) == 1:
            return uniq[0]
        uniq.sort(key=BoolExpr.sort_key)
        return self._intern("and", tuple(uniq), None)

    def xor(self, children: Iterable[BoolExpr]) -> BoolExpr:
        parity = 0
        present: set[BoolExpr] = set()

        def toggle(x: BoolExpr) -> None:
            if x in present:
                present.remove(x)
            else:
                present.add(x)

        def insert(x: BoolExpr) -> None:
            nonlocal parity
            while x.op == "not":
                parity ^= 1
                x = x.args[0]
            if x is self.false:
                return
            if x is self.true:
                parity ^= 1
                return
            if x.op == "xor":
                for a in x.args:
                    toggle(a)
            else:
                toggle(x)

        for c in children:
            insert(c)

        if len(present) <= _ELIM_MAX_CHILDREN:
            changed = True
            while changed and len(present) > 1:
                changed = False
                items = sorted(present, key=BoolExpr.sort_key)
                for i, a in enumerate(items):
                    for b in items[i + 1 :]:
                        replacement = self._complementary_factor(a, b)
                        if replacement is not None:
                            present.discard(a)
                            present.discard(b)
                            insert(replacement)
                            changed = True
                            break
                    if changed:
                        break

        if not present:
            base = self.false
        elif len(present) == 1:
            base = next(iter(present))
        else:
            base = self._intern("xor", tuple(sorted(present, key=BoolExpr.sort_key)), None)
        return self.not_(base) if parity else base

    def _complementary_factor(self, a: BoolExpr, b: BoolExpr) -> BoolExpr | None:
        """AND(S,T) XOR AND(S, NOT AND(T))  ->  AND(S), if a,b match that shape."""
        set_a = set(a.args) if a.op == "and" else {a}
        set_b = set(b.args) if b.op == "and" else {b}
        for rest, other in ((set_b, set_a), (set_a, set_b)):
            for u in rest:
                if u.op != "not":
                    continue
                v = u.args[0]
                factors = set(v.args) if v.op == "and" else {v}
                remaining = rest - {u}
                if other == remaining | factors:
                    return self.and_(sorted(remaining, key=BoolExpr.sort_key))
        return None

    def or_(self, children: Iterable[BoolExpr]) -> BoolExpr:
        return self.not_(self.and_([self.not_(c) for c in children]))

    def substitute(self, e: BoolExpr, qubit: QubitId, value: bool) -> BoolExpr:
        """Replace Var(qubit) by a constant; untouched subtrees keep identity."""
        cache = self._sub_cache.setdefault((qubit, bool(value)), {})
        constant = self.true if value else self.false
        stack = [e]
        while stack:
            node = stack[-1]
            if node in cache:
                stack.pop()
                continue
            if node.op in ("false", "true"):
                cache[node] = node
                stack.pop()
                continue
            if node.op == "var":
                cache[node] = constant if node.qubit == qubit else node
                stack.pop()
                continue
            pending = [c for c in node.args if c not in cache]
            if pending:
                stack.extend(pending)
                continue
            new_args = [cache[c] for c in node.args]
            if all(n is o for n, o in zip(new_args, node.args)):
                cache[node] = node
            elif node.op == "not":
                cache[node] = self.not_(new_args[0])
            elif node.op == "and":
                cache[node] = self.and_(new_args)
            else:
                cache[node] = self.xor(new_args)
            stack.pop()
        return cache[e]


def evaluate(e: BoolExpr, env: Mapping[QubitId, bool]) -> bool:
    """Evaluate under an assignment of every variable occurring in `e`."""
    cache: dict[BoolExpr, bool] = {}
    stack = [e]
    while stack:
        node = stack[-1]
        if node in cache:
            stack.pop()
            continue
        if node.op == "false":
            cache[node] = False
        elif node.op == "true":
            cache[node] = True
        elif node.op == "var":
            cache[node] = bool(env[node.qubit])
        else:
            pending = [c for c in node.args if c not in cache]
            if pending:
                stack.extend(pending)
                continue
            values = [cache[c] for c in node.args]
            if node.op == "not":
                cache[node] = not values[0]
            elif node.op == "and":
                cache[node] = all(values)
            else:
                result = False
                for v in values:
                    result ^= v
                cache[node] = result
        stack.pop()
    return cache[e]


def variables(e: BoolExpr) -> list[QubitId]:
    """Input variables of `e`, sorted by global id."""
    found: dict[QubitId, None] = {}
    seen: set[BoolExpr] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        if node.op == "var":
            found[node.qubit] = None
        else:
            stack.extend(node.args)
    return sorted(found, key=lambda q: q.gid)


def count_nodes(e: BoolExpr) -> int:
    seen: set[BoolExpr] = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        stack.extend(node.args)
    return len(seen)


def to_prefix(e: BoolExpr) -> str:
    """Textual prefix form, e.g. `xor(q4, and(q3, xor(a, and(q1, q2))))`."""
    done: dict[BoolExpr, str] = {}
    stack = [e]
    while stack:
        node = stack[-1]
        if node in done:
            stack.pop()
            continue
        if node.op in ("false", "true"):
            done[node] = node.op
            stack.pop()
            continue
        if node.op == "var":
            done[node] = node.qubit.label
            stack.pop()
            continue
        pending = [c for c in node.args if c not in done]
        if pending:
            stack.extend(pending)
            continue
        done[node] = f"{node.op}({', '.join(done[c] for c in node.args)})"
        stack.pop()
    return done[e]


# --------------------------------------------------------------------------
# Per-circuit formula tracking
# --------------------------------------------------------------------------


@dataclass
class FormulaState:
    """The current b_q for every qubit of one circuit, in one shared store."""

    store: BoolStore
    formulas: dict[QubitId, BoolExpr]

    def __getitem__(self, q: QubitId) -> BoolExpr:
        return self.formulas[q]

    def __iter__(self):
        return iter(self.formulas)

    def items(self):
        return self.formulas.items()


def init_state(c: FlatCircuit, store: BoolStore | None = None) -> FormulaState:
    """b_q = q for dirty qubits, b_q = false for clean (alloc'd) qubits."""
    store = store or BoolStore()
    formulas = {}
    for q, role in zip(c.qubits, c.roles):
        formulas[q] = store.false if role is QubitRole.CLEAN else store.var(q)
    return FormulaState(store, formulas)


def _update(formulas: dict, g: Gate, store: BoolStore) -> None:
    if isinstance(g, NotGate):
        formulas[g.target] = store.not_(formulas[g.target])
    elif isinstance(g, McxGate):
        conj = store.and_([formulas[c] for c in g.controls])
        formulas[g.target] = store.xor([formulas[g.target], conj])
    else:
        raise TypeError(f"not a gate: {g!r}")


def apply_gate(s: FormulaState, g: Gate) -> FormulaState:
    """One gate step; returns a new state, the input is left untouched."""
    formulas = dict(s.formulas)
    _update(formulas, g, s.store)
    return FormulaState(s.store, formulas)


def track(c: FlatCircuit, store: BoolStore | None = None) -> FormulaState:
    """Fold apply_gate over the whole gate list starting from init_state."""
    state = init_state(c, store)
    for g in c.gates:
        _update(state.formulas, g, state.store)
    return state


# --------------------------------------------------------------------------
# Safety conditions
# --------------------------------------------------------------------------


def cond_restore_zero(q: QubitId, s: FormulaState) -> BoolExpr:
    """Unsatisfiable iff input q=0 guarantees output q=0 (restores |0>)."""
    store = s.store
    return store.and_([s[q], store.not_(store.var(q))])


def cond_restore_plus(q: QubitId, s: FormulaState) -> BoolExpr:
    """Unsatisfiable iff every other qubit's output is independent of q.

    Independence of all other qubits is exactly what restoring |+> on q
    requires, hence the name.
    """
    store = s.store
    disjuncts = []
    for other in sorted(s.formulas, key=lambda x: x.gid):
        if other == q:
            continue
        b = s[other]
        delta = store.xor(
            [store.substitute(b, q, False), store.substitute(b, q, True)]
        )
        if delta is not store.false:
            disjuncts.append(delta)
    return store.or_(disjuncts)
