"""Command line driver.

Subcommands:
  verify  -- parse, elaborate, and decide safety of every borrowed qubit
  gen     -- write one of the bundled benchmark programs at a given size
  bench   -- generate + verify a size sweep and report solver-only timings

Exit codes: 0 all verified qubits safe, 1 some unsafe, 2 usage/parse/
elaboration error, 3 undecided within budget, 4 oracle disagreement.
Every flag can also be set via an environment variable with the QBORROW_
prefix (e.g. QBORROW_SOLVER, QBORROW_BUDGET_SECONDS); flags win.
"""

import argparse
import json
import os
import shlex
import subprocess
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .benchgen import generate
from .boolform import (
    BoolExpr,
    FormulaSizeError,
    cond_restore_plus,
    cond_restore_zero,
    count_nodes,
    track,
)
from .elaborator import FlatCircuit, QubitId, elaborate_source
from .errors import SourceError
from .oracle import EXHAUSTIVE_CAP, TooManyQubits, apply_classical, exhaustive_safe
from .satcore import (
    DEFAULT_BUDGET_CONFLICTS,
    DEFAULT_BUDGET_SECONDS,
    ResourceLimit,
    SizeCap,
    emit_dimacs,
    emit_smtlib,
    solve,
    tseitin,
)

EXIT_SAFE = 0
EXIT_UNSAFE = 1
EXIT_ERROR = 2
EXIT_UNKNOWN = 3
EXIT_DISAGREE = 4


@dataclass
class Verdict:
    qubit: str
    status: str  # safe | unsafe | skipped | unknown
    violated: str | None = None  # cond1 | cond2
    witness: dict[str, bool] | None = None
    budget: str | None = None
    solve_ms: float = 0.0
    formula_nodes: int = 0
    cnf_vars: int = 0
    cnf_clauses: int = 0

    def to_dict(self):
        return {
            "qubit": self.qubit,
            "status": self.status,
            "violated": self.violated,
            "witness": self.witness,
            "budget": self.budget,
            "solve_ms": round(self.solve_ms, 3),
            "formula_nodes": self.formula_nodes,
            "cnf_vars": self.cnf_vars,
            "cnf_clauses": self.cnf_clauses,
        }


@dataclass
class Report:
    program: str
    n_qubits: int
    n_gates: int
    verdicts: list[Verdict] = field(default_factory=list)
    total_ms: float = 0.0
    version: str = __version__
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "program": self.program,
            "version": self.version,
            "qubits": self.n_qubits,
            "gates": self.n_gates,
            "config": self.config,
            "verdicts": [v.to_dict() for v in self.verdicts],
            "total_ms": round(self.total_ms, 3),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


# ---------------------------------------------------------------------------
# solver dispatch


def _decide_internal(e: BoolExpr, budgets) -> tuple[str, dict | None, float, int, int]:
    t0 = time.perf_counter()
    try:
        cnf, root = tseitin(e)
        res = solve(
            cnf,
            root,
            budget_conflicts=budgets[0],
            budget_seconds=budgets[1],
        )
    except (ResourceLimit, SizeCap) as exc:
        ms = (time.perf_counter() - t0) * 1000.0
        reason = exc.reason if isinstance(exc, ResourceLimit) else "size"
        return "unknown:" + reason, None, ms, 0, 0
    ms = (time.perf_counter() - t0) * 1000.0
    if res.is_sat:
        model = {q.label: v for q, v in res.model.items()}
        return "sat", model, ms, cnf.n_vars, len(cnf.clauses)
    return "unsat", None, ms, cnf.n_vars, len(cnf.clauses)


def _decide_external(e: BoolExpr, cmd: list[str], budgets, script_path: Path | None):
    """Run a user-supplied solver on an emitted script; it must print a line
    that is exactly `sat` or `unsat`."""
    if script_path is None:
        tmp = tempfile.NamedTemporaryFile(
            mode="w", suffix=".smt2", delete=False, prefix="qborrow."
        )
        with tmp:
            tmp.write(emit_smtlib(e))
        script_path = Path(tmp.name)
    t0 = time.perf_counter()
    try:
        proc = subprocess.run(
            cmd + [str(script_path)],
            capture_output=True,
            text=True,
            timeout=budgets[1],
        )
    except (subprocess.TimeoutExpired, OSError) as exc:
        ms = (time.perf_counter() - t0) * 1000.0
        reason = "time" if isinstance(exc, subprocess.TimeoutExpired) else "exec"
        return "unknown:" + reason, None, ms, 0, 0
    ms = (time.perf_counter() - t0) * 1000.0
    # match whole lines: "unsat" contains "sat" as a substring
    verdict = None
    for line in proc.stdout.splitlines():
        line = line.strip()
        if line == "sat":
            verdict = "sat"
            break
        if line == "unsat":
            verdict = "unsat"
            break
    if verdict is None:
        return "unknown:output", None, ms, 0, 0
    return verdict, None, ms, 0, 0


# ---------------------------------------------------------------------------
# verification driver


def witness_violates(c: FlatCircuit, q: QubitId, witness: dict[str, bool], which: str) -> bool:
    """Replay a SAT witness through the classical semantics.

    cond1 witnesses must show bit q changing; cond2 witnesses must show some
    other output bit depending on the input value of q."""
    by_label = {qq.label: qq for qq in c.qubits}
    bits = [0] * c.n_qubits
    for label, val in witness.items():
        bits[by_label[label].gid] = 1 if val else 0
    if which == "cond1":
        out = apply_classical(c, tuple(bits))
        return out[q.gid] != bits[q.gid]
    x0 = list(bits)
    x0[q.gid] = 0
    x1 = list(bits)
    x1[q.gid] = 1
    y0 = apply_classical(c, tuple(x0))
    y1 = apply_classical(c, tuple(x1))
    return any(y0[i] != y1[i] for i in range(c.n_qubits) if i != q.gid)


def _emit_all(conds, stem: str, dimacs_dir, smtlib_dir):
    for q, (c1, c2) in conds.items():
        for name, e in (("cond1", c1), ("cond2", c2)):
            if dimacs_dir is not None:
                cnf, root = tseitin(e)
                path = Path(dimacs_dir) / f"{stem}.{q.label}.{name}.cnf"
                path.write_text(emit_dimacs(cnf, root))
            if smtlib_dir is not None:
                path = Path(smtlib_dir) / f"{stem}.{q.label}.{name}.smt2"
                path.write_text(emit_smtlib(e))


def _smt_path(smtlib_dir, stem: str, q: QubitId, name: str) -> Path | None:
    if smtlib_dir is None:
        return None
    return Path(smtlib_dir) / f"{stem}.{q.label}.{name}.smt2"


def verify_circuit(
    circuit: FlatCircuit,
    *,
    program: str = "<memory>",
    solver: str = "internal",
    emit_dimacs_dir=None,
    emit_smtlib_dir=None,
    jobs: int = 1,
    budget_conflicts: int = DEFAULT_BUDGET_CONFLICTS,
    budget_seconds: float = DEFAULT_BUDGET_SECONDS,
) -> Report:
    """Decide safety of every borrow-verified qubit of an elaborated circuit."""
    t_start = time.perf_counter()
    state = track(circuit)
    targets = circuit.verify_qubits()
    conds = {
        q: (cond_restore_zero(q, state), cond_restore_plus(q, state)) for q in targets
    }

    stem = Path(program).stem if program != "<memory>" else "circuit"
    if emit_dimacs_dir is not None:
        Path(emit_dimacs_dir).mkdir(parents=True, exist_ok=True)
    if emit_smtlib_dir is not None:
        Path(emit_smtlib_dir).mkdir(parents=True, exist_ok=True)
    if emit_dimacs_dir is not None or emit_smtlib_dir is not None:
        _emit_all(conds, stem, emit_dimacs_dir, emit_smtlib_dir)

    budgets = (budget_conflicts, budget_seconds)
    external = None
    if solver.startswith("cmd:"):
        external = shlex.split(solver[4:])
        if not external:
            raise ValueError("empty external solver command")
    elif solver != "internal":
        raise ValueError(f"unknown solver {solver!r} (expected internal or cmd:<exe>)")

    def decide(e: BoolExpr, q: QubitId, name: str):
        if external is None:
            return _decide_internal(e, budgets)
        return _decide_external(e, external, budgets, _smt_path(emit_smtlib_dir, stem, q, name))

    def work(q: QubitId) -> Verdict:
        c1, c2 = conds[q]
        nodes = count_nodes(c1) + count_nodes(c2)
        s1, m1, ms1, v1, n1 = decide(c1, q, "cond1")
        if s1 == "sat":
            return Verdict(
                q.label, "unsafe", violated="cond1", witness=m1,
                solve_ms=ms1, formula_nodes=nodes, cnf_vars=v1, cnf_clauses=n1,
            )
        s2, m2, ms2, v2, n2 = decide(c2, q, "cond2")
        ms = ms1 + ms2
        stats = dict(solve_ms=ms, formula_nodes=nodes, cnf_vars=v1 + v2, cnf_clauses=n1 + n2)
        if s2 == "sat":
            return Verdict(q.label, "unsafe", violated="cond2", witness=m2, **stats)
        if s1 == "unsat" and s2 == "unsat":
            return Verdict(q.label, "safe", **stats)
        reason = (s1 if s1 != "unsat" else s2).split(":", 1)[1]
        return Verdict(q.label, "unknown", budget=reason, **stats)

    if jobs > 1 and len(targets) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            verdicts = list(pool.map(work, targets))
    else:
        verdicts = [work(q) for q in targets]
    verdicts.extend(Verdict(q.label, "skipped") for q in circuit.skipped_qubits())

    total_ms = (time.perf_counter() - t_start) * 1000.0
    config = {
        "solver": solver,
        "jobs": jobs,
        "budget_conflicts": budget_conflicts,
        "budget_seconds": budget_seconds,
    }
    return Report(
        program=program,
        n_qubits=circuit.n_qubits,
        n_gates=len(circuit.gates),
        verdicts=verdicts,
        total_ms=total_ms,
        config=config,
    )


def report_exit_code(report: Report) -> int:
    statuses = [v.status for v in report.verdicts]
    if "unsafe" in statuses:
        return EXIT_UNSAFE
    if "unknown" in statuses:
        return EXIT_UNKNOWN
    return EXIT_SAFE


def cross_check(circuit: FlatCircuit, report: Report, err=None) -> bool:
    """Compare every decided verdict against exhaustive enumeration.

    Returns False (and explains on err) on any disagreement, including a
    witness that fails to replay."""
    err = err if err is not None else sys.stderr
    if circuit.n_qubits > EXHAUSTIVE_CAP:
        print(
            f"warning: oracle cross-check skipped ({circuit.n_qubits} qubits "
            f"exceed the cap of {EXHAUSTIVE_CAP})",
            file=err,
        )
        return True
    by_label = {q.label: q for q in circuit.qubits}
    ok = True
    for v in report.verdicts:
        if v.status in ("skipped", "unknown"):
            continue
        q = by_label[v.qubit]
        truth = exhaustive_safe(circuit, q)
        if truth.safe != (v.status == "safe"):
            print(
                f"oracle disagreement on {v.qubit}: solver says {v.status}, "
                f"enumeration says {'safe' if truth.safe else 'unsafe'}",
                file=err,
            )
            ok = False
            continue
        if v.status == "unsafe" and v.witness is not None:
            if not witness_violates(circuit, q, v.witness, v.violated):
                print(
                    f"oracle disagreement on {v.qubit}: witness does not "
                    f"replay as a {v.violated} violation",
                    file=err,
                )
                ok = False
    return ok


# ---------------------------------------------------------------------------
# subcommand implementations


def _print_verify(report: Report, out):
    for v in report.verdicts:
        if v.status == "safe":
            extra = f"({v.formula_nodes} nodes, {v.cnf_vars} vars, {v.cnf_clauses} clauses, {v.solve_ms:.1f} ms)"
            print(f"{v.qubit}: Safe {extra}", file=out)
        elif v.status == "unsafe":
            w = ""
            if v.witness is not None:
                bits = ", ".join(f"{k}={int(b)}" for k, b in sorted(v.witness.items()))
                w = f", witness {{{bits}}}"
            print(f"{v.qubit}: Unsafe via {v.violated}{w}", file=out)
        elif v.status == "skipped":
            print(f"{v.qubit}: Skipped", file=out)
        else:
            print(f"{v.qubit}: Unknown (budget: {v.budget})", file=out)
    counts = {s: 0 for s in ("safe", "unsafe", "skipped", "unknown")}
    for v in report.verdicts:
        counts[v.status] += 1
    print(
        f"{counts['safe']} safe, {counts['unsafe']} unsafe, "
        f"{counts['skipped']} skipped, {counts['unknown']} unknown "
        f"in {report.total_ms:.1f} ms",
        file=out,
    )


def cmd_verify(args, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR
    try:
        circuit = elaborate_source(text)
    except SourceError as exc:
        print(f"error: {args.file}:{exc}", file=err)
        return EXIT_ERROR
    for w in circuit.warnings:
        print(f"warning: {w}", file=err)
    try:
        report = verify_circuit(
            circuit,
            program=str(args.file),
            solver=args.solver,
            emit_dimacs_dir=args.emit_dimacs,
            emit_smtlib_dir=args.emit_smtlib,
            jobs=args.jobs,
            budget_conflicts=args.budget_conflicts,
            budget_seconds=args.budget_seconds,
        )
    except FormulaSizeError as exc:
        print(f"error: formula too large: {exc}", file=err)
        return EXIT_UNKNOWN
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR
    _print_verify(report, out)
    if args.report:
        Path(args.report).write_text(report.to_json())
    if args.oracle:
        try:
            agreed = cross_check(circuit, report, err=err)
        except TooManyQubits as exc:
            print(f"warning: oracle cross-check skipped: {exc}", file=err)
            agreed = True
        if not agreed:
            return EXIT_DISAGREE
    return report_exit_code(report)


def cmd_gen(args, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        source = generate(args.kind, args.size)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_ERROR
    circuit = elaborate_source(source)  # generator output must always elaborate
    Path(args.out).write_text(source)
    print(
        f"wrote {args.out}: {args.kind} size {args.size}, "
        f"{circuit.n_qubits} qubits, {len(circuit.gates)} gates",
        file=out,
    )
    return EXIT_SAFE


def cmd_bench(args, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()] if args.sizes else []
    rows = []
    worst = EXIT_SAFE
    header = f"{'kind':<6} {'size':>6} {'qubits':>7} {'gates':>7} {'verdict':<10} {'solver_ms':>10}"
    print(header, file=out)
    print("-" * len(header), file=out)
    for size in sizes:
        try:
            source = generate(args.kind, size)
        except ValueError as exc:
            print(f"error: {exc}", file=err)
            return EXIT_ERROR
        circuit = elaborate_source(source)
        report = verify_circuit(
            circuit,
            program=f"{args.kind}[{size}]",
            solver=args.solver,
            budget_conflicts=args.budget_conflicts,
            budget_seconds=args.budget_seconds,
        )
        solver_ms = sum(v.solve_ms for v in report.verdicts)
        code = report_exit_code(report)
        verdict = {EXIT_SAFE: "all-safe", EXIT_UNSAFE: "unsafe", EXIT_UNKNOWN: "unknown"}[code]
        worst = max(worst, code)
        rows.append(
            {
                "kind": args.kind,
                "size": size,
                "qubits": report.n_qubits,
                "gates": report.n_gates,
                "verdict": verdict,
                "solver_ms": round(solver_ms, 3),
            }
        )
        print(
            f"{args.kind:<6} {size:>6} {report.n_qubits:>7} {report.n_gates:>7} "
            f"{verdict:<10} {solver_ms:>10.1f}",
            file=out,
        )
    if args.report:
        doc = {"version": __version__, "solver": args.solver, "rows": rows}
        Path(args.report).write_text(json.dumps(doc, indent=2) + "\n")
    return worst


# ---------------------------------------------------------------------------
# argument plumbing


def _env(name: str, fallback=None):
    return os.environ.get("QBORROW_" + name, fallback)


def _env_flag(name: str) -> bool:
    return (_env(name) or "").strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qborrow",
        description="Verify safe uncomputation of borrowed qubits in qbr programs.",
    )
    parser.add_argument("--version", action="version", version=f"qborrow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_solver_opts(p):
        p.add_argument(
            "--solver",
            default=_env("SOLVER", "internal"),
            help="internal (default) or cmd:<exe> for an external SMT solver",
        )
        p.add_argument(
            "--budget-conflicts",
            type=int,
            default=int(_env("BUDGET_CONFLICTS", DEFAULT_BUDGET_CONFLICTS)),
        )
        p.add_argument(
            "--budget-seconds",
            type=float,
            default=float(_env("BUDGET_SECONDS", DEFAULT_BUDGET_SECONDS)),
        )
        p.add_argument(
            "--report",
            default=_env("REPORT"),
            metavar="FILE",
            help="write a JSON report to FILE",
        )

    v = sub.add_parser("verify", help="verify all borrowed qubits of a program")
    v.add_argument("file")
    add_solver_opts(v)
    v.add_argument("--emit-dimacs", default=_env("EMIT_DIMACS"), metavar="DIR")
    v.add_argument("--emit-smtlib", default=_env("EMIT_SMTLIB"), metavar="DIR")
    v.add_argument("--oracle", action="store_true", default=_env_flag("ORACLE"))
    v.add_argument("--jobs", type=int, default=int(_env("JOBS", 1)))

    g = sub.add_parser("gen", help="generate a benchmark program")
    g.add_argument("kind", choices=["adder", "mcx"])
    size_env = _env("SIZE")
    g.add_argument(
        "--size", type=int, required=size_env is None,
        default=None if size_env is None else int(size_env),
    )
    out_env = _env("OUT")
    g.add_argument(
        "-o", "--out", required=out_env is None, default=out_env, metavar="FILE"
    )

    b = sub.add_parser("bench", help="verify a size sweep and time the solver")
    b.add_argument("kind", choices=["adder", "mcx"])
    sizes_env = _env("SIZES")
    b.add_argument("--sizes", required=sizes_env is None, default=sizes_env)
    add_solver_opts(b)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    if args.command == "gen":
        return cmd_gen(args)
    return cmd_bench(args)


if __name__ == "__main__":
    sys.exit(main())
