"""Lexer, recursive-descent parser and printer for the QBorrow language.

The accepted syntax is exactly the grammar in QBorrow.g4 (kept next to this
module as the normative reference): `let` bindings, register declarations
(`borrow`, `borrow@`, `alloc`), `release`, the gates X/CNOT/CCNOT, and `for`
loops over compile-time arithmetic.  Comments are `//` to end of line and
non-nesting `/* ... */`.
"""

from dataclasses import dataclass, field

from .errors import SourceError

KEYWORDS = frozenset(
    ["let", "borrow", "borrow@", "alloc", "release", "X", "CNOT", "CCNOT", "for", "to"]
)

OPERATORS = frozenset("+-*=")
PUNCTUATION = frozenset(";,[](){}")

INT64_MAX = 2**63 - 1

Loc = tuple[int, int]  # (line, column), both 1-based


class LexError(SourceError):
    pass


class UnterminatedComment(LexError):
    pass


class ParseError(SourceError):
    def __init__(self, line: int, column: int, expected: tuple[str, ...], found: str):
        self.expected = expected
        self.found = found
        what = " or ".join(expected)
        super().__init__(line, column, f"expected {what}, found {found}")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | identifier | number | operator | punctuation
    lexeme: str
    line: int
    column: int

    @property
    def loc(self) -> Loc:
        return (self.line, self.column)


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, dropping whitespace and comments."""
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def advance(k: int) -> None:
        nonlocal i, line, col
        for _ in range(k):
            if source[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n":
            advance(1)
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                advance(1)
            continue
        if source.startswith("/*", i):
            start_line, start_col = line, col
            advance(2)
            while i < n and not source.startswith("*/", i):
                advance(1)
            if i >= n:
                raise UnterminatedComment(start_line, start_col, "unterminated '/*' comment")
            advance(2)
            continue
        if c.isalpha() or c == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            advance(j - i)
            # 'borrow@' is one keyword token; the '@' must be adjacent
            if word == "borrow" and i < n and source[i] == "@":
                word = "borrow@"
                advance(1)
            kind = "keyword" if word in KEYWORDS else "identifier"
            tokens.append(Token(kind, word, start_line, start_col))
            continue
        if c.isdigit():
            start_line, start_col = line, col
            j = i
            while j < n and source[j].isdigit():
                j += 1
            digits = source[i:j]
            advance(j - i)
            if int(digits) > INT64_MAX:
                raise LexError(
                    start_line, start_col, f"integer literal {digits} exceeds 64-bit range"
                )
            tokens.append(Token("number", digits, start_line, start_col))
            continue
        if c in OPERATORS:
            tokens.append(Token("operator", c, line, col))
            advance(1)
            continue
        if c in PUNCTUATION:
            tokens.append(Token("punctuation", c, line, col))
            advance(1)
            continue
        raise LexError(line, col, f"unexpected character {c!r}")
    return tokens


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------
# Locations are carried for diagnostics but excluded from equality so that
# re-parsing a pretty-printed program compares structurally equal.


@dataclass(frozen=True)
class Num:
    value: int
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Name:
    ident: str
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg:
    operand: "Expr"
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-' or '*'
    left: "Expr"
    right: "Expr"
    loc: Loc = field(default=(0, 0), compare=False)


Expr = Num | Name | Neg | BinOp


@dataclass(frozen=True)
class RegRef:
    """Register reference: `name[index]`, or bare `name` (index is None)."""

    name: str
    index: Expr | None
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Let:
    name: str
    value: Expr
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Borrow:
    reg: RegRef
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class BorrowSkip:
    """`borrow@`: borrow a dirty register but skip its verification."""

    reg: RegRef
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Alloc:
    reg: RegRef
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Release:
    name: str
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class GateX:
    target: RegRef
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class GateCNOT:
    control: RegRef
    target: RegRef
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class GateCCNOT:
    control1: RegRef
    control2: RegRef
    target: RegRef
    loc: Loc = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class For:
    var: str
    start: Expr
    stop: Expr
    body: tuple["Stmt", ...]
    loc: Loc = field(default=(0, 0), compare=False)


Stmt = Let | Borrow | BorrowSkip | Alloc | Release | GateX | GateCNOT | GateCCNOT | For


@dataclass(frozen=True)
class ProgramAst:
    statements: tuple[Stmt, ...]


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last.line if last else 1
            col = last.column + len(last.lexeme) if last else 1
            return ParseError(line, col, expected, "end of input")
        return ParseError(tok.line, tok.column, expected, repr(tok.lexeme))

    def take(self, kind: str, lexeme: str | None = None) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind or (lexeme is not None and tok.lexeme != lexeme):
            expected = (repr(lexeme),) if lexeme is not None else (kind,)
            raise self.error(expected)
        self.pos += 1
        return tok

    def at(self, kind: str, lexeme: str | None = None) -> bool:
        tok = self.peek()
        return (
            tok is not None
            and tok.kind == kind
            and (lexeme is None or tok.lexeme == lexeme)
        )

    def program(self) -> ProgramAst:
        statements = [self.statement()]
        while self.peek() is not None:
            statements.append(self.statement())
        return ProgramAst(tuple(statements))

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok is None or tok.kind != "keyword":
            raise self.error(("statement",))
        loc = tok.loc
        if tok.lexeme == "let":
            self.pos += 1
            name = self.take("identifier").lexeme
            self.take("operator", "=")
            value = self.expr()
            self.take("punctuation", ";")
            return Let(name, value, loc)
        if tok.lexeme in ("borrow", "borrow@", "alloc"):
            self.pos += 1
            reg = self.reg()
            self.take("punctuation", ";")
            cls = {"borrow": Borrow, "borrow@": BorrowSkip, "alloc": Alloc}[tok.lexeme]
            return cls(reg, loc)
        if tok.lexeme == "release":
            self.pos += 1
            name = self.take("identifier").lexeme
            self.take("punctuation", ";")
            return Release(name, loc)
        if tok.lexeme == "X":
            self.pos += 1
            self.take("punctuation", "[")
            target = self.reg()
            self.take("punctuation", "]")
            self.take("punctuation", ";")
            return GateX(target, loc)
        if tok.lexeme == "CNOT":
            self.pos += 1
            self.take("punctuation", "[")
            control = self.reg()
            self.take("punctuation", ",")
            target = self.reg()
            self.take("punctuation", "]")
            self.take("punctuation", ";")
            return GateCNOT(control, target, loc)
        if tok.lexeme == "CCNOT":
            self.pos += 1
            self.take("punctuation", "[")
            c1 = self.reg()
            self.take("punctuation", ",")
            c2 = self.reg()
            self.take("punctuation", ",")
            target = self.reg()
            self.take("punctuation", "]")
            self.take("punctuation", ";")
            return GateCCNOT(c1, c2, target, loc)
        if tok.lexeme == "for":
            self.pos += 1
            var = self.take("identifier").lexeme
            self.take("operator", "=")
            start = self.expr()
            self.take("keyword", "to")
            stop = self.expr()
            self.take("punctuation", "{")
            body = []
            while not self.at("punctuation", "}"):
                body.append(self.statement())
            self.take("punctuation", "}")
            return For(var, start, stop, tuple(body), loc)
        raise self.error(("statement",))

    def reg(self) -> RegRef:
        name_tok = self.take("identifier")
        index = None
        if self.at("punctuation", "["):
            self.pos += 1
            index = self.expr()
            self.take("punctuation", "]")
        return RegRef(name_tok.lexeme, index, name_tok.loc)

    def expr(self) -> Expr:
        # optional leading sign applies to the first term only
        tok = self.peek()
        if tok is not None and tok.kind == "operator" and tok.lexeme in "+-":
            self.pos += 1
            operand = self.term()
            left: Expr = Neg(operand, tok.loc) if tok.lexeme == "-" else operand
        else:
            left = self.term()
        while self.at("operator", "+") or self.at("operator", "-"):
            op_tok = self.take("operator")
            right = self.term()
            left = BinOp(op_tok.lexeme, left, right, op_tok.loc)
        return left

    def term(self) -> Expr:
        left = self.factor()
        while self.at("operator", "*"):
            op_tok = self.take("operator")
            right = self.factor()
            left = BinOp("*", left, right, op_tok.loc)
        return left

    def factor(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.error(("number", "identifier", "'('"))
        if tok.kind == "number":
            self.pos += 1
            return Num(int(tok.lexeme), tok.loc)
        if tok.kind == "identifier":
            self.pos += 1
            return Name(tok.lexeme, tok.loc)
        if tok.kind == "punctuation" and tok.lexeme == "(":
            self.pos += 1
            inner = self.expr()
            self.take("punctuation", ")")
            return inner
        raise self.error(("number", "identifier", "'('"))


def parse(tokens: list[Token]) -> ProgramAst:
    """Parse a token list into a program AST; raises ParseError on violation."""
    if not tokens:
        raise ParseError(1, 1, ("statement",), "end of input")
    return _Parser(tokens).program()


def parse_source(source: str) -> ProgramAst:
    return parse(tokenize(source))


# --------------------------------------------------------------------------
# Printer
# --------------------------------------------------------------------------


def format_expr(e: Expr, prec: int = 0, head: bool = True) -> str:
    """Render an expression with minimal parentheses.

    `head` is true when a leading unary sign would be legal at this position
    (the grammar only allows it at the start of an expression).
    """
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Name):
        return e.ident
    if isinstance(e, Neg):
        s = "-" + format_expr(e.operand, 2, False)
        return s if head and prec < 2 else "(" + s + ")"
    if isinstance(e, BinOp):
        if e.op == "*":
            s = f"{format_expr(e.left, 2, False)} * {format_expr(e.right, 3, False)}"
            return s if prec < 3 else "(" + s + ")"
        s = f"{format_expr(e.left, 1, head)} {e.op} {format_expr(e.right, 2, False)}"
        return s if prec < 2 else "(" + s + ")"
    raise TypeError(f"not an expression: {e!r}")


def format_reg(r: RegRef) -> str:
    if r.index is None:
        return r.name
    return f"{r.name}[{format_expr(r.index)}]"


def _format_stmt(s: Stmt, indent: str, out: list[str]) -> None:
    if isinstance(s, Let):
        out.append(f"{indent}let {s.name} = {format_expr(s.value)};")
    elif isinstance(s, Borrow):
        out.append(f"{indent}borrow {format_reg(s.reg)};")
    elif isinstance(s, BorrowSkip):
        out.append(f"{indent}borrow@ {format_reg(s.reg)};")
    elif isinstance(s, Alloc):
        out.append(f"{indent}alloc {format_reg(s.reg)};")
    elif isinstance(s, Release):
        out.append(f"{indent}release {s.name};")
    elif isinstance(s, GateX):
        out.append(f"{indent}X[{format_reg(s.target)}];")
    elif isinstance(s, GateCNOT):
        out.append(f"{indent}CNOT[{format_reg(s.control)}, {format_reg(s.target)}];")
    elif isinstance(s, GateCCNOT):
        out.append(
            f"{indent}CCNOT[{format_reg(s.control1)}, "
            f"{format_reg(s.control2)}, {format_reg(s.target)}];"
        )
    elif isinstance(s, For):
        out.append(
            f"{indent}for {s.var} = {format_expr(s.start)} to {format_expr(s.stop)} {{"
        )
        for inner in s.body:
            _format_stmt(inner, indent + "    ", out)
        out.append(f"{indent}}}")
    else:
        raise TypeError(f"not a statement: {s!r}")


def print_program(ast: ProgramAst) -> str:
    """Pretty-print an AST; the output re-parses to an equal AST."""
    out: list[str] = []
    for s in ast.statements:
        _format_stmt(s, "", out)
    return "\n".join(out) + "\n"
