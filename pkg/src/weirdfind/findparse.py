"""Parse an argv vector into a mkdir command or a find expression AST.

The supported find surface is a tight allowlist: the tests and actions
the emitted scripts use, with the operator precedence
`( )` > `!` > implicit and > `-o` > `,`. Exec/execdir templates run to
the literal `;` token and may not nest another -exec/-execdir. Global
options (-depth, -files0-from, -regextype) must precede the expression;
`-regextype` switches the flavor for the -regex primaries that follow.
`-delete` anywhere in the expression implies post-order traversal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

from . import regexen


class FindParseError(ValueError):
    """Base class for argv parse failures."""


class UnknownPrimary(FindParseError):
    pass


class MissingSemicolon(FindParseError):
    pass


class NestedExecFind(FindParseError):
    pass


class BadSize(FindParseError):
    pass


class EmptyParens(FindParseError):
    pass


class BadFormat(FindParseError):
    pass


@dataclass(frozen=True)
class TrueTest:
    pass


@dataclass(frozen=True)
class FalseTest:
    pass


@dataclass(frozen=True)
class EmptyTest:
    pass


@dataclass(frozen=True)
class NameTest:
    pattern: str


@dataclass(frozen=True)
class SizeTest:
    n: int  # exact size in bytes (the only supported unit is `c`)


@dataclass(frozen=True)
class TypeTest:
    kind: str  # "d" | "f"


@dataclass(frozen=True)
class RegexTest:
    pattern: str
    flavor: str


@dataclass(frozen=True)
class PruneAction:
    pass


@dataclass(frozen=True)
class QuitAction:
    pass


@dataclass(frozen=True)
class DeleteAction:
    pass


@dataclass(frozen=True)
class PrintfAction:
    fmt: str


@dataclass(frozen=True)
class FprintfAction:
    target: str
    fmt: str


@dataclass(frozen=True)
class FprintAction:
    target: str


@dataclass(frozen=True)
class ExecAction:
    template: tuple[str, ...]


@dataclass(frozen=True)
class ExecdirAction:
    template: tuple[str, ...]


@dataclass(frozen=True)
class Not:
    child: "Expr"


@dataclass(frozen=True)
class And:
    parts: tuple["Expr", ...]


@dataclass(frozen=True)
class Or:
    parts: tuple["Expr", ...]


@dataclass(frozen=True)
class Comma:
    parts: tuple["Expr", ...]


Expr = Union[
    TrueTest,
    FalseTest,
    EmptyTest,
    NameTest,
    SizeTest,
    TypeTest,
    RegexTest,
    PruneAction,
    QuitAction,
    DeleteAction,
    PrintfAction,
    FprintfAction,
    FprintAction,
    ExecAction,
    ExecdirAction,
    Not,
    And,
    Or,
    Comma,
]


@dataclass(frozen=True)
class MkdirCommand:
    parents: bool
    paths: tuple[str, ...]


@dataclass(frozen=True)
class FindCommand:
    starts: tuple[str, ...]
    files0_from: str | None
    depth: bool
    expr: Expr


Command = Union[MkdirCommand, FindCommand]

_GLOBAL_OPTIONS = ("-depth", "-files0-from", "-regextype")
_OPERATOR_TOKENS = {"(", ")", "!", ",", ";"}

# format directives: %f basename, %s size, %p path; escapes: \0 NUL, \\
_DIRECTIVES = "fsp"
_ESCAPES = "0\\"


def validate_format(fmt: str) -> None:
    i = 0
    while i < len(fmt):
        c = fmt[i]
        if c in "%\\":
            if i + 1 >= len(fmt):
                raise BadFormat(f"dangling {c!r} in format {fmt!r}")
            d = fmt[i + 1]
            ok = _DIRECTIVES if c == "%" else _ESCAPES
            if d not in ok:
                raise BadFormat(f"unsupported {c}{d} in format {fmt!r}")
            i += 2
        else:
            i += 1


def iter_nodes(expr: Expr) -> Iterator[Expr]:
    """Pre-order walk in construction (left-to-right) order."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        t = type(node)
        if t in (And, Or, Comma):
            stack.extend(reversed(node.parts))
        elif t is Not:
            stack.append(node.child)


def contains_delete(expr: Expr) -> bool:
    return any(type(n) is DeleteAction for n in iter_nodes(expr))


class _FindParser:
    def __init__(self, tokens: list[str]):
        self.toks = tokens
        self.i = 0
        self.flavor = regexen.EMACS

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def next(self) -> str:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def arg(self, primary: str) -> str:
        if self.i >= len(self.toks):
            raise FindParseError(f"{primary} needs an argument")
        return self.next()

    def parse(self) -> FindCommand:
        starts: list[str] = []
        while True:
            tok = self.peek()
            if tok is None or tok.startswith("-") or tok in _OPERATOR_TOKENS:
                break
            starts.append(self.next())

        files0_from: str | None = None
        depth = False
        while self.peek() in _GLOBAL_OPTIONS:
            opt = self.next()
            if opt == "-depth":
                depth = True
            elif opt == "-files0-from":
                files0_from = self.arg(opt)
            else:
                flavor = self.arg(opt)
                if flavor not in (regexen.EMACS, regexen.AWK):
                    raise FindParseError(f"unknown regex type {flavor!r}")
                self.flavor = flavor

        if files0_from is not None and starts:
            raise FindParseError("-files0-from and command-line start points conflict")
        if files0_from is None and not starts:
            starts = ["."]

        if self.peek() is None:
            expr: Expr = TrueTest()
        else:
            expr = self.comma()
            if self.peek() is not None:
                raise FindParseError(f"unexpected token {self.peek()!r}")

        if contains_delete(expr):
            depth = True  # "-delete ... Implies -depth"
        return FindCommand(tuple(starts), files0_from, depth, expr)

    def comma(self) -> Expr:
        parts = [self.disjunction()]
        while self.peek() == ",":
            self.next()
            parts.append(self.disjunction())
        return parts[0] if len(parts) == 1 else Comma(tuple(parts))

    def disjunction(self) -> Expr:
        parts = [self.conjunction()]
        while self.peek() == "-o":
            self.next()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Expr:
        parts = [self.unary()]
        while True:
            tok = self.peek()
            if tok is None or tok in ("-o", ",", ")"):
                break
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Expr:
        if self.peek() == "!":
            self.next()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.next()
        if tok == "(":
            if self.peek() == ")":
                raise EmptyParens("empty parentheses")
            inner = self.comma()
            if self.peek() != ")":
                raise FindParseError("unbalanced parentheses")
            self.next()
            return inner
        if tok == "-true":
            return TrueTest()
        if tok == "-false":
            return FalseTest()
        if tok == "-empty":
            return EmptyTest()
        if tok == "-prune":
            return PruneAction()
        if tok == "-quit":
            return QuitAction()
        if tok == "-delete":
            return DeleteAction()
        if tok == "-name":
            return NameTest(self.arg(tok))
        if tok == "-size":
            spec = self.arg(tok)
            if not spec.endswith("c") or not spec[:-1].isdigit():
                raise BadSize(f"only byte sizes like '2c' are supported: {spec!r}")
            return SizeTest(int(spec[:-1]))
        if tok == "-type":
            kind = self.arg(tok)
            if kind not in ("d", "f"):
                raise FindParseError(f"-type supports only d or f, got {kind!r}")
            return TypeTest(kind)
        if tok == "-regex":
            pattern = self.arg(tok)
            regexen.parse_regex(pattern, self.flavor)  # fail fast on bad patterns
            return RegexTest(pattern, self.flavor)
        if tok == "-printf":
            fmt = self.arg(tok)
            validate_format(fmt)
            return PrintfAction(fmt)
        if tok == "-fprintf":
            target = self.arg(tok)
            fmt = self.arg(tok)
            validate_format(fmt)
            return FprintfAction(target, fmt)
        if tok == "-fprint":
            return FprintAction(self.arg(tok))
        if tok in ("-exec", "-execdir"):
            template: list[str] = []
            while self.peek() is not None and self.peek() != ";":
                template.append(self.next())
            if self.peek() != ";":
                raise MissingSemicolon(f"{tok} template not terminated by ';'")
            self.next()
            if not template:
                raise FindParseError(f"{tok} needs a command template")
            if any(t in ("-exec", "-execdir") for t in template):
                raise NestedExecFind("the outer find would consume the inner ';'")
            if tok == "-exec":
                return ExecAction(tuple(template))
            return ExecdirAction(tuple(template))
        if tok in _GLOBAL_OPTIONS:
            raise FindParseError(f"{tok} must precede the expression")
        raise UnknownPrimary(f"unsupported primary {tok!r}")


def _parse_mkdir(argv: list[str]) -> MkdirCommand:
    parents = False
    paths: list[str] = []
    for tok in argv[1:]:
        if tok == "-p":
            parents = True
        elif tok.startswith("-"):
            raise UnknownPrimary(f"mkdir supports only -p, got {tok!r}")
        else:
            paths.append(tok)
    if not paths:
        raise FindParseError("mkdir needs at least one path")
    return MkdirCommand(parents, tuple(paths))


def parse_command(argv: list[str]) -> Command:
    """Parse one argv vector (tokens are raw, no shell unescaping)."""
    if not argv:
        raise FindParseError("empty argv")
    if argv[0] == "mkdir":
        return _parse_mkdir(list(argv))
    if argv[0] == "find":
        return _FindParser(list(argv[1:])).parse()
    raise FindParseError(f"unknown binary {argv[0]!r}")


# --- rendering (round-trip test utility) ---------------------------------


def render_command(cmd: Command) -> list[str]:
    """Render back to argv such that re-parsing yields an identical AST."""
    if isinstance(cmd, MkdirCommand):
        out = ["mkdir"]
        if cmd.parents:
            out.append("-p")
        out.extend(cmd.paths)
        return out
    out = ["find"]
    if cmd.files0_from is not None:
        out.extend(["-files0-from", cmd.files0_from])
    elif cmd.starts != (".",):
        out.extend(cmd.starts)
    if cmd.depth and not contains_delete(cmd.expr):
        out.append("-depth")
    flavors = {n.flavor for n in iter_nodes(cmd.expr) if type(n) is RegexTest}
    if len(flavors) > 1:
        raise FindParseError("mixed regex flavors cannot be rendered")
    if flavors == {regexen.AWK}:
        out.extend(["-regextype", regexen.AWK])
    if not isinstance(cmd.expr, TrueTest):
        _render_expr(cmd.expr, out)
    return out


def _render_expr(expr: Expr, out: list[str]) -> None:
    t = type(expr)
    if t in (And, Or, Comma):
        sep = {And: None, Or: "-o", Comma: ","}[t]
        for i, part in enumerate(expr.parts):
            if i and sep:
                out.append(sep)
            if type(part) in (And, Or, Comma):
                out.append("(")
                _render_expr(part, out)
                out.append(")")
            else:
                _render_expr(part, out)
    elif t is Not:
        out.append("!")
        if type(expr.child) in (And, Or, Comma):
            out.append("(")
            _render_expr(expr.child, out)
            out.append(")")
        else:
            _render_expr(expr.child, out)
    elif t is TrueTest:
        out.append("-true")
    elif t is FalseTest:
        out.append("-false")
    elif t is EmptyTest:
        out.append("-empty")
    elif t is PruneAction:
        out.append("-prune")
    elif t is QuitAction:
        out.append("-quit")
    elif t is DeleteAction:
        out.append("-delete")
    elif t is NameTest:
        out.extend(["-name", expr.pattern])
    elif t is SizeTest:
        out.extend(["-size", f"{expr.n}c"])
    elif t is TypeTest:
        out.extend(["-type", expr.kind])
    elif t is RegexTest:
        if expr.flavor != state["flavor"]:
            raise FindParseError(
                "cannot render a flavor switch mid-expression; "
                f"{expr.flavor!r} regex after {state['flavor']!r}"
            )
        out.extend(["-regex", expr.pattern])
    elif t is PrintfAction:
        out.extend(["-printf", expr.fmt])
    elif t is FprintfAction:
        out.extend(["-fprintf", expr.target, expr.fmt])
    elif t is FprintAction:
        out.extend(["-fprint", expr.target])
    elif t is ExecAction:
        out.extend(["-exec", *expr.template, ";"])
    elif t is ExecdirAction:
        out.extend(["-execdir", *expr.template, ";"])
    else:  # pragma: no cover
        raise TypeError(f"cannot render {expr!r}")
