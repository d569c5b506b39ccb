"""Backtracking regex engine for the two flavors find's -regex needs.

Emacs flavor groups with `\\(` `\\)`, alternates with `\\|` and supports
back-references `\\1`..`\\9`; bare parentheses are literals and `?` is
rejected. Awk flavor groups with bare `(` `)`, alternates with `|`,
supports `?`, and has no back-references. In both flavors `$` is an
end-of-input assertion and matching is full-string: the whole input must
be in the pattern's language.

Matching is a backtracking VM with a fixed step budget; exceeding it is
an abort (StepBudgetExceeded), never a "no match".
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

EMACS = "emacs"
AWK = "awk"

STEP_BUDGET = 10_000_000
_STACK_LIMIT = 1_000_000  # memory guard for pathological backtracking


class RegexError(ValueError):
    """Base class for pattern parse failures."""


class UnsupportedConstruct(RegexError):
    pass


class BackrefInAwk(RegexError):
    pass


class UnbalancedGroup(RegexError):
    pass


class DanglingQuantifier(RegexError):
    pass


class StepBudgetExceeded(RuntimeError):
    """Backtracking fuel ran out; the match attempt is aborted."""


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Lit:
    ch: str


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class CharClass:
    ranges: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class Concat:
    parts: tuple["RegexNode", ...]


@dataclass(frozen=True)
class Alt:
    options: tuple["RegexNode", ...]


@dataclass(frozen=True)
class Star:
    child: "RegexNode"


@dataclass(frozen=True)
class Opt:
    child: "RegexNode"


@dataclass(frozen=True)
class Group:
    index: int
    child: "RegexNode"


@dataclass(frozen=True)
class Backref:
    index: int


@dataclass(frozen=True)
class EndAnchor:
    pass


RegexNode = (
    Empty
    | Lit
    | AnyChar
    | CharClass
    | Concat
    | Alt
    | Star
    | Opt
    | Group
    | Backref
    | EndAnchor
)


class _Parser:
    def __init__(self, pattern: str, flavor: str):
        self.pat = pattern
        self.flavor = flavor
        self.i = 0
        self.ngroups = 0

    def parse(self) -> RegexNode:
        node = self._alt()
        if self.i < len(self.pat):
            # only a stray group closer can stop _alt early
            raise UnbalancedGroup(f"unmatched group close at {self.i}")
        return node

    # token inspection -------------------------------------------------

    def _at_alt(self) -> bool:
        p, i = self.pat, self.i
        if self.flavor == AWK:
            return i < len(p) and p[i] == "|"
        return p.startswith("\\|", i)

    def _at_close(self) -> bool:
        p, i = self.pat, self.i
        if self.flavor == AWK:
            return i < len(p) and p[i] == ")"
        return p.startswith("\\)", i)

    def _at_open(self) -> bool:
        p, i = self.pat, self.i
        if self.flavor == AWK:
            return i < len(p) and p[i] == "("
        return p.startswith("\\(", i)

    # grammar ----------------------------------------------------------

    def _alt(self) -> RegexNode:
        options = [self._concat()]
        while self._at_alt():
            self.i += 1 if self.flavor == AWK else 2
            options.append(self._concat())
        if len(options) == 1:
            return options[0]
        return Alt(tuple(options))

    def _concat(self) -> RegexNode:
        parts: list[RegexNode] = []
        while self.i < len(self.pat) and not self._at_alt() and not self._at_close():
            parts.append(self._piece())
        if not parts:
            return Empty()
        if len(parts) == 1:
            return parts[0]
        return Concat(tuple(parts))

    def _piece(self) -> RegexNode:
        node = self._atom()
        while self.i < len(self.pat):
            c = self.pat[self.i]
            if c == "*":
                self.i += 1
                node = Star(node)
            elif c == "?" and self.flavor == AWK:
                self.i += 1
                node = Opt(node)
            else:
                break
        return node

    def _atom(self) -> RegexNode:
        p = self.pat
        c = p[self.i]
        if c == "*" or (c == "?" and self.flavor == AWK):
            raise DanglingQuantifier(f"quantifier with nothing to repeat at {self.i}")
        if c == "?":
            raise UnsupportedConstruct("'?' is not supported in emacs flavor")
        if c in "+{^":
            raise UnsupportedConstruct(f"{c!r} is not supported")
        if c == "$":
            self.i += 1
            return EndAnchor()
        if c == ".":
            self.i += 1
            return AnyChar()
        if c == "[":
            return self._char_class()
        if self._at_open():
            self.i += 1 if self.flavor == AWK else 2
            self.ngroups += 1
            index = self.ngroups
            inner = self._alt()
            if not self._at_close():
                raise UnbalancedGroup("unterminated group")
            self.i += 1 if self.flavor == AWK else 2
            return Group(index, inner)
        if c == "\\":
            return self._escape()
        self.i += 1
        return Lit(c)

    def _escape(self) -> RegexNode:
        if self.i + 1 >= len(self.pat):
            raise UnsupportedConstruct("trailing backslash")
        d = self.pat[self.i + 1]
        if d.isdigit():
            if d == "0":
                raise UnsupportedConstruct("\\0 is not a back-reference")
            if self.flavor == AWK:
                raise BackrefInAwk("back-references are not awk syntax")
            index = int(d)
            if index > self.ngroups:
                raise RegexError(f"back-reference \\{d} to a group not yet opened")
            self.i += 2
            return Backref(index)
        if d.isalnum():
            raise UnsupportedConstruct(f"escape \\{d} is not supported")
        # escaped punctuation is a literal in both flavors
        self.i += 2
        return Lit(d)

    def _char_class(self) -> RegexNode:
        p = self.pat
        self.i += 1
        if self.i < len(p) and p[self.i] == "^":
            raise UnsupportedConstruct("negated character classes are not supported")
        ranges: list[tuple[str, str]] = []
        while self.i < len(p) and p[self.i] != "]":
            c = p[self.i]
            if c == "\\":
                raise UnsupportedConstruct("escapes inside character classes")
            if self.i + 2 < len(p) and p[self.i + 1] == "-" and p[self.i + 2] != "]":
                hi = p[self.i + 2]
                if hi < c:
                    raise UnsupportedConstruct(f"reversed range {c}-{hi}")
                ranges.append((c, hi))
                self.i += 3
            else:
                ranges.append((c, c))
                self.i += 1
        if self.i >= len(p):
            raise UnsupportedConstruct("unterminated character class")
        self.i += 1
        if not ranges:
            raise UnsupportedConstruct("empty character class")
        return CharClass(tuple(ranges))


def parse_regex(pattern: str, flavor: str) -> RegexNode:
    """Parse `pattern` in the given flavor ("emacs" or "awk") into an AST."""
    if flavor not in (EMACS, AWK):
        raise ValueError(f"unknown flavor {flavor!r}")
    return _Parser(pattern, flavor).parse()


# --- compilation to a backtracking VM program ---------------------------

_CHAR, _ANY, _CLASS, _SPLIT, _JMP, _GSTART, _GEND, _BREF, _END, _SETMARK, _PROGRESS, _MATCH = range(12)


def _compile(ast: RegexNode) -> tuple[tuple, int, int]:
    prog: list[tuple] = []
    nmarks = 0
    ngroups = 0

    def emit(node: RegexNode) -> None:
        nonlocal nmarks, ngroups
        t = type(node)
        if t is Lit:
            prog.append((_CHAR, node.ch))
        elif t is AnyChar:
            prog.append((_ANY,))
        elif t is CharClass:
            prog.append((_CLASS, node.ranges))
        elif t is EndAnchor:
            prog.append((_END,))
        elif t is Empty:
            pass
        elif t is Concat:
            for p in node.parts:
                emit(p)
        elif t is Alt:
            jumps = []
            for opt in node.options[:-1]:
                split_at = len(prog)
                prog.append(())
                emit(opt)
                jumps.append(len(prog))
                prog.append(())
                prog[split_at] = (_SPLIT, split_at + 1, len(prog))
            emit(node.options[-1])
            for j in jumps:
                prog[j] = (_JMP, len(prog))
        elif t is Star:
            mark = nmarks
            nmarks += 1
            loop_at = len(prog)
            prog.append(())
            prog.append((_SETMARK, mark))
            emit(node.child)
            prog.append((_PROGRESS, mark, loop_at))
            prog[loop_at] = (_SPLIT, loop_at + 1, len(prog))
        elif t is Opt:
            split_at = len(prog)
            prog.append(())
            emit(node.child)
            prog[split_at] = (_SPLIT, split_at + 1, len(prog))
        elif t is Group:
            ngroups = max(ngroups, node.index)
            prog.append((_GSTART, node.index))
            emit(node.child)
            prog.append((_GEND, node.index))
        elif t is Backref:
            ngroups = max(ngroups, node.index)
            prog.append((_BREF, node.index))
        else:  # pragma: no cover - parser emits no other nodes
            raise TypeError(f"unknown node {node!r}")

    emit(ast)
    prog.append((_MATCH,))
    return tuple(prog), ngroups, nmarks


def _run(prog: tuple, ngroups: int, nmarks: int, text: str) -> bool:
    n = len(text)
    caps: tuple = (None,) * (ngroups + 1)
    starts: tuple = (0,) * (ngroups + 1)
    marks: tuple = (0,) * nmarks
    stack: list[tuple] = []
    pc = 0
    pos = 0
    steps = STEP_BUDGET
    while True:
        steps -= 1
        if steps < 0:
            raise StepBudgetExceeded(f"match exceeded {STEP_BUDGET} steps")
        op = prog[pc]
        code = op[0]
        if code == _CHAR:
            if pos < n and text[pos] == op[1]:
                pc += 1
                pos += 1
                continue
        elif code == _SPLIT:
            if len(stack) >= _STACK_LIMIT:
                raise StepBudgetExceeded("backtracking stack limit exceeded")
            stack.append((op[2], pos, caps, starts, marks))
            pc = op[1]
            continue
        elif code == _ANY:
            if pos < n:
                pc += 1
                pos += 1
                continue
        elif code == _CLASS:
            if pos < n:
                c = text[pos]
                for lo, hi in op[1]:
                    if lo <= c <= hi:
                        break
                else:
                    c = None
                if c is not None:
                    pc += 1
                    pos += 1
                    continue
        elif code == _JMP:
            pc = op[1]
            continue
        elif code == _PROGRESS:
            if pos != marks[op[1]]:
                pc = op[2]
                continue
        elif code == _SETMARK:
            k = op[1]
            marks = marks[:k] + (pos,) + marks[k + 1 :]
            pc += 1
            continue
        elif code == _GSTART:
            g = op[1]
            starts = starts[:g] + (pos,) + starts[g + 1 :]
            pc += 1
            continue
        elif code == _GEND:
            g = op[1]
            caps = caps[:g] + ((starts[g], pos),) + caps[g + 1 :]
            pc += 1
            continue
        elif code == _BREF:
            span = caps[op[1]]
            if span is not None:
                sub = text[span[0] : span[1]]
                if text.startswith(sub, pos):
                    pos += len(sub)
                    pc += 1
                    continue
        elif code == _END:
            if pos == n:
                pc += 1
                continue
        else:  # _MATCH
            if pos == n:
                return True
        if not stack:
            return False
        pc, pos, caps, starts, marks = stack.pop()


@functools.lru_cache(maxsize=4096)
def _program(ast: RegexNode) -> tuple[tuple, int, int]:
    return _compile(ast)


def full_match(ast: RegexNode, text: str) -> bool:
    """True iff the entire `text` is in the pattern's language."""
    prog, ngroups, nmarks = _program(ast)
    return _run(prog, ngroups, nmarks, text)


class CompiledPattern:
    __slots__ = ("pattern", "flavor", "_prog", "_ngroups", "_nmarks")

    def __init__(self, pattern: str, flavor: str):
        self.pattern = pattern
        self.flavor = flavor
        self._prog, self._ngroups, self._nmarks = _compile(parse_regex(pattern, flavor))

    def full_match(self, text: str) -> bool:
        return _run(self._prog, self._ngroups, self._nmarks, text)


@functools.lru_cache(maxsize=4096)
def compile_pattern(pattern: str, flavor: str) -> CompiledPattern:
    """Parse and compile, cached by (pattern, flavor) — the emulator hot path."""
    return CompiledPattern(pattern, flavor)
