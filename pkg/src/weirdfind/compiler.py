"""Code generators: tag systems and counter programs to find/mkdir scripts.

Three backends:

* tag system -> find+mkdir, emacs regexes with a back-reference doing the
  copy step (compile_tag_backref);
* tag system -> find+mkdir without back-references, using the `$_)?(`
  separator so the state path itself becomes part of a valid awk regex
  (compile_tag_nobackref);
* counter program -> standalone find, counters as files of `.` NUL units
  streamed through -files0-from (compile_counter).

Plus the word encoding (two lowercase letters per symbol, `/`-prefixed),
its decoder, a state-path extractor for verification, and shell-text
emission.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass

from . import findparse, machines, vfs
from .machines import CounterProgram, Dec, Inc, Jump, Jz, TagSystem, Word

LAMBDA = "/[a-z][a-z]"  # matches any encoded symbol
SEPARATOR = "$_)?("  # backend-C separator: wrapped in parens it kills prefixes
SEPARATOR_REGEX = r"\$\_\)\?\("  # awk pattern whose language is exactly {SEPARATOR}

_FIND_MKDIR_MIN_VERSION = "4.2.12"
_FIND_ONLY_MIN_VERSION = "4.9.0"


class CompileError(ValueError):
    pass


class TooManySymbols(CompileError):
    pass


class MalformedEncoding(CompileError):
    pass


class InvariantViolated(Exception):
    """The filesystem broke the single-chain / cleanness condition."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{message} at {path!r}")
        self.path = path


@dataclass(frozen=True)
class Script:
    """An ordered sequence of argv vectors plus its permitted binaries."""

    commands: tuple[tuple[str, ...], ...]
    binaries: tuple[str, ...]

    def validate(self) -> None:
        for argv in self.commands:
            if argv[0] not in self.binaries:
                raise CompileError(f"{argv[0]!r} not in permitted binaries")
            findparse.parse_command(list(argv))

    def to_json(self) -> str:
        return json.dumps(
            {"binaries": list(self.binaries), "commands": [list(c) for c in self.commands]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "Script":
        doc = json.loads(text)
        binaries = tuple(str(b) for b in doc["binaries"])
        unknown = set(binaries) - {"find", "mkdir"}
        if unknown:
            raise CompileError(f"unsupported binaries {sorted(unknown)}")
        commands = tuple(
            tuple(str(t) for t in argv) for argv in doc["commands"]
        )
        return cls(commands=commands, binaries=binaries)


class Encoding:
    """Symbol codes: two lowercase letters each, assigned in symbol order
    with the halting symbol taking the code after all non-halt symbols."""

    def __init__(self, system: TagSystem):
        if len(system.symbols) > machines.MAX_SYMBOLS:
            raise TooManySymbols(f"at most {machines.MAX_SYMBOLS} symbols")
        letters = string.ascii_lowercase
        self.system = system
        self.code: dict[str, str] = {}
        nonhalt = [s for s in system.symbols if s != system.halt]
        for i, sym in enumerate(nonhalt + [system.halt]):
            self.code[sym] = letters[i // 26] + letters[i % 26]
        self.symbol_of = {c: s for s, c in self.code.items()}

    def sigma(self, symbol: str) -> str:
        return "/" + self.code[symbol]

    @property
    def eta(self) -> str:
        return self.sigma(self.system.halt)


def make_encoding(system: TagSystem) -> Encoding:
    return Encoding(system)


def encode_word(enc: Encoding, word: Word) -> str:
    return "".join(enc.sigma(s) for s in word)


def decode_word(enc: Encoding, text: str) -> Word:
    """Inverse of encode_word; rejects anything that is not a code string."""
    if len(text) % 3:
        raise MalformedEncoding(f"length {len(text)} is not a multiple of 3")
    out = []
    for i in range(0, len(text), 3):
        if text[i] != "/":
            raise MalformedEncoding(f"expected '/' at offset {i} of {text!r}")
        code = text[i + 1 : i + 3]
        sym = enc.symbol_of.get(code)
        if sym is None:
            raise MalformedEncoding(f"unknown symbol code {code!r}")
        out.append(sym)
    return tuple(out)


def _grouped_star(inner: str, flavor: str) -> str:
    if flavor == "awk":
        return f"({inner})*"
    return rf"\({inner}\)*"


# --- backend A: find + mkdir with a back-reference ------------------------


def compile_tag_backref(system: TagSystem, w1: Word) -> Script:
    enc = make_encoding(system)
    lam = LAMBDA
    big = _grouped_star(lam, "emacs")
    eta = enc.eta

    gamma = rf".*_\(\|{lam}\|{eta}{big}\)/_"
    cmd1 = ("mkdir", "-p", "_" + encode_word(enc, w1) + "/_")

    ordered = [s for s in system.symbols if s != system.halt] + [system.halt]
    expr: list[str] = ["-regex", gamma, "-quit"]
    for sym in ordered:
        sigma = enc.sigma(sym)
        alpha = rf".*_{lam}{lam}\({big}\){sigma}{big}/_\1"
        expr += ["-o", "-regex", alpha, "-execdir", "mkdir", "{}" + sigma, ";"]
    for sym in ordered[:-1]:
        sigma = enc.sigma(sym)
        beta = rf".*_{sigma}{big}/_{big}"
        pi = encode_word(enc, system.productions[sym])
        expr += ["-o", "-regex", beta, "-execdir", "mkdir", "-p", "{}" + pi + "/_", ";"]
    expr += ["-o", "-printf", "unreachable"]
    cmd2 = ("find", "_", "-empty", "(", *expr, ")")

    cmd3 = (
        "find", "_", "-depth", "!", "-empty", "-name", "_",
        "-execdir", "find", "_", "!", "-name", "_", "-printf", "/%f", ";",
        "-quit",
    )
    return Script(commands=(cmd1, cmd2, cmd3), binaries=("find", "mkdir"))


# --- backend C: find + mkdir without back-references -----------------------


def compile_tag_nobackref(system: TagSystem, w1: Word) -> Script:
    enc = make_encoding(system)
    sep = SEPARATOR
    sep_re = SEPARATOR_REGEX
    lam = LAMBDA
    big = _grouped_star(lam, "awk")

    ordered = [s for s in system.symbols if s != system.halt] + [system.halt]
    markers = [str(k) for k in range(1, len(ordered) + 1)]

    gamma = rf".*{sep_re}(|{lam}|{enc.eta}{big})/{sep_re}"
    cmd1 = ("mkdir", "-p", sep + encode_word(enc, w1) + "/" + sep)

    expr: list[str] = ["-regex", gamma, "-quit", "-o"]
    for marker in markers:
        expr += ["-execdir", "find", "-fprint", "{}/" + marker, "-quit", ";"]
    for sym, marker in zip(ordered, markers):
        sigma = enc.sigma(sym)
        # the {} below is expanded by -exec to the state path, turning the
        # pattern into a valid regex that matches only the copied suffix
        alpha = rf".*{sep_re}{lam}{lam}({{}}){sigma}{big}/{sep_re}{big}/{marker}"
        expr += [
            "-exec", "find", sep, "-regextype", "awk", "-type", "f",
            "-regex", alpha, "-delete", "-quit", ";",
        ]
    expr += ["("]
    for sym, marker in zip(ordered, markers):
        expr += [
            "!", "-execdir", "find", "{}/" + marker, "-quit", ";",
            "-execdir", "mkdir", "{}" + enc.sigma(sym), ";", "-o",
        ]
    expr += ["-false", ")", "-o", "("]
    for sym in ordered[:-1]:
        sigma = enc.sigma(sym)
        beta = rf".*{sep_re}{sigma}{big}/{sep_re}{big}"
        pi = encode_word(enc, system.productions[sym])
        expr += [
            "-regex", beta,
            "-execdir", "mkdir", "-p", "{}" + pi + "/" + sep, ";", "-o",
        ]
    expr += ["-printf", "unreachable", ")"]
    expr += [",", "-exec", "find", sep, "-type", "f", "-delete", ";"]

    cmd2 = ("find", sep, "-regextype", "awk", "-type", "d", "-empty", "(", *expr, ")")
    cmd3 = (
        "find", sep, "-depth", "!", "-empty", "-name", sep,
        "-execdir", "find", sep, "!", "-name", sep, "-printf", "/%f", ";",
        "-quit",
    )
    return Script(commands=(cmd1, cmd2, cmd3), binaries=("find", "mkdir"))


# --- backend B: standalone find over counter files -------------------------


def _inc(name: str) -> list[str]:
    # the trailing \0 in -fprintf formats is the literal two characters
    # backslash zero: the emitter renders them as a NUL byte
    return [
        "(", "(",
        "-exec", "find", name, "-quit", ";",
        "-exec", "find", "-quit", "-fprintf", "first", ".", ";",
        "-exec", "find", "-files0-from", name,
        "(", "-name", ".", "-o", "-name", "first", "-delete", ")",
        "-fprintf", "t", ".\\0", ";",
        "-exec", "find", "-files0-from", "t", "-prune", "-fprintf", name, ".\\0", ";",
        "-exec", "find", "t", "-delete", ";",
        ")", "-o",
        "-exec", "find", "-fprintf", name, ".\\0", "-quit", ";",
        ")",
    ]


def _dec(name: str) -> list[str]:
    return [
        "(", "(",
        "-exec", "find", name, "-size", "2c", "-delete", ";",
        "-exec", "find", name, "-quit", ";",
        "-exec", "find", "-quit", "-fprint", "first", ";",
        "-exec", "find", "-files0-from", name,
        "-name", "first", "-delete", "-fprintf", "t", "skip",
        "-o", "-name", "t", "-fprintf", "t", ".",
        "-o", "-name", ".", "-fprintf", "t", "\\0", ";",
        "-exec", "find", "-files0-from", "t", "-name", ".", "-fprintf", name, ".\\0", ";",
        "-exec", "find", "t", "-delete", ";",
        ")", "-o", "-true", ")",
    ]


def _jump(q: int) -> list[str]:
    if q == 0:
        # -quit before -fprintf: the startup truncation alone sets pc to 0
        return ["-exec", "find", "-quit", "-fprintf", "pc", "x", ";"]
    return ["-exec", "find", "-fprintf", "pc", "1" * q, "-quit", ";"]


def _jz(name: str, q: int) -> list[str]:
    return ["(", "(", "!", "-exec", "find", name, "-quit", ";", *_jump(q), ")", "-o", "-true", ")"]


def _ispc(q: int) -> list[str]:
    return ["-size", f"{q}c"]


_COUNTER_FILES = ("a", "b")


def compile_counter(program: CounterProgram, c0: int, c1: int) -> Script:
    cmd1 = ("find", "-quit", "-fprintf", "pc", "x")

    init: list[str] = ["find", *_inc("s")]
    init += _inc("a") * c0
    init += _inc("b") * c1
    init.append("-quit")
    cmd2 = tuple(init)

    loop: list[str] = ["find", "-files0-from", "s", "-name", "pc", *_inc("s"), "("]
    for j, ins in enumerate(program.instructions):
        t = type(ins)
        if t is Inc:
            body = _inc(_COUNTER_FILES[ins.r])
        elif t is Dec:
            body = _dec(_COUNTER_FILES[ins.r])
        elif t is Jz:
            body = _jz(_COUNTER_FILES[ins.r], ins.q)
        else:
            body = _jump(ins.q)
        loop += [*_ispc(j), *_jump(j + 1), *body, "-o"]
    loop += ["-quit", ")"]
    cmd3 = tuple(loop)

    cmd4 = ("find", "-files0-from", "a", "-fprintf", "count", "1", "-prune")
    cmd5 = ("find", "count", "-printf", "%s")
    return Script(commands=(cmd1, cmd2, cmd3, cmd4, cmd5), binaries=("find",))


# --- verification helpers ---------------------------------------------------


def extract_state_path(fs: vfs.Dir, separator: str = "_") -> str:
    """Path of the unique empty directory of a backend A/C run.

    The working directory must hold exactly the separator directory, and
    the chain below it must never branch or contain regular files.
    """
    names = list(fs.entries)
    if names != [separator] or not isinstance(fs.entries[separator], vfs.Dir):
        raise InvariantViolated(
            f"working directory must hold exactly one directory {separator!r}", "."
        )
    node = fs.entries[separator]
    parts = [separator]
    while True:
        subdirs = []
        for name, child in node.entries.items():
            if isinstance(child, vfs.File):
                raise InvariantViolated("regular file in the state chain", "/".join(parts))
            subdirs.append(name)
        if len(subdirs) > 1:
            raise InvariantViolated("state chain branches", "/".join(parts))
        if not subdirs:
            return "/".join(parts)
        parts.append(subdirs[0])
        node = node.entries[subdirs[0]]


# --- emission ---------------------------------------------------------------

_BARE_CHARS = frozenset(
    string.ascii_letters + string.digits + "_./%-"
)


def _quote(token: str) -> str:
    if token and all(c in _BARE_CHARS for c in token):
        return token
    return "'" + token.replace("'", "'\\''") + "'"


def emit_shell(script: Script) -> str:
    """One shell line per command; non-bare tokens single-quoted."""
    version = (
        _FIND_ONLY_MIN_VERSION
        if "mkdir" not in script.binaries
        else _FIND_MKDIR_MIN_VERSION
    )
    lines = [f"# requires GNU find >= {version}"]
    for argv in script.commands:
        lines.append(" ".join(_quote(t) for t in argv))
    return "\n".join(lines) + "\n"
