"""Deterministic, fuel-bounded execution of find/mkdir command sequences.

Commands run sequentially over a shared in-memory filesystem; the result
is the concatenation of their standard output plus per-command exit
statuses. The find semantics implemented here are the behavioral subset
the emitted scripts rely on:

* pre-order traversal by default, post-order under -depth (implied by
  -delete), with dynamic child enumeration in creation order: entries
  created during the traversal are visited in the same execution,
  deleted entries are skipped;
* -fprintf/-fprint targets are created-or-truncated before any
  traversal, in left-to-right expression order;
* -files0-from reads NUL-terminated start points lazily, one at a time,
  observing appends made while the command runs; truncation does not
  reset the read offset;
* -exec spawns in the find's own directory with {} replaced by the
  current path; -execdir spawns in the directory holding the current
  file with {} replaced by ./basename.

Fuel: 1 per node visit, 1 per spawned command, 1 per streamed start
point. Running out of fuel yields a non-halted result with partial
output, modeling non-termination at desk scale.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from . import findparse, regexen, vfs
from .findparse import (
    And,
    Comma,
    DeleteAction,
    EmptyTest,
    ExecAction,
    ExecdirAction,
    FalseTest,
    FindCommand,
    FprintAction,
    FprintfAction,
    MkdirCommand,
    NameTest,
    Not,
    Or,
    PrintfAction,
    PruneAction,
    QuitAction,
    RegexTest,
    SizeTest,
    TrueTest,
    TypeTest,
)

DEFAULT_FUEL = 10**6
DEFAULT_BINARIES = frozenset({"find", "mkdir"})

TraceFn = Callable[[str], None]
ExprHook = Callable[[int, str], None]


class EmulatorError(Exception):
    pass


class OutOfFuel(EmulatorError):
    """Fuel budget exhausted; run_script reports this as halted=False."""


class InvalidBinary(EmulatorError):
    """A spawn named a binary outside the permitted set."""


class UnsupportedSituation(EmulatorError):
    """A runtime case the model refuses to guess about (e.g. `..` paths)."""


class _Quit(Exception):
    pass


class Fuel:
    __slots__ = ("limit", "remaining")

    def __init__(self, limit: int):
        self.limit = limit
        self.remaining = limit

    def tick(self, n: int = 1) -> None:
        self.remaining -= n
        if self.remaining < 0:
            raise OutOfFuel(f"fuel budget of {self.limit} exhausted")

    @property
    def used(self) -> int:
        return self.limit - max(self.remaining, 0)


@dataclass
class ProcessCtx:
    """Execution context of one command: working dir plus shared sinks."""

    cwd: vfs.Dir
    cwd_path: str = "."
    stdout: bytearray = field(default_factory=bytearray)
    stderr: bytearray = field(default_factory=bytearray)
    fuel: Fuel = field(default_factory=lambda: Fuel(DEFAULT_FUEL))
    binaries: frozenset[str] = DEFAULT_BINARIES
    trace: Optional[TraceFn] = None
    expr_hook: Optional[ExprHook] = None
    cmd_index: int = 0


@dataclass
class ExecutionResult:
    stdout: bytes
    statuses: list[int]
    halted: bool
    fuel_used: int


@functools.lru_cache(maxsize=4096)
def _pattern(pattern: str, flavor: str) -> regexen.CompiledPattern:
    return regexen.compile_pattern(pattern, flavor)


def _glob_match(pat: str, name: str) -> bool:
    """Glob with `?`, `*` and literal bytes, over the whole name."""
    pi = ni = 0
    star = -1
    mark = 0
    np, nn = len(pat), len(name)
    while ni < nn:
        if pi < np and (pat[pi] == "?" or pat[pi] == name[ni]):
            pi += 1
            ni += 1
        elif pi < np and pat[pi] == "*":
            star = pi
            mark = ni
            pi += 1
        elif star >= 0:
            mark += 1
            ni = mark
            pi = star + 1
        else:
            return False
    while pi < np and pat[pi] == "*":
        pi += 1
    return pi == np


def _dirname(path: str) -> str:
    return path.rsplit("/", 1)[0] if "/" in path else "."


def _join(base: str, rel: str) -> str:
    if rel == ".":
        return base
    if base == ".":
        return rel
    return base + "/" + rel


class _FindRun:
    def __init__(self, ctx: ProcessCtx, cmd: FindCommand):
        self.ctx = ctx
        self.cmd = cmd
        self.errors = False
        self.pruned = False
        self.cur_path = ""
        self.cur_node: vfs.Node = ctx.cwd
        self.cur_parent: vfs.Dir | None = None
        self.cur_base = ""

    def run(self) -> int:
        try:
            if not self._truncate_targets():
                return 1
            if self.cmd.files0_from is not None:
                self._run_streamed()
            else:
                for start in self.cmd.starts:
                    self._start(start)
        except _Quit:
            pass
        return 1 if self.errors else 0

    def _error(self, message: str) -> None:
        self.ctx.stderr.extend(f"find: {message}\n".encode())
        self.errors = True

    def _truncate_targets(self) -> bool:
        # "truncated or created to 0 bytes as soon as the find command
        # starts" — before -files0-from is even opened.
        for node in findparse.iter_nodes(self.cmd.expr):
            t = type(node)
            if t is FprintfAction or t is FprintAction:
                try:
                    vfs.write(self.ctx.cwd, node.target, b"", append=False)
                except vfs.BadPath:
                    raise UnsupportedSituation(
                        f"unsupported output path {node.target!r}"
                    ) from None
                except vfs.VfsError as e:
                    self._error(f"cannot open {node.target!r}: {e}")
                    return False
                if self.ctx.trace:
                    self.ctx.trace(f"write {node.target} 0B")
        return True

    def _run_streamed(self) -> None:
        fname = self.cmd.files0_from
        st = vfs.stat(self.ctx.cwd, fname)
        if st is None or st.kind != "file":
            self._error(f"cannot read start points from {fname!r}")
            return
        offset = 0
        while True:
            try:
                data = vfs.read_at(self.ctx.cwd, fname, offset)
            except vfs.VfsError as e:
                self._error(f"cannot read start points from {fname!r}: {e}")
                return
            # no complete NUL-terminated entry ahead means end of data
            end = data.find(0)
            if end < 0:
                return
            entry = data[:end].decode("latin-1")
            offset += end + 1
            self.ctx.fuel.tick()
            if not entry:
                self._error("invalid empty start point")
                continue
            self._start(entry)

    def _start(self, start: str) -> None:
        try:
            comps = vfs.split_path(start)
        except vfs.BadPath:
            raise UnsupportedSituation(f"unsupported start point {start!r}") from None
        node = vfs.lookup(self.ctx.cwd, start)
        if node is None:
            self._error(f"'{start}': No such file or directory")
            return
        if comps:
            parent = vfs.lookup(self.ctx.cwd, "/".join(comps[:-1]))
            base = comps[-1]
        else:
            parent = None  # the start point is the working directory itself
            base = "."
        self._visit_tree(start, node, parent, base)

    def _visit_tree(
        self,
        path: str,
        node: vfs.Node,
        parent: vfs.Dir | None,
        base: str,
    ) -> None:
        post = self.cmd.depth
        # frame: [path, node, parent, base, seen-names or False]
        stack: list[list] = [[path, node, parent, base, None]]
        while stack:
            frame = stack[-1]
            fpath, fnode, fparent, fbase, seen = frame
            if seen is None:
                descend = isinstance(fnode, vfs.Dir)
                if not post:
                    self._eval_on(fpath, fnode, fparent, fbase)
                    if self.pruned:
                        descend = False
                seen = set() if descend else False
                frame[4] = seen
            picked = None
            if seen is not False:
                for name in fnode.entries:
                    if name not in seen:
                        picked = name
                        break
            if picked is not None:
                seen.add(picked)
                child = fnode.entries[picked]
                stack.append([fpath + "/" + picked, child, fnode, picked, None])
                continue
            if post:
                self._eval_on(fpath, fnode, fparent, fbase)
            stack.pop()

    def _eval_on(
        self,
        path: str,
        node: vfs.Node,
        parent: vfs.Dir | None,
        base: str,
    ) -> None:
        self.ctx.fuel.tick()
        if self.ctx.trace:
            self.ctx.trace(f"visit {path}")
        self.cur_path = path
        self.cur_node = node
        self.cur_parent = parent
        self.cur_base = base
        self.pruned = False
        self._eval(self.cmd.expr)
        if self.ctx.expr_hook is not None:
            self.ctx.expr_hook(self.ctx.cmd_index, path)

    def _format(self, fmt: str) -> bytes:
        out = bytearray()
        i = 0
        node = self.cur_node
        while i < len(fmt):
            c = fmt[i]
            if c == "\\":
                out.append(0 if fmt[i + 1] == "0" else 0x5C)
                i += 2
            elif c == "%":
                d = fmt[i + 1]
                if d == "f":
                    out.extend(self.cur_base.encode("latin-1"))
                elif d == "p":
                    out.extend(self.cur_path.encode("latin-1"))
                else:  # %s: file size in decimal; directories have none
                    size = len(node.content) if isinstance(node, vfs.File) else 0
                    out.extend(str(size).encode())
                i += 2
            else:
                out.extend(c.encode("latin-1"))
                i += 1
        return bytes(out)

    def _append_target(self, target: str, data: bytes) -> None:
        try:
            vfs.write(self.ctx.cwd, target, data, append=True)
        except vfs.VfsError as e:
            self._error(f"cannot write {target!r}: {e}")
            return
        if self.ctx.trace:
            self.ctx.trace(f"write {target} {len(data)}B")

    def _eval(self, e: findparse.Expr) -> bool:
        t = type(e)
        if t is And:
            for p in e.parts:
                if not self._eval(p):
                    return False
            return True
        if t is Or:
            for p in e.parts:
                if self._eval(p):
                    return True
            return False
        if t is Not:
            return not self._eval(e.child)
        if t is Comma:
            result = False
            for p in e.parts:
                result = self._eval(p)
            return result
        if t is NameTest:
            return _glob_match(e.pattern, self.cur_base)
        if t is EmptyTest:
            node = self.cur_node
            if isinstance(node, vfs.Dir):
                return not node.entries
            return not node.content
        if t is SizeTest:
            node = self.cur_node
            return isinstance(node, vfs.File) and len(node.content) == e.n
        if t is TypeTest:
            is_dir = isinstance(self.cur_node, vfs.Dir)
            return is_dir if e.kind == "d" else not is_dir
        if t is RegexTest:
            return _pattern(e.pattern, e.flavor).full_match(self.cur_path)
        if t is TrueTest:
            return True
        if t is FalseTest:
            return False
        if t is PruneAction:
            if not self.cmd.depth and isinstance(self.cur_node, vfs.Dir):
                self.pruned = True
            return True
        if t is QuitAction:
            raise _Quit()
        if t is DeleteAction:
            return self._delete()
        if t is PrintfAction:
            self.ctx.stdout.extend(self._format(e.fmt))
            return True
        if t is FprintfAction:
            self._append_target(e.target, self._format(e.fmt))
            return True
        if t is FprintAction:
            self._append_target(e.target, self.cur_path.encode("latin-1") + b"\n")
            return True
        if t is ExecAction:
            argv = [a.replace("{}", self.cur_path) for a in e.template]
            return _spawn(self.ctx, argv, self.ctx.cwd, self.ctx.cwd_path) == 0
        if t is ExecdirAction:
            if self.cur_parent is None:
                # start point "." — run in the working directory itself
                where, where_path = self.ctx.cwd, self.ctx.cwd_path
            else:
                where = self.cur_parent
                where_path = _join(self.ctx.cwd_path, _dirname(self.cur_path))
            rel = "./" + self.cur_base
            argv = [a.replace("{}", rel) for a in e.template]
            return _spawn(self.ctx, argv, where, where_path) == 0
        raise TypeError(f"cannot evaluate {e!r}")  # pragma: no cover

    def _delete(self) -> bool:
        if self.cur_parent is None:
            self._error("refusing to delete '.'")
            return False
        try:
            vfs.delete(self.cur_parent, self.cur_base)
        except vfs.VfsError as e:
            self._error(f"cannot delete '{self.cur_path}': {e}")
            return False
        if self.ctx.trace:
            self.ctx.trace(f"delete {self.cur_path}")
        return True


def run_find(ctx: ProcessCtx, cmd: FindCommand) -> int:
    """Run one parsed find command; returns its exit status."""
    return _FindRun(ctx, cmd).run()


def run_mkdir(ctx: ProcessCtx, cmd: MkdirCommand) -> int:
    """Run one parsed mkdir command; status 0 iff every path succeeded."""
    status = 0
    for path in cmd.paths:
        try:
            vfs.mkdir(ctx.cwd, path, parents=cmd.parents)
        except vfs.BadPath:
            raise UnsupportedSituation(f"unsupported mkdir path {path!r}") from None
        except vfs.VfsError as e:
            ctx.stderr.extend(f"mkdir: {e}\n".encode())
            status = 1
    return status


def _spawn(
    parent: ProcessCtx,
    argv: list[str],
    cwd: vfs.Dir,
    cwd_path: str,
    top: bool = False,
) -> int:
    if not argv:
        raise EmulatorError("empty argv")
    if argv[0] not in parent.binaries:
        raise InvalidBinary(f"{argv[0]!r} is not a permitted binary")
    parent.fuel.tick()
    if parent.trace:
        parent.trace(f"spawn {' '.join(argv)} cwd={cwd_path}")
    cmd = findparse.parse_command(argv)
    ctx = ProcessCtx(
        cwd=cwd,
        cwd_path=cwd_path,
        stdout=parent.stdout,
        stderr=parent.stderr,
        fuel=parent.fuel,
        binaries=parent.binaries,
        trace=parent.trace,
        expr_hook=parent.expr_hook if top else None,
        cmd_index=parent.cmd_index,
    )
    if isinstance(cmd, MkdirCommand):
        status = run_mkdir(ctx, cmd)
    else:
        status = run_find(ctx, cmd)
    if parent.trace:
        parent.trace(f"exit {status}")
    return status


def run_script(
    commands: Sequence[Sequence[str]],
    fs: vfs.Dir,
    fuel: int = DEFAULT_FUEL,
    binaries: frozenset[str] = DEFAULT_BINARIES,
    trace: Optional[TraceFn] = None,
    expr_hook: Optional[ExprHook] = None,
) -> ExecutionResult:
    """Execute the command sequence against `fs` under one fuel budget.

    Returns halted=False with partial stdout when fuel runs out.
    InvalidBinary and parse failures raise: such scripts are invalid
    executions, not failing ones.
    """
    fuel_obj = Fuel(fuel)
    root = ProcessCtx(
        cwd=fs,
        cwd_path=".",
        fuel=fuel_obj,
        binaries=binaries,
        trace=trace,
        expr_hook=expr_hook,
    )
    statuses: list[int] = []
    halted = False
    try:
        for index, argv in enumerate(commands):
            root.cmd_index = index
            statuses.append(_spawn(root, list(argv), fs, ".", top=True))
        halted = True
    except OutOfFuel:
        pass
    return ExecutionResult(
        stdout=bytes(root.stdout),
        statuses=statuses,
        halted=halted,
        fuel_used=fuel_obj.used,
    )
