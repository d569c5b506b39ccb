"""Command-line front end: compile, run, oracle, emulate, verify.

Exit codes: 0 success/match, 1 verification mismatch, 2 input or parse
error, 3 step/fuel budget exceeded. Every invocation ends with a
machine-parsable `RESULT <status> <detail>` line on stdout. The default
emulator fuel is 10^6, overridable with --fuel or WEIRDFIND_FUEL.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import compiler, emulator, findparse, machines, regexen, vfs

DEFAULT_ORACLE_STEPS = 10**4

_TAG_BACKENDS = ("backref", "nobackref")
_CM_BACKENDS = ("counter",)


@dataclass
class RunReport:
    backend: str
    command_count: int
    token_count: int
    halted: bool
    fuel_used: int
    stdout: bytes
    decoded: str
    oracle: str
    match: bool


def _default_fuel() -> int:
    return int(os.environ.get("WEIRDFIND_FUEL", str(emulator.DEFAULT_FUEL)))


def _escape_bytes(data: bytes) -> str:
    out = []
    for b in data:
        if b == 0x5C:
            out.append("\\\\")
        elif 0x20 <= b < 0x7F:
            out.append(chr(b))
        else:
            out.append(f"\\x{b:02x}")
    return "".join(out)


def _render_word(word: machines.Word) -> str:
    if all(len(s) == 1 for s in word):
        return "".join(word)
    return " ".join(word)


class _InputError(Exception):
    pass


def _load_doc(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise _InputError(f"cannot read {path!r}: {e}") from None
    except json.JSONDecodeError as e:
        raise _InputError(f"{path!r} is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise _InputError(f"{path!r}: expected a JSON object")
    return doc


def _resolve_kind(doc: dict, kind: str | None) -> str:
    if kind is None:
        if "symbols" in doc:
            return "tag"
        if "instructions" in doc:
            return "cm"
        raise _InputError("cannot infer input kind; pass --kind")
    return kind


def _check_backend(kind: str, backend: str) -> None:
    allowed = _TAG_BACKENDS if kind == "tag" else _CM_BACKENDS
    if backend not in allowed:
        raise _InputError(f"backend/kind mismatch: {backend!r} does not take {kind!r} input")


def _compile_input(path: str, kind: str | None, backend: str):
    """Returns (kind, machine-tuple, script)."""
    doc = _load_doc(path)
    kind = _resolve_kind(doc, kind)
    _check_backend(kind, backend)
    try:
        if kind == "tag":
            system, w1 = machines.tag_from_dict(doc)
            if backend == "backref":
                script = compiler.compile_tag_backref(system, w1)
            else:
                script = compiler.compile_tag_nobackref(system, w1)
            return kind, (system, w1), script
        program, c0, c1 = machines.counter_from_dict(doc)
        return kind, (program, c0, c1), compiler.compile_counter(program, c0, c1)
    except (machines.MachineError, compiler.CompileError) as e:
        raise _InputError(str(e)) from None


def _decode_output(kind: str, machine, stdout: bytes) -> str:
    if kind == "cm":
        return stdout.decode("latin-1")
    system, _ = machine
    enc = compiler.make_encoding(system)
    word = compiler.decode_word(enc, stdout.decode("latin-1"))
    return _render_word(word)


def cmd_compile(args) -> tuple[int, str]:
    kind, _, script = _compile_input(args.input, args.kind, args.backend)
    if args.format == "json":
        text = script.to_json() + "\n"
        suffix = ".script.json"
    else:
        text = compiler.emit_shell(script)
        suffix = ".sh"
    out = args.out
    if out is None:
        out = Path(args.input).stem + suffix
    Path(out).write_text(text, encoding="utf-8")
    tokens = sum(len(c) for c in script.commands)
    print(f"backend: {args.backend}")
    print(f"commands: {len(script.commands)} tokens: {tokens}")
    print(f"wrote: {out}")
    return 0, f"compiled {kind} to {out}"


def cmd_run(args) -> tuple[int, str]:
    kind, machine, script = _compile_input(args.input, args.kind, args.backend)
    result = emulator.run_script(
        script.commands,
        vfs.Dir(),
        fuel=args.fuel,
        binaries=frozenset(script.binaries),
    )
    if args.raw:
        sys.stdout.buffer.write(result.stdout)
        sys.stdout.buffer.write(b"\n")
        sys.stdout.flush()
    else:
        print(f"raw: {_escape_bytes(result.stdout)}")
    if not result.halted:
        print(f"fuel used: {result.fuel_used}")
        return 3, "out-of-fuel"
    decoded = _decode_output(kind, machine, result.stdout)
    print(f"decoded: {decoded}")
    print(f"fuel used: {result.fuel_used}")
    return 0, "halted"


def cmd_oracle(args) -> tuple[int, str]:
    doc = _load_doc(args.input)
    kind = _resolve_kind(doc, args.kind)
    try:
        if kind == "tag":
            system, w1 = machines.tag_from_dict(doc)
            run = machines.tag_run(system, w1, args.max_steps)
            if args.trace:
                for word in run.words:
                    print(_render_word(word))
            print(f"{_render_word(run.words[-1])} ({run.steps} steps)")
            return 0, "halted"
        program, c0, c1 = machines.counter_from_dict(doc)
        if args.trace:
            config = machines.CounterConfig(0, c0, c1)
            print(config)
            for _ in range(args.max_steps):
                if config.pc >= len(program.instructions):
                    break
                config = machines.cm_step(program, config)
                print(config)
        run = machines.cm_run(program, c0, c1, args.max_steps)
        print(f"{run.output} ({run.steps} steps)")
        return 0, "halted"
    except machines.OutOfSteps:
        return 3, "out-of-steps"
    except machines.MachineError as e:
        raise _InputError(str(e)) from None


def cmd_emulate(args) -> tuple[int, str]:
    try:
        text = Path(args.script).read_text(encoding="utf-8")
    except OSError as e:
        raise _InputError(f"cannot read {args.script!r}: {e}") from None
    try:
        script = compiler.Script.from_json(text)
        script.validate()
    except (json.JSONDecodeError, KeyError, compiler.CompileError,
            findparse.FindParseError, regexen.RegexError) as e:
        raise _InputError(f"bad script: {e}") from None
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    try:
        result = emulator.run_script(
            script.commands,
            vfs.Dir(),
            fuel=args.fuel,
            binaries=frozenset(script.binaries),
            trace=trace,
        )
    except emulator.InvalidBinary as e:
        raise _InputError(str(e)) from None
    if args.raw:
        sys.stdout.buffer.write(result.stdout)
        sys.stdout.buffer.write(b"\n")
        sys.stdout.flush()
    else:
        print(f"stdout: {_escape_bytes(result.stdout)}")
    print(f"statuses: {' '.join(map(str, result.statuses))}")
    print(f"fuel used: {result.fuel_used}")
    if not result.halted:
        return 3, "out-of-fuel"
    return 0, "halted"


def cmd_verify(args) -> tuple[int, str]:
    kind, machine, script = _compile_input(args.input, args.kind, args.backend)
    result = emulator.run_script(
        script.commands,
        vfs.Dir(),
        fuel=args.fuel,
        binaries=frozenset(script.binaries),
    )
    oracle_out: str | None = None
    try:
        if kind == "tag":
            system, w1 = machine
            run = machines.tag_run(system, w1, args.max_steps)
            oracle_out = _render_word(run.words[-1])
        else:
            program, c0, c1 = machine
            oracle_out = str(machines.cm_run(program, c0, c1, args.max_steps).output)
    except machines.OutOfSteps:
        pass

    tokens = sum(len(c) for c in script.commands)
    print(f"backend: {args.backend}")
    print(f"commands: {len(script.commands)} tokens: {tokens}")
    state = "halted" if result.halted else "out-of-fuel"
    print(f"emulator: {state} fuel_used={result.fuel_used} stdout={len(result.stdout)}B")

    if not result.halted and oracle_out is None:
        print("match: both sides exceeded their budgets")
        return 0, "both-exceeded"
    if result.halted != (oracle_out is not None):
        side = "emulator" if not result.halted else "oracle"
        print(f"match: budget asymmetry ({side} ran out)")
        return 3, "budget-asymmetry"

    if b"unreachable" in result.stdout:
        decoded = "<unreachable sentinel>"
        match = False
    else:
        try:
            decoded = _decode_output(kind, machine, result.stdout)
        except compiler.MalformedEncoding as e:
            decoded = f"<undecodable: {e}>"
            match = False
        else:
            match = decoded == oracle_out
    print(f"decoded: {decoded}")
    print(f"oracle: {oracle_out}")
    print(f"match: {str(match).lower()}")
    if match:
        return 0, "match"
    return 1, "mismatch"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weirdfind",
        description="Compile tag systems and counter programs to find/mkdir "
        "scripts; emulate and verify them hermetically.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_machine_args(p, backend=True):
        p.add_argument("input", help="machine description (JSON)")
        p.add_argument("--kind", choices=("tag", "cm"), default=None,
                       help="input kind (inferred from the document if omitted)")
        if backend:
            p.add_argument("--backend", choices=("backref", "nobackref", "counter"),
                           required=True)

    p = sub.add_parser("compile", help="emit a script")
    add_machine_args(p)
    p.add_argument("--out", default=None, help="output path")
    p.add_argument("--format", choices=("json", "shell"), default="json")
    p.set_defaults(fn=cmd_compile)

    p = sub.add_parser("run", help="compile and emulate")
    add_machine_args(p)
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.add_argument("--raw", action="store_true", help="emit exact stdout bytes")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("oracle", help="run the machine directly")
    add_machine_args(p, backend=False)
    p.add_argument("--max-steps", type=int, default=DEFAULT_ORACLE_STEPS)
    p.add_argument("--trace", action="store_true", help="print each step")
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("emulate", help="run a script JSON file")
    p.add_argument("script", help="script (JSON with binaries and commands)")
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.add_argument("--trace", action="store_true", help="event trace to stderr")
    p.add_argument("--raw", action="store_true")
    p.set_defaults(fn=cmd_emulate)

    p = sub.add_parser("verify", help="compile, emulate, compare with the oracle")
    add_machine_args(p)
    p.add_argument("--fuel", type=int, default=_default_fuel())
    p.add_argument("--max-steps", type=int, default=DEFAULT_ORACLE_STEPS)
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = 0 if e.code in (0, None) else 2
        print(f"RESULT {code} usage")
        return code
    try:
        code, detail = args.fn(args)
    except _InputError as e:
        print(f"error: {e}")
        code, detail = 2, "input-error"
    except (findparse.FindParseError, regexen.RegexError,
            emulator.InvalidBinary, emulator.UnsupportedSituation) as e:
        print(f"error: {e}")
        code, detail = 2, "invalid-script"
    except regexen.StepBudgetExceeded as e:
        print(f"error: {e}")
        code, detail = 3, "regex-budget"
    print(f"RESULT {code} {detail}")
    return code


if __name__ == "__main__":
    sys.exit(main())
