"""Compile tag systems and counter programs into find/mkdir scripts and
execute them under a deterministic emulator of the GNU-find subset the
constructions depend on."""

from .compiler import (
    Script,
    compile_counter,
    compile_tag_backref,
    compile_tag_nobackref,
    decode_word,
    emit_shell,
    encode_word,
    extract_state_path,
    make_encoding,
)
from .emulator import ExecutionResult, ProcessCtx, run_script
from .machines import (
    CounterProgram,
    Dec,
    Inc,
    Jump,
    Jz,
    TagSystem,
    cm_run,
    cm_step,
    tag_run,
    tag_step,
)

__version__ = "0.1.0"

__all__ = [
    "CounterProgram",
    "Dec",
    "ExecutionResult",
    "Inc",
    "Jump",
    "Jz",
    "ProcessCtx",
    "Script",
    "TagSystem",
    "cm_run",
    "cm_step",
    "compile_counter",
    "compile_tag_backref",
    "compile_tag_nobackref",
    "decode_word",
    "emit_shell",
    "encode_word",
    "extract_state_path",
    "make_encoding",
    "run_script",
    "tag_run",
    "tag_step",
]
