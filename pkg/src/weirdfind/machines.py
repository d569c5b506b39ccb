"""Reference models and oracles: 2-tag systems and 2-counter programs.

Both serve as compiler inputs and as ground truth for verification.
Symbols are arbitrary strings; words are tuples of symbols. A tag step
drops the first two symbols and appends the production of the dropped
head; the run halts when the word is shorter than 2 or starts with the
halting symbol. Counter programs run INC/DEC/JZ/J over two non-negative
counters and output c0 when the program counter reaches the end.
"""

from __future__ import annotations

from dataclasses import dataclass

MAX_SYMBOLS = 675  # encoding capacity of distinct 2-lowercase-letter codes

Word = tuple[str, ...]


class MachineError(ValueError):
    pass


class UnknownSymbol(MachineError):
    pass


class OutOfSteps(Exception):
    """Step budget exhausted before the machine halted."""


@dataclass
class TagSystem:
    symbols: tuple[str, ...]
    halt: str
    productions: dict[str, Word]

    def __post_init__(self) -> None:
        if len(set(self.symbols)) != len(self.symbols):
            raise MachineError("duplicate symbols")
        if self.halt not in self.symbols:
            raise MachineError(f"halting symbol {self.halt!r} not in alphabet")
        if len(self.symbols) > MAX_SYMBOLS:
            raise MachineError(f"more than {MAX_SYMBOLS} symbols")
        expected = set(self.symbols) - {self.halt}
        if set(self.productions) != expected:
            raise MachineError("production map domain must be all non-halt symbols")
        known = set(self.symbols)
        for sym, word in self.productions.items():
            for s in word:
                if s not in known:
                    raise UnknownSymbol(f"production of {sym!r} uses unknown {s!r}")


@dataclass
class TagRun:
    words: list[Word]
    halted: bool
    steps: int

    def validate(self, system: TagSystem) -> None:
        for prev, cur in zip(self.words, self.words[1:]):
            if tag_step(system, prev) != cur:
                raise MachineError(f"trace step {prev!r} -> {cur!r} breaks the rule")
        if self.halted:
            last = self.words[-1]
            if len(last) >= 2 and last[0] != system.halt:
                raise MachineError("halting word neither short nor halt-headed")


def tag_step(system: TagSystem, word: Word) -> Word | None:
    """One tag step; None when the word halts (short or halt-headed)."""
    for s in word:
        if s not in system.productions and s != system.halt:
            raise UnknownSymbol(f"unknown symbol {s!r}")
    if len(word) < 2 or word[0] == system.halt:
        return None
    return word[2:] + system.productions[word[0]]


def tag_run(system: TagSystem, w1: Word, max_steps: int) -> TagRun:
    words = [tuple(w1)]
    for _ in range(max_steps + 1):
        nxt = tag_step(system, words[-1])
        if nxt is None:
            run = TagRun(words, halted=True, steps=len(words) - 1)
            run.validate(system)
            return run
        if len(words) > max_steps:
            break
        words.append(nxt)
    raise OutOfSteps(f"tag system still running after {max_steps} steps")


@dataclass(frozen=True)
class Inc:
    r: int


@dataclass(frozen=True)
class Dec:
    r: int


@dataclass(frozen=True)
class Jz:
    r: int
    q: int


@dataclass(frozen=True)
class Jump:
    q: int


Instruction = Inc | Dec | Jz | Jump


@dataclass(frozen=True)
class CounterProgram:
    instructions: tuple[Instruction, ...]

    def __post_init__(self) -> None:
        m = len(self.instructions)
        for ins in self.instructions:
            r = getattr(ins, "r", 0)
            if r not in (0, 1):
                raise MachineError(f"register {r} out of range")
            q = getattr(ins, "q", 0)
            if not 0 <= q <= m:
                raise MachineError(f"jump target {q} beyond program end {m}")


@dataclass(frozen=True)
class CounterConfig:
    pc: int
    c0: int
    c1: int


@dataclass(frozen=True)
class CounterRun:
    output: int
    steps: int


def cm_step(program: CounterProgram, config: CounterConfig) -> CounterConfig:
    ins = program.instructions[config.pc]
    pc, c0, c1 = config.pc, config.c0, config.c1
    t = type(ins)
    if t is Inc:
        if ins.r == 0:
            c0 += 1
        else:
            c1 += 1
        pc += 1
    elif t is Dec:
        if ins.r == 0:
            c0 = max(c0 - 1, 0)
        else:
            c1 = max(c1 - 1, 0)
        pc += 1
    elif t is Jz:
        zero = (c0 if ins.r == 0 else c1) == 0
        pc = ins.q if zero else pc + 1
    else:
        pc = ins.q
    return CounterConfig(pc, c0, c1)


def cm_run(program: CounterProgram, c0: int, c1: int, max_steps: int) -> CounterRun:
    """Run from (0, c0, c1); halting means pc == len(instructions)."""
    m = len(program.instructions)
    config = CounterConfig(0, c0, c1)
    steps = 0
    while config.pc < m:
        if steps >= max_steps:
            raise OutOfSteps(f"counter machine still running after {max_steps} steps")
        config = cm_step(program, config)
        steps += 1
    return CounterRun(output=config.c0, steps=steps)


# --- input file formats (consumed by the cli) ----------------------------


def _parse_word(value, symbols: tuple[str, ...], what: str) -> Word:
    if isinstance(value, str):
        if any(len(s) != 1 for s in symbols):
            raise MachineError(
                f"{what}: word-as-string needs single-character symbols"
            )
        return tuple(value)
    if isinstance(value, list):
        return tuple(str(s) for s in value)
    raise MachineError(f"{what}: expected string or list of symbols")


def tag_from_dict(doc: dict) -> tuple[TagSystem, Word]:
    """Build (system, initial word) from the JSON document layout."""
    try:
        symbols = tuple(str(s) for s in doc["symbols"])
        halt = str(doc["halt"])
        raw_prods = doc["productions"]
        initial = doc["initial"]
    except KeyError as e:
        raise MachineError(f"tag system document missing {e.args[0]!r}") from None
    productions = {
        str(sym): _parse_word(word, symbols, f"production of {sym!r}")
        for sym, word in raw_prods.items()
    }
    system = TagSystem(symbols=symbols, halt=halt, productions=productions)
    w1 = _parse_word(initial, symbols, "initial word")
    known = set(symbols)
    for s in w1:
        if s not in known:
            raise UnknownSymbol(f"initial word uses unknown symbol {s!r}")
    return system, w1


def counter_from_dict(doc: dict) -> tuple[CounterProgram, int, int]:
    """Build (program, c0, c1) from the JSON document layout."""
    try:
        raw = doc["instructions"]
        c0 = int(doc.get("c0", 0))
        c1 = int(doc.get("c1", 0))
    except KeyError as e:
        raise MachineError(f"counter document missing {e.args[0]!r}") from None
    if c0 < 0 or c1 < 0:
        raise MachineError("counters must be non-negative")
    instructions: list[Instruction] = []
    for entry in raw:
        op = entry.get("op")
        if op == "INC":
            instructions.append(Inc(int(entry["r"])))
        elif op == "DEC":
            instructions.append(Dec(int(entry["r"])))
        elif op == "JZ":
            instructions.append(Jz(int(entry["r"]), int(entry["q"])))
        elif op == "J":
            instructions.append(Jump(int(entry["q"])))
        else:
            raise MachineError(f"unknown instruction {op!r}")
    return CounterProgram(tuple(instructions)), c0, c1
