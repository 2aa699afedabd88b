"""Clocked probabilistic Turing machines and their encoding as stack programs.

The tape is split over three stacks: ``tape_l`` holds the cells left of the
head (top = nearest cell), ``tape_h`` holds the single scanned cell and
``tape_r`` the cells to the right (top = nearest cell).  The machine state
lives in the register ``state``.  Reading past either end of the tape yields
the blank, through the program's ``blank`` letter and no-op ``pop``.

Each step flips one coin: heads (``rand()`` true) applies ``delta0``, tails
applies ``delta1``.  The encoded program runs the step ``clock(|input|)``
times, then leaves ``out`` empty iff the final state accepts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .interp import (
    EnumerationLimitExceeded, Interpreter, MachineState, coin_source, initial_state,
)
from .lang import (
    CallAssign, FunctionDef, If, Letter, Loop, OperatorDef, Pop, Pred, Program,
    Push, Rand, Reg, RegAssign, Skip, StackCopy, StackLit, Top, seq,
)
from .multipoly import Polynomial, parse_polynomial

MOVES = ("L", "S", "R")
TAPE = ("tape_l", "tape_h", "tape_r")


class PTMError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PTMDescription:
    states: tuple
    symbols: tuple  # tape alphabet, blank included
    blank: str
    initial: str
    accepting: frozenset
    delta0: Mapping  # (state, symbol) -> (state, symbol, move)
    delta1: Mapping
    clock: Polynomial
    input: tuple = field(default=())

    def __post_init__(self):
        if self.blank not in self.symbols:
            raise PTMError(f"blank {self.blank!r} is not a tape symbol")
        if self.initial not in self.states:
            raise PTMError(f"initial state {self.initial!r} is not declared")
        if not set(self.accepting) <= set(self.states):
            raise PTMError("accepting states must be declared states")
        for name, delta in (("delta0", self.delta0), ("delta1", self.delta1)):
            for q in self.states:
                for s in self.symbols:
                    if (q, s) not in delta:
                        raise PTMError(f"{name} is not defined on ({q}, {s})")
            for (q, s), (q2, s2, mv) in delta.items():
                if q2 not in self.states or s2 not in self.symbols or mv not in MOVES:
                    raise PTMError(f"{name}({q}, {s}) = ({q2}, {s2}, {mv}) is malformed")
        if self.clock.nvars != 1:
            raise PTMError("the clock is a polynomial in the input length X1")
        if not set(self.input) <= set(self.symbols):
            raise PTMError("input uses undeclared symbols")

    def steps(self, n: int) -> int:
        return self.clock(n)


# -- description files ------------------------------------------------------

_LIST_KEYS = ("states", "tape_alphabet", "accepting", "input")
_ONE_KEYS = ("blank", "initial", "clock")


def parse_ptm(text: str) -> PTMDescription:
    fields: dict = {}
    deltas: dict = {"delta0": {}, "delta1": {}}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip()
        if sep and (key in _LIST_KEYS or key in _ONE_KEYS or key in deltas):
            current = key if key in deltas else None
            if key in _LIST_KEYS:
                fields[key] = tuple(rest.split())
            elif key in _ONE_KEYS:
                fields[key] = rest.strip()
            elif rest.strip():
                raise PTMError(f"line {lineno}: transitions go on their own lines")
            continue
        if current is None:
            raise PTMError(f"line {lineno}: unexpected {line!r}")
        lhs, arrow, rhs = line.partition("->")
        src, dst = lhs.split(), rhs.split()
        if not arrow or len(src) != 2 or len(dst) != 3:
            raise PTMError(f"line {lineno}: expected 'state symbol -> state symbol move'")
        deltas[current][tuple(src)] = tuple(dst)
    missing = [k for k in ("states", "tape_alphabet", "blank", "initial", "clock") if k not in fields]
    if missing:
        raise PTMError(f"missing sections: {', '.join(missing)}")
    return PTMDescription(
        states=fields["states"],
        symbols=fields["tape_alphabet"],
        blank=fields["blank"],
        initial=fields["initial"],
        accepting=frozenset(fields.get("accepting", ())),
        delta0=deltas["delta0"],
        delta1=deltas["delta1"],
        clock=parse_polynomial(fields["clock"], 1),
        input=fields.get("input", ()),
    )


def format_ptm(m: PTMDescription) -> str:
    lines = [
        f"states: {' '.join(m.states)}",
        f"tape_alphabet: {' '.join(m.symbols)}",
        f"blank: {m.blank}",
        f"initial: {m.initial}",
        f"accepting: {' '.join(q for q in m.states if q in m.accepting)}",
    ]
    for name, delta in (("delta0", m.delta0), ("delta1", m.delta1)):
        lines.append(f"{name}:")
        for q in m.states:
            for s in m.symbols:
                lines.append(f"    {q} {s} -> {' '.join(delta[q, s])}")
    lines.append(f"clock: {m.clock.render()}")
    lines.append(f"input: {' '.join(m.input)}")
    return "\n".join(lines) + "\n"


# -- letters and operators of the encoding ------------------------------------

def state_letter(q: str) -> str:
    return f"q_{q}"


def symbol_letter(s: str) -> str:
    return f"s_{s}"


def _is_state(q: str) -> str:
    return f"is_{state_letter(q)}"


def _is_symbol(s: str) -> str:
    return f"is_{symbol_letter(s)}"


def _alphabet(m: PTMDescription) -> tuple:
    return ("true", "false") + tuple(symbol_letter(s) for s in m.symbols) + tuple(
        state_letter(q) for q in m.states)


def _indicator(name: str, alphabet: Sequence[str], accept) -> OperatorDef:
    return OperatorDef(name, 1, {(x,): "true" if x in accept else "false" for x in alphabet})


def _operators(m: PTMDescription) -> dict:
    alphabet = _alphabet(m)
    ops = {}
    for q in m.states:
        ops[_is_state(q)] = _indicator(_is_state(q), alphabet, {state_letter(q)})
    for s in m.symbols:
        ops[_is_symbol(s)] = _indicator(_is_symbol(s), alphabet, {symbol_letter(s)})
    ops["accepting"] = _indicator("accepting", alphabet, {state_letter(q) for q in m.accepting})
    return ops


# -- head moves and the step command ------------------------------------------

def emit_move_right(tape_l: str = "tape_l", tape_h: str = "tape_h", tape_r: str = "tape_r"):
    return seq(
        Push(Top(tape_h), tape_l),
        StackLit(tape_h, ()),
        Push(Top(tape_r), tape_h),
        Pop(tape_r),
    )


def emit_move_left(tape_l: str = "tape_l", tape_h: str = "tape_h", tape_r: str = "tape_r"):
    return emit_move_right(tape_r, tape_h, tape_l)


def emit_transition(target: tuple, register: str = "state"):
    """Write the symbol, update the state, move the head."""
    q, s, move = target
    parts = [StackLit("tape_h", (symbol_letter(s),)), RegAssign(register, Letter(state_letter(q)))]
    if move == "R":
        parts.append(emit_move_right())
    elif move == "L":
        parts.append(emit_move_left())
    return seq(*parts)


def _chain(cases: list):
    # cases: [(condition, command)]; the last command is the fall-through.
    acc = cases[-1][1]
    for cond, cmd in reversed(cases[:-1]):
        acc = If(cond, cmd, acc)
    return acc


def _dispatch(m: PTMDescription, delta: Mapping, register: str):
    per_state = []
    for q in m.states:
        per_symbol = [(Pred(_is_symbol(s), (Top("tape_h"),)), emit_transition(delta[q, s], register))
                      for s in m.symbols]
        per_state.append((Pred(_is_state(q), (Reg(register),)), _chain(per_symbol)))
    return _chain(per_state)


def emit_delta(m: PTMDescription, register: str = "state"):
    """One machine step: a coin picks the transition table, nested tests pick the case."""
    return If(Rand(), _dispatch(m, m.delta0, register), _dispatch(m, m.delta1, register))


# -- whole-program encoding ---------------------------------------------------

ADDITION = FunctionDef(
    "addition", ("a1", "a2"),
    seq(StackCopy("a3", "a2"), Loop("a2", seq(Push(Top("a3"), "a1"), Pop("a3")))),
    "a1",
)
MULTIPLICATION = FunctionDef(
    "multiplication", ("m1", "m2"),
    seq(StackLit("m3", ()), Loop("m2", CallAssign("m3", "addition", ("m3", "m1")))),
    "m3",
)
CLOCK_STACKS = ("inp", "clk", "tmp")
FUNCTION_STACKS = ("a1", "a2", "a3", "m1", "m2", "m3")


def emit_clock(clock: Polynomial, length_stack: str = "inp", clock_stack: str = "clk",
               scratch: str = "tmp"):
    """Straight-line code leaving ``clock(|length_stack|)`` letters in ``clock_stack``."""
    cmds = [StackLit(clock_stack, ())]
    for (e,), c in sorted(clock.terms.items()):
        if e == 0:
            cmds.extend(Push(Letter("true"), clock_stack) for _ in range(c))
            continue
        cmds.append(StackCopy(scratch, length_stack))
        cmds.extend(CallAssign(scratch, "multiplication", (scratch, length_stack)) for _ in range(e - 1))
        cmds.extend(CallAssign(clock_stack, "addition", (clock_stack, scratch)) for _ in range(c))
    return seq(*cmds)


def encode(m: PTMDescription, word: Optional[Sequence[str]] = None) -> Program:
    word = tuple(m.input if word is None else word)
    if not set(word) <= set(m.symbols):
        raise PTMError("input uses undeclared symbols")
    letters = [symbol_letter(s) for s in word]
    head = letters[0] if letters else symbol_letter(m.blank)
    main = seq(
        StackLit("tape_l", ()),
        StackLit("tape_h", (head,)),
        StackLit("tape_r", tuple(letters[1:])),
        StackLit("inp", tuple(letters)),
        emit_clock(m.clock),
        RegAssign("state", Letter(state_letter(m.initial))),
        Loop("clk", emit_delta(m)),
        StackLit("out", ()),
        If(Pred("accepting", (Reg("state"),)), Skip(), Push(Letter("true"), "out")),
    )
    return Program(
        alphabet=_alphabet(m),
        operators=_operators(m),
        registers=("state",),
        stacks=TAPE + CLOCK_STACKS + ("out",) + FUNCTION_STACKS,
        functions={"addition": ADDITION, "multiplication": MULTIPLICATION},
        main=main,
        blank=symbol_letter(m.blank),
        output="out",
    )


def step_program(m: PTMDescription) -> Program:
    """Program whose main performs exactly one encoded step (for lockstep tests)."""
    return Program(
        alphabet=_alphabet(m),
        operators=_operators(m),
        registers=("state",),
        stacks=TAPE,
        functions={},
        main=emit_delta(m),
        blank=symbol_letter(m.blank),
    )


# -- direct simulation ----------------------------------------------------------

@dataclass(frozen=True)
class Configuration:
    state: str
    head: int
    tape: tuple  # sorted (position, symbol) pairs, blanks omitted

    def read(self, blank: str) -> str:
        return dict(self.tape).get(self.head, blank)

    def window(self, blank: str) -> tuple:
        """Symbols from the leftmost to the rightmost non-blank cell, head included."""
        cells = dict(self.tape)
        positions = list(cells) + [self.head]
        return tuple(cells.get(i, blank) for i in range(min(positions), max(positions) + 1))


def initial_configuration(m: PTMDescription, word: Sequence[str]) -> Configuration:
    tape = tuple((i, s) for i, s in enumerate(word) if s != m.blank)
    return Configuration(m.initial, 0, tape)


def step(m: PTMDescription, conf: Configuration, coin: int) -> Configuration:
    delta = m.delta0 if coin == 0 else m.delta1
    q, s, move = delta[conf.state, conf.read(m.blank)]
    cells = dict(conf.tape)
    if s == m.blank:
        cells.pop(conf.head, None)
    else:
        cells[conf.head] = s
    head = conf.head + {"L": -1, "S": 0, "R": 1}[move]
    return Configuration(q, head, tuple(sorted(cells.items())))


def simulate_direct(m: PTMDescription, word: Sequence[str], rng=None) -> Configuration:
    """Run ``clock(|word|)`` steps drawing one coin per step."""
    flip = coin_source(rng)
    conf = initial_configuration(m, word)
    for _ in range(m.steps(len(word))):
        conf = step(m, conf, flip())
    return conf


def direct_distribution(m: PTMDescription, word: Sequence[str], flip_budget: int = 12) -> dict:
    """Exact ``{accepted: probability}`` by enumerating every coin sequence."""
    n = m.steps(len(word))
    if n > flip_budget:
        raise EnumerationLimitExceeded(f"{n} steps exceed the flip budget {flip_budget}")
    confs = {initial_configuration(m, word): Fraction(1)}
    for _ in range(n):
        nxt: dict = {}
        for conf, p in confs.items():
            for coin in (0, 1):
                c2 = step(m, conf, coin)
                nxt[c2] = nxt.get(c2, Fraction(0)) + p / 2
        confs = nxt
    out: dict = {}
    for conf, p in confs.items():
        key = conf.state in m.accepting
        out[key] = out.get(key, Fraction(0)) + p
    return out


def encoded_distribution(m: PTMDescription, word: Sequence[str], flip_budget: int = 12) -> dict:
    program = encode(m, word)
    interp = Interpreter(program, flip_budget=flip_budget)
    dist = interp.distribution(program.main, initial_state(program))
    return dist.marginal(lambda s: s.size("out") == 0)


@dataclass(frozen=True)
class DifferentialReport:
    word: tuple
    steps: int
    direct: dict
    encoded: dict

    @property
    def equal(self) -> bool:
        keys = set(self.direct) | set(self.encoded)
        return all(self.direct.get(k, 0) == self.encoded.get(k, 0) for k in keys)


def differential_test(m: PTMDescription, word: Optional[Sequence[str]] = None,
                      flip_budget: int = 12) -> DifferentialReport:
    word = tuple(m.input if word is None else word)
    return DifferentialReport(
        word, m.steps(len(word)),
        direct_distribution(m, word, flip_budget),
        encoded_distribution(m, word, flip_budget),
    )


def tape_window(state: MachineState, blank_letter: str) -> tuple:
    """Reassemble the tape from the three stacks, trimming blanks at both ends."""
    cells = tuple(reversed(state.stacks["tape_l"])) + state.stacks["tape_h"] + state.stacks["tape_r"]
    lo, hi = 0, len(cells)
    while lo < hi and cells[lo] == blank_letter:
        lo += 1
    while hi > lo and cells[hi - 1] == blank_letter:
        hi -= 1
    return cells[lo:hi]
