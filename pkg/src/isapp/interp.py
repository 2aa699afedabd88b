"""Probabilistic big-step semantics: single seeded runs and exact distributions.

``rand()`` consumes one fair bit; bit 0 reads as ``true``.  Probabilities are
exact :class:`fractions.Fraction` values throughout.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, Optional

import numpy as np

from .lang import (
    BoolConst, CallAssign, If, IsEmpty, Letter, Loop, OpApp, Pop, Pred, Program,
    Push, Rand, Reg, RegAssign, Seq, Skip, StackCopy, StackLit, Top,
)

HALF = Fraction(1, 2)
ONE = Fraction(1)

__all__ = [
    "MachineState", "Distribution", "Interpreter", "InterpError", "TopOfEmpty",
    "EnumerationLimitExceeded", "CoinsExhausted", "MajorityResult",
    "initial_state", "eval_expr", "eval_bool", "run", "distribution",
    "decide_majority", "sample", "coin_source",
]


class InterpError(Exception):
    pass


class TopOfEmpty(InterpError):
    pass


class EnumerationLimitExceeded(InterpError):
    pass


class CoinsExhausted(InterpError):
    pass


class MachineState:
    """Immutable machine state: stack contents (index 0 is the top) and registers."""

    __slots__ = ("stacks", "registers", "_hash")

    def __init__(self, stacks: Mapping[str, Iterable[str]], registers: Mapping[str, str] | None = None):
        self.stacks = MappingProxyType({k: tuple(v) for k, v in stacks.items()})
        self.registers = MappingProxyType(dict(registers or {}))
        self._hash = hash((frozenset(self.stacks.items()), frozenset(self.registers.items())))

    def __eq__(self, other) -> bool:
        return (isinstance(other, MachineState) and self._hash == other._hash
                and self.stacks == other.stacks and self.registers == other.registers)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        stacks = ", ".join(f"{k}=<{','.join(v)}>" for k, v in self.stacks.items())
        regs = ", ".join(f"{k}={v}" for k, v in self.registers.items())
        return f"MachineState({stacks}{'; ' + regs if regs else ''})"

    def __getitem__(self, name: str):
        if name in self.stacks:
            return self.stacks[name]
        return self.registers[name]

    def size(self, stack: str) -> int:
        return len(self.stacks[stack])

    def sizes(self, order: Iterable[str] | None = None) -> tuple:
        order = self.stacks.keys() if order is None else order
        return tuple(len(self.stacks[s]) for s in order)

    def with_stack(self, name: str, content: tuple) -> "MachineState":
        stacks = dict(self.stacks)
        stacks[name] = content
        return MachineState(stacks, self.registers)

    def with_register(self, name: str, letter: str) -> "MachineState":
        regs = dict(self.registers)
        regs[name] = letter
        return MachineState(self.stacks, regs)


class Distribution(Mapping):
    """Finite distribution over machine states with exact probabilities."""

    def __init__(self, masses: Mapping[MachineState, Fraction]):
        self._masses = {s: Fraction(p) for s, p in masses.items() if p}
        if any(p < 0 for p in self._masses.values()):
            raise ValueError("negative probability")
        total = sum(self._masses.values(), Fraction(0))
        if total != 1:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def __getitem__(self, state: MachineState) -> Fraction:
        return self._masses.get(state, Fraction(0))

    def __iter__(self) -> Iterator[MachineState]:
        return iter(self._masses)

    def __len__(self) -> int:
        return len(self._masses)

    def __repr__(self) -> str:
        return "Distribution({" + ", ".join(f"{s!r}: {p}" for s, p in self._masses.items()) + "})"

    def marginal(self, key: Callable[[MachineState], object]) -> dict:
        out: dict = {}
        for s, p in self._masses.items():
            k = key(s)
            out[k] = out.get(k, Fraction(0)) + p
        return out


@dataclass(frozen=True)
class MajorityResult:
    accept: bool
    empty: Fraction
    nonempty: Fraction


def coin_source(rng) -> Callable[[], int]:
    """Turn ``rng`` into a zero-argument bit generator.

    Accepts a numpy ``Generator``, a ``random.Random``, an integer seed, or any
    iterable of 0/1 bits (consumed in order).
    """
    if rng is None:
        rng = 0
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    if isinstance(rng, np.random.Generator):
        return lambda: int(rng.integers(2))
    if isinstance(rng, random.Random):
        return lambda: rng.getrandbits(1)
    it = iter(rng)

    def flip() -> int:
        try:
            return int(next(it))
        except StopIteration:
            raise CoinsExhausted("the scripted coin sequence ran out") from None

    return flip


class Interpreter:
    """Evaluator bound to one program.

    ``steps`` counts executed primitive commands and ``loop_iterations``
    counts body executions per loop node (keyed by ``id`` of the node).
    """

    def __init__(self, program: Program, blank: Optional[str] = None, flip_budget: int = 24):
        self.program = program
        self.blank = blank if blank is not None else program.blank
        self.flip_budget = flip_budget
        self.steps = 0
        self.loop_iterations: Counter = Counter()
        self._spaces = {name: f.stack_space(program.stacks) for name, f in program.functions.items()}

    # -- expressions --------------------------------------------------------

    def eval_expr(self, e, state: MachineState) -> str:
        if isinstance(e, Letter):
            return e.name
        if isinstance(e, Reg):
            return state.registers[e.name]
        if isinstance(e, Top):
            content = state.stacks[e.stack]
            if content:
                return content[0]
            if self.blank is None:
                raise TopOfEmpty(f"top of empty stack {e.stack}")
            return self.blank
        if isinstance(e, OpApp):
            op = self.program.operators[e.op]
            return op(*(self.eval_expr(a, state) for a in e.args))
        raise TypeError(f"not an expression: {e!r}")

    def _deterministic_bool(self, b, state: MachineState) -> bool:
        if isinstance(b, BoolConst):
            return b.value
        if isinstance(b, IsEmpty):
            return not state.stacks[b.stack]
        if isinstance(b, Pred):
            op = self.program.operators[b.op]
            return op(*(self.eval_expr(a, state) for a in b.args)) == "true"
        raise TypeError(f"not a boolean expression: {b!r}")

    def eval_bool(self, b, state: MachineState, rng=None) -> tuple[bool, Fraction]:
        if isinstance(b, Rand):
            flip = rng if callable(rng) else coin_source(rng)
            return flip() == 0, HALF
        return self._deterministic_bool(b, state), ONE

    # -- single runs --------------------------------------------------------

    def _frame(self, call: CallAssign, state: MachineState) -> MachineState:
        f = self.program.functions[call.func]
        stacks = {s: () for s in self._spaces[call.func]}
        for param, actual in zip(f.params, call.args):
            stacks[param] = state.stacks[actual]
        return MachineState(stacks, state.registers)

    def _run(self, c, state: MachineState, flip) -> tuple[MachineState, Fraction]:
        if isinstance(c, Skip):
            self.steps += 1
            return state, ONE
        if isinstance(c, Pop):
            self.steps += 1
            return state.with_stack(c.stack, state.stacks[c.stack][1:]), ONE
        if isinstance(c, Push):
            self.steps += 1
            letter = self.eval_expr(c.expr, state)
            return state.with_stack(c.stack, (letter,) + state.stacks[c.stack]), ONE
        if isinstance(c, RegAssign):
            self.steps += 1
            return state.with_register(c.reg, self.eval_expr(c.expr, state)), ONE
        if isinstance(c, StackCopy):
            self.steps += 1
            return state.with_stack(c.dst, state.stacks[c.src]), ONE
        if isinstance(c, StackLit):
            self.steps += 1
            return state.with_stack(c.dst, c.letters), ONE
        if isinstance(c, Seq):
            prob = ONE
            for sub in c.cmds:
                state, p = self._run(sub, state, flip)
                prob *= p
            return state, prob
        if isinstance(c, If):
            value, p = self.eval_bool(c.cond, state, flip)
            state, q = self._run(c.then if value else c.orelse, state, flip)
            return state, p * q
        if isinstance(c, Loop):
            prob = ONE
            for _ in range(len(state.stacks[c.stack])):
                self.loop_iterations[id(c)] += 1
                state, p = self._run(c.body, state, flip)
                prob *= p
            return state, prob
        if isinstance(c, CallAssign):
            self.steps += 1
            f = self.program.functions[c.func]
            final, p = self._run(f.body, self._frame(c, state), flip)
            return state.with_stack(c.dst, final.stacks[f.returns]), p
        raise TypeError(f"not a command: {c!r}")

    def run(self, cmd, state: MachineState, rng=None) -> tuple[MachineState, Fraction]:
        """Execute ``cmd`` once; returns the final state and the path probability."""
        return self._run(cmd, state, coin_source(rng))

    # -- exact distributions ------------------------------------------------

    def _dist(self, c, dist: dict) -> dict:
        # dist maps state -> (probability, most coin flips on any path so far)
        if isinstance(c, Seq):
            for sub in c.cmds:
                dist = self._dist(sub, dist)
            return dist
        if isinstance(c, If):
            if isinstance(c.cond, Rand):
                halved = {}
                for s, (p, k) in dist.items():
                    if k + 1 > self.flip_budget:
                        raise EnumerationLimitExceeded(
                            f"more than {self.flip_budget} coin flips on one path")
                    halved[s] = (p * HALF, k + 1)
                return _merge(self._dist(c.then, halved), self._dist(c.orelse, halved))
            then, orelse = {}, {}
            for s, pk in dist.items():
                (then if self._deterministic_bool(c.cond, s) else orelse)[s] = pk
            out = {}
            if then:
                out = self._dist(c.then, then)
            if orelse:
                out = _merge(out, self._dist(c.orelse, orelse))
            return out
        if isinstance(c, Loop):
            done: dict = {}
            i = 0
            while dist:
                running = {}
                for s, pk in dist.items():
                    (running if len(s.stacks[c.stack]) > i else done)[s] = pk
                if not running:
                    break
                dist = self._dist(c.body, running)
                i += 1
            return done
        if isinstance(c, CallAssign):
            f = self.program.functions[c.func]
            out: dict = {}
            for s, (p, k) in dist.items():
                inner = self._dist(f.body, {self._frame(c, s): (p, k)})
                for fs, pk in inner.items():
                    _add(out, s.with_stack(c.dst, fs.stacks[f.returns]), pk)
            return out
        out = {}
        for s, pk in dist.items():
            final, _ = self._run(c, s, _no_coins)
            _add(out, final, pk)
        return out

    def distribution(self, cmd, state: MachineState) -> Distribution:
        """Exact distribution of final states, merging identical states."""
        return Distribution({s: p for s, (p, _) in self._dist(cmd, {state: (ONE, 0)}).items()})


def _no_coins() -> int:
    raise AssertionError("coin flipped outside an if-rand")


def _add(out: dict, state: MachineState, pk: tuple) -> None:
    if state in out:
        p, k = out[state]
        out[state] = (p + pk[0], max(k, pk[1]))
    else:
        out[state] = pk


def _merge(a: dict, b: dict) -> dict:
    out = dict(a)
    for s, pk in b.items():
        _add(out, s, pk)
    return out


# -- module-level conveniences ----------------------------------------------

def initial_state(program: Program, size: int = 0, fill: str = "true",
                  inputs: Mapping[str, Iterable[str]] | None = None,
                  register_default: str = "false") -> MachineState:
    """Every stack holds ``size`` copies of ``fill`` unless overridden by ``inputs``."""
    stacks = {s: (fill,) * size for s in program.stacks}
    for name, content in (inputs or {}).items():
        if name not in stacks:
            raise KeyError(f"unknown stack {name!r}")
        stacks[name] = tuple(content)
    return MachineState(stacks, {r: register_default for r in program.registers})


def eval_expr(program: Program, e, state: MachineState) -> str:
    return Interpreter(program).eval_expr(e, state)


def eval_bool(program: Program, b, state: MachineState, rng=None) -> tuple[bool, Fraction]:
    return Interpreter(program).eval_bool(b, state, rng)


def run(program: Program, state: MachineState, rng=None, cmd=None) -> tuple[MachineState, Fraction]:
    return Interpreter(program).run(program.main if cmd is None else cmd, state, rng)


def distribution(program: Program, state: MachineState, cmd=None, flip_budget: int = 24) -> Distribution:
    interp = Interpreter(program, flip_budget=flip_budget)
    return interp.distribution(program.main if cmd is None else cmd, state)


def sample(program: Program, state: MachineState, runs: int, seed: int = 0, cmd=None) -> Counter:
    """Final-state counts over ``runs`` independent runs.

    Run ``i`` draws its coins from the ``i``-th child of ``SeedSequence(seed)``.
    """
    interp = Interpreter(program)
    cmd = program.main if cmd is None else cmd
    counts: Counter = Counter()
    for child in np.random.SeedSequence(seed).spawn(runs):
        final, _ = interp.run(cmd, state, np.random.default_rng(child))
        counts[final] += 1
    return counts


def decide_majority(program: Program, n: int, output: Optional[str] = None, fill: str = "true",
                    flip_budget: int = 24) -> MajorityResult:
    """Accept iff the output stack ends empty with probability at least 1/2."""
    output = output or program.output
    if output is None:
        raise ValueError("no output stack configured")
    dist = distribution(program, initial_state(program, n, fill), flip_budget=flip_budget)
    masses = dist.marginal(lambda s: s.size(output) == 0)
    empty = masses.get(True, Fraction(0))
    nonempty = masses.get(False, Fraction(0))
    return MajorityResult(empty >= nonempty, empty, nonempty)
