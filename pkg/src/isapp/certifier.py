"""Certificate inference by structural recursion over commands.

Every command gets a square matrix over its stack space plus one constants
index.  Loops whose union closure has an A or M on the diagonal are rejected
with :class:`ExponentialLoop`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import algebra as alg
from .algebra import A, L, Combiner
from .lang import (
    CallAssign, FunctionDef, If, Loop, Pop, Program, Push, RegAssign, Seq,
    Skip, StackCopy, StackLit, call_order,
)


class CertificationError(Exception):
    pass


class UnknownFunction(CertificationError):
    pass


class ExponentialLoop(CertificationError):
    """A loop whose body may grow some stack by a non-unit factor per iteration."""

    def __init__(self, pos, loop_stack: str, index: int, value: alg.Value,
                 closure: np.ndarray, stacks: tuple, function: Optional[str] = None):
        self.pos = pos
        self.loop_stack = loop_stack
        self.index = index
        self.stack = stacks[index]
        self.value = alg.Value(value)
        self.closure = closure
        self.stacks = stacks
        self.function = function
        where = f"line {pos[0]}, column {pos[1]}" if pos else "unknown location"
        scope = f"function {function}" if function else "main"
        super().__init__(
            f"loop over {loop_stack} at {where} ({scope}): closure diagonal entry "
            f"({index + 1},{index + 1}) [{self.stack}] = {self.value}")

    def render(self) -> str:
        return f"{self}\nclosure:\n{alg.render(self.closure, self.stacks)}"


@dataclass(frozen=True, eq=False)
class LoopTrace:
    pos: Optional[tuple]
    function: Optional[str]
    loop_stack: str
    body: np.ndarray
    closure: np.ndarray
    result: np.ndarray


@dataclass(frozen=True, eq=False)
class FunctionCertificate:
    name: str
    matrix: np.ndarray
    stacks: tuple  # parameters first, then locals
    returns: int

    @property
    def column(self) -> np.ndarray:
        return self.matrix[:, self.returns]


@dataclass(frozen=True, eq=False)
class Certificate:
    matrix: np.ndarray
    stacks: tuple
    combiner: str = "plus"
    functions: Mapping = field(default_factory=dict)
    trace: tuple = ()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entry(self, row: str, col: str) -> alg.Value:
        idx = {s: i for i, s in enumerate(self.stacks)}
        idx["const"] = len(self.stacks)
        return alg.Value(self.matrix[idx[row], idx[col]])


def certify_command(cmd, stacks: Sequence[str], env: Mapping[str, FunctionCertificate],
                    combiner: Combiner = "plus", trace: Optional[list] = None,
                    function: Optional[str] = None) -> np.ndarray:
    """Certificate matrix of ``cmd`` over the ordered stack space ``stacks``."""
    stacks = tuple(stacks)
    index = {s: i for i, s in enumerate(stacks)}
    d = len(stacks) + 1
    const = d - 1
    ident = alg.identity(d)

    def go(c) -> np.ndarray:
        if isinstance(c, (Skip, Pop, RegAssign)):
            return ident
        if isinstance(c, StackCopy):
            return alg.substitute_column(ident, index[c.dst], alg.unit_vector(d, index[c.src]))
        if isinstance(c, StackLit):
            n = len(c.letters)
            col = alg.unit_vector(d, const, 0 if n == 0 else (L if n == 1 else A))
            return alg.substitute_column(ident, index[c.dst], col)
        if isinstance(c, Push):
            i = index[c.stack]
            col = np.array(alg.unit_vector(d, i))
            col[const] = alg.val_add(col[const], L)
            return alg.substitute_column(ident, i, col)
        if isinstance(c, Seq):
            result = go(c.cmds[0])
            for sub in c.cmds[1:]:
                result = alg.mat_mul(result, go(sub), combiner)
            return result
        if isinstance(c, If):
            return alg.mat_union(go(c.then), go(c.orelse))
        if isinstance(c, Loop):
            body = go(c.body)
            closure = alg.union_closure(body, combiner)
            diag = np.diagonal(closure)
            bad = np.flatnonzero(diag >= A)
            if len(bad):
                i = int(bad[0])
                raise ExponentialLoop(c.pos, c.stack, i, alg.Value(diag[i]), closure,
                                      stacks + ("const",), function)
            result = alg.merge_down(closure, index[c.stack])
            if trace is not None:
                trace.append(LoopTrace(c.pos, function, c.stack, body, closure, result))
            return result
        if isinstance(c, CallAssign):
            fc = env.get(c.func)
            if fc is None:
                raise UnknownFunction(f"function {c.func!r} has no certificate")
            mapping = {q: index[actual] for q, actual in enumerate(c.args)}
            col = alg.reorder(fc.column, mapping, d)
            return alg.substitute_column(ident, index[c.dst], col)
        raise TypeError(f"not a command: {c!r}")

    return go(cmd)


def certify_function(f: FunctionDef, env: Mapping[str, FunctionCertificate],
                     stack_order: Sequence[str], combiner: Combiner = "plus",
                     trace: Optional[list] = None) -> FunctionCertificate:
    stacks = f.stack_space(tuple(stack_order))
    matrix = certify_command(f.body, stacks, env, combiner, trace, function=f.name)
    return FunctionCertificate(f.name, matrix, stacks, stacks.index(f.returns))


def certify_functions(program: Program, combiner: Combiner = "plus",
                      trace: Optional[list] = None) -> dict[str, FunctionCertificate]:
    env: dict[str, FunctionCertificate] = {}
    for name in call_order(program):
        env[name] = certify_function(program.functions[name], env, program.stacks, combiner, trace)
    return env


def certify_program(program: Program, combiner: Combiner = "plus",
                    trace: bool = False) -> Certificate:
    """Certify every function (callees first), then ``main``.

    Raises :class:`ExponentialLoop` on the first rejected loop.
    """
    log: Optional[list] = [] if trace else None
    env = certify_functions(program, combiner, log)
    matrix = certify_command(program.main, program.stacks, env, combiner, log)
    return Certificate(matrix, tuple(program.stacks), combiner, env, tuple(log or ()))


def validate_certificate(program: Program, matrix, combiner: Combiner = "plus") -> bool:
    """True if ``matrix`` is a valid (possibly weakened) certificate for ``main``.

    A matrix is valid when it is pointwise at least the computed one; a
    program that is rejected has no valid certificate.
    """
    try:
        least = certify_program(program, combiner).matrix
    except ExponentialLoop:
        return False
    matrix = np.asarray(matrix, dtype=np.uint8)
    return matrix.shape == least.shape and alg.mat_le(least, matrix)
