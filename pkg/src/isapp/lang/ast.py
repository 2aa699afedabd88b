"""Abstract syntax of stack-machine programs.

All nodes are frozen dataclasses.  Source positions are carried in ``pos``
fields excluded from equality, so parsed and hand-built trees compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Union

Pos = Optional[tuple]  # (line, column), 1-based


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Letter:
    name: str


@dataclass(frozen=True)
class Reg:
    name: str


@dataclass(frozen=True)
class OpApp:
    op: str
    args: tuple = ()


@dataclass(frozen=True)
class Top:
    stack: str


Expr = Union[Letter, Reg, OpApp, Top]


# -- booleans ---------------------------------------------------------------

@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class Pred:
    op: str
    args: tuple = ()


@dataclass(frozen=True)
class Rand:
    pass


@dataclass(frozen=True)
class IsEmpty:
    stack: str


BoolExpr = Union[BoolConst, Pred, Rand, IsEmpty]


# -- commands ---------------------------------------------------------------

@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class RegAssign:
    reg: str
    expr: Expr


@dataclass(frozen=True)
class StackCopy:
    dst: str
    src: str


@dataclass(frozen=True)
class StackLit:
    """``dst := <c1, ..., cn>`` with ``c1`` on top."""
    dst: str
    letters: tuple = ()


@dataclass(frozen=True)
class CallAssign:
    dst: str
    func: str
    args: tuple = ()
    pos: Pos = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Pop:
    stack: str


@dataclass(frozen=True)
class Push:
    expr: Expr
    stack: str


@dataclass(frozen=True)
class Seq:
    cmds: tuple


@dataclass(frozen=True)
class If:
    cond: BoolExpr
    then: "Command"
    orelse: "Command"


@dataclass(frozen=True)
class Loop:
    stack: str
    body: "Command"
    pos: Pos = field(default=None, compare=False, repr=False)


Command = Union[Skip, RegAssign, StackCopy, StackLit, CallAssign, Pop, Push, Seq, If, Loop]


def seq(*cmds: Command) -> Command:
    """Sequence constructor that flattens nested sequences.

    A single command is returned as is; an empty sequence is ``Skip()``.
    """
    flat: list = []
    for c in cmds:
        if isinstance(c, Seq):
            flat.extend(c.cmds)
        else:
            flat.append(c)
    if not flat:
        return Skip()
    if len(flat) == 1:
        return flat[0]
    return Seq(tuple(flat))


# -- declarations -----------------------------------------------------------

@dataclass(frozen=True)
class OperatorDef:
    name: str
    arity: int
    table: Mapping  # tuple of letters -> letter

    @property
    def is_predicate(self) -> bool:
        return all(v in ("true", "false") for v in self.table.values())

    def __call__(self, *args: str) -> str:
        return self.table[tuple(args)]


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple
    body: Command
    returns: str

    def locals(self, stack_order: tuple) -> tuple:
        """Stacks used by the body (or returned) that are not parameters,
        in program declaration order."""
        used = set(stacks_of(self.body)) | {self.returns}
        return tuple(s for s in stack_order if s in used and s not in self.params)

    def stack_space(self, stack_order: tuple) -> tuple:
        return tuple(self.params) + self.locals(stack_order)


@dataclass(frozen=True)
class Program:
    alphabet: tuple
    operators: Mapping  # name -> OperatorDef
    registers: tuple
    stacks: tuple
    functions: Mapping  # name -> FunctionDef, in source order
    main: Command
    blank: Optional[str] = None
    output: Optional[str] = None

    def stack_index(self) -> dict:
        return {s: i for i, s in enumerate(self.stacks)}


# -- traversals -------------------------------------------------------------

def subcommands(cmd: Command) -> Iterator[Command]:
    """Pre-order walk over a command tree."""
    yield cmd
    if isinstance(cmd, Seq):
        for c in cmd.cmds:
            yield from subcommands(c)
    elif isinstance(cmd, If):
        yield from subcommands(cmd.then)
        yield from subcommands(cmd.orelse)
    elif isinstance(cmd, Loop):
        yield from subcommands(cmd.body)


def _expr_stacks(e) -> Iterator[str]:
    if isinstance(e, Top):
        yield e.stack
    elif isinstance(e, (OpApp, Pred)):
        for a in e.args:
            yield from _expr_stacks(a)
    elif isinstance(e, IsEmpty):
        yield e.stack


def stacks_of(cmd: Command) -> Iterator[str]:
    """Every stack name occurring syntactically in ``cmd`` (with repeats).

    Call arguments count; the callee's body does not.
    """
    for c in subcommands(cmd):
        if isinstance(c, RegAssign):
            yield from _expr_stacks(c.expr)
        elif isinstance(c, StackCopy):
            yield c.dst
            yield c.src
        elif isinstance(c, StackLit):
            yield c.dst
        elif isinstance(c, CallAssign):
            yield c.dst
            yield from c.args
        elif isinstance(c, Pop):
            yield c.stack
        elif isinstance(c, Push):
            yield from _expr_stacks(c.expr)
            yield c.stack
        elif isinstance(c, If):
            yield from _expr_stacks(c.cond)
        elif isinstance(c, Loop):
            yield c.stack


def calls_of(cmd: Command) -> Iterator[str]:
    for c in subcommands(cmd):
        if isinstance(c, CallAssign):
            yield c.func
