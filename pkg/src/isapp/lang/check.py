"""Static well-formedness checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .ast import (
    CallAssign, If, Loop, OpApp, Pred, Program, Push, RegAssign,
    calls_of, stacks_of, subcommands,
)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    pos: Optional[tuple] = None

    def __str__(self) -> str:
        where = f"{self.pos[0]}:{self.pos[1]}: " if self.pos else ""
        return f"{where}{self.code}: {self.message}"


def _check_expr(e, program: Program, out: list, boolean: bool) -> None:
    if isinstance(e, (OpApp, Pred)):
        op = program.operators.get(e.op)
        if op is None:
            out.append(Diagnostic("unknown-operator", f"operator {e.op!r} is not declared"))
            return
        if op.arity != len(e.args):
            out.append(Diagnostic("arity", f"operator {e.op!r} expects {op.arity} "
                                           f"arguments, got {len(e.args)}"))
        if boolean and not op.is_predicate:
            out.append(Diagnostic("predicate-position",
                                  f"operator {e.op!r} is not a predicate but is used as a boolean"))
        if not boolean and op.is_predicate:
            out.append(Diagnostic("predicate-position",
                                  f"predicate {e.op!r} used as an expression"))
        for a in e.args:
            _check_expr(a, program, out, boolean=False)


def _check_command(cmd, program: Program, out: list) -> None:
    for c in subcommands(cmd):
        if isinstance(c, Loop):
            if c.stack in set(stacks_of(c.body)):
                out.append(Diagnostic("loop-stack-in-body",
                                      f"loop stack {c.stack!r} is used in the loop body", c.pos))
        elif isinstance(c, RegAssign):
            _check_expr(c.expr, program, out, boolean=False)
        elif isinstance(c, Push):
            _check_expr(c.expr, program, out, boolean=False)
        elif isinstance(c, If):
            _check_expr(c.cond, program, out, boolean=True)
        elif isinstance(c, CallAssign):
            f = program.functions.get(c.func)
            if f is None:
                out.append(Diagnostic("unknown-function", f"function {c.func!r} is not defined", c.pos))
            elif len(f.params) != len(c.args):
                out.append(Diagnostic("arity", f"function {c.func!r} expects {len(f.params)} "
                                               f"arguments, got {len(c.args)}", c.pos))


def _find_cycle(program: Program) -> Optional[list]:
    graph = {name: sorted(set(calls_of(f.body))) for name, f in program.functions.items()}
    state: dict = {}
    path: list = []

    def visit(n):
        state[n] = "active"
        path.append(n)
        for m in graph.get(n, ()):
            if state.get(m) == "active":
                return path[path.index(m):] + [m]
            if m not in state:
                found = visit(m)
                if found:
                    return found
        path.pop()
        state[n] = "done"
        return None

    for name in graph:
        if name not in state:
            cycle = visit(name)
            if cycle:
                return cycle
    return None


def call_order(program: Program) -> list[str]:
    """Function names, callees before callers.  Assumes no recursion."""
    order: list = []
    done: set = set()

    def visit(n):
        if n in done:
            return
        done.add(n)
        for m in sorted(set(calls_of(program.functions[n].body))):
            if m in program.functions:
                visit(m)
        order.append(n)

    for name in program.functions:
        visit(name)
    return order


def check_wellformed(program: Program) -> list[Diagnostic]:
    """Return the list of static problems; empty means well formed."""
    out: list[Diagnostic] = []
    if len(program.alphabet) < 2 or "true" not in program.alphabet or "false" not in program.alphabet:
        out.append(Diagnostic("alphabet", "the alphabet needs at least the letters true and false"))
    for op in program.operators.values():
        expected = set(itertools.product(program.alphabet, repeat=op.arity))
        missing = expected - set(op.table)
        if missing:
            example = ",".join(sorted(missing)[0]) or "()"
            out.append(Diagnostic("incomplete-table",
                                  f"operator {op.name!r} misses {len(missing)} rows, e.g. {example}"))
    for f in program.functions.values():
        if len(set(f.params)) != len(f.params):
            out.append(Diagnostic("duplicate-parameter", f"function {f.name!r} repeats a parameter"))
        _check_command(f.body, program, out)
    _check_command(program.main, program, out)
    cycle = _find_cycle(program)
    if cycle:
        out.append(Diagnostic("recursive-call", "recursive call: " + " -> ".join(cycle)))
    return out

