"""Pretty printer producing text that :func:`parse` reads back to the same AST."""

from __future__ import annotations

from .ast import (
    BoolConst, CallAssign, If, IsEmpty, Letter, Loop, OpApp, Pop, Pred,
    Program, Push, Rand, Reg, RegAssign, Seq, Skip, StackCopy, StackLit, Top,
)

INDENT = "    "


def format_expr(e) -> str:
    if isinstance(e, (Letter, Reg)):
        return e.name
    if isinstance(e, Top):
        return f"top({e.stack})"
    if isinstance(e, (OpApp, Pred)):
        return f"{e.op}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, BoolConst):
        return "true" if e.value else "false"
    if isinstance(e, Rand):
        return "rand()"
    if isinstance(e, IsEmpty):
        return f"isEmpty({e.stack})"
    raise TypeError(f"not an expression: {e!r}")


def _block(cmd, depth: int) -> list[str]:
    cmds = cmd.cmds if isinstance(cmd, Seq) else (cmd,)
    lines = []
    for n, c in enumerate(cmds):
        sub = _command(c, depth)
        if n < len(cmds) - 1:
            sub[-1] += ";"
        lines.extend(sub)
    return lines


def _command(c, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(c, Skip):
        return [pad + "skip"]
    if isinstance(c, RegAssign):
        return [f"{pad}{c.reg} := {format_expr(c.expr)}"]
    if isinstance(c, StackCopy):
        return [f"{pad}{c.dst} := {c.src}"]
    if isinstance(c, StackLit):
        return [f"{pad}{c.dst} := <{', '.join(c.letters)}>"]
    if isinstance(c, CallAssign):
        return [f"{pad}{c.dst} := {c.func}({', '.join(c.args)})"]
    if isinstance(c, Pop):
        return [f"{pad}pop({c.stack})"]
    if isinstance(c, Push):
        return [f"{pad}push({format_expr(c.expr)}, {c.stack})"]
    if isinstance(c, Seq):
        return _block(c, depth)
    if isinstance(c, If):
        return ([f"{pad}if {format_expr(c.cond)} {{"] + _block(c.then, depth + 1)
                + [pad + "} else {"] + _block(c.orelse, depth + 1) + [pad + "}"])
    if isinstance(c, Loop):
        return [f"{pad}loop {c.stack} {{"] + _block(c.body, depth + 1) + [pad + "}"]
    raise TypeError(f"not a command: {c!r}")


def format_command(cmd, depth: int = 0) -> str:
    return "\n".join(_block(cmd, depth))


def format_program(p: Program) -> str:
    lines = [f"alphabet: {' '.join(p.alphabet)}"]
    if p.blank is not None:
        lines.append(f"blank: {p.blank}")
    for op in p.operators.values():
        rows = " ".join(f"{','.join(args)}->{out}" for args, out in op.table.items())
        lines.append(f"op {op.name}/{op.arity}: {rows}")
    lines.append(f"registers: {' '.join(p.registers)}".rstrip())
    lines.append(f"stacks: {' '.join(p.stacks)}".rstrip())
    if p.output is not None:
        lines.append(f"output: {p.output}")
    for f in p.functions.values():
        lines.append(f"function {f.name}({', '.join(f.params)}) {{")
        lines.extend(_block(f.body, 1))
        lines.append(f"}} returns {f.returns}")
    lines.append("main {")
    lines.extend(_block(p.main, 1))
    lines.append("}")
    return "\n".join(lines) + "\n"
