"""Command-line frontend: ``isapp check|bound|run|dist|decide|encode <file>``.

Exit codes:
    0  success (for ``decide``, whatever the verdict)
    1  parse, well-formedness or runtime program error
    2  certification rejected a loop
    3  the input file could not be read or the output written
    4  exact enumeration exceeded the flip budget
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from collections import Counter
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import algebra as alg
from .certifier import Certificate, ExponentialLoop, certify_program
from .interp import (
    EnumerationLimitExceeded, InterpError, Interpreter, decide_majority, initial_state, sample,
)
from .lang import LangError, format_program, parse
from .multipoly import Polynomial
from .ptm import PTMError, encode, parse_ptm

EXIT_OK, EXIT_STATIC, EXIT_REJECTED, EXIT_IO, EXIT_ENUMERATION = 0, 1, 2, 3, 4

DEPENDENCY = {alg.ZERO: "none", alg.L: "linear", alg.A: "affine", alg.M: "polynomial"}


class _Fail(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="isapp", description="Polynomial size certificates for stack programs.")
    p.add_argument("command", choices=("check", "bound", "run", "dist", "decide", "encode"))
    p.add_argument("file")
    p.add_argument("--combiner", choices=("plus", "union"), default="plus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--flip-budget", type=int, default=24)
    p.add_argument("--output-stack")
    p.add_argument("--blank")
    p.add_argument("--format", choices=("human", "structured"), default="human")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--size", type=int, default=0, help="initial size of every stack")
    p.add_argument("--fill", default="true", help="letter filling the initial stacks")
    p.add_argument("--input", action="append", default=[], metavar="S=a,b,c",
                   help="initial content of one stack, top first (repeatable)")
    p.add_argument("--word", help="PTM input for encode, comma separated (default: the file's input)")
    p.add_argument("--out", help="write encode's program here instead of stdout")
    return p


# -- helpers ------------------------------------------------------------------

def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise _Fail(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None


def _load(path: str):
    try:
        return parse(_read(path))
    except LangError as exc:
        raise _Fail(EXIT_STATIC, str(exc)) from None


def _frac(x) -> str:
    return str(Fraction(x))


def _matrix_lines(cert: Certificate) -> list[str]:
    names = cert.stacks + ("const",)
    lines = [f"dimension {cert.dim}", f"combiner {cert.combiner}", "stacks " + " ".join(names)]
    for name, row in zip(names, cert.matrix):
        lines.append(f"row {name} " + " ".join(str(alg.Value(v)) for v in row))
    return lines


def _trace_lines(cert: Certificate, structured: bool) -> list[str]:
    lines = []
    for t in cert.trace:
        where = f"{t.pos[0]}:{t.pos[1]}" if t.pos else "?"
        scope = t.function or "main"
        if structured:
            lines.append(f"loop {scope} {t.loop_stack} {where}")
            for label, m in (("body", t.body), ("closure", t.closure), ("result", t.result)):
                for row in m:
                    lines.append(f"{label} " + " ".join(str(alg.Value(v)) for v in row))
        else:
            stacks = cert.functions[t.function].stacks if t.function else cert.stacks
            names = stacks + ("const",)
            lines.append(f"loop over {t.loop_stack} at {where} in {scope}")
            for label, m in (("body", t.body), ("closure", t.closure), ("result", t.result)):
                lines.append(f"  {label}:")
                lines.extend("    " + ln for ln in alg.render(m, names).splitlines())
    return lines


def _certify(program, args) -> Certificate:
    try:
        return certify_program(program, args.combiner, trace=args.trace)
    except ExponentialLoop as exc:
        if args.format == "structured":
            where = f"{exc.pos[0]}:{exc.pos[1]}" if exc.pos else "?"
            lines = [f"rejected loop {exc.function or 'main'} {exc.loop_stack} {where}",
                     f"entry {exc.index + 1} {exc.index + 1} {exc.stack} {exc.value}"]
            lines += ["closure " + " ".join(str(alg.Value(v)) for v in row) for row in exc.closure]
            raise _Fail(EXIT_REJECTED, "\n".join(lines)) from None
        raise _Fail(EXIT_REJECTED, "rejected: " + exc.render()) from None


def bound_text(column: np.ndarray, stacks: Sequence[str], j: int) -> str:
    """Representative bound for the stack of column ``j``."""
    d = len(stacks)
    unit = alg.unit_vector(d + 1, j)
    if np.array_equal(column, unit):
        return f"{stacks[j]} unchanged"
    inputs = [i for i in range(d) if column[i]]
    if column.max() == alg.M:
        return f"{stacks[j]} ≤ poly({', '.join(f'|{stacks[i]}|' for i in inputs)})"
    # Linear part through the polynomial printer; affine inputs get a symbolic factor.
    names = [f"|{s}|" if column[i] == alg.L else f"k*|{s}|" for i, s in enumerate(stacks)]
    linear = Polynomial({tuple(int(i == k) for i in range(d)): 1 for k in inputs}, d)
    rhs = "c" if linear.is_zero() else f"{linear.render(names)} + c"
    return f"{stacks[j]} ≤ {rhs}"


def _initial(program, args):
    inputs = {}
    for spec in args.input:
        name, sep, content = spec.partition("=")
        if not sep:
            raise _Fail(EXIT_STATIC, f"--input expects S=a,b,c, got {spec!r}")
        inputs[name] = tuple(x for x in content.split(",") if x)
    try:
        return initial_state(program, args.size, args.fill, inputs)
    except KeyError as exc:
        raise _Fail(EXIT_STATIC, str(exc)) from None


def _state_lines(state, program, structured: bool) -> list[str]:
    lines = []
    for s in program.stacks:
        content = state.stacks[s]
        if structured:
            lines.append(f"stack {s} {len(content)} " + " ".join(content))
        else:
            lines.append(f"{s} = <{', '.join(content)}>  (size {len(content)})")
    for r in program.registers:
        lines.append(f"register {r} {state.registers[r]}" if structured else f"{r} = {state.registers[r]}")
    return [ln.rstrip() for ln in lines]


def _size_key(program, output: Optional[str]):
    if output:
        return lambda s: str(s.size(output))
    return lambda s: " ".join(str(n) for n in s.sizes(program.stacks))


def _numeric(item) -> tuple:
    return tuple(int(n) for n in item[0].split())


# -- subcommands ----------------------------------------------------------------

def cmd_check(args) -> list[str]:
    program = _load(args.file)
    cert = _certify(program, args)
    if args.format == "structured":
        return _matrix_lines(cert) + _trace_lines(cert, True)
    lines = [f"accepted ({args.combiner})", alg.render(cert.matrix, cert.stacks)]
    return lines + _trace_lines(cert, False)


def cmd_bound(args) -> list[str]:
    program = _load(args.file)
    cert = _certify(program, args)
    names = cert.stacks + ("const",)
    lines = []
    for j, s in enumerate(cert.stacks):
        col = cert.matrix[:, j]
        classes = [DEPENDENCY[alg.Value(v)] for v in col]
        if args.format == "structured":
            lines.append(f"bound {s} " + " ".join(classes))
        else:
            lines.append(bound_text(col, cert.stacks, j))
            lines.append("    " + ", ".join(f"{n}: {c}" for n, c in zip(names, classes)))
    return lines


def _interpreter(program, args) -> Interpreter:
    return Interpreter(program, blank=args.blank, flip_budget=args.flip_budget)


def cmd_run(args) -> list[str]:
    program = _load(args.file)
    state = _initial(program, args)
    structured = args.format == "structured"
    if args.runs == 1:
        final, prob = _interpreter(program, args).run(
            program.main, state, np.random.default_rng(np.random.SeedSequence(args.seed).spawn(1)[0]))
        return _state_lines(final, program, structured) + [
            f"probability {_frac(prob)}" if structured else f"path probability {_frac(prob)}"]
    if args.blank is not None:
        program = dataclasses.replace(program, blank=args.blank)
    counts = sample(program, state, args.runs, args.seed)
    key = _size_key(program, args.output_stack)
    merged: Counter = Counter()
    for s, c in counts.items():
        merged[key(s)] += c
    return [f"{k} {c}" for k, c in sorted(merged.items(), key=_numeric)]


def cmd_dist(args) -> list[str]:
    program = _load(args.file)
    dist = _interpreter(program, args).distribution(program.main, _initial(program, args))
    masses = dist.marginal(_size_key(program, args.output_stack or program.output))
    return [f"{k} {_frac(p)}" for k, p in sorted(masses.items(), key=_numeric)]


def cmd_decide(args) -> list[str]:
    program = _load(args.file)
    if args.blank is not None:
        program = dataclasses.replace(program, blank=args.blank)
    output = args.output_stack or program.output
    if output is None:
        raise _Fail(EXIT_STATIC, "no output stack: declare 'output:' or pass --output-stack")
    res = decide_majority(program, args.size, output, args.fill, args.flip_budget)
    return [f"{'accept' if res.accept else 'reject'} {_frac(res.empty)} {_frac(res.nonempty)}"]


def cmd_encode(args) -> list[str]:
    try:
        m = parse_ptm(_read(args.file))
        word = None if args.word is None else tuple(x for x in args.word.split(",") if x)
        program = encode(m, word)
    except PTMError as exc:
        raise _Fail(EXIT_STATIC, str(exc)) from None
    text = format_program(program)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise _Fail(EXIT_IO, f"cannot write {args.out}: {exc.strerror or exc}") from None
        return []
    return text.rstrip("\n").splitlines()


COMMANDS = {
    "check": cmd_check, "bound": cmd_bound, "run": cmd_run,
    "dist": cmd_dist, "decide": cmd_decide, "encode": cmd_encode,
}


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        lines = COMMANDS[args.command](args)
    except _Fail as exc:
        stream = stdout if exc.code == EXIT_REJECTED else stderr
        print(str(exc), file=stream)
        return exc.code
    except EnumerationLimitExceeded as exc:
        print(f"enumeration limit: {exc}", file=stderr)
        return EXIT_ENUMERATION
    except InterpError as exc:
        print(f"runtime error: {exc}", file=stderr)
        return EXIT_STATIC
    for line in lines:
        print(line, file=stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
