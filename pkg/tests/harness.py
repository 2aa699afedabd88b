"""Empirical soundness checks of certificates against measured stack sizes.

For every input size vector (entries up to ``max_size``) and every seed, the
program runs once.  For each output column ``j`` the measured size must stay
under a bound that mentions only the inputs whose certificate entry is
nonzero, so a ZERO entry is checked as "this input does not enter the bound":

* columns with only ZERO/L stack entries: ``sum of L inputs + c``;
* other columns without M: ``(c + 1)**(D + 1) * (sum of nonzero inputs + 1)``;
* columns with M: the same with the parenthesis raised to ``2**D``.

``c`` counts pushed and literal letters in the program text, and ``D``
counts loops, both with function bodies inlined at every call site.  A/M
columns also get the doubling sanity check: doubling one nonzero input
multiplies the largest observed output by at most ``2**D`` (plus ``c``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from isapp import algebra as alg
from isapp.certifier import certify_program
from isapp.interp import Interpreter, initial_state
from isapp.lang import CallAssign, Loop, Push, Rand, StackLit, subcommands

SEEDS = tuple(range(64))


def _inline_counts(program, cmd, memo) -> tuple:
    letters = loops = 0
    for c in subcommands(cmd):
        if isinstance(c, Push):
            letters += 1
        elif isinstance(c, StackLit):
            letters += len(c.letters)
        elif isinstance(c, Loop):
            loops += 1
        elif isinstance(c, CallAssign):
            if c.func not in memo:
                memo[c.func] = _inline_counts(program, program.functions[c.func].body, memo)
            fl, fd = memo[c.func]
            letters += fl
            loops += fd
    return letters, loops


def program_constants(program) -> tuple:
    """``(c, D)``: letters written and loops, with calls inlined."""
    return _inline_counts(program, program.main, {})


def uses_rand(program) -> bool:
    bodies = [program.main] + [f.body for f in program.functions.values()]
    return any(getattr(c, "cond", None) == Rand() for b in bodies for c in subcommands(b))


@dataclass
class Report:
    name: str
    runs: int = 0
    violations: list = field(default_factory=list)


def column_bound(column, x, c: int, depth: int) -> int:
    d = len(column) - 1
    stack_entries = column[:d]
    if stack_entries.max(initial=0) <= alg.L:
        return sum(x[i] for i in range(d) if column[i] == alg.L) + c
    total = sum(x[i] for i in range(d) if column[i]) + 1
    degree = 1 if stack_entries.max() < alg.M else 2 ** depth
    return (c + 1) ** (depth + 1) * total ** degree


def check_program(program, name: str = "", max_size: int = 8, seeds=SEEDS,
                  extra=None, matrix=None) -> Report:
    """Run the harness; ``extra(x, sizes)`` may return a violation string.

    ``matrix`` replaces the computed certificate (used to test the harness).
    """
    cert = certify_program(program).matrix if matrix is None else matrix
    c, depth = program_constants(program)
    stacks = program.stacks
    k = len(stacks)
    seeds = tuple(seeds) if uses_rand(program) else (seeds[0],)
    interp = Interpreter(program)
    report = Report(name)
    largest: dict = {}
    for x in itertools.product(range(max_size + 1), repeat=k):
        state = initial_state(program, inputs={s: ("true",) * n for s, n in zip(stacks, x)})
        for seed in seeds:
            final, _ = interp.run(program.main, state, np.random.default_rng(seed))
            sizes = final.sizes(stacks)
            report.runs += 1
            for j in range(k):
                bound = column_bound(cert[:, j], x, c, depth)
                if sizes[j] > bound:
                    report.violations.append(f"{name}: x={x} seed={seed} |{stacks[j]}|={sizes[j]} > {bound}")
            if extra is not None:
                msg = extra(x, sizes)
                if msg:
                    report.violations.append(f"{name}: x={x} seed={seed} {msg}")
            largest[x] = tuple(max(a, b) for a, b in zip(largest.get(x, sizes), sizes))
    for j in range(k):
        column = cert[:, j]
        if column[:k].max(initial=0) <= alg.L:
            continue
        for x, sizes in largest.items():
            for i in range(k):
                if column[i] and 1 <= x[i] and 2 * x[i] <= max_size:
                    y = list(x)
                    y[i] *= 2
                    doubled = largest[tuple(y)][j]
                    if doubled > 2 ** depth * sizes[j] + c:
                        report.violations.append(
                            f"{name}: doubling {stacks[i]} at x={x} grows |{stacks[j]}| "
                            f"{sizes[j]} -> {doubled}")
    return report
