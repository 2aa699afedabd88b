"""
Encoding a probabilistic Turing machine
=======================================

A machine with two transition functions is turned into a stack program.
The tape becomes three stacks (left part, head cell, right part), the
machine state a register, and a clock polynomial in the input length
bounds the number of steps.  The encoded program certifies, and its
acceptance distribution matches a direct simulation of the machine.
"""

from importlib.resources import files

from isapp import algebra as alg
from isapp.certifier import certify_program
from isapp.lang import format_program
from isapp.ptm import differential_test, encode, parse_ptm

for name in ("coin_acceptor", "copier", "random_walk"):
    machine = parse_ptm((files("isapp") / "programs" / f"{name}.ptm").read_text())
    program = encode(machine)
    report = differential_test(machine)
    print(f"{name}: {report.steps} steps, direct {dict(report.direct)}, encoded {dict(report.encoded)}")

# The random walk's encoding in full, and its certificate.
machine = parse_ptm((files("isapp") / "programs" / "random_walk.ptm").read_text())
program = encode(machine)
print(format_program(program))
cert = certify_program(program)
print(alg.render(cert.matrix, cert.stacks))
