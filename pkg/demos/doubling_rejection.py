"""
An exponential loop
===================

``loop S3 { S1 := addition(S1, S1) }`` doubles S1 once per element of S3,
so |S1| ends at 2**|S3| * |S1|.  The certifier notices that the closure
of the loop body has a diagonal entry of at least A and refuses it.
"""

from importlib.resources import files

from isapp.certifier import ExponentialLoop, certify_program
from isapp.lang import parse

source = (files("isapp") / "programs" / "doubling.sm").read_text()
print(source)

try:
    certify_program(parse(source))
except ExponentialLoop as exc:
    print(exc.render())

# Actually running it shows the blow-up the certificate would have hidden.
from isapp.interp import initial_state, run

program = parse(source)
for n in range(6):
    final, _ = run(program, initial_state(program, inputs={"S1": ("true",), "S3": ("true",) * n}))
    print(n, final.size("S1"))
