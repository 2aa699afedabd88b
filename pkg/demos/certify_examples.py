"""
Certifying stack programs
=========================

Every accepted program gets a matrix over {0, L, A, M}.  Row i, column j
says how the final size of stack j depends on the initial size of stack i:
not at all, linearly with coefficient one, affinely, or polynomially.
The last row is the constant.
"""

from importlib.resources import files

from isapp import algebra as alg
from isapp.certifier import certify_program
from isapp.lang import parse

programs = files("isapp") / "programs"

# Pushing two letters per element of S1 onto S2: S2 grows by 2*|S1|,
# so the S1 -> S2 entry is A.
mult_const = parse((programs / "mult_const.sm").read_text())
cert = certify_program(mult_const)
print(alg.render(cert.matrix, cert.stacks))
print()

# Multiplication nests a loop inside a call.  The accumulator S3 ends up
# polynomial (M) in both inputs.
mult = parse((programs / "multiplication.sm").read_text())
cert = certify_program(mult)
print(alg.render(cert.functions["multiplication"].matrix, cert.stacks))
print()

# The two combiners differ only in how they merge parallel paths.
# Under union, addition is exactly the L,L column; under plus one entry
# becomes A because two L paths meet.
add = parse((programs / "addition.sm").read_text())
for combiner in alg.COMBINERS:
    m = certify_program(add, combiner).functions["addition"].matrix
    print(combiner)
    print(alg.render(m, ("S1", "S2", "S3")))
