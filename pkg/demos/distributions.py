"""
Exact distributions and sampling
================================

``rand`` flips a fair coin.  ``distribution`` enumerates every outcome
with its exact probability, ``sample`` runs the program many times with
independent seeds.  The two should agree.
"""

from importlib.resources import files

from isapp.interp import decide_majority, distribution, initial_state, sample
from isapp.lang import parse

program = parse((files("isapp") / "programs" / "binomial.sm").read_text())
state = initial_state(program, 4)

exact = distribution(program, state).marginal(lambda s: s.size("S2"))
counts = sample(program, state, runs=4000, seed=1)
observed = {}
for s, c in counts.items():
    observed[s.size("S2")] = observed.get(s.size("S2"), 0) + c

for k in sorted(exact):
    print(k, exact[k], observed.get(k, 0) / 4000)

# Majority acceptance: accept when the output stack is empty with
# probability at least one half.
coin = parse((files("isapp") / "programs" / "coin_push.sm").read_text())
print(decide_majority(coin, 0))
