import itertools
import random

import numpy as np
import pytest

from isapp import algebra as alg
from isapp.certifier import certify_command, certify_program
from isapp.interp import Interpreter, MachineState, initial_state, run
from isapp.lang import check_wellformed, format_program, parse
from isapp.multipoly import parse_polynomial
from isapp.ptm import (
    PTMDescription, PTMError, direct_distribution, differential_test, emit_delta, emit_move_left,
    emit_move_right, encode, format_ptm, initial_configuration, parse_ptm, simulate_direct,
    state_letter, step, step_program, symbol_letter, tape_window,
)

from oracles import PROGRAMS

MACHINES = ("coin_acceptor", "copier", "random_walk")
TAPE = ("tape_l", "tape_h", "tape_r", "M_state")


def machine(name):
    return parse_ptm((PROGRAMS / f"{name}.ptm").read_text())


def random_machine(rng: random.Random, n_states=2, symbols=("0", "1", "_"), clock="X1 + 1"):
    states = tuple(f"q{i}" for i in range(n_states))
    delta = lambda: {(q, s): (rng.choice(states), rng.choice(symbols), rng.choice("LSR"))
                     for q in states for s in symbols}
    return PTMDescription(states, symbols, "_", states[0], frozenset(states[:1]), delta(), delta(),
                          parse_polynomial(clock, 1))


def tape_state(l=(), h=(), r=(), register=None):
    regs = {"state": register} if register else {}
    return MachineState({"tape_l": tuple(l), "tape_h": tuple(h), "tape_r": tuple(r)}, regs)


def tape_program(m=None):
    return step_program(m or machine("random_walk"))


def test_description_round_trip():
    for name in MACHINES:
        m = machine(name)
        again = parse_ptm(format_ptm(m))
        assert (again.states, again.symbols, again.blank, again.initial) == (m.states, m.symbols, m.blank, m.initial)
        assert again.accepting == m.accepting
        assert dict(again.delta0) == dict(m.delta0) and dict(again.delta1) == dict(m.delta1)
        assert again.clock == m.clock and again.input == m.input


def test_description_errors():
    text = (PROGRAMS / "coin_acceptor.ptm").read_text()
    with pytest.raises(PTMError, match="not defined"):
        parse_ptm(text.replace("    q0 0 -> qa 0 S\n", "", 1))
    with pytest.raises(PTMError, match="missing"):
        parse_ptm("states: a\n")
    with pytest.raises(PTMError):
        parse_ptm(text.replace("blank: _", "blank: x"))


def test_move_right_trace():
    p = tape_program()
    s = tape_state(l=(), h=("a",), r=("b", "c"))
    final, _ = Interpreter(p).run(emit_move_right(), s)
    assert final.stacks["tape_l"] == ("a",)
    assert final.stacks["tape_h"] == ("b",)
    assert final.stacks["tape_r"] == ("c",)


def test_move_right_then_left_restores():
    p = tape_program()
    interp = Interpreter(p)
    s = tape_state(l=("x", "y"), h=("a",), r=("b", "c"))
    mid, _ = interp.run(emit_move_right(), s)
    back, _ = interp.run(emit_move_left(), mid)
    assert back == s


def test_moves_read_blank_past_the_end():
    m = machine("random_walk")
    p = step_program(m)
    final, _ = Interpreter(p).run(emit_move_right(), tape_state(h=("s_1",)))
    assert final.stacks["tape_h"] == (symbol_letter(m.blank),)


def test_blank_stay_machine_certificate():
    delta = {("q", s): ("q", "_", "S") for s in ("_", "1")}
    m = PTMDescription(("q",), ("_", "1"), "_", "q", frozenset(), delta, delta, parse_polynomial("1", 1))
    got = certify_command(emit_delta(m), TAPE, {})
    const_update = alg.substitute_column(alg.zeros(5), 1, alg.unit_vector(5, 4))
    assert alg.mat_le(got, alg.mat_union(alg.identity(5), const_update))


def test_dispatch_covers_every_triple():
    rng = random.Random(5)
    m = random_machine(rng)
    p = step_program(m)
    interp = Interpreter(p)
    for q, s, coin in itertools.product(m.states, m.symbols, (0, 1)):
        start = tape_state(l=(symbol_letter("1"),), h=(symbol_letter(s),), r=(symbol_letter("0"),),
                           register=state_letter(q))
        final, prob = interp.run(p.main, start, [coin])
        conf = initial_configuration(m, ("1", s, "0"))
        conf = type(conf)(q, 1, conf.tape)
        expected = step(m, conf, coin)
        assert final.registers["state"] == state_letter(expected.state)
        assert tape_window(final, symbol_letter(m.blank)) == _window(m, expected)
        assert prob == pytest.approx(0.5)


def _window(m, conf):
    cells = [symbol_letter(x) for x in conf.window(m.blank)]
    blank = symbol_letter(m.blank)
    while cells and cells[0] == blank:
        cells.pop(0)
    while cells and cells[-1] == blank:
        cells.pop()
    return tuple(cells)


def test_tape_invariant_lockstep():
    rng = random.Random(8)
    for trial in range(10):
        m = random_machine(rng, n_states=3)
        word = tuple(rng.choice("01") for _ in range(3))
        enc = encode(m, word)
        interp = Interpreter(enc)
        # Set up the tape exactly as the encoded main does, then step both sides.
        s = MachineState({st: () for st in enc.stacks}, {"state": state_letter(m.initial)})
        s = s.with_stack("tape_h", (symbol_letter(word[0]),)).with_stack(
            "tape_r", tuple(symbol_letter(x) for x in word[1:]))
        conf = initial_configuration(m, word)
        delta = emit_delta(m)
        coins = np.random.default_rng(trial).integers(0, 2, 12)
        for coin in coins:
            s, _ = interp.run(delta, s, [int(coin)])
            conf = step(m, conf, int(coin))
            assert s.registers["state"] == state_letter(conf.state)
            assert tape_window(s, symbol_letter(m.blank)) == _window(m, conf)


def test_clock_sizes():
    m = machine("coin_acceptor")
    for clock, expected in (("X1", 3), ("X1*X1", 9), ("2*X1^2 + X1 + 3", 24)):
        mc = PTMDescription(m.states, m.symbols, m.blank, m.initial, m.accepting, m.delta0, m.delta1,
                            parse_polynomial(clock, 1))
        p = encode(mc, ("0", "1", "1"))
        final, _ = run(p, initial_state(p), rng=0)
        assert final.size("clk") == expected


def test_encoded_programs_certify_and_parse():
    rng = random.Random(9)
    machines = [machine(n) for n in MACHINES] + [random_machine(rng, 3) for _ in range(10)]
    for m in machines:
        p = encode(m)
        assert check_wellformed(p) == []
        certify_program(p)
        certify_program(p, "union")
        assert parse(format_program(p)) == p


@pytest.mark.parametrize("name", MACHINES)
def test_differential_bundled(name):
    report = differential_test(machine(name), flip_budget=12)
    assert report.steps <= 12
    assert report.equal, (report.direct, report.encoded)


def test_differential_expected_values():
    from fractions import Fraction
    assert differential_test(machine("coin_acceptor")).direct == {True: Fraction(1, 2), False: Fraction(1, 2)}
    assert differential_test(machine("copier")).direct == {True: 1}
    assert differential_test(machine("copier"), ("0", "1")).encoded == {False: 1}
    walk = differential_test(machine("random_walk"))
    assert sum(walk.direct.values()) == 1 and len(walk.direct) == 2


def test_differential_random_machines():
    rng = random.Random(10)
    for _ in range(15):
        m = random_machine(rng, n_states=rng.randint(2, 3))
        word = tuple(rng.choice("01") for _ in range(rng.randint(0, 4)))
        assert differential_test(m, word, flip_budget=12).equal


def test_direct_budget():
    from isapp.interp import EnumerationLimitExceeded
    m = machine("copier")
    with pytest.raises(EnumerationLimitExceeded):
        direct_distribution(m, ("1",) * 20, flip_budget=12)


def test_simulate_direct_matches_encoded_run():
    m = machine("random_walk")
    p = encode(m)
    for seed in range(20):
        conf = simulate_direct(m, m.input, rng=seed)
        final, _ = run(p, initial_state(p), rng=seed)
        assert final.registers["state"] == state_letter(conf.state)
        assert (final.size("out") == 0) == (conf.state in m.accepting)
