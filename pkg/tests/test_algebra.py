import itertools

import numpy as np
import pytest

from isapp import algebra as alg
from isapp.algebra import A, L, M, ZERO

import oracles
from oracles import brute_mat_mul, brute_union_of_powers, matrix, random_matrix

VALUES = (ZERO, L, A, M)
PAIRS = list(itertools.product(VALUES, repeat=2))
TRIPLES = list(itertools.product(VALUES, repeat=3))


def test_value_order_and_symbols():
    assert list(alg.Value) == [ZERO, L, A, M]
    assert ZERO < L < A < M
    assert [str(v) for v in VALUES] == ["0", "L", "A", "M"]


@pytest.mark.parametrize("name,fn,rows", [
    ("mul", alg.val_mul, oracles.REFERENCE_MUL),
    ("add", alg.val_add, oracles.REFERENCE_ADD),
    ("union", alg.val_union, oracles.REFERENCE_UNION),
])
def test_tables_match_reference(name, fn, rows):
    expected = oracles.table(rows)
    for a, b in PAIRS:
        assert fn(a, b) == expected[a][b], (name, a, b)


@pytest.mark.parametrize("fn,rule", [
    (alg.val_mul, oracles.rule_mul),
    (alg.val_add, oracles.rule_add),
    (alg.val_union, oracles.rule_union),
])
def test_tables_match_rule_oracle(fn, rule):
    for a, b in PAIRS:
        assert fn(a, b) == rule(a, b)


def test_scalar_examples():
    assert alg.val_add(L, L) == A
    assert alg.val_add(ZERO, M) == M
    assert alg.val_add(ZERO, ZERO) == ZERO
    assert alg.val_mul(A, M) == M
    assert alg.val_mul(L, A) == A
    assert alg.val_mul(ZERO, M) == ZERO
    assert alg.val_union(L, L) == L
    assert alg.val_union(A, M) == M
    assert alg.val_union(ZERO, ZERO) == ZERO


@pytest.mark.parametrize("op", [alg.val_add, alg.val_mul, alg.val_union])
def test_commutative_associative(op):
    for a, b in PAIRS:
        assert op(a, b) == op(b, a)
    for a, b, c in TRIPLES:
        assert op(op(a, b), c) == op(a, op(b, c))


def test_identities_absorption_idempotence():
    for a in VALUES:
        assert alg.val_add(ZERO, a) == a
        assert alg.val_union(ZERO, a) == a
        assert alg.val_mul(L, a) == a
        assert alg.val_mul(ZERO, a) == ZERO
        assert alg.val_union(a, a) == a
    # Addition is not idempotent: L + L = A.
    assert any(alg.val_add(a, a) != a for a in VALUES)


def test_distributivity():
    for a, b, c in TRIPLES:
        assert alg.val_mul(a, alg.val_add(b, c)) == alg.val_add(alg.val_mul(a, b), alg.val_mul(a, c))
        assert alg.val_mul(a, alg.val_union(b, c)) == alg.val_union(alg.val_mul(a, b), alg.val_mul(a, c))


@pytest.mark.parametrize("op", [alg.val_add, alg.val_mul, alg.val_union])
def test_monotone(op):
    for a, b, c in TRIPLES:
        if a <= b:
            assert op(a, c) <= op(b, c)
            assert op(c, a) <= op(c, b)


def test_identity_and_unit_vector():
    i4 = alg.identity(4)
    assert (np.diag(i4) == L).all() and i4.sum() == 4 * L
    v = alg.unit_vector(4, 2, A)
    assert list(v) == [0, 0, A, 0]
    assert not i4.flags.writeable


def test_mat_mul_examples():
    d = 4
    b = alg.substitute_column(alg.identity(d), 0, alg.as_vector("L00L"))
    assert (alg.mat_mul(alg.identity(d), b) == b).all()
    assert alg.mat_mul(b, b, "plus")[3, 0] == A
    assert alg.mat_mul(b, b, "union")[3, 0] == L
    assert (brute_mat_mul(b, b, "plus") == alg.mat_mul(b, b, "plus")).all()


@pytest.mark.parametrize("combiner", ["plus", "union"])
def test_mat_mul_matches_brute_force(combiner):
    rng = np.random.default_rng(11)
    for _ in range(300):
        d = int(rng.integers(1, 7))
        a, b = random_matrix(rng, d), random_matrix(rng, d)
        assert (alg.mat_mul(a, b, combiner) == brute_mat_mul(a, b, combiner)).all()


def test_mat_mul_rejects_mismatch():
    with pytest.raises(ValueError):
        alg.mat_mul(alg.identity(3), alg.identity(4))
    with pytest.raises(ValueError):
        alg.mat_mul(alg.identity(3), alg.identity(3), "times")


def test_mat_add_union_examples():
    i3 = alg.identity(3)
    assert (alg.mat_union(i3, alg.zeros(3)) == i3).all()
    assert (alg.mat_add(i3, i3) == np.diag([A] * 3)).all()
    with pytest.raises(ValueError):
        alg.mat_union(i3, alg.zeros(4))


def test_union_below_sum_random():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        d = int(rng.integers(1, 7))
        a, b = random_matrix(rng, d), random_matrix(rng, d)
        assert alg.mat_le(alg.mat_union(a, b), alg.mat_add(a, b))


def test_substitute_column():
    z = alg.substitute_column(alg.identity(3), 0, alg.zeros(3)[0])
    assert (z[:, 0] == 0).all() and (z[:, 1:] == alg.identity(3)[:, 1:]).all()
    single = alg.substitute_column(alg.zeros(3), 1, alg.unit_vector(3, 1))
    assert single[1, 1] == L and single.sum() == L
    rng = np.random.default_rng(1)
    a = random_matrix(rng, 5)
    assert (alg.substitute_column(a, 3, a[:, 3]) == a).all()
    with pytest.raises(IndexError):
        alg.substitute_column(a, 5, a[:, 0])
    with pytest.raises(ValueError):
        alg.substitute_column(a, 0, a[:3, 0])


def test_closure_examples():
    assert (alg.union_closure(alg.identity(4)) == alg.identity(4)).all()
    graph = matrix(["L000", "LLL0", "L000", "0MLL"])
    sq = alg.mat_mul(graph, graph)
    assert sq[3, 0] == M and sq[3, 1] == M and sq[3, 2] == M
    closure = alg.union_closure(graph)
    assert closure[3, 0] == M and closure[3, 1] == M and closure[3, 2] == M
    b = alg.substitute_column(alg.identity(4), 0, alg.as_vector("L00L"))
    expected = np.array(alg.identity(4))
    expected[3, 0] = A
    assert (alg.union_closure(b, "plus") == expected).all()
    assert (brute_union_of_powers(b, 16, "plus") == expected).all()


@pytest.mark.parametrize("combiner", ["plus", "union"])
def test_closure_matches_naive_union(combiner):
    rng = np.random.default_rng(13)
    for _ in range(200):
        d = int(rng.integers(1, 6))
        a = random_matrix(rng, d)
        assert (alg.union_closure(a, combiner) == brute_union_of_powers(a, d * d, combiner)).all()


@pytest.mark.parametrize("combiner", ["plus", "union"])
def test_closure_monotone(combiner):
    rng = np.random.default_rng(14)
    for _ in range(200):
        d = int(rng.integers(1, 9))
        a = random_matrix(rng, d)
        b = np.maximum(a, random_matrix(rng, d, 0.2))
        assert alg.mat_le(alg.union_closure(a, combiner), alg.union_closure(b, combiner))


def test_closure_idempotent_under_union():
    rng = np.random.default_rng(14)
    for _ in range(200):
        d = int(rng.integers(1, 9))
        ca = alg.union_closure(random_matrix(rng, d), "union")
        assert (alg.union_closure(ca, "union") == ca).all()


def test_closure_under_plus_only_grows():
    # Reapplying the closure can sum two paths into one entry (L + L = A), so
    # under plus it is inflationary but not idempotent.
    rng = np.random.default_rng(14)
    strict = 0
    for _ in range(200):
        d = int(rng.integers(1, 9))
        ca = alg.union_closure(random_matrix(rng, d), "plus")
        again = alg.union_closure(ca, "plus")
        assert alg.mat_le(ca, again)
        strict += not (again == ca).all()
    assert strict > 0


def test_closure_stabilizes():
    rng = np.random.default_rng(15)
    for _ in range(200):
        d = int(rng.integers(1, 7))
        a = random_matrix(rng, d)
        assert (alg.union_of_powers(a, d * d) == alg.union_of_powers(a, 4 * d * d)).all()


def test_merge_down_examples():
    for k in range(3):
        assert (alg.merge_down(alg.identity(4), k) == alg.identity(4)).all()
    a = alg.substitute_column(alg.identity(4), 2, alg.as_vector("A0L0"))
    assert list(alg.merge_down(a, 1)[:, 2]) == [M, M, L, 0]
    b = alg.substitute_column(alg.identity(3), 0, alg.as_vector("L0A"))
    assert list(alg.merge_down(b, 1)[:, 0]) == [L, A, 0]


def test_merge_down_constants():
    rng = np.random.default_rng(16)
    for _ in range(300):
        d = int(rng.integers(2, 7))
        a = random_matrix(rng, d)
        k = int(rng.integers(0, d - 1))
        out = alg.merge_down(a, k)
        assert (out[:, -1] == a[:, -1]).all()
        assert (out[-1, :-1] == 0).all()
    with pytest.raises(IndexError):
        alg.merge_down(alg.identity(3), 2)


def test_reorder_examples():
    v = alg.as_vector("LL00")
    assert list(alg.reorder(v, {0: 0, 1: 2}, 4)) == [L, 0, L, 0]
    assert list(alg.reorder(v, {0: 0, 1: 0}, 4)) == [A, 0, 0, 0]
    assert list(alg.reorder(alg.as_vector("000L"), {0: 2, 1: 0}, 4)) == [0, 0, 0, L]
    with pytest.raises(IndexError):
        alg.reorder(v, {0: 3}, 4)


def test_reorder_injective_is_permutation():
    rng = np.random.default_rng(17)
    for _ in range(200):
        d = int(rng.integers(2, 7))
        v = random_matrix(rng, d)[:, 0]
        perm = rng.permutation(d - 1)
        out = alg.reorder(v, {i: int(p) for i, p in enumerate(perm)}, d)
        assert out[-1] == v[-1]
        assert all(out[int(p)] == v[i] for i, p in enumerate(perm))


def test_render_round_trip():
    rng = np.random.default_rng(18)
    a = random_matrix(rng, 4)
    assert (alg.parse_matrix(alg.render(a)) == a).all()
    text = alg.render(alg.identity(3), ("S1", "S2"))
    assert text.splitlines()[0].split() == ["S1", "S2", "const"]
