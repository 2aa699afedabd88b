"""Finite semiring of dependency values and the certificate matrix calculus.

Scalars are the four values ``ZERO < L < A < M``.  Matrices and vectors are
plain numpy ``uint8`` arrays holding the integer codes 0..3; the last index of
every vector/matrix is reserved for constants.  All indices are 0-based.

Rows stand for input stacks, columns for output stacks.
"""

from __future__ import annotations

import enum
from typing import Iterable, Literal, Mapping, Sequence

import numpy as np

__all__ = [
    "Value", "ZERO", "L", "A", "M", "Combiner",
    "val_add", "val_mul", "val_union",
    "zeros", "identity", "unit_vector", "as_matrix", "as_vector",
    "mat_mul", "mat_add", "mat_union", "mat_le", "mat_pow",
    "substitute_column", "union_closure", "union_of_powers",
    "merge_down", "reorder", "render", "parse_matrix",
]


class Value(enum.IntEnum):
    ZERO = 0
    L = 1
    A = 2
    M = 3

    def __str__(self) -> str:
        return SYMBOLS[self]


ZERO, L, A, M = Value.ZERO, Value.L, Value.A, Value.M
SYMBOLS = {ZERO: "0", L: "L", A: "A", M: "M"}
_FROM_SYMBOL = {"0": ZERO, "L": L, "A": A, "M": M}

Combiner = Literal["plus", "union"]
COMBINERS = ("plus", "union")

# Lookup tables indexed by integer codes.
MUL_TABLE = np.array(
    [[0, 0, 0, 0],
     [0, 1, 2, 3],
     [0, 2, 2, 3],
     [0, 3, 3, 3]], dtype=np.uint8)
ADD_TABLE = np.array(
    [[0, 1, 2, 3],
     [1, 2, 2, 3],
     [2, 2, 2, 3],
     [3, 3, 3, 3]], dtype=np.uint8)
UNION_TABLE = np.maximum.outer(np.arange(4), np.arange(4)).astype(np.uint8)


def val_add(a: int, b: int) -> Value:
    return Value(ADD_TABLE[a, b])


def val_mul(a: int, b: int) -> Value:
    return Value(MUL_TABLE[a, b])


def val_union(a: int, b: int) -> Value:
    return Value(max(a, b))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def zeros(d: int) -> np.ndarray:
    return _frozen(np.zeros((d, d), dtype=np.uint8))


def identity(d: int) -> np.ndarray:
    return _frozen(np.eye(d, dtype=np.uint8) * np.uint8(L))


def unit_vector(d: int, i: int, v: int = L) -> np.ndarray:
    """Column vector of length ``d`` with ``v`` at row ``i`` and ZERO elsewhere."""
    vec = np.zeros(d, dtype=np.uint8)
    vec[i] = v
    return _frozen(vec)


def as_matrix(rows: Iterable[Sequence[int | str]]) -> np.ndarray:
    """Build a matrix from rows of codes, Values or symbols ``0 L A M``."""
    data = [[_FROM_SYMBOL[x] if isinstance(x, str) else int(x) for x in row]
            for row in rows]
    arr = np.array(data, dtype=np.uint8)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"certificate matrices are square, got shape {arr.shape}")
    if arr.max(initial=0) > 3:
        raise ValueError("entries must be in 0..3")
    return _frozen(arr)


def as_vector(entries: Iterable[int | str]) -> np.ndarray:
    vec = np.array([_FROM_SYMBOL[x] if isinstance(x, str) else int(x) for x in entries],
                   dtype=np.uint8)
    if vec.ndim != 1 or len(vec) < 2:
        raise ValueError("a certificate vector has at least one stack row plus the constants row")
    return _frozen(vec)


def _check_same(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def _check_combiner(combiner: str) -> None:
    if combiner not in COMBINERS:
        raise ValueError(f"unknown combiner {combiner!r}; expected one of {COMBINERS}")


def _sum_reduce(products: np.ndarray, axis: int) -> np.ndarray:
    # Semiring sum of many values: M absorbs, a single nonzero term passes
    # through, two or more nonzero terms collapse to A.
    top = products.max(axis=axis)
    nonzero = np.count_nonzero(products, axis=axis)
    return np.where(top == M, M, np.where(nonzero >= 2, A, top)).astype(np.uint8)


def mat_mul(a: np.ndarray, b: np.ndarray, combiner: Combiner = "plus") -> np.ndarray:
    """Matrix product ``(a x b)[i, j] = sum_k a[i, k] * b[k, j]``.

    With ``combiner="union"`` the inner sum is replaced by the pointwise max.
    """
    _check_same(a, b)
    _check_combiner(combiner)
    products = MUL_TABLE[a[:, :, None], b[None, :, :]]
    if combiner == "union":
        return _frozen(products.max(axis=1).astype(np.uint8))
    return _frozen(_sum_reduce(products, axis=1))


def mat_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same(a, b)
    return _frozen(ADD_TABLE[a, b])


def mat_union(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    _check_same(a, b)
    return _frozen(np.maximum(a, b))


def mat_le(a: np.ndarray, b: np.ndarray) -> bool:
    """Pointwise order on matrices (or vectors) of the same shape."""
    _check_same(a, b)
    return bool(np.all(a <= b))


def mat_pow(a: np.ndarray, n: int, combiner: Combiner = "plus") -> np.ndarray:
    result = identity(a.shape[0])
    for _ in range(n):
        result = mat_mul(result, a, combiner)
    return result


def substitute_column(a: np.ndarray, i: int, v: np.ndarray) -> np.ndarray:
    """Copy of ``a`` with column ``i`` replaced by ``v``."""
    d = a.shape[0]
    if not 0 <= i < d:
        raise IndexError(f"column {i} out of range for dimension {d}")
    if len(v) != d:
        raise ValueError(f"vector length {len(v)} does not match dimension {d}")
    out = np.array(a, dtype=np.uint8)
    out[:, i] = v
    return _frozen(out)


def union_of_powers(a: np.ndarray, max_power: int, combiner: Combiner = "plus") -> np.ndarray:
    """``A^0 ∪ A^1 ∪ ... ∪ A^max_power``, computed without any shortcut."""
    power = identity(a.shape[0])
    acc = power
    for _ in range(max_power):
        power = mat_mul(power, a, combiner)
        acc = mat_union(acc, power)
    return acc


def union_closure(a: np.ndarray, combiner: Combiner = "plus") -> np.ndarray:
    """Union of all powers of ``a``, including the identity ``A^0``.

    Powers up to ``d**2`` are enough.  The loop stops early once a power
    repeats, since from then on no new matrix can appear.
    """
    d = a.shape[0]
    power = identity(d)
    acc = power
    seen = {power.tobytes()}
    for _ in range(d * d):
        power = mat_mul(power, a, combiner)
        key = power.tobytes()
        if key in seen:
            break
        seen.add(key)
        acc = mat_union(acc, power)
    return acc


def _fold_constant(v: int) -> int:
    # Per-iteration constant growth becomes (at most affine) growth in the
    # loop counter.
    return A if v >= A else v


def merge_down(a: np.ndarray, k: int) -> np.ndarray:
    """Loop correction for a loop driven by stack ``k``.

    Applied column by column; the constants column is left untouched.  For a
    stack column ``j`` with entries ``V``:

    * row ``k`` becomes M when some other stack ``p`` (``p != k``,
      ``p != j``) feeds ``j``; otherwise ``V[k] ∪ g(V[const])`` where ``g``
      caps the constant contribution at A;
    * the constants row becomes ZERO;
    * any other row ``i != j`` becomes M when both ``V[i]`` and ``V[j]``
      are nonzero, and keeps ``V[i]`` otherwise.
    """
    d = a.shape[0]
    c = d - 1
    if not 0 <= k < c:
        raise IndexError(f"loop stack index {k} out of range (constants index is {c})")
    out = np.array(a, dtype=np.uint8)
    for j in range(c):
        v = a[:, j]
        col = v.copy()
        for i in range(c):
            if i != k and i != j and v[i] and v[j]:
                col[i] = M
        others = any(v[p] for p in range(c) if p != k and p != j)
        col[k] = M if others else max(int(v[k]), _fold_constant(int(v[c])))
        col[c] = ZERO
        out[:, j] = col
    return _frozen(out)


def reorder(v: np.ndarray, mapping: Mapping[int, int], target_dim: int) -> np.ndarray:
    """Move the rows of ``v`` into a space of dimension ``target_dim``.

    ``mapping`` sends rows of ``v`` (formal parameters) to rows of the target.
    Rows that clash on the same target row are summed.  The constants row maps
    to the constants row; unmapped rows are dropped.
    """
    out = np.zeros(target_dim, dtype=np.uint8)
    for src, dst in mapping.items():
        if not 0 <= src < len(v) - 1:
            raise IndexError(f"source row {src} out of range")
        if not 0 <= dst < target_dim - 1:
            raise IndexError(f"target row {dst} out of range")
        out[dst] = ADD_TABLE[out[dst], v[src]]
    out[-1] = ADD_TABLE[out[-1], v[-1]]
    return _frozen(out)


def render(a: np.ndarray, names: Sequence[str] | None = None) -> str:
    """Rows of space-separated symbols; with ``names``, a header and row labels."""
    if a.ndim == 1:
        return " ".join(SYMBOLS[Value(x)] for x in a)
    body = [[SYMBOLS[Value(x)] for x in row] for row in a]
    if names is None:
        return "\n".join(" ".join(row) for row in body)
    labels = list(names) + ["const"] if len(names) == a.shape[0] - 1 else list(names)
    width = max(len(n) for n in labels)
    lines = [" " * width + " " + " ".join(n.rjust(width) for n in labels)]
    for label, row in zip(labels, body):
        lines.append(label.ljust(width) + " " + " ".join(x.rjust(width) for x in row))
    return "\n".join(lines)


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of :func:`render` without names."""
    return as_matrix(line.split() for line in text.strip().splitlines())
