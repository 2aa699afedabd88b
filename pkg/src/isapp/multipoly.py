"""Concrete multipolynomials and their abstraction into certificate matrices.

Polynomials have nonnegative integer coefficients and are kept in canonical
form: a mapping from exponent vectors to positive coefficients.  Variables
are 0-based internally and printed as ``X1 .. Xn``.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import algebra as alg
from .algebra import A, L, M

__all__ = [
    "Polynomial", "poly_union", "abstract_poly", "mp_sum", "mp_compose",
    "abstract_mp", "identity_mp", "parse_polynomial", "random_polynomial",
]


class Polynomial:
    """Polynomial in ``nvars`` variables with positive integer coefficients."""

    __slots__ = ("terms", "nvars")

    def __init__(self, terms: Mapping[tuple, int], nvars: int):
        canon = {}
        for exps, coeff in terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"exponent vector {exps} does not have {nvars} entries")
            if coeff < 0 or any(e < 0 for e in exps):
                raise ValueError("coefficients and exponents must be nonnegative")
            if coeff:
                canon[exps] = canon.get(exps, 0) + int(coeff)
        self.terms = canon
        self.nvars = nvars

    @classmethod
    def constant(cls, c: int, nvars: int) -> "Polynomial":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int, coeff: int = 1) -> "Polynomial":
        exps = [0] * nvars
        exps[i] = 1
        return cls({tuple(exps): coeff}, nvars)

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and (self.nvars, self.terms) == (other.nvars, other.terms)

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"Polynomial({self.render()!r}, nvars={self.nvars})"

    def __str__(self) -> str:
        return self.render()

    def _same(self, other: "Polynomial") -> None:
        if self.nvars != other.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._same(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(terms, self.nvars)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._same(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(terms, self.nvars)

    def __pow__(self, n: int) -> "Polynomial":
        result = Polynomial.constant(1, self.nvars)
        for _ in range(n):
            result = result * self
        return result

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, *values: int) -> int:
        if len(values) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(values)}")
        total = 0
        for exps, coeff in self.terms.items():
            term = coeff
            for v, e in zip(values, exps):
                term *= v ** e
            total += term
        return total

    def substitute(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Replace ``X_i`` by ``subs[i]``; the result lives over ``subs``' variables."""
        if len(subs) != self.nvars:
            raise ValueError(f"need {self.nvars} substitutes, got {len(subs)}")
        n = subs[0].nvars if subs else 0
        result = Polynomial({}, n)
        for exps, coeff in self.terms.items():
            term = Polynomial.constant(coeff, n)
            for s, e in zip(subs, exps):
                if e:
                    term = term * s ** e
            result = result + term
        return result

    def render(self, names: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        names = names or [f"X{i + 1}" for i in range(self.nvars)]
        # Highest degree first, then by variable index.
        order = sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))
        parts = []
        for exps in order:
            coeff = self.terms[exps]
            factors = [names[i] + (f"^{e}" if e > 1 else "") for i, e in enumerate(exps) if e]
            if coeff != 1 or not factors:
                factors.insert(0, str(coeff))
            parts.append("*".join(factors))
        return " + ".join(parts)


_TERM_RE = re.compile(r"^(?:(\d+)|X(\d+)(?:\^(\d+))?)$")


def parse_polynomial(text: str, nvars: int | None = None) -> Polynomial:
    """Read ``"3*X4^2*X5 + X1"``-style text.  ``nvars`` defaults to the
    largest variable index used (at least 1)."""
    monomials = []
    for term in text.replace(" ", "").split("+"):
        if not term:
            raise ValueError(f"malformed polynomial {text!r}")
        coeff, exps = 1, {}
        for factor in term.split("*"):
            m = _TERM_RE.match(factor)
            if m is None:
                raise ValueError(f"malformed factor {factor!r} in {text!r}")
            if m.group(1) is not None:
                coeff *= int(m.group(1))
            else:
                i = int(m.group(2))
                if i < 1:
                    raise ValueError("variables are numbered from X1")
                exps[i - 1] = exps.get(i - 1, 0) + int(m.group(3) or 1)
        monomials.append((coeff, exps))
    used = max((i + 1 for _, exps in monomials for i in exps), default=1)
    n = used if nvars is None else nvars
    if used > n:
        raise ValueError(f"polynomial uses X{used} but only {n} variables were given")
    terms: dict = {}
    for coeff, exps in monomials:
        key = tuple(exps.get(i, 0) for i in range(n))
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial(terms, n)


def poly_union(p: Polynomial, q: Polynomial) -> Polynomial:
    """Monomial-wise maximum of coefficients."""
    p._same(q)
    terms = dict(p.terms)
    for e, c in q.terms.items():
        terms[e] = max(terms.get(e, 0), c)
    return Polynomial(terms, p.nvars)


def _abstract_monomial(exps: tuple, coeff: int, n: int) -> np.ndarray:
    vec = np.zeros(n + 1, dtype=np.uint8)
    used = [i for i, e in enumerate(exps) if e]
    if not used:
        vec[n] = L if coeff == 1 else A
    elif len(used) == 1 and exps[used[0]] == 1:
        vec[used[0]] = L if coeff == 1 else A
    else:
        # Product of variables: every factor gets M.  The coefficient is part
        # of a factor and cannot raise M any further.
        vec[used] = M
    return vec


def abstract_poly(p: Polynomial, n: int | None = None) -> np.ndarray:
    """Abstraction of ``p`` as a vector of length ``n + 1`` (constants last)."""
    n = p.nvars if n is None else n
    if n != p.nvars:
        raise ValueError(f"polynomial has {p.nvars} variables, asked for {n}")
    vec = np.zeros(n + 1, dtype=np.uint8)
    for exps, coeff in p.terms.items():
        vec = alg.ADD_TABLE[vec, _abstract_monomial(exps, coeff, n)]
    vec.setflags(write=False)
    return vec


def _check_mp(P: Sequence[Polynomial], Q: Sequence[Polynomial]) -> None:
    if len(P) != len(Q):
        raise ValueError(f"arity mismatch: {len(P)} vs {len(Q)}")
    for p in list(P) + list(Q):
        if p.nvars != len(P):
            raise ValueError("every component must range over one variable per component")


def identity_mp(n: int) -> tuple:
    return tuple(Polynomial.var(i, n) for i in range(n))


def mp_sum(P: Sequence[Polynomial], Q: Sequence[Polynomial]) -> tuple:
    _check_mp(P, Q)
    return tuple(poly_union(p, q) for p, q in zip(P, Q))


def mp_compose(P: Sequence[Polynomial], Q: Sequence[Polynomial]) -> tuple:
    """Component ``j`` is ``P[j]`` with every ``X_k`` replaced by ``Q[k]``.

    If ``Q`` bounds one command and ``P`` the next, the result bounds both in
    sequence.
    """
    _check_mp(P, Q)
    return tuple(p.substitute(Q) for p in P)


def abstract_mp(P: Sequence[Polynomial]) -> np.ndarray:
    """Matrix whose column ``j`` abstracts ``P[j]``; constants column is the unit."""
    n = len(P)
    out = np.zeros((n + 1, n + 1), dtype=np.uint8)
    for j, p in enumerate(P):
        out[:, j] = abstract_poly(p, n)
    out[n, n] = L
    out.setflags(write=False)
    return out


def random_polynomial(rng: np.random.Generator, nvars: int, max_degree: int = 3,
                      max_coeff: int = 5, max_terms: int = 4) -> Polynomial:
    terms: dict = {}
    for _ in range(int(rng.integers(0, max_terms + 1))):
        degree = int(rng.integers(0, max_degree + 1))
        exps = [0] * nvars
        for _ in range(degree):
            exps[int(rng.integers(nvars))] += 1
        terms[tuple(exps)] = int(rng.integers(1, max_coeff + 1))
    return Polynomial(terms, nvars)


def multipolynomial_from(polys: Iterable[str]) -> tuple:
    texts = list(polys)
    return tuple(parse_polynomial(t, len(texts)) for t in texts)
