"""Sparse multivariate polynomials with exact rational coefficients.

Variables are indexed from 0.  A polynomial in ``n`` variables is a map from
exponent tuples of length ``n`` to :class:`fractions.Fraction` coefficients;
zero coefficients are never stored.  Terms are kept in graded-lex order
(ascending total degree, ties broken by descending lexicographic exponent) so
that iteration, printing and serialization are deterministic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
Exponent = tuple[int, ...]
Number = Union[int, Fraction, str]


class BudgetExceeded(RuntimeError):
    """A desk-scale resource cap (enumeration size, LP columns) was hit."""


def to_rational(value: Number) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: every verification path is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def grlex_key(exp: Exponent) -> tuple:
    return (sum(exp), tuple(-e for e in exp))


class Polynomial:
    """Immutable sparse polynomial over Q."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], Number] | None = None):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        acc: dict[Exponent, Fraction] = {}
        for exp, coef in (terms or {}).items():
            e = tuple(int(k) for k in exp)
            if len(e) != n:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {n}")
            if any(k < 0 for k in e):
                raise ValueError(f"negative exponent in {e}")
            acc[e] = acc.get(e, Fraction(0)) + to_rational(coef)
        self.n = n
        self._terms = {e: acc[e] for e in sorted(acc, key=grlex_key) if acc[e] != 0}
        self._hash = None

    @classmethod
    def _raw(cls, n: int, terms: dict[Exponent, Fraction]) -> "Polynomial":
        # trusted constructor: terms already validated, may contain zeros
        p = cls.__new__(cls)
        p.n = n
        p._terms = {e: terms[e] for e in sorted(terms, key=grlex_key) if terms[e] != 0}
        p._hash = None
        return p

    # constructors

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls._raw(n, {})

    @classmethod
    def constant(cls, n: int, c: Number) -> "Polynomial":
        return cls._raw(n, {(0,) * n: to_rational(c)})

    @classmethod
    def var(cls, n: int, i: int) -> "Polynomial":
        if not 0 <= i < n:
            raise IndexError(f"variable {i} out of range for n={n}")
        e = [0] * n
        e[i] = 1
        return cls._raw(n, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, exp: Sequence[int], coef: Number = 1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): coef})

    # access

    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> list[Exponent]:
        return list(self._terms)

    def coeff(self, exp: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exp), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # arithmetic

    def _check(self, other: "Polynomial") -> None:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Polynomial.constant(self.n, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, Fraction(0)) + c
        return Polynomial._raw(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = Fraction(other)
            return Polynomial._raw(self.n, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        acc: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, Fraction(0)) + c1 * c2
        return Polynomial._raw(self.n, acc)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Polynomial.constant(self.n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, tuple(self._terms.items())))
        return self._hash

    # evaluation and structure

    def eval(self, point: Sequence[Number]) -> Fraction:
        if len(point) != self.n:
            raise ValueError(f"point has length {len(point)}, expected {self.n}")
        xs = [to_rational(v) for v in point]
        total = Fraction(0)
        for e, c in self._terms.items():
            term = c
            for x, k in zip(xs, e):
                if k:
                    term *= x**k
            total += term
        return total

    __call__ = eval

    def total_degree(self) -> int:
        """Largest coordinate sum in the support; ``-1`` for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(e) for e in self._terms)

    def multilinear_reduce(self) -> "Polynomial":
        """Clamp every exponent to {0, 1}: the representative modulo x_i^2 - x_i."""
        acc: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            r = tuple(1 if k else 0 for k in e)
            acc[r] = acc.get(r, Fraction(0)) + c
        return Polynomial._raw(self.n, acc)

    def is_multilinear(self) -> bool:
        return all(k <= 1 for e in self._terms for k in e)

    def variables_used(self) -> frozenset[int]:
        return frozenset(i for e in self._terms for i, k in enumerate(e) if k)

    def cube_ideal_quotients(self) -> dict[int, "Polynomial"]:
        """Return ``q`` with ``self - multilinear_reduce(self) == sum q[i] * (x_i^2 - x_i)``.

        Each monomial is reduced by peeling ``x_i^2 -> x_i`` at its first
        variable of exponent at least two; every ``q[i]`` has degree at most
        ``deg(self) - 2``.
        """
        quotients: dict[int, dict[Exponent, Fraction]] = {}
        for e, c in self._terms.items():
            cur = list(e)
            while True:
                i = next((j for j, k in enumerate(cur) if k >= 2), None)
                if i is None:
                    break
                q = list(cur)
                q[i] -= 2
                bucket = quotients.setdefault(i, {})
                key = tuple(q)
                bucket[key] = bucket.get(key, Fraction(0)) + c
                cur[i] -= 1
        out = {}
        for i in sorted(quotients):
            p = Polynomial._raw(self.n, quotients[i])
            if p:
                out[i] = p
        return out

    # formatting

    def __repr__(self) -> str:
        return f"Polynomial({self.n}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms.items():
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            if not mono:
                body = format_rational(mag)
            elif mag == 1:
                body = mono
            else:
                body = f"{format_rational(mag)}*{mono}"
            parts.append(("- " if c < 0 else "+ ") + body)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"coef": format_rational(c), "exp": list(e)} for e, c in self._terms.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        try:
            n = int(data["n"])
            terms: dict[Exponent, Fraction] = {}
            for t in data["terms"]:
                e = tuple(int(k) for k in t["exp"])
                coef = t["coef"]
                if isinstance(coef, float):
                    raise TypeError("floating-point coefficient")
                terms[e] = terms.get(e, Fraction(0)) + to_rational(coef)
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed polynomial JSON: {exc}") from exc
        return cls(n, terms)


# module-level helpers mirroring the operator API


def add(p: Polynomial, q: Polynomial) -> Polynomial:
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    return p * q


def evaluate(p: Polynomial, point: Sequence[Number]) -> Fraction:
    return p.eval(point)


def total_degree(p: Polynomial) -> int:
    return p.total_degree()


def multilinear_reduce(p: Polynomial) -> Polynomial:
    return p.multilinear_reduce()


def variables_used(p: Polynomial) -> frozenset[int]:
    return p.variables_used()


def subset_monomial(n: int, subset: Iterable[int], coef: Number = 1) -> Polynomial:
    """``coef * prod_{i in subset} x_i``."""
    e = [0] * n
    for i in subset:
        e[i] = 1
    return Polynomial._raw(n, {tuple(e): to_rational(coef)})


def linear_form(coeffs: Sequence[Number], constant: Number = 0) -> Polynomial:
    n = len(coeffs)
    terms: dict[Exponent, Fraction] = {(0,) * n: to_rational(constant)}
    for i, c in enumerate(coeffs):
        e = [0] * n
        e[i] = 1
        terms[tuple(e)] = to_rational(c)
    return Polynomial._raw(n, terms)


def subsets_upto(ground: Sequence[int], k: int) -> list[tuple[int, ...]]:
    """Subsets of ``ground`` of size at most ``k``, by size then lexicographically."""
    ground = sorted(ground)
    out: list[tuple[int, ...]] = []
    for r in range(0, min(k, len(ground)) + 1):
        out.extend(itertools.combinations(ground, r))
    return out
