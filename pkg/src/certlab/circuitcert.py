"""Circuit polynomials: detection, exact circuit-number comparison, SONC checks.

A circuit polynomial has even simplex vertices ``alpha(j)`` with positive
coefficients and at most one further support point ``beta`` strictly inside
the simplex.  Its circuit number ``Theta = prod (f_alpha(j) / lambda_j)^lambda_j``
is usually irrational; every comparison here raises both sides to the common
denominator ``D`` of the barycentric weights so only rationals are compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import matrixkit, polytope
from .polycore import Exponent, Polynomial, format_rational, to_rational
from .polytope import PointSet, SimplexData


class NotACircuit(ValueError):
    """Raised by :func:`detect_circuit`; ``reason`` is a short machine-readable tag."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class CircuitPolynomial:
    """Simplex vertices with coefficients plus an optional inner term.

    ``inner_exp is None`` marks the degenerate case (a sum of monomial
    squares on the vertices, no inner term).  ``lambdas`` are the barycentric
    coordinates of ``inner_exp`` (None when degenerate).
    """

    n: int
    simplex: SimplexData
    vertex_coeffs: tuple[Fraction, ...]
    inner_exp: Optional[Exponent] = None
    inner_coeff: Fraction = Fraction(0)
    lambdas: Optional[tuple[Fraction, ...]] = None

    @classmethod
    def build(
        cls,
        vertices: Sequence[Sequence[int]],
        vertex_coeffs: Sequence,
        inner_exp: Optional[Sequence[int]] = None,
        inner_coeff=0,
    ) -> "CircuitPolynomial":
        """Validate and assemble a circuit from its parts."""
        verts = [tuple(v) for v in vertices]
        if not verts:
            raise NotACircuit("empty")
        n = len(verts[0])
        coeffs = [to_rational(c) for c in vertex_coeffs]
        if len(coeffs) != len(verts):
            raise ValueError("one coefficient per vertex is required")
        order = sorted(range(len(verts)), key=lambda i: verts[i])
        verts = [verts[i] for i in order]
        coeffs = [coeffs[i] for i in order]
        try:
            simplex = polytope.is_simplex_with_even_vertices(PointSet(n, verts))
        except polytope.SimplexRejected as exc:
            raise NotACircuit("not_simplex" if exc.reason == "dependent" else exc.reason, str(exc)) from exc
        if len(simplex.vertices) != len(verts):
            raise NotACircuit("duplicate_vertex")
        if any(c <= 0 for c in coeffs):
            raise NotACircuit("nonpositive_vertex_coefficient")
        if inner_exp is None:
            return cls(n, simplex, tuple(coeffs))
        beta = tuple(int(k) for k in inner_exp)
        try:
            lam, interior = polytope.barycentric(simplex, beta)
        except ValueError as exc:
            raise NotACircuit("inner_outside_hull", str(exc)) from exc
        if any(v < 0 for v in lam):
            raise NotACircuit("inner_outside_hull", f"{beta} lies outside the simplex")
        if not interior:
            raise NotACircuit("inner_on_boundary", f"{beta} is not in the relative interior")
        return cls(n, simplex, tuple(coeffs), beta, to_rational(inner_coeff), tuple(lam))

    @property
    def degenerate(self) -> bool:
        return self.inner_exp is None

    @property
    def vertices(self) -> tuple[Exponent, ...]:
        return self.simplex.vertices

    def polynomial(self) -> Polynomial:
        terms: dict[Exponent, Fraction] = dict(zip(self.simplex.vertices, self.vertex_coeffs))
        if self.inner_exp is not None:
            terms[self.inner_exp] = terms.get(self.inner_exp, Fraction(0)) + self.inner_coeff
        return Polynomial(self.n, terms)

    def scaled(self, w) -> "CircuitPolynomial":
        w = to_rational(w)
        if w <= 0:
            raise ValueError("circuits can only be scaled by positive rationals")
        return CircuitPolynomial(
            self.n,
            self.simplex,
            tuple(w * c for c in self.vertex_coeffs),
            self.inner_exp,
            w * self.inner_coeff,
            self.lambdas,
        )

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "vertices": [list(v) for v in self.simplex.vertices],
            "vertex_coeffs": [format_rational(c) for c in self.vertex_coeffs],
            "inner_exp": None if self.inner_exp is None else list(self.inner_exp),
            "inner_coeff": format_rational(self.inner_coeff),
        }

    @classmethod
    def from_json(cls, data: dict) -> "CircuitPolynomial":
        try:
            return cls.build(data["vertices"], data["vertex_coeffs"], data.get("inner_exp"), data.get("inner_coeff", "0"))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed circuit JSON: {exc}") from exc


def detect_circuit(p: Polynomial) -> CircuitPolynomial:
    """Recognize ``p`` as a circuit polynomial or raise :class:`NotACircuit`."""
    if p.is_zero():
        raise NotACircuit("zero_polynomial")
    support = PointSet.support(p)
    verts = polytope.vertices_of(support).points
    inner = [q for q in support.points if q not in set(verts)]
    if len(inner) > 1:
        raise NotACircuit("too_many_interior", f"{len(inner)} non-vertex support points")
    return CircuitPolynomial.build(
        verts,
        [p.coeff(v) for v in verts],
        inner[0] if inner else None,
        p.coeff(inner[0]) if inner else 0,
    )


def circuit_number_compare(c: CircuitPolynomial) -> int:
    """Sign of ``|f_beta| - Theta`` (-1, 0 or 1), decided in exact arithmetic.

    With ``D`` the lcm of the denominators of the ``lambda_j`` and
    ``p_j = lambda_j D``, compares ``|f_beta|^D`` with
    ``prod (f_alpha(j) / lambda_j)^p_j``.
    """
    if c.degenerate:
        raise ValueError("a degenerate circuit has no circuit number")
    D = 1
    for lam in c.lambdas:
        D = D * lam.denominator // math.gcd(D, lam.denominator)
    lhs = abs(c.inner_coeff) ** D
    rhs = Fraction(1)
    for f, lam in zip(c.vertex_coeffs, c.lambdas):
        rhs *= (f / lam) ** int(lam * D)
    return (lhs > rhs) - (lhs < rhs)


def circuit_number_float(c: CircuitPolynomial) -> float:
    """Floating approximation of ``Theta``; for display only, never for decisions."""
    return math.prod(float(f / lam) ** float(lam) for f, lam in zip(c.vertex_coeffs, c.lambdas))


def _beta_even(c: CircuitPolynomial) -> bool:
    return all(k % 2 == 0 for k in c.inner_exp)


def is_nonnegative_circuit(c: CircuitPolynomial) -> bool:
    if c.degenerate or c.inner_coeff == 0:
        return True
    if _beta_even(c) and c.inner_coeff > 0:
        return True
    return circuit_number_compare(c) <= 0


def circuit_is_sos(c: CircuitPolynomial, budget: int = polytope.DEFAULT_LATTICE_BUDGET) -> bool:
    """A nonnegative circuit is SOS iff it is a sum of monomial squares or
    its inner exponent lies in the maximal mediated set of its vertices."""
    if not is_nonnegative_circuit(c):
        raise ValueError("circuit_is_sos expects a nonnegative circuit")
    if c.degenerate or c.inner_coeff == 0 or (c.inner_coeff > 0 and _beta_even(c)):
        return True
    mms = polytope.maximal_mediated_set(PointSet(c.n, c.simplex.vertices), budget)
    return c.inner_exp in mms.as_set()


# decompositions


@dataclass
class SoncDecomposition:
    entries: list[tuple[Fraction, CircuitPolynomial]] = field(default_factory=list)

    def polynomial(self, n: int) -> Polynomial:
        total = Polynomial.zero(n)
        for w, circ in self.entries:
            total = total + circ.polynomial() * w
        return total

    def to_json(self) -> dict:
        return {"entries": [{"weight": format_rational(w), "circuit": c.to_json()} for w, c in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "SoncDecomposition":
        try:
            return cls([(to_rational(e["weight"]), CircuitPolynomial.from_json(e["circuit"])) for e in data["entries"]])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed decomposition JSON: {exc}") from exc


@dataclass
class SoncReport:
    accepted: bool
    entries: list[tuple[bool, str]]
    residual: Polynomial

    def __bool__(self) -> bool:
        return self.accepted


def verify_sonc_decomposition(f: Polynomial, dec: SoncDecomposition) -> SoncReport:
    results = []
    for w, circ in dec.entries:
        if circ.n != f.n:
            results.append((False, f"circuit has {circ.n} variables, polynomial has {f.n}"))
        elif w < 0:
            results.append((False, f"negative weight {format_rational(w)}"))
        elif not is_nonnegative_circuit(circ):
            results.append((False, "inner coefficient exceeds the circuit number"))
        else:
            results.append((True, "ok"))
    total = Polynomial.zero(f.n)
    for w, circ in dec.entries:
        if circ.n == f.n:
            total = total + circ.polynomial() * w
    residual = f - total
    return SoncReport(all(ok for ok, _ in results) and residual.is_zero(), results, residual)


def binomial_square_circuit(sq: matrixkit.BinomialSquare) -> Optional[CircuitPolynomial]:
    """``w (a x^A + b x^B)^2`` as a circuit with vertices 2A, 2B and inner A+B.

    The inner coefficient is ``2wab`` and the circuit number is exactly
    ``2w|ab|``, so the result sits on the nonnegativity boundary.  Monomial
    squares come back degenerate; a vanishing square returns None.
    """
    A, B = tuple(sq.exp_a), tuple(sq.exp_b)
    if A == B or sq.a == 0 or sq.b == 0:
        coef = sq.weight * ((sq.a + sq.b) ** 2 if A == B else (sq.a**2 if sq.b == 0 else sq.b**2))
        exp = A if (A == B or sq.b == 0) else B
        if coef == 0:
            return None
        return CircuitPolynomial.build([tuple(2 * k for k in exp)], [coef])
    if sq.weight == 0:
        return None
    w = sq.weight
    return CircuitPolynomial.build(
        [tuple(2 * k for k in A), tuple(2 * k for k in B)],
        [w * sq.a**2, w * sq.b**2],
        tuple(a + b for a, b in zip(A, B)),
        2 * w * sq.a * sq.b,
    )


def quadratic_gram(f: Polynomial) -> tuple[list[Exponent], matrixkit.SymRationalMatrix]:
    """The unique symmetric ``Q`` with ``f == z^T Q z`` for ``z = (1, x_1, ..., x_n)``."""
    if f.total_degree() > 2:
        raise ValueError("quadratic_gram needs total degree at most 2")
    n = f.n
    basis = [(0,) * n] + [tuple(int(i == j) for j in range(n)) for i in range(n)]
    Q = [[Fraction(0)] * (n + 1) for _ in range(n + 1)]
    for a in range(n + 1):
        for b in range(a, n + 1):
            e = tuple(x + y for x, y in zip(basis[a], basis[b]))
            v = f.coeff(e)
            if a == b:
                Q[a][a] = v
            else:
                Q[a][b] = Q[b][a] = v / 2
    return basis, matrixkit.SymRationalMatrix(Q)


@dataclass
class QuadraticSoncResult:
    member: bool
    gram: matrixkit.SymRationalMatrix
    sdd: matrixkit.SDDResult
    decomposition: Optional[SoncDecomposition] = None

    def __bool__(self) -> bool:
        return self.member


def quadratic_sonc_membership(f: Polynomial) -> QuadraticSoncResult:
    """Decide SONC membership of a polynomial of degree at most two.

    Circuits of degree at most two are monomial squares and binomial
    squares on pairs of monomials from ``{1, x_1, ..., x_n}``, so ``f`` is
    SONC exactly when its Gram matrix over that basis is scaled diagonally
    dominant.  A negative answer carries the Farkas certificate of the
    scaling LP.
    """
    if f.total_degree() > 2:
        raise ValueError("quadratic_sonc_membership needs total degree at most 2")
    basis, Q = quadratic_gram(f)
    res = matrixkit.is_sdd(Q)
    if not res.sdd:
        return QuadraticSoncResult(False, Q, res)
    dec = SoncDecomposition()
    for sq in matrixkit.sdd_to_binomial_squares(Q, res.scaling, basis):
        circ = binomial_square_circuit(sq)
        if circ is not None:
            dec.entries.append((Fraction(1), circ))
    return QuadraticSoncResult(True, Q, res, dec)
