"""Exact symmetric rational matrices: PSD tests, (scaled) diagonal dominance, Gram checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import exactlp
from .polycore import Exponent, Polynomial, format_rational, to_rational


class SymRationalMatrix:
    """Dense symmetric matrix with Fraction entries; immutable."""

    __slots__ = ("size", "rows")

    def __init__(self, rows: Sequence[Sequence]):
        size = len(rows)
        data = tuple(tuple(to_rational(v) for v in row) for row in rows)
        for i, row in enumerate(data):
            if len(row) != size:
                raise ValueError("matrix is not square")
            for j in range(i):
                if row[j] != data[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        self.size = size
        self.rows = data

    @classmethod
    def zeros(cls, size: int) -> "SymRationalMatrix":
        return cls([[0] * size for _ in range(size)])

    @classmethod
    def diagonal(cls, diag: Sequence) -> "SymRationalMatrix":
        n = len(diag)
        return cls([[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SymRationalMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(format_rational(v) for v in row) for row in self.rows)
        return f"SymRationalMatrix([{body}])"

    def quadratic_form(self, v: Sequence) -> Fraction:
        v = [to_rational(x) for x in v]
        return sum(
            (v[i] * self.rows[i][j] * v[j] for i in range(self.size) for j in range(self.size) if self.rows[i][j]),
            Fraction(0),
        )

    def congruence(self, d: Sequence) -> "SymRationalMatrix":
        """``D M D`` for the diagonal matrix ``D = diag(d)``."""
        return SymRationalMatrix([[d[i] * self.rows[i][j] * d[j] for j in range(self.size)] for i in range(self.size)])

    def principal(self, idx: Sequence[int]) -> "SymRationalMatrix":
        return SymRationalMatrix([[self.rows[i][j] for j in idx] for i in idx])

    def to_json(self) -> dict:
        return {"size": self.size, "rows": [[format_rational(v) for v in row] for row in self.rows]}

    @classmethod
    def from_json(cls, data: dict) -> "SymRationalMatrix":
        try:
            m = cls(data["rows"])
        except (KeyError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed matrix JSON: {exc}") from exc
        if m.size != int(data.get("size", m.size)):
            raise ValueError("matrix size field disagrees with rows")
        return m


# PSD testing


@dataclass
class PSDResult:
    """Outcome of :func:`psd_check`.

    When ``psd`` holds, ``M[order][:, order] == L diag(D) L^T`` with ``L``
    unit lower triangular.  Otherwise ``witness`` satisfies ``v^T M v < 0``.
    """

    psd: bool
    order: list[int] = field(default_factory=list)
    L: list[list[Fraction]] = field(default_factory=list)
    D: list[Fraction] = field(default_factory=list)
    witness: Optional[list[Fraction]] = None

    def __bool__(self) -> bool:
        return self.psd


def psd_check(M: SymRationalMatrix) -> PSDResult:
    n = M.size
    A = [list(row) for row in M.rows]
    # T tracks the congruence: A == T M T^T throughout
    T = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    remaining = list(range(n))
    order: list[int] = []
    D: list[Fraction] = []
    mult: dict[tuple[int, int], Fraction] = {}

    while remaining:
        neg = next((i for i in remaining if A[i][i] < 0), None)
        if neg is not None:
            return PSDResult(False, witness=list(T[neg]))
        p = next((i for i in remaining if A[i][i] > 0), None)
        if p is None:
            # all remaining diagonal entries vanish; any off-diagonal entry is fatal
            for i in remaining:
                for j in remaining:
                    if i != j and A[i][j]:
                        t = -(A[j][j] + 1) / (2 * A[i][j])
                        v = [t * a + b for a, b in zip(T[i], T[j])]
                        return PSDResult(False, witness=v)
            for i in remaining:
                order.append(i)
                D.append(Fraction(0))
            break
        remaining.remove(p)
        order.append(p)
        piv = A[p][p]
        D.append(piv)
        for j in remaining:
            f = A[j][p] / piv
            if not f:
                continue
            mult[(j, p)] = f
            for k in remaining:
                A[j][k] -= f * A[p][k]
            A[j][p] = Fraction(0)
            T[j] = [a - f * b for a, b in zip(T[j], T[p])]
        for j in remaining:
            A[p][j] = Fraction(0)

    pos = {v: k for k, v in enumerate(order)}
    L = [[Fraction(int(r == c)) for c in range(n)] for r in range(n)]
    for (j, p), f in mult.items():
        L[pos[j]][pos[p]] = f
    return PSDResult(True, order, L, D)


# diagonal dominance


def is_dd(M: SymRationalMatrix) -> bool:
    return all(
        M.rows[i][i] >= sum(abs(M.rows[i][j]) for j in range(M.size) if j != i) for i in range(M.size)
    )


@dataclass
class DDDecomposition:
    """``M == sum c * w w^T + diag(rest)`` with ``w = e_i + sign * e_j``."""

    size: int
    terms: list[tuple[Fraction, int, int, int]]
    diagonal_rest: list[Fraction]

    def reconstruct(self) -> SymRationalMatrix:
        A = [[Fraction(0)] * self.size for _ in range(self.size)]
        for c, i, j, s in self.terms:
            A[i][i] += c
            A[j][j] += c
            A[i][j] += s * c
            A[j][i] += s * c
        for i, r in enumerate(self.diagonal_rest):
            A[i][i] += r
        return SymRationalMatrix(A)


def dd_decompose(M: SymRationalMatrix) -> DDDecomposition:
    if not is_dd(M):
        raise ValueError("matrix is not diagonally dominant")
    n = M.size
    terms = []
    rest = [M.rows[i][i] for i in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = M.rows[i][j]
            if v:
                terms.append((abs(v), i, j, 1 if v > 0 else -1))
                rest[i] -= abs(v)
                rest[j] -= abs(v)
    return DDDecomposition(n, terms, rest)


@dataclass
class SDDResult:
    """``sdd`` with scaling ``d > 0`` (``diag(d) M diag(d)`` is dd), or the failed LP and its Farkas outcome."""

    sdd: bool
    scaling: Optional[list[Fraction]]
    problem: exactlp.LPProblem
    outcome: exactlp.LPOutcome

    def __bool__(self) -> bool:
        return self.sdd


def sdd_lp(M: SymRationalMatrix) -> exactlp.LPProblem:
    """``min sum d`` s.t. ``M_ii d_i - sum_j |M_ij| d_j >= 0`` and ``d_i >= 1``.

    The dominance cone is invariant under positive scaling, so ``d >= 1``
    loses nothing against ``d > 0``.
    """
    n = M.size
    rows = []
    for i in range(n):
        row = [-abs(M.rows[i][j]) for j in range(n)]
        row[i] = M.rows[i][i]
        rows.append((row, ">=", 0))
    return exactlp.LPProblem(n, [-1] * n, rows, lower=[1] * n)


def is_sdd(M: SymRationalMatrix) -> SDDResult:
    problem = sdd_lp(M)
    outcome = exactlp.solve(problem)
    if outcome.status == "optimal":
        return SDDResult(True, list(outcome.primal), problem, outcome)
    return SDDResult(False, None, problem, outcome)


# Gram matrices


def gram_polynomial(monomials: Sequence[Exponent], G: SymRationalMatrix) -> Polynomial:
    """Expand ``z^T G z`` for the monomial vector ``z``."""
    if G.size != len(monomials):
        raise ValueError(f"Gram matrix has size {G.size} but {len(monomials)} monomials were given")
    if not monomials:
        return Polynomial.zero(0)
    n = len(monomials[0])
    acc: dict[Exponent, Fraction] = {}
    for i, a in enumerate(monomials):
        for j, b in enumerate(monomials):
            v = G.rows[i][j]
            if v:
                e = tuple(x + y for x, y in zip(a, b))
                acc[e] = acc.get(e, Fraction(0)) + v
    return Polynomial(n, acc)


@dataclass
class GramReport:
    accepted: bool
    residual: Polynomial
    psd: PSDResult

    def __bool__(self) -> bool:
        return self.accepted


def gram_verify(p: Polynomial, monomials: Sequence[Exponent], G: SymRationalMatrix) -> GramReport:
    if G.size != len(monomials):
        raise ValueError(f"Gram matrix has size {G.size} but {len(monomials)} monomials were given")
    expanded = gram_polynomial(monomials, G) if monomials else Polynomial.zero(p.n)
    if expanded.n != p.n:
        raise ValueError("monomial length does not match polynomial dimension")
    residual = p - expanded
    psd = psd_check(G)
    return GramReport(residual.is_zero() and psd.psd, residual, psd)


@dataclass(frozen=True)
class BinomialSquare:
    """``weight * (a * x^exp_a + b * x^exp_b)^2`` with ``weight >= 0``."""

    weight: Fraction
    a: Fraction
    exp_a: Exponent
    b: Fraction
    exp_b: Exponent

    def polynomial(self) -> Polynomial:
        n = len(self.exp_a)
        base = Polynomial(n, {self.exp_a: self.a}) + Polynomial(n, {self.exp_b: self.b})
        return base * base * self.weight

    def is_monomial_square(self) -> bool:
        return self.b == 0 or self.a == 0 or self.exp_a == self.exp_b


def sdd_to_binomial_squares(
    M: SymRationalMatrix, d: Sequence, monomials: Sequence[Exponent]
) -> list[BinomialSquare]:
    """Write ``z^T M z`` as a nonnegative sum of binomial squares.

    ``N = diag(d) M diag(d)`` is dd; each off-diagonal pair contributes
    ``|N_ij| (y_i + s y_j)^2`` with ``y = z / d``, rescaled here to
    ``(|N_ij| / d_i^2) (z_i + s (d_i/d_j) z_j)^2``.  Square roots never
    appear because the weight stays outside the square.
    """
    d = [to_rational(v) for v in d]
    if len(d) != M.size or any(v <= 0 for v in d):
        raise ValueError("scaling must be a positive vector of matching size")
    N = M.congruence(d)
    if not is_dd(N):
        raise ValueError("scaling does not make the matrix diagonally dominant")
    dec = dd_decompose(N)
    out = []
    for c, i, j, s in dec.terms:
        out.append(BinomialSquare(c / d[i] ** 2, Fraction(1), tuple(monomials[i]), s * d[i] / d[j], tuple(monomials[j])))
    for i, r in enumerate(dec.diagonal_rest):
        if r:
            out.append(BinomialSquare(r / d[i] ** 2, Fraction(1), tuple(monomials[i]), Fraction(0), tuple(monomials[i])))
    return out
