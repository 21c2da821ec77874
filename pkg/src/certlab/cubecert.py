"""Boolean hypercube machinery.

Juntas and Kronecker deltas, the Sherali-Adams LP, pseudoexpectations with
their moment and localizing matrices, Möbius diagonalization, conditioning,
and the dual-side tests for SDSOS (2x2 principal minors) and Sherali-Adams
(nonnegative Möbius diagonals).

Subsets of variables are ``frozenset`` of 0-based indices.  Subset lists are
ordered by size, then lexicographically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import exactlp
from .circuitcert import CircuitPolynomial
from .matrixkit import SymRationalMatrix
from .polycore import BudgetExceeded, Exponent, Polynomial, format_rational, subsets_upto, to_rational
from .system import ConstraintSystem, preprime_products

DEFAULT_SA_BUDGET = 50_000
MOBIUS_BUDGET = 12

Subset = frozenset


def _key(S: Iterable[int]) -> tuple:
    s = sorted(S)
    return (len(s), s)


def sorted_subsets(ground: Iterable[int], k: int) -> list[frozenset]:
    return [frozenset(c) for c in subsets_upto(sorted(ground), k)]


def _exp_of(n: int, S: Iterable[int]) -> Exponent:
    e = [0] * n
    for i in S:
        e[i] = 1
    return tuple(e)


def _set_of(e: Exponent) -> frozenset:
    return frozenset(i for i, k in enumerate(e) if k)


# juntas


def partial_delta(n: int, assignment: Mapping[int, int]) -> Polynomial:
    """``prod_{v_j = 1} x_j * prod_{v_j = 0} (1 - x_j)`` over the assigned variables."""
    out = Polynomial.constant(n, 1)
    for j in sorted(assignment):
        x = Polynomial.var(n, j)
        out = out * (x if assignment[j] else 1 - x)
    return out


def kronecker_delta(v: Sequence[int]) -> Polynomial:
    """Multilinear indicator of the cube point ``v``: ``x_j`` where ``v_j = 1``, ``1 - x_j`` where ``v_j = 0``."""
    if any(b not in (0, 1) for b in v):
        raise ValueError("Kronecker deltas are indexed by 0/1 vectors")
    return partial_delta(len(v), dict(enumerate(v)))


@dataclass(frozen=True)
class JuntaTerm:
    """``alpha * prod_{i in I} x_i * prod_{j in J} (1 - x_j)``."""

    I: frozenset
    J: frozenset
    alpha: Fraction

    @classmethod
    def make(cls, I: Iterable[int], J: Iterable[int], alpha=1) -> "JuntaTerm":
        alpha = to_rational(alpha)
        if alpha < 0:
            raise ValueError("junta coefficients must be nonnegative")
        return cls(frozenset(I), frozenset(J), alpha)

    @property
    def support(self) -> frozenset:
        return self.I | self.J

    @property
    def degree(self) -> int:
        return len(self.I) + len(self.J)

    def vanishes_on_cube(self) -> bool:
        return bool(self.I & self.J)

    def polynomial(self, n: int) -> Polynomial:
        out = Polynomial.constant(n, self.alpha)
        for i in sorted(self.I):
            out = out * Polynomial.var(n, i)
        for j in sorted(self.J):
            out = out * (1 - Polynomial.var(n, j))
        return out

    def sort_key(self) -> tuple:
        return (_key(self.I | self.J), sorted(self.I), sorted(self.J))

    def to_json(self) -> dict:
        return {"I": sorted(self.I), "J": sorted(self.J), "alpha": format_rational(self.alpha)}

    @classmethod
    def from_json(cls, data: Mapping) -> "JuntaTerm":
        return cls.make(data["I"], data["J"], data["alpha"])


def canonical_juntas(terms: Iterable[JuntaTerm]) -> list[JuntaTerm]:
    """Merge equal patterns, drop zero and cube-vanishing terms, sort."""
    acc: dict[tuple[frozenset, frozenset], Fraction] = {}
    for t in terms:
        if t.alpha and not t.vanishes_on_cube():
            acc[(t.I, t.J)] = acc.get((t.I, t.J), Fraction(0)) + t.alpha
    return sorted((JuntaTerm(I, J, a) for (I, J), a in acc.items() if a), key=JuntaTerm.sort_key)


def junta_polynomial(terms: Iterable[JuntaTerm], n: int) -> Polynomial:
    total = Polynomial.zero(n)
    for t in terms:
        total = total + t.polynomial(n)
    return total


def junta_from_values(K: Sequence[int], values: Mapping[tuple, object]) -> list[JuntaTerm]:
    """``sum_v values[v] * delta_v`` over the variables ``K``.

    ``values`` maps 0/1 tuples (aligned with ``sorted(K)``) to nonnegative
    rationals; missing points count as zero.
    """
    K = sorted(K)
    out = []
    for v in itertools.product((0, 1), repeat=len(K)):
        val = to_rational(values.get(v, 0))
        if val < 0:
            raise ValueError(f"negative junta value {val} at {v}")
        if val:
            I = [k for k, b in zip(K, v) if b]
            J = [k for k, b in zip(K, v) if not b]
            out.append(JuntaTerm.make(I, J, val))
    return out


def cube_values(p: Polynomial, K: Sequence[int]) -> dict[tuple, Fraction]:
    """Values of ``p`` on ``{0,1}^K`` with all other variables set to 0."""
    K = sorted(K)
    out = {}
    for v in itertools.product((0, 1), repeat=len(K)):
        point = [0] * p.n
        for k, b in zip(K, v):
            point[k] = b
        out[v] = p.eval(point)
    return out


def circuit_to_junta(c: CircuitPolynomial) -> list[JuntaTerm]:
    """A nonnegative circuit as a nonnegative junta on the variables it uses.

    On the cube the circuit agrees with its multilinear reduction, which only
    depends on ``K = variables_used``; tabulating it on ``{0,1}^K`` and
    expanding in Kronecker deltas gives the junta.
    """
    p = c.polynomial()
    K = sorted(p.variables_used())
    vals = cube_values(p.multilinear_reduce(), K)
    bad = {v: x for v, x in vals.items() if x < 0}
    if bad:
        raise RuntimeError(f"circuit is negative on cube points {sorted(bad)}; it is not nonnegative")
    return junta_from_values(K, vals)


# pseudoexpectations


class LevelError(ValueError):
    """A pseudoexpectation was asked for a moment above its level."""


class DegenerateConditioning(ValueError):
    """Conditioning on an event of pseudo-probability zero."""


@dataclass
class PseudoExpectation:
    """Linear functional on multilinear polynomials of degree at most ``level``."""

    n: int
    level: int
    table: dict

    def __post_init__(self):
        self.table = {frozenset(S): to_rational(v) for S, v in self.table.items()}
        for S in sorted_subsets(range(self.n), min(self.level, self.n)):
            if S not in self.table:
                raise ValueError(f"moment for {sorted(S)} is missing")
        for S in self.table:
            if len(S) > self.level or any(not 0 <= i < self.n for i in S):
                raise ValueError(f"moment for {sorted(S)} is out of range")

    def __getitem__(self, S: Iterable[int]) -> Fraction:
        S = frozenset(S)
        if len(S) > self.level:
            raise LevelError(f"moment of size {len(S)} exceeds level {self.level}")
        return self.table[S]

    def expect(self, p: Polynomial) -> Fraction:
        """``E[multilinear_reduce(p)]``."""
        total = Fraction(0)
        for e, c in p.multilinear_reduce().items():
            total += c * self[_set_of(e)]
        return total

    def normalized(self) -> bool:
        return self.table[frozenset()] == 1

    def to_json(self) -> dict:
        keys = sorted(self.table, key=_key)
        return {
            "n": self.n,
            "level": self.level,
            "moments": [{"set": sorted(S), "value": format_rational(self.table[S])} for S in keys],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PseudoExpectation":
        try:
            table = {frozenset(m["set"]): to_rational(m["value"]) for m in data["moments"]}
            return cls(int(data["n"]), int(data["level"]), table)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed pseudoexpectation JSON: {exc}") from exc


def pe_from_distribution(points: Sequence[Sequence[int]], weights: Sequence, level: int) -> PseudoExpectation:
    """Moments ``E[x_S] = sum_x w(x) prod_{i in S} x_i`` of a distribution on the cube."""
    if not points:
        raise ValueError("a distribution needs at least one point")
    ws = [to_rational(w) for w in weights]
    if len(ws) != len(points):
        raise ValueError("one weight per point is required")
    if any(w < 0 for w in ws):
        raise ValueError("weights must be nonnegative")
    if sum(ws) != 1:
        raise ValueError(f"weights sum to {sum(ws)}, not 1")
    n = len(points[0])
    table = {}
    for S in sorted_subsets(range(n), min(level, n)):
        table[S] = sum((w for p, w in zip(points, ws) if all(p[i] for i in S)), Fraction(0))
    return PseudoExpectation(n, level, table)


@dataclass
class MomentMatrix:
    constraint: Polynomial
    degree: int
    index_sets: list[frozenset]
    matrix: SymRationalMatrix


def localizing_size(degree: int, g: Polynomial) -> int:
    """``d' = floor((degree - deg g) / 2)``; negative means no rows."""
    return (degree - max(g.total_degree(), 0)) // 2


def moment_matrix(pe: PseudoExpectation, g: Polynomial, degree: int) -> MomentMatrix:
    """``M(I, J) = E[g * x_{I u J}]`` over subsets of size at most ``d'``."""
    if pe.level < degree:
        raise LevelError(f"pseudoexpectation level {pe.level} is below degree {degree}")
    dp = localizing_size(degree, g)
    sets = sorted_subsets(range(pe.n), dp) if dp >= 0 else []
    g_ml = g.multilinear_reduce()
    cache: dict[frozenset, Fraction] = {}

    def entry(U: frozenset) -> Fraction:
        if U not in cache:
            cache[U] = pe.expect(g_ml * Polynomial.monomial(_exp_of(pe.n, U)))
        return cache[U]

    rows = [[entry(I | J) for J in sets] for I in sets]
    return MomentMatrix(g, degree, sets, SymRationalMatrix(rows))


def mobius_matrix(K: Iterable[int]) -> tuple[list[frozenset], list[list[Fraction]]]:
    """``Z(I, J) = (-1)^{|J \\ I|}`` if ``I <= J`` else 0, over the power set of ``K``."""
    K = sorted(K)
    if len(K) > MOBIUS_BUDGET:
        raise BudgetExceeded(f"|K| = {len(K)} exceeds the Möbius budget {MOBIUS_BUDGET}")
    subsets = sorted_subsets(K, len(K))
    Z = [[Fraction((-1) ** len(J - I)) if I <= J else Fraction(0) for J in subsets] for I in subsets]
    return subsets, Z


def junta_expectation(pe: PseudoExpectation, g: Polynomial, K: Iterable[int], I: Iterable[int]) -> Fraction:
    """``E[g * x_I * prod_{j in K \\ I} (1 - x_j)]`` by direct expansion."""
    K, I = set(K), set(I)
    assign = {j: int(j in I) for j in K}
    return pe.expect(g * partial_delta(pe.n, assign))


def mobius_diagonalize(pe: PseudoExpectation, g: Polynomial, K: Iterable[int], degree: int) -> list[Fraction]:
    """Diagonal of ``Z M_g|P(K) Z^T``, asserting the off-diagonal part vanishes.

    Entry ``I`` equals ``E[g * x_I * prod_{K \\ I} (1 - x_j)]``.
    """
    K = sorted(K)
    dp = localizing_size(degree, g)
    if len(K) > dp:
        raise ValueError(f"|K| = {len(K)} exceeds floor((degree - deg g)/2) = {dp}")
    subsets, Z = mobius_matrix(K)
    g_ml = g.multilinear_reduce()
    M = [[pe.expect(g_ml * Polynomial.monomial(_exp_of(pe.n, I | J))) for J in subsets] for I in subsets]
    m = len(subsets)
    ZM = [[sum((Z[i][k] * M[k][j] for k in range(m) if Z[i][k]), Fraction(0)) for j in range(m)] for i in range(m)]
    out = [[sum((ZM[i][k] * Z[j][k] for k in range(m) if Z[j][k]), Fraction(0)) for j in range(m)] for i in range(m)]
    for i in range(m):
        for j in range(m):
            if i != j and out[i][j]:
                raise RuntimeError(f"Möbius transform left ({sorted(subsets[i])}, {sorted(subsets[j])}) = {out[i][j]}")
    return [out[i][i] for i in range(m)]


def condition(pe: PseudoExpectation, i: int, bit: int) -> PseudoExpectation:
    """Condition on ``x_i = bit``; the result has level ``pe.level - 1``.

    ``bit = 1``: ``E'[x_S] = E[x_{S+i}] / E[x_i]``;
    ``bit = 0``: ``E'[x_S] = (E[x_S] - E[x_{S+i}]) / (1 - E[x_i])``.
    """
    if bit not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    if not 0 <= i < pe.n:
        raise ValueError(f"variable {i} out of range")
    if pe.level < 2:
        raise LevelError("conditioning needs level at least 2")
    p = pe[{i}]
    mass = p if bit == 1 else 1 - p
    if mass == 0:
        raise DegenerateConditioning(f"E[x_{i}] = {p}: the branch x_{i} = {bit} has zero mass")
    table = {}
    for S in sorted_subsets(range(pe.n), min(pe.level - 1, pe.n)):
        Si = S | {i}
        table[S] = pe[Si] / p if bit == 1 else (pe[S] - pe[Si]) / (1 - p)
    return PseudoExpectation(pe.n, pe.level - 1, table)


# dual-side checks


def _constraint_list(G) -> list[tuple[str, Polynomial]]:
    if isinstance(G, ConstraintSystem):
        return list(G.constraints)
    return list(G)


@dataclass
class DualReport:
    passed: bool
    violations: list[dict] = field(default_factory=list)
    checked: int = 0

    def __bool__(self) -> bool:
        return self.passed


def sdsos_dual_check(pe: PseudoExpectation, G, degree: int) -> DualReport:
    """Every 1x1 and 2x2 principal submatrix of every ``M_g^degree`` is PSD (``g`` ranging over 1 and ``G``)."""
    if pe.level < degree:
        raise LevelError(f"pseudoexpectation level {pe.level} is below degree {degree}")
    violations = []
    checked = 0
    for name, g in [("1", Polynomial.constant(pe.n, 1))] + _constraint_list(G):
        mm = moment_matrix(pe, g, degree)
        A, sets = mm.matrix, mm.index_sets
        for a in range(A.size):
            checked += 1
            if A[a, a] < 0:
                violations.append({"constraint": name, "I": sorted(sets[a]), "J": sorted(sets[a])})
        for a, b in itertools.combinations(range(A.size), 2):
            checked += 1
            if A[a, a] < 0 or A[b, b] < 0:
                continue  # already reported as a 1x1 failure
            if A[a, a] * A[b, b] < A[a, b] ** 2:
                violations.append({"constraint": name, "I": sorted(sets[a]), "J": sorted(sets[b])})
    return DualReport(not violations, violations, checked)


def sa_dual_check(pe: PseudoExpectation, G, degree: int) -> DualReport:
    """Möbius diagonals ``E[g * x_I * xbar_{K \\ I}]`` are nonnegative for all ``|K| <= floor((degree - deg g)/2)``."""
    violations = []
    checked = 0
    for name, g in [("1", Polynomial.constant(pe.n, 1))] + _constraint_list(G):
        dp = localizing_size(degree, g)
        if dp < 0:
            continue
        for K in sorted_subsets(range(pe.n), dp):
            subsets = sorted_subsets(K, len(K))
            for I, val in zip(subsets, mobius_diagonalize(pe, g, K, degree)):
                checked += 1
                if val < 0:
                    violations.append({"constraint": name, "K": sorted(K), "I": sorted(I), "value": format_rational(val)})
    return DualReport(not violations, violations, checked)


# Sherali-Adams primal LP

PUTINAR, SCHMUEDGEN = "putinar", "schmuedgen"


@dataclass
class SAResult:
    """Outcome of :func:`sa_solve`.

    ``status`` is ``optimal`` (``bound`` holds), ``infeasible`` (no ``lambda``
    works; ``outcome.dual`` is the Farkas vector) or ``unbounded`` (every
    ``lambda`` works, i.e. the constraints have no cube solution).  For an
    optimal result, ``f - bound == sum alpha x_I xbar_J prod g + sum_i
    q_i (x_i^2 - x_i)`` holds exactly in ``R[x]``, with ``terms`` holding the
    junta parts and ``ideal`` the ``q_i`` keyed by the index of the
    ``x_i^2 - x_i`` constraint.
    """

    status: str
    bound: Optional[Fraction]
    terms: list[tuple[JuntaTerm, tuple[int, ...]]]
    ideal: dict[int, Polynomial]
    problem: exactlp.LPProblem
    outcome: exactlp.LPOutcome
    columns: list[tuple[frozenset, frozenset, tuple[int, ...]]]
    degree: int
    shape: str


def sa_multipliers(G: ConstraintSystem, degree: int, shape: str) -> list[tuple[tuple[int, ...], Polynomial]]:
    """Constraint products usable as SA multipliers (cube equations excluded)."""
    cube = G.cube_indices()
    others = [k for k in range(len(G)) if k not in cube]
    if shape == PUTINAR:
        return [((), Polynomial.constant(G.n, 1))] + [((k,), G.poly(k)) for k in others]
    if shape == SCHMUEDGEN:
        return preprime_products(G, degree, indices=others)
    raise ValueError(f"unknown shape {shape!r}")


def sa_solve(
    f: Polynomial,
    G: ConstraintSystem,
    degree: int,
    shape: str = PUTINAR,
    budget: int = DEFAULT_SA_BUDGET,
) -> SAResult:
    """Best ``lambda`` with ``f - lambda`` in the Sherali-Adams cone at ``degree``.

    The SA degree budget is ``d = degree // 2``: a column ``x_I xbar_J * P``
    (``I``, ``J`` disjoint, ``P`` a multiplier) is admitted when
    ``|I u J| <= d`` and its multilinear reduction has degree at most ``d``.
    One equality row per multilinear monomial; ``lambda`` is free and the
    column weights are nonnegative.
    """
    if not G.has_hypercube:
        raise ValueError("sa_solve needs the hypercube equations +-(x_i^2 - x_i) in the constraint system")
    if f.n != G.n:
        raise ValueError("objective and constraints disagree on the number of variables")
    n = G.n
    d = degree // 2
    mults = [(ms, P.multilinear_reduce()) for ms, P in sa_multipliers(G, degree, shape)]
    columns = []
    polys = []
    for U in sorted_subsets(range(n), d):
        Us = sorted(U)
        for bits in itertools.product((1, 0), repeat=len(Us)):
            I = frozenset(k for k, b in zip(Us, bits) if b)
            J = U - I
            base = partial_delta(n, {k: b for k, b in zip(Us, bits)})
            for ms, P in mults:
                col = (base * P).multilinear_reduce()
                if col.is_zero() or col.total_degree() > d:
                    continue
                columns.append((I, J, ms))
                polys.append(col)
                if len(columns) > budget:
                    raise BudgetExceeded(f"Sherali-Adams LP exceeds {budget} columns")
    f_ml = f.multilinear_reduce()
    monos = sorted({e for p in polys for e in p.support()} | set(f_ml.support()) | {(0,) * n}, key=_mono_key)
    row_of = {e: r for r, e in enumerate(monos)}
    nvars = 1 + len(columns)
    rows = [[Fraction(0)] * nvars for _ in monos]
    rows[row_of[(0,) * n]][0] = Fraction(1)
    for c, p in enumerate(polys):
        for e, v in p.items():
            rows[row_of[e]][1 + c] = v
    lp = exactlp.LPProblem(
        nvars,
        [1] + [0] * len(columns),
        [(rows[r], "=", f_ml.coeff(e)) for r, e in enumerate(monos)],
        lower=[None] + [0] * len(columns),
    )
    out = exactlp.solve(lp)
    if out.status != "optimal":
        return SAResult(out.status, None, [], {}, lp, out, columns, degree, shape)
    lam = out.primal[0]
    terms = []
    residual = f - lam
    for (I, J, ms), alpha in zip(columns, out.primal[1:]):
        if alpha:
            t = JuntaTerm(I, J, alpha)
            terms.append((t, ms))
            residual = residual - t.polynomial(n) * G.product(ms)
    if not residual.multilinear_reduce().is_zero():
        raise RuntimeError("LP solution does not reproduce f - lambda on the cube")
    ideal = {}
    for i, q in residual.cube_ideal_quotients().items():
        ideal[G.index_of_poly(_cube(n, i))] = q
    return SAResult("optimal", lam, terms, ideal, lp, out, columns, degree, shape)


def _mono_key(e: Exponent) -> tuple:
    return (sum(e), tuple(-k for k in e))


def _cube(n: int, i: int) -> Polynomial:
    x = Polynomial.var(n, i)
    return x * x - x
