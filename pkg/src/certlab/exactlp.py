"""Exact rational linear programming.

A two-phase dense tableau simplex over :class:`fractions.Fraction` with
Bland's anti-cycling rule.  Every outcome carries a certificate that
:func:`check_certificate` re-verifies from scratch:

* ``optimal``: a primal point ``x`` and multipliers ``y`` over the
  certificate rows with ``sum_i y_i s_i a_i == c`` and
  ``sum_i y_i s_i b_i == c.x``;
* ``infeasible``: a Farkas vector ``y`` with ``sum_i y_i s_i a_i == 0`` and
  ``sum_i y_i s_i b_i < 0``;
* ``unbounded``: a feasible ``x`` and a recession ray ``r`` with ``c.r > 0``.

Here ``s_i`` orients row ``i`` as ``s_i a_i x <= s_i b_i`` (``s_i = -1`` for
``>=`` rows, ``+1`` otherwise), and ``y_i >= 0`` is required on inequality
rows only.  The certificate rows are the explicit constraints followed by one
row per finite variable bound (lower before upper, in variable order).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .polycore import format_rational, to_rational

LE, EQ, GE = "<=", "=", ">="
_RELATIONS = {"<=": LE, "=": EQ, ">=": GE, "≤": LE, "≥": GE, "==": EQ}


def _sign(rel: str) -> int:
    return -1 if rel == GE else 1


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    rel: str
    rhs: Fraction

    def activity(self, x: Sequence[Fraction]) -> Fraction:
        return sum((a * v for a, v in zip(self.coeffs, x) if a), Fraction(0))

    def satisfied(self, x: Sequence[Fraction]) -> bool:
        lhs = self.activity(x)
        if self.rel == LE:
            return lhs <= self.rhs
        if self.rel == GE:
            return lhs >= self.rhs
        return lhs == self.rhs


class LPProblem:
    """``maximize objective . x`` subject to linear rows and optional bounds.

    Variables without bounds are free.  ``objective=None`` asks only for a
    feasible point.
    """

    def __init__(
        self,
        num_vars: int,
        objective: Optional[Sequence] = None,
        constraints: Sequence[tuple[Sequence, str, object]] = (),
        lower: Optional[Sequence] = None,
        upper: Optional[Sequence] = None,
    ):
        self.num_vars = num_vars
        self.objective = None if objective is None else tuple(to_rational(c) for c in objective)
        if self.objective is not None and len(self.objective) != num_vars:
            raise ValueError("objective length does not match variable count")
        rows = []
        for coeffs, rel, rhs in constraints:
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            if len(coeffs) != num_vars:
                raise ValueError("constraint row length does not match variable count")
            rows.append(Row(tuple(to_rational(c) for c in coeffs), _RELATIONS[rel], to_rational(rhs)))
        self.constraints: tuple[Row, ...] = tuple(rows)

        def bounds(seq):
            if seq is None:
                return (None,) * num_vars
            if len(seq) != num_vars:
                raise ValueError("bound vector length does not match variable count")
            return tuple(None if v is None else to_rational(v) for v in seq)

        self.lower = bounds(lower)
        self.upper = bounds(upper)

    def add_constraint(self, coeffs: Sequence, rel: str, rhs) -> None:
        if len(coeffs) != self.num_vars:
            raise ValueError("constraint row length does not match variable count")
        row = Row(tuple(to_rational(c) for c in coeffs), _RELATIONS[rel], to_rational(rhs))
        self.constraints = self.constraints + (row,)

    def certificate_rows(self) -> list[Row]:
        rows = list(self.constraints)
        for k in range(self.num_vars):
            unit = tuple(Fraction(int(j == k)) for j in range(self.num_vars))
            if self.lower[k] is not None:
                rows.append(Row(unit, GE, self.lower[k]))
            if self.upper[k] is not None:
                rows.append(Row(unit, LE, self.upper[k]))
        return rows

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        return len(x) == self.num_vars and all(r.satisfied(x) for r in self.certificate_rows())

    def to_json(self) -> dict:
        fmt = lambda v: None if v is None else format_rational(v)  # noqa: E731
        return {
            "num_vars": self.num_vars,
            "objective": None if self.objective is None else [fmt(c) for c in self.objective],
            "constraints": [
                {"coeffs": [fmt(c) for c in r.coeffs], "rel": r.rel, "rhs": fmt(r.rhs)}
                for r in self.constraints
            ],
            "lower": [fmt(v) for v in self.lower],
            "upper": [fmt(v) for v in self.upper],
        }

    @classmethod
    def from_json(cls, data: dict) -> "LPProblem":
        return cls(
            data["num_vars"],
            data.get("objective"),
            [(r["coeffs"], r["rel"], r["rhs"]) for r in data.get("constraints", [])],
            data.get("lower"),
            data.get("upper"),
        )


@dataclass
class LPOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    primal: Optional[list[Fraction]] = None
    value: Optional[Fraction] = None
    dual: Optional[list[Fraction]] = None  # optimality multipliers or Farkas vector
    ray: Optional[list[Fraction]] = None
    pivots: int = field(default=0, compare=False)

    def to_json(self) -> dict:
        vec = lambda v: None if v is None else [format_rational(c) for c in v]  # noqa: E731
        return {
            "status": self.status,
            "primal": vec(self.primal),
            "value": None if self.value is None else format_rational(self.value),
            "dual": vec(self.dual),
            "ray": vec(self.ray),
        }

    @classmethod
    def from_json(cls, data: dict) -> "LPOutcome":
        vec = lambda v: None if v is None else [to_rational(c) for c in v]  # noqa: E731
        return cls(
            data["status"],
            vec(data.get("primal")),
            None if data.get("value") is None else to_rational(data["value"]),
            vec(data.get("dual")),
            vec(data.get("ray")),
        )


class _Tableau:
    """Standard-form tableau ``A' z = b' >= 0, z >= 0`` with one artificial per row.

    A variable with a finite lower bound ``L`` gets a single column
    ``x = L + z``; its lower-bound row never enters the tableau and its
    multiplier is read from the column's reduced cost.  Other variables are
    split as ``x = z+ - z-``.  After the structural columns come one slack per
    inequality row, then one artificial per row.  Artificial columns are kept
    so that ``B^-1`` (and with it the dual multipliers) can be read off.
    """

    def __init__(self, problem: LPProblem):
        n = problem.num_vars
        self.n = n
        self.cert_rows = problem.certificate_rows()
        self.shift = [problem.lower[k] or Fraction(0) for k in range(n)]
        self.pos: list[int] = []
        self.neg: list[Optional[int]] = []
        col = 0
        for k in range(n):
            self.pos.append(col)
            col += 1
            if problem.lower[k] is None:
                self.neg.append(col)
                col += 1
            else:
                self.neg.append(None)
        nstruct = col

        # certificate rows: explicit constraints, then per variable lower/upper
        self.lower_row: dict[int, int] = {}  # certificate row index -> variable
        self.tab_rows: list[int] = []  # certificate row index of each tableau row
        i = len(problem.constraints)
        self.tab_rows.extend(range(i))
        for k in range(n):
            if problem.lower[k] is not None:
                self.lower_row[i] = k
                i += 1
            if problem.upper[k] is not None:
                self.tab_rows.append(i)
                i += 1

        m = len(self.tab_rows)
        self.m = m
        nslack = sum(1 for ci in self.tab_rows if self.cert_rows[ci].rel != EQ)
        self.art0 = nstruct + nslack
        self.ncols = self.art0 + m
        self.rho = []
        T = []
        s = nstruct
        for ti, ci in enumerate(self.tab_rows):
            r = self.cert_rows[ci]
            rhs = r.rhs - sum((a * self.shift[k] for k, a in enumerate(r.coeffs) if a), Fraction(0))
            rho = -1 if rhs < 0 else 1
            self.rho.append(rho)
            line = [Fraction(0)] * (self.ncols + 1)
            for k, a in enumerate(r.coeffs):
                if a:
                    line[self.pos[k]] = rho * a
                    if self.neg[k] is not None:
                        line[self.neg[k]] = -rho * a
            if r.rel != EQ:
                line[s] = Fraction(rho * _sign(r.rel))
                s += 1
            line[self.art0 + ti] = Fraction(1)
            line[-1] = rho * rhs
            T.append(line)
        self.T = T
        self.basis = [self.art0 + i for i in range(m)]
        self.pivots = 0
        self.obj: Optional[list[Fraction]] = None

    def pivot(self, r: int, c: int) -> None:
        T = self.T
        prow = T[r]
        pv = prow[c]
        if pv != 1:
            inv = 1 / pv
            for j in range(len(prow)):
                if prow[j]:
                    prow[j] *= inv
        nz = [j for j, v in enumerate(prow) if v]
        for i, line in enumerate(T):
            if i == r:
                continue
            f = line[c]
            if f:
                for j in nz:
                    line[j] -= f * prow[j]
        if self.obj is not None:
            f = self.obj[c]
            if f:
                for j in nz:
                    self.obj[j] -= f * prow[j]
        self.basis[r] = c
        self.pivots += 1

    def set_costs(self, costs: list[Fraction]) -> None:
        # reduced-cost row: obj[j] = c_j - c_B B^-1 A_j; obj[-1] = -c_B B^-1 b
        obj = list(costs) + [Fraction(0)]
        for i, b in enumerate(self.basis):
            cb = costs[b]
            if cb:
                for j, v in enumerate(self.T[i]):
                    if v:
                        obj[j] -= cb * v
        self.obj = obj

    def run(self, allowed: int) -> Optional[int]:
        """Minimize the current cost over columns ``< allowed``; return an unbounded column or None."""
        T, obj = self.T, self.obj
        while True:
            enter = next((j for j in range(allowed) if obj[j] < 0), None)
            if enter is None:
                return None
            best = None
            for i, line in enumerate(T):
                a = line[enter]
                if a > 0:
                    key = (line[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return enter
            self.pivot(best[1], enter)

    def values(self) -> list[Fraction]:
        z = [Fraction(0)] * self.ncols
        for i, b in enumerate(self.basis):
            z[b] = self.T[i][-1]
        return z

    def x_of(self, z: list[Fraction], shifted: bool = True) -> list[Fraction]:
        x = []
        for k in range(self.n):
            v = z[self.pos[k]]
            if self.neg[k] is not None:
                v -= z[self.neg[k]]
            x.append(v + self.shift[k] if shifted else v)
        return x

    def multipliers(self, phase_one: bool) -> list[Fraction]:
        """Map tableau duals back to oriented certificate-row multipliers."""
        y = [Fraction(0)] * len(self.cert_rows)
        for ti, ci in enumerate(self.tab_rows):
            rc = self.obj[self.art0 + ti]
            u = (1 - rc) if phase_one else -rc
            y[ci] = -u * self.rho[ti] * _sign(self.cert_rows[ci].rel)
        for ci, k in self.lower_row.items():
            y[ci] = self.obj[self.pos[k]]
        return y


def solve(problem: LPProblem) -> LPOutcome:
    """Solve ``problem`` exactly; see the module docstring for certificates."""
    for k in range(problem.num_vars):
        lo, hi = problem.lower[k], problem.upper[k]
        if lo is not None and hi is not None and lo > hi:
            # contradictory bounds: the two bound rows alone are a Farkas certificate
            rows = problem.certificate_rows()
            y = [Fraction(0)] * len(rows)
            base = len(problem.constraints) + sum(
                (problem.lower[j] is not None) + (problem.upper[j] is not None) for j in range(k)
            )
            y[base] = y[base + 1] = Fraction(1)
            return LPOutcome("infeasible", dual=y)
    tab = _Tableau(problem)
    m = tab.m

    # phase 1: minimize the sum of artificials
    tab.set_costs([Fraction(0)] * tab.art0 + [Fraction(1)] * m)
    tab.run(tab.ncols)
    if tab.obj[-1] != 0:  # obj[-1] == -(phase-1 optimum)
        return LPOutcome("infeasible", dual=tab.multipliers(phase_one=True), pivots=tab.pivots)

    # drive zero-level artificials out of the basis where possible
    for i in range(m):
        if tab.basis[i] >= tab.art0:
            j = next((j for j in range(tab.art0) if tab.T[i][j]), None)
            if j is not None:
                tab.pivot(i, j)

    c = problem.objective or (Fraction(0),) * tab.n
    costs = [Fraction(0)] * tab.ncols
    for k, v in enumerate(c):
        costs[tab.pos[k]] = -v
        if tab.neg[k] is not None:
            costs[tab.neg[k]] = v
    tab.set_costs(costs)
    unbounded_col = tab.run(tab.art0)
    x = tab.x_of(tab.values())
    if unbounded_col is not None:
        dz = [Fraction(0)] * tab.ncols
        dz[unbounded_col] = Fraction(1)
        for i, b in enumerate(tab.basis):
            dz[b] -= tab.T[i][unbounded_col]
        return LPOutcome("unbounded", primal=x, ray=tab.x_of(dz, shifted=False), pivots=tab.pivots)
    value = sum((a * v for a, v in zip(c, x)), Fraction(0))
    return LPOutcome("optimal", primal=x, value=value, dual=tab.multipliers(phase_one=False), pivots=tab.pivots)


def _combine(rows: list[Row], y: Sequence[Fraction], n: int) -> tuple[list[Fraction], Fraction]:
    lhs = [Fraction(0)] * n
    rhs = Fraction(0)
    for r, yi in zip(rows, y):
        if not yi:
            continue
        w = yi * _sign(r.rel)
        for k, a in enumerate(r.coeffs):
            if a:
                lhs[k] += w * a
        rhs += w * r.rhs
    return lhs, rhs


def _multipliers_ok(rows: list[Row], y: Sequence[Fraction]) -> bool:
    return len(y) == len(rows) and all(r.rel == EQ or yi >= 0 for r, yi in zip(rows, y))


def check_certificate(problem: LPProblem, outcome: LPOutcome) -> bool:
    """Re-verify ``outcome`` against ``problem`` with exact arithmetic."""
    rows = problem.certificate_rows()
    n = problem.num_vars
    c = list(problem.objective or (Fraction(0),) * n)
    try:
        if outcome.status == "infeasible":
            y = [to_rational(v) for v in outcome.dual]
            if not _multipliers_ok(rows, y):
                return False
            lhs, rhs = _combine(rows, y, n)
            return all(v == 0 for v in lhs) and rhs < 0
        x = [to_rational(v) for v in outcome.primal]
        if not problem.is_feasible_point(x):
            return False
        if outcome.status == "unbounded":
            r = [to_rational(v) for v in outcome.ray]
            if len(r) != n or problem.objective is None:
                return False
            for row in rows:
                a = row.activity(r)
                if (row.rel == LE and a > 0) or (row.rel == GE and a < 0) or (row.rel == EQ and a != 0):
                    return False
            return sum((a * v for a, v in zip(c, r)), Fraction(0)) > 0
        if outcome.status != "optimal":
            return False
        y = [to_rational(v) for v in outcome.dual]
        if not _multipliers_ok(rows, y):
            return False
        lhs, rhs = _combine(rows, y, n)
        value = sum((a * v for a, v in zip(c, x)), Fraction(0))
        if lhs != c or rhs != value:
            return False
        if outcome.value is not None and outcome.value != value:
            return False
        # complementary slackness: positive multipliers only on tight rows
        return all(yi == 0 or row.activity(x) == row.rhs for row, yi in zip(rows, y))
    except (TypeError, ValueError):
        return False
