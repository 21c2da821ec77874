"""Newton polytope combinatorics over exact rationals.

Vertices, simplex tests, barycentric coordinates, lattice points and
maximal mediated sets, all decided with exact arithmetic (LPs via
:mod:`certlab.exactlp`, linear systems via Fraction Gaussian elimination).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from . import exactlp
from .polycore import BudgetExceeded, Polynomial

DEFAULT_LATTICE_BUDGET = 10**6

Point = tuple[int, ...]


@dataclass(frozen=True)
class PointSet:
    """Finite set of integer points in ``Z^dim``, stored sorted and deduplicated."""

    dim: int
    points: tuple[Point, ...]

    def __init__(self, dim: int, points: Iterable[Sequence[int]]):
        pts = sorted({tuple(int(c) for c in p) for p in points})
        for p in pts:
            if len(p) != dim:
                raise ValueError(f"point {p} does not have dimension {dim}")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "points", tuple(pts))

    @classmethod
    def of(cls, points: Iterable[Sequence[int]]) -> "PointSet":
        pts = [tuple(p) for p in points]
        if not pts:
            raise ValueError("cannot infer dimension of an empty point list")
        return cls(len(pts[0]), pts)

    @classmethod
    def support(cls, p: Polynomial) -> "PointSet":
        return cls(p.n, p.support())

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, q) -> bool:
        return tuple(q) in set(self.points)

    def as_set(self) -> frozenset[Point]:
        return frozenset(self.points)

    def to_json(self) -> dict:
        return {"dim": self.dim, "points": [list(p) for p in self.points]}

    @classmethod
    def from_json(cls, data: dict) -> "PointSet":
        try:
            return cls(int(data["dim"]), data["points"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed point set JSON: {exc}") from exc


def is_even(p: Sequence[int]) -> bool:
    return all(c % 2 == 0 for c in p)


# exact linear algebra


def _rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    rows = [list(map(Fraction, v)) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def affinely_independent(points: Sequence[Sequence[int]]) -> bool:
    if len(points) <= 1:
        return True
    base = points[0]
    diffs = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    return _rank(diffs) == len(diffs)


def in_convex_hull(q: Sequence, points: Sequence[Sequence[int]]) -> bool:
    """Exact LP test: is ``q`` a convex combination of ``points``?"""
    if not points:
        return False
    k = len(points)
    dim = len(q)
    rows = [([1] * k, "=", 1)]
    for c in range(dim):
        rows.append(([p[c] for p in points], "=", q[c]))
    lp = exactlp.LPProblem(k, None, rows, lower=[0] * k)
    return exactlp.solve(lp).status == "optimal"


# vertices and simplices


def newton_vertices(p: Polynomial) -> PointSet:
    """Support points of ``p`` that are vertices of its Newton polytope."""
    if p.is_zero():
        raise ValueError("the zero polynomial has no Newton polytope")
    return vertices_of(PointSet.support(p))


def vertices_of(ps: PointSet) -> PointSet:
    pts = list(ps.points)
    verts = [q for i, q in enumerate(pts) if not in_convex_hull(q, pts[:i] + pts[i + 1 :])]
    return PointSet(ps.dim, verts)


class SimplexRejected(ValueError):
    """Raised when a point set is not an even simplex; ``reason`` names the failure."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class SimplexData:
    vertices: tuple[Point, ...]
    even_flags: tuple[bool, ...]

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @property
    def rank(self) -> int:
        """Affine dimension ``r`` of the simplex (``len(vertices) - 1``)."""
        return len(self.vertices) - 1

    def midpoints(self) -> set[Point]:
        out = set()
        for u, v in itertools.combinations(self.vertices, 2):
            out.add(tuple((a + b) // 2 for a, b in zip(u, v)))
        return out

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices]}


def is_simplex_with_even_vertices(ps: PointSet) -> SimplexData:
    """Return the simplex data or raise :class:`SimplexRejected`.

    Reasons are ``"empty"``, ``"dependent"`` (affinely dependent points) and
    ``"odd_vertex"``.
    """
    pts = list(ps.points)
    if not pts:
        raise SimplexRejected("empty")
    if not affinely_independent(pts):
        raise SimplexRejected("dependent", f"{len(pts)} points are affinely dependent")
    flags = tuple(is_even(p) for p in pts)
    if not all(flags):
        odd = next(p for p, f in zip(pts, flags) if not f)
        raise SimplexRejected("odd_vertex", f"vertex {odd} has an odd coordinate")
    return SimplexData(tuple(pts), flags)


class _BarycentricSolver:
    """Precomputed left inverse of ``[V^T; 1]`` for repeated barycentric solves."""

    def __init__(self, s: SimplexData):
        self.s = s
        k = len(s.vertices)
        rows = [[Fraction(v[c]) for v in s.vertices] for c in range(s.dim)] + [[Fraction(1)] * k]
        self.rows = rows
        # choose k independent rows and invert that square block
        chosen: list[int] = []
        for r in range(len(rows)):
            if _rank([rows[i] for i in chosen + [r]]) == len(chosen) + 1:
                chosen.append(r)
            if len(chosen) == k:
                break
        self.chosen = chosen
        inv = _invert([rows[i] for i in chosen])
        # integer form: lambda = (int_inv @ rhs) / den
        den = 1
        for row in inv:
            for v in row:
                den = den * v.denominator // math.gcd(den, v.denominator)
        self.den = den
        self.int_inv = [[int(v * den) for v in row] for row in inv]
        self.int_rows = [[int(v) for v in row] for row in rows]

    def solve_scaled(self, q: Sequence[int]) -> Optional[list[int]]:
        """``den * lambda`` as integers, or None outside the affine hull."""
        rhs = [int(c) for c in q] + [1]
        sub = [rhs[i] for i in self.chosen]
        lam = [sum(a * b for a, b in zip(row, sub)) for row in self.int_inv]
        for row, target in zip(self.int_rows, rhs):
            if sum(a * b for a, b in zip(row, lam)) != target * self.den:
                return None
        return lam

    def solve(self, q: Sequence[int]) -> Optional[list[Fraction]]:
        lam = self.solve_scaled(q)
        return None if lam is None else [Fraction(v, self.den) for v in lam]


def _invert(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c])
        aug[c], aug[piv] = aug[piv], aug[c]
        pv = aug[c][c]
        aug[c] = [v / pv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def barycentric(s: SimplexData, q: Sequence[int]) -> tuple[list[Fraction], bool]:
    """Exact barycentric coordinates of ``q`` and whether all are strictly positive.

    Raises ``ValueError`` if ``q`` is outside the affine hull of the simplex.
    """
    if len(q) != s.dim:
        raise ValueError(f"point has dimension {len(q)}, simplex has {s.dim}")
    lam = _BarycentricSolver(s).solve(q)
    if lam is None:
        raise ValueError(f"point {tuple(q)} is outside the affine hull of the simplex")
    return lam, all(v > 0 for v in lam)


# lattice points and mediated sets


def lattice_points_in_hull(ps: PointSet, budget: int = DEFAULT_LATTICE_BUDGET) -> PointSet:
    """All integer points of ``conv(ps)``, by bounding-box enumeration.

    Raises :class:`BudgetExceeded` if the box holds more than ``budget`` points.
    """
    pts = list(ps.points)
    if not pts:
        raise ValueError("empty point set")
    lo = [min(p[c] for p in pts) for c in range(ps.dim)]
    hi = [max(p[c] for p in pts) for c in range(ps.dim)]
    box = 1
    for a, b in zip(lo, hi):
        box *= b - a + 1
    if box > budget:
        raise BudgetExceeded(f"bounding box holds {box} points, budget is {budget}")
    candidates = itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi)))
    if affinely_independent(pts):
        solver = _BarycentricSolver(SimplexData(tuple(pts), tuple(is_even(p) for p in pts)))

        def member(q):
            lam = solver.solve_scaled(q)
            return lam is not None and all(v >= 0 for v in lam)

    else:

        def member(q):
            return in_convex_hull(q, pts)

    return PointSet(ps.dim, [q for q in candidates if member(q)])


def _is_mediated(p: Point, even: set[Point]) -> bool:
    for u in even:
        v = tuple(2 * a - b for a, b in zip(p, u))
        if v != u and v in even:
            return True
    return False


def maximal_mediated_set(
    A: PointSet,
    budget: int = DEFAULT_LATTICE_BUDGET,
    order: Optional[Callable[[Point], object]] = None,
) -> PointSet:
    """Largest ``M`` with ``A <= M <= conv(A) ∩ Z^n`` such that every point of
    ``M`` outside ``A`` is the midpoint of two distinct even points of ``M``.

    Computed by deleting unmediated points from ``conv(A) ∩ Z^n`` until
    nothing changes.  ``order`` is an optional sort key for the deletion sweep;
    the result does not depend on it.
    """
    verts = vertices_of(A)
    if not all(is_even(v) for v in verts):
        raise ValueError("maximal mediated sets need a polytope with even vertices")
    anchor = A.as_set()
    current = set(lattice_points_in_hull(A, budget).points)
    changed = True
    while changed:
        changed = False
        sweep = sorted(current - anchor, key=order) if order else sorted(current - anchor)
        even = {q for q in current if is_even(q)}
        for p in sweep:
            if not _is_mediated(p, even):
                current.discard(p)
                even.discard(p)
                changed = True
    return PointSet(A.dim, current)


H_SIMPLEX, M_SIMPLEX, NEITHER = "H_simplex", "M_simplex", "neither"


def classify_simplex(A: PointSet, budget: int = DEFAULT_LATTICE_BUDGET) -> str:
    """``H_simplex`` if every lattice point is mediated, ``M_simplex`` if only the
    vertices and pairwise vertex midpoints are, else ``neither``."""
    s = is_simplex_with_even_vertices(vertices_of(A))
    verts = PointSet(A.dim, s.vertices)
    mms = maximal_mediated_set(verts, budget).as_set()
    if mms == lattice_points_in_hull(verts, budget).as_set():
        return H_SIMPLEX
    if mms == set(s.vertices) | s.midpoints():
        return M_SIMPLEX
    return NEITHER
