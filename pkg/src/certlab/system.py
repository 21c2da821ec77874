"""Constraint systems ``G = {g_0 = 1, g_1, ..., g_m}`` and their preprime products."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .polycore import BudgetExceeded, Polynomial, linear_form, to_rational

DEFAULT_PREPRIME_BUDGET = 10**5

CUBE_PLUS = "cube+_{}"  # x_i^2 - x_i >= 0
CUBE_MINUS = "cube-_{}"  # x_i - x_i^2 >= 0


def cube_generator(n: int, i: int) -> Polynomial:
    """``x_i^2 - x_i``."""
    x = Polynomial.var(n, i)
    return x * x - x


@dataclass(frozen=True)
class ConstraintSystem:
    """Named constraints ``g_k >= 0`` in ``n`` variables; ``g_0 = 1`` is implicit.

    Products are addressed by multisets of 0-based constraint indices; the
    empty product stands for ``g_0``.
    """

    n: int
    constraints: tuple[tuple[str, Polynomial], ...] = ()
    objective: Optional[Polynomial] = field(default=None, compare=False)

    def __post_init__(self):
        names = [name for name, _ in self.constraints]
        if len(set(names)) != len(names):
            raise ValueError("constraint names must be unique")
        for name, g in self.constraints:
            if g.n != self.n:
                raise ValueError(f"constraint {name!r} has {g.n} variables, expected {self.n}")

    # construction

    @classmethod
    def empty(cls, n: int) -> "ConstraintSystem":
        return cls(n)

    @classmethod
    def hypercube(
        cls, n: int, extra: Iterable[tuple[str, Polynomial]] = (), objective: Optional[Polynomial] = None
    ) -> "ConstraintSystem":
        """``extra`` constraints followed by ``+-(x_i^2 - x_i)`` for every ``i``."""
        cons = list(extra)
        for i in range(n):
            g = cube_generator(n, i)
            cons.append((CUBE_PLUS.format(i), g))
            cons.append((CUBE_MINUS.format(i), -g))
        return cls(n, tuple(cons), objective)

    def with_constraints(self, extra: Iterable[tuple[str, Polynomial]]) -> "ConstraintSystem":
        return ConstraintSystem(self.n, self.constraints + tuple(extra), self.objective)

    def with_box(self, N) -> "ConstraintSystem":
        """Add ``N + x_i >= 0`` and ``N - x_i >= 0`` for all ``i``."""
        N = to_rational(N)
        extra = []
        for i in range(self.n):
            e = [0] * self.n
            e[i] = 1
            extra.append((f"box+_{i}", linear_form(e, N)))
            extra.append((f"box-_{i}", linear_form([-v for v in e], N)))
        return self.with_constraints(extra)

    # queries

    def __len__(self) -> int:
        return len(self.constraints)

    def names(self) -> list[str]:
        return [name for name, _ in self.constraints]

    def poly(self, k: int) -> Polynomial:
        return self.constraints[k][1]

    def index_of(self, name: str) -> int:
        for k, (nm, _) in enumerate(self.constraints):
            if nm == name:
                return k
        raise KeyError(name)

    def index_of_poly(self, g: Polynomial) -> int:
        for k, (_, h) in enumerate(self.constraints):
            if h == g:
                return k
        raise KeyError(str(g))

    def negation_index(self, k: int) -> Optional[int]:
        """Index of a constraint equal to ``-g_k``, if one exists."""
        target = -self.constraints[k][1]
        for j, (_, g) in enumerate(self.constraints):
            if g == target:
                return j
        return None

    def cube_indices(self) -> set[int]:
        gens = {cube_generator(self.n, i) for i in range(self.n)}
        gens |= {-g for g in gens}
        return {k for k, (_, g) in enumerate(self.constraints) if g in gens}

    @property
    def has_hypercube(self) -> bool:
        polys = {g for _, g in self.constraints}
        return all(cube_generator(self.n, i) in polys and -cube_generator(self.n, i) in polys for i in range(self.n))

    @property
    def box_bound(self) -> Optional[Fraction]:
        """``N`` if ``N +- x_i`` are present for every ``i`` (smallest such ``N``), else None."""
        if self.n == 0:
            return None
        polys = {g for _, g in self.constraints}
        candidates = set()
        for g in polys:
            if g.total_degree() == 1 and len(g) == 2:
                c = g.coeff((0,) * self.n)
                if c > 0:
                    candidates.add(c)
        for N in sorted(candidates):
            ok = True
            for i in range(self.n):
                x = Polynomial.var(self.n, i)
                if x + N not in polys or N - x not in polys:
                    ok = False
                    break
            if ok:
                return N
        return None

    @property
    def has_box(self) -> bool:
        return self.box_bound is not None

    def product(self, multiset: Sequence[int]) -> Polynomial:
        out = Polynomial.constant(self.n, 1)
        for k in multiset:
            out = out * self.constraints[k][1]
        return out

    def product_label(self, multiset: Sequence[int]) -> str:
        if not multiset:
            return "1"
        return "*".join(self.constraints[k][0] for k in multiset)

    def feasible_cube_points(self) -> list[tuple[int, ...]]:
        pts = []
        for v in itertools.product((0, 1), repeat=self.n):
            if all(g.eval(v) >= 0 for _, g in self.constraints):
                pts.append(v)
        return pts

    # serialization

    def to_json(self) -> dict:
        data = {
            "n": self.n,
            "constraints": [{"name": name, "poly": g.to_json()} for name, g in self.constraints],
        }
        if self.objective is not None:
            data["objective"] = self.objective.to_json()
        return data

    @classmethod
    def from_json(cls, data: Mapping) -> "ConstraintSystem":
        try:
            n = int(data["n"])
            cons = []
            for entry in data.get("constraints", []):
                cons.append((str(entry["name"]), Polynomial.from_json(entry["poly"])))
            if data.get("hypercube"):
                base = cls.hypercube(n, cons)
                cons = list(base.constraints)
            obj = data.get("objective")
            return cls(n, tuple(cons), None if obj is None else Polynomial.from_json(obj))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed constraint system JSON: {exc}") from exc


def preprime_products(
    G: ConstraintSystem,
    degree_cap: int,
    budget: int = DEFAULT_PREPRIME_BUDGET,
    indices: Optional[Sequence[int]] = None,
) -> list[tuple[tuple[int, ...], Polynomial]]:
    """All products ``g_{k1} ... g_{kr}`` of total degree at most ``degree_cap``.

    Multisets are nondecreasing index tuples; the empty tuple is ``g_0 = 1``.
    Output order: by multiset size, then lexicographically.  Constraints of
    degree zero would make the preprime infinite and are used at most once.
    ``indices`` restricts which constraints may appear.
    """
    pool = list(range(len(G))) if indices is None else sorted(set(indices))
    deg = {k: max(G.poly(k).total_degree(), 0) for k in pool}
    out: list[tuple[tuple[int, ...], Polynomial]] = [((), Polynomial.constant(G.n, 1))]
    frontier: list[tuple[tuple[int, ...], int, Polynomial]] = [((), 0, out[0][1])]
    while frontier:
        nxt = []
        for ms, d, poly in frontier:
            start = ms[-1] if ms else None
            for k in pool:
                if start is not None and k < start:
                    continue
                if deg[k] == 0 and k in ms:
                    continue
                nd = d + deg[k]
                if nd > degree_cap:
                    continue
                new = (ms + (k,), nd, poly * G.poly(k))
                nxt.append(new)
                out.append((new[0], new[2]))
                if len(out) > budget:
                    raise BudgetExceeded(f"more than {budget} preprime products below degree {degree_cap}")
        frontier = nxt
    return out
