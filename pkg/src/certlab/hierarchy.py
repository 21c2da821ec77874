"""Certificates across the SOS, SDSOS, SONC and Sherali-Adams hierarchies.

A certificate for ``f - lambda >= 0`` on ``{g >= 0 : g in G}`` is a list of
entries ``(ground, product)``: ``ground`` is an axiomatically nonnegative
polynomial of the certificate's kind and ``product`` a multiset of
constraint indices (empty = ``g_0 = 1``).  Verification checks every ground
element, the degree budget, and the identity
``f - lambda == sum ground * prod g`` exactly in ``R[x]``.

Degree budgets: SOS, SDSOS and SONC entries need
``deg(ground * product) <= degree``.  Sherali-Adams follows the historical
convention where level ``degree`` allows juntas and products whose
multilinear reduction has degree at most ``degree // 2``.

Besides the four ground sets, an :class:`IdealMultiplier` entry carries an
arbitrary polynomial ``q`` against a single constraint ``g`` whose negation
``-g`` is also in ``G``.  Such a pair encodes the equation ``g = 0``, so
``q * g`` is a legitimate term of any certificate; this is how the cube
equations ``x_i^2 - x_i = 0`` surface explicitly.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import circuitcert, cubecert, exactlp, matrixkit, polytope
from .circuitcert import CircuitPolynomial
from .cubecert import JuntaTerm
from .matrixkit import SymRationalMatrix
from .polycore import Exponent, Polynomial, format_rational, to_rational
from .system import ConstraintSystem, cube_generator, preprime_products

__all__ = [
    "SOS",
    "SDSOS",
    "SONC",
    "SA",
    "PUTINAR",
    "SCHMUEDGEN",
    "SOSGram",
    "SDSOSGram",
    "Circuit",
    "Junta",
    "IdealMultiplier",
    "CertEntry",
    "Certificate",
    "VerificationReport",
    "ConstraintSystem",
    "preprime_products",
    "verify",
    "convert_sdsos_to_sonc",
    "convert_sonc_to_sa",
    "sa_certificate",
    "witness_signed_quadric",
    "witness_generalized_motzkin",
    "witness_cpop",
    "separation_report",
]

SOS, SDSOS, SONC, SA = "SOS", "SDSOS", "SONC", "SA"
KINDS = (SOS, SDSOS, SONC, SA)
PUTINAR, SCHMUEDGEN = cubecert.PUTINAR, cubecert.SCHMUEDGEN


def _exps(monomials) -> tuple[Exponent, ...]:
    return tuple(tuple(int(k) for k in m) for m in monomials)


# ground elements


@dataclass(frozen=True)
class SOSGram:
    """``z^T G z`` with ``G`` PSD."""

    monomials: tuple[Exponent, ...]
    gram: SymRationalMatrix
    tag = "sos_gram"

    def polynomial(self, n: int) -> Polynomial:
        if not self.monomials:
            return Polynomial.zero(n)
        return matrixkit.gram_polynomial(self.monomials, self.gram)

    def check(self) -> Optional[str]:
        if self.gram.size != len(self.monomials):
            return "Gram size does not match the monomial vector"
        res = matrixkit.psd_check(self.gram)
        if not res.psd:
            return "Gram matrix is not PSD (witness " + ",".join(map(format_rational, res.witness)) + ")"
        return None

    def to_json(self) -> dict:
        return {"type": self.tag, "monomials": [list(m) for m in self.monomials], "gram": self.gram.to_json()}


@dataclass(frozen=True)
class SDSOSGram:
    """``z^T M z`` with ``M`` scaled diagonally dominant; ``scaling`` may be supplied or searched."""

    monomials: tuple[Exponent, ...]
    gram: SymRationalMatrix
    scaling: Optional[tuple[Fraction, ...]] = None
    tag = "sdsos_gram"

    def polynomial(self, n: int) -> Polynomial:
        if not self.monomials:
            return Polynomial.zero(n)
        return matrixkit.gram_polynomial(self.monomials, self.gram)

    def resolved_scaling(self) -> Optional[list[Fraction]]:
        if self.scaling is not None:
            d = list(self.scaling)
            if len(d) == self.gram.size and all(v > 0 for v in d) and matrixkit.is_dd(self.gram.congruence(d)):
                return d
            return None
        res = matrixkit.is_sdd(self.gram)
        return res.scaling if res.sdd else None

    def check(self) -> Optional[str]:
        if self.gram.size != len(self.monomials):
            return "Gram size does not match the monomial vector"
        if self.resolved_scaling() is None:
            return "matrix is not scaled diagonally dominant" + (" under the given scaling" if self.scaling else "")
        return None

    def to_json(self) -> dict:
        data = {"type": self.tag, "monomials": [list(m) for m in self.monomials], "gram": self.gram.to_json()}
        if self.scaling is not None:
            data["scaling"] = [format_rational(v) for v in self.scaling]
        return data


@dataclass(frozen=True)
class Circuit:
    weight: Fraction
    circuit: CircuitPolynomial
    tag = "circuit"

    def polynomial(self, n: int) -> Polynomial:
        return self.circuit.polynomial() * self.weight

    def check(self) -> Optional[str]:
        if self.weight < 0:
            return "negative circuit weight"
        if not circuitcert.is_nonnegative_circuit(self.circuit):
            return "inner coefficient exceeds the circuit number"
        return None

    def to_json(self) -> dict:
        return {"type": self.tag, "weight": format_rational(self.weight), "circuit": self.circuit.to_json()}


@dataclass(frozen=True)
class Junta:
    terms: tuple[JuntaTerm, ...]
    tag = "junta"

    def polynomial(self, n: int) -> Polynomial:
        return cubecert.junta_polynomial(self.terms, n)

    def check(self) -> Optional[str]:
        if any(t.alpha < 0 for t in self.terms):
            return "negative junta coefficient"
        if any(t.I & t.J for t in self.terms):
            return "junta term with overlapping I and J"
        return None

    def to_json(self) -> dict:
        return {"type": self.tag, "terms": [t.to_json() for t in self.terms]}


@dataclass(frozen=True)
class IdealMultiplier:
    """Unrestricted multiplier ``q`` of an equation constraint (see module docstring)."""

    poly: Polynomial
    tag = "ideal"

    def polynomial(self, n: int) -> Polynomial:
        return self.poly

    def check(self) -> Optional[str]:
        return None

    def to_json(self) -> dict:
        return {"type": self.tag, "poly": self.poly.to_json()}


GroundElement = Union[SOSGram, SDSOSGram, Circuit, Junta, IdealMultiplier]
_NATIVE = {SOS: SOSGram, SDSOS: SDSOSGram, SONC: Circuit, SA: Junta}


def ground_from_json(data: dict) -> GroundElement:
    kind = data.get("type")
    if kind == "sos_gram":
        return SOSGram(_exps(data["monomials"]), SymRationalMatrix.from_json(data["gram"]))
    if kind == "sdsos_gram":
        sc = data.get("scaling")
        return SDSOSGram(
            _exps(data["monomials"]),
            SymRationalMatrix.from_json(data["gram"]),
            None if sc is None else tuple(to_rational(v) for v in sc),
        )
    if kind == "circuit":
        return Circuit(to_rational(data["weight"]), CircuitPolynomial.from_json(data["circuit"]))
    if kind == "junta":
        return Junta(tuple(JuntaTerm.from_json(t) for t in data["terms"]))
    if kind == "ideal":
        return IdealMultiplier(Polynomial.from_json(data["poly"]))
    raise ValueError(f"unknown ground element type {kind!r}")


@dataclass(frozen=True)
class CertEntry:
    ground: GroundElement
    product: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"ground": self.ground.to_json(), "product": list(self.product)}


@dataclass
class Certificate:
    kind: str
    shape: str
    degree: int
    entries: list[CertEntry] = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown certificate kind {self.kind!r}")
        if self.shape not in (PUTINAR, SCHMUEDGEN):
            raise ValueError(f"unknown certificate shape {self.shape!r}")

    def add(self, ground: GroundElement, product: Sequence[int] = ()) -> "Certificate":
        self.entries.append(CertEntry(ground, tuple(sorted(product))))
        return self

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "shape": self.shape,
            "degree": self.degree,
            "entries": [e.to_json() for e in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Certificate":
        try:
            kind = str(data["kind"]).upper()
            shape = str(data.get("shape", PUTINAR)).lower()
            entries = [
                CertEntry(ground_from_json(e["ground"]), tuple(sorted(int(k) for k in e.get("product", []))))
                for e in data["entries"]
            ]
            return cls(kind, shape, int(data["degree"]), entries)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed certificate JSON: {exc}") from exc


# verification


@dataclass
class EntryResult:
    ok: bool
    reasons: list[str]

    def to_json(self) -> dict:
        return {"ok": self.ok, "reasons": self.reasons}


@dataclass
class VerificationReport:
    accepted: bool
    entries: list[EntryResult]
    residual: Polynomial

    def __bool__(self) -> bool:
        return self.accepted

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "entries": [e.to_json() for e in self.entries],
            "residual": self.residual.to_json(),
        }


def _check_entry(entry: CertEntry, cert: Certificate, G: ConstraintSystem, n: int) -> tuple[list[str], Polynomial]:
    reasons = []
    ground = entry.ground
    if any(not 0 <= k < len(G) for k in entry.product):
        return [f"product index out of range: {list(entry.product)}"], Polynomial.zero(n)
    if cert.shape == PUTINAR and len(entry.product) > 1:
        reasons.append("Putinar-shape entries use at most one constraint")
    prod = G.product(entry.product)

    if isinstance(ground, IdealMultiplier):
        if len(entry.product) != 1 or G.negation_index(entry.product[0]) is None:
            reasons.append("ideal multipliers need a single constraint whose negation is also in G")
    elif not isinstance(ground, _NATIVE[cert.kind]):
        reasons.append(f"{ground.tag} elements are not allowed in {cert.kind} certificates")
    else:
        why = ground.check()
        if why:
            reasons.append(why)

    gpoly = ground.polynomial(n)
    if gpoly.n != n:
        return reasons + [f"ground element has {gpoly.n} variables, expected {n}"], Polynomial.zero(n)
    term = gpoly * prod

    if cert.kind == SA and not isinstance(ground, IdealMultiplier):
        d = cert.degree // 2
        if isinstance(ground, Junta):
            wide = [t for t in ground.terms if len(t.I | t.J) > d]
            if wide:
                reasons.append(f"junta term on {len(wide[0].I | wide[0].J)} variables exceeds SA level {d}")
        if term.multilinear_reduce().total_degree() > d:
            reasons.append(f"multilinear degree {term.multilinear_reduce().total_degree()} exceeds SA level {d}")
    elif cert.kind != SA and term.total_degree() > cert.degree:
        reasons.append(f"degree {term.total_degree()} exceeds budget {cert.degree}")
    return reasons, term


def verify(f: Polynomial, lam, G: ConstraintSystem, cert: Certificate) -> VerificationReport:
    """Check ``f - lam == sum ground * prod g`` with every entry valid and within budget."""
    lam = to_rational(lam)
    n = f.n
    if G.n != n:
        raise ValueError("polynomial and constraint system disagree on the number of variables")
    total = Polynomial.zero(n)
    results = []
    for entry in cert.entries:
        reasons, term = _check_entry(entry, cert, G, n)
        results.append(EntryResult(not reasons, reasons))
        total = total + term
    residual = f - lam - total
    accepted = all(r.ok for r in results) and residual.is_zero()
    return VerificationReport(accepted, results, residual)


# converters


def convert_sdsos_to_sonc(cert: Certificate) -> Certificate:
    """Split every sdd Gram element into binomial squares, each a nonnegative circuit.

    ``w (a x^A + b x^B)^2`` has vertices ``2A``, ``2B`` and inner term
    ``2wab x^{A+B}``, whose circuit number is exactly ``2w|ab|``.  Products
    and ideal multipliers pass through unchanged.
    """
    if cert.kind != SDSOS:
        raise ValueError("convert_sdsos_to_sonc expects an SDSOS certificate")
    out = Certificate(SONC, cert.shape, cert.degree)
    for entry in cert.entries:
        g = entry.ground
        if isinstance(g, IdealMultiplier):
            out.entries.append(entry)
            continue
        if not isinstance(g, SDSOSGram):
            raise ValueError(f"unexpected {g.tag} element in an SDSOS certificate")
        d = g.resolved_scaling()
        if d is None:
            raise ValueError("SDSOS element is not scaled diagonally dominant; verify the input first")
        for sq in matrixkit.sdd_to_binomial_squares(g.gram, d, g.monomials):
            circ = circuitcert.binomial_square_circuit(sq)
            if circ is not None:
                out.entries.append(CertEntry(Circuit(Fraction(1), circ), entry.product))
    return out


def circuit_juntas(c: CircuitPolynomial) -> list[JuntaTerm]:
    """Junta form of a nonnegative circuit.

    Degenerate circuits (sums of monomial squares) are split per monomial so
    that every term stays within the circuit's degree; otherwise the whole
    circuit is tabulated on the variables it uses.
    """
    if c.degenerate or c.inner_coeff == 0:
        return [
            JuntaTerm(frozenset(i for i, k in enumerate(v) if k), frozenset(), coef)
            for v, coef in zip(c.vertices, c.vertex_coeffs)
        ]
    return cubecert.circuit_to_junta(c)


def convert_sonc_to_sa(cert: Certificate, G: ConstraintSystem) -> Certificate:
    """Replace each circuit by the junta it equals on the cube, doubling the degree.

    The difference ``w * c - junta`` vanishes on the cube, so it equals
    ``sum q_i (x_i^2 - x_i)``; after multiplying by the entry's constraint
    product these ``q_i`` become ideal multipliers on ``x_i^2 - x_i``.
    """
    if cert.kind != SONC:
        raise ValueError("convert_sonc_to_sa expects a SONC certificate")
    if not G.has_hypercube:
        raise ValueError("convert_sonc_to_sa needs the hypercube equations in the constraint system")
    n = G.n
    out = Certificate(SA, cert.shape, 2 * cert.degree)
    corrections: dict[int, Polynomial] = {}
    for entry in cert.entries:
        g = entry.ground
        if isinstance(g, IdealMultiplier):
            out.entries.append(entry)
            continue
        if not isinstance(g, Circuit):
            raise ValueError(f"unexpected {g.tag} element in a SONC certificate")
        if g.weight == 0:
            continue
        terms = [JuntaTerm(t.I, t.J, t.alpha * g.weight) for t in circuit_juntas(g.circuit)]
        terms = cubecert.canonical_juntas(terms)
        out.entries.append(CertEntry(Junta(tuple(terms)), entry.product))
        diff = g.polynomial(n) - cubecert.junta_polynomial(terms, n)
        prod = G.product(entry.product)
        for i, q in diff.cube_ideal_quotients().items():
            corrections[i] = corrections.get(i, Polynomial.zero(n)) + q * prod
    for i in sorted(corrections):
        q = corrections[i]
        if q:
            out.entries.append(CertEntry(IdealMultiplier(q), (G.index_of_poly(cube_generator(n, i)),)))
    return out


def sa_certificate(result: cubecert.SAResult) -> Certificate:
    """Package an optimal :func:`cubecert.sa_solve` result as a certificate."""
    if result.status != "optimal":
        raise ValueError(f"no certificate for an {result.status} Sherali-Adams LP")
    cert = Certificate(SA, result.shape, result.degree)
    groups: dict[tuple[int, ...], list[JuntaTerm]] = {}
    for term, ms in result.terms:
        groups.setdefault(ms, []).append(term)
    for ms in sorted(groups, key=lambda m: (len(m), m)):
        cert.add(Junta(tuple(cubecert.canonical_juntas(groups[ms]))), ms)
    for k in sorted(result.ideal):
        cert.add(IdealMultiplier(result.ideal[k]), (k,))
    return cert


# witness families


def witness_signed_quadric(n: int) -> Polynomial:
    """``N_n = (1 - x_1 - ... - x_n)^2``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    lin = Polynomial.constant(n, 1)
    for i in range(n):
        lin = lin - Polynomial.var(n, i)
    return lin * lin


def witness_generalized_motzkin(n: int) -> Polynomial:
    """``M_n = 1 + sum_j x^{2(e + e_j)} - (n + 1) x^{2e}`` with ``e`` the all-ones vector."""
    if n < 2:
        raise ValueError("the generalized Motzkin polynomial needs n >= 2")
    terms = {(0,) * n: Fraction(1), (2,) * n: Fraction(-(n + 1))}
    for j in range(n):
        terms[tuple(4 if i == j else 2 for i in range(n))] = Fraction(1)
    return Polynomial(n, terms)


SOS_FRIENDLY, SONC_FRIENDLY = "sos_friendly", "sonc_friendly"


def witness_cpop(kind: str, n: int, t: int) -> tuple[Polynomial, ConstraintSystem]:
    """Objective plus one ball constraint ``(R^2 - |x|^2)^{2k+1}`` with ``2k+1 >= t+1``.

    ``sos_friendly`` uses ``N_n`` and ``R^2 = 1`` (the ball holds the unit
    1-ball, hence every zero of ``N_n`` on it); ``sonc_friendly`` uses ``M_n``
    and ``R^2 = n`` (the ball holds ``{-1, 1}^n``).  The constraint degree
    ``2(2k+1)`` is at least ``2t + 2``.
    """
    if n < 2 or t < 1:
        raise ValueError("witness_cpop needs n >= 2 and t >= 1")
    k = math.ceil(t / 2)
    if kind == SOS_FRIENDLY:
        f, R2 = witness_signed_quadric(n), 1
    elif kind == SONC_FRIENDLY:
        f, R2 = witness_generalized_motzkin(n), n
    else:
        raise ValueError(f"unknown witness kind {kind!r}")
    sq = Polynomial.zero(n)
    for i in range(n):
        sq = sq + Polynomial.var(n, i) ** 2
    g = (Polynomial.constant(n, R2) - sq) ** (2 * k + 1)
    return f, ConstraintSystem(n, (("ball", g),), f)


def signed_quadric_sos_certificate(n: int) -> Certificate:
    """Rank-one Gram certificate ``N_n = v v^T`` over ``z = (1, x_1, ..., x_n)``."""
    basis = [(0,) * n] + [tuple(int(i == j) for j in range(n)) for i in range(n)]
    v = [1] + [-1] * n
    G = SymRationalMatrix([[a * b for b in v] for a in v])
    return Certificate(SOS, PUTINAR, 2, [CertEntry(SOSGram(tuple(basis), G))])


def separation_report(n: int, t: int = 1) -> dict:
    """Machine-checked facts separating SOS and SONC at ``n`` variables.

    (a) ``N_n`` has a degree-2 SOS certificate on its constrained system;
    (b) ``N_n`` is not SONC, with a verified Farkas certificate;
    (c) ``M_n`` has a one-circuit SONC certificate of degree ``2n + 2``;
    (d) ``M_n`` is not SOS because its inner exponent misses the maximal
    mediated set of the M-simplex ``New(M_n)``.
    Supporting circuit data and zero-set checks are included.
    """
    N = witness_signed_quadric(n)
    M = witness_generalized_motzkin(n)
    fN, GN = witness_cpop(SOS_FRIENDLY, n, t)
    fM, GM = witness_cpop(SONC_FRIENDLY, n, t)

    sos_cert = signed_quadric_sos_certificate(n)
    rep_a = verify(fN, 0, GN, sos_cert)

    qs = circuitcert.quadratic_sonc_membership(N)
    farkas_ok = (not qs.member) and exactlp.check_certificate(qs.sdd.problem, qs.sdd.outcome)

    circ = circuitcert.detect_circuit(M)
    sonc_cert = Certificate(SONC, PUTINAR, 2 * n + 2, [CertEntry(Circuit(Fraction(1), circ))])
    rep_c = verify(fM, 0, GM, sonc_cert)

    shape = polytope.classify_simplex(polytope.PointSet(n, circ.vertices))
    m_sos = circuitcert.circuit_is_sos(circ)
    mms = polytope.maximal_mediated_set(polytope.PointSet(n, circ.vertices))

    sign_zeros = all(M.eval(s) == 0 for s in itertools.product((-1, 1), repeat=n))
    unit_zeros = all(N.eval([int(i == j) for j in range(n)]) == 0 for i in range(n))

    facts = {
        "a_signed_quadric_sos": {
            "passed": rep_a.accepted,
            "certificate": sos_cert.to_json(),
            "system": {"constraint_degree": GN.poly(0).total_degree()},
        },
        "b_signed_quadric_not_sonc": {
            "passed": farkas_ok,
            "sonc": qs.member,
            "gram": qs.gram.to_json(),
            "farkas": [format_rational(v) for v in qs.sdd.outcome.dual],
            "farkas_verified": farkas_ok,
        },
        "c_motzkin_sonc": {
            "passed": rep_c.accepted,
            "certificate": sonc_cert.to_json(),
            "system": {"constraint_degree": GM.poly(0).total_degree()},
        },
        "d_motzkin_not_sos": {
            "passed": (not m_sos) and shape == polytope.M_SIMPLEX and circ.inner_exp not in mms.as_set(),
            "simplex": shape,
            "inner_exp": list(circ.inner_exp),
            "mediated_set": [list(p) for p in mms.points],
        },
    }
    support = {
        "lambdas": [format_rational(v) for v in circ.lambdas],
        "inner_coeff": format_rational(circ.inner_coeff),
        "inner_vs_circuit_number": circuitcert.circuit_number_compare(circ),
        "motzkin_vanishes_on_sign_vectors": sign_zeros,
        "signed_quadric_vanishes_on_unit_vectors": unit_zeros,
    }
    return {
        "n": n,
        "t": t,
        "facts": facts,
        "support": support,
        "all_passed": all(f["passed"] for f in facts.values())
        and sign_zeros
        and unit_zeros
        and support["inner_vs_circuit_number"] == 0,
    }


def dumps(data) -> str:
    """Canonical JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
