"""Replaying Sherali-Adams certificates as Schmuedgen-shape SONC certificates.

A junta term ``alpha x_I (1-x)_J`` times a constraint product is the constant
circuit ``alpha`` times a longer product that also uses the box constraints
``x_i >= 0`` and ``1 - x_i >= 0``.  The cube's ideal multipliers carry over
unchanged, so every SA certificate becomes a SONC certificate on the same
system extended by those box constraints.
"""

import random
from fractions import Fraction

import pytest

from certlab import cubecert
from certlab.circuitcert import detect_circuit
from certlab.hierarchy import (
    SA,
    SCHMUEDGEN,
    SONC,
    CertEntry,
    Certificate,
    Circuit,
    IdealMultiplier,
    Junta,
    sa_certificate,
    verify,
)
from certlab.polycore import Polynomial, linear_form
from certlab.system import ConstraintSystem

from gen import random_polynomial


def with_unit_box(G):
    n = G.n
    extra = []
    for i in range(n):
        x = Polynomial.var(n, i)
        extra.append((f"lo_{i}", x))
        extra.append((f"hi_{i}", 1 - x))
    return G.with_constraints(extra)


def replay_as_sonc(cert, G):
    H = with_unit_box(G)
    lo = {i: H.index_of(f"lo_{i}") for i in range(G.n)}
    hi = {i: H.index_of(f"hi_{i}") for i in range(G.n)}
    out = Certificate(SONC, SCHMUEDGEN, 0)
    top = 0
    for e in cert.entries:
        if isinstance(e.ground, IdealMultiplier):
            out.entries.append(e)
            top = max(top, (e.ground.poly * G.product(e.product)).total_degree())
            continue
        assert isinstance(e.ground, Junta)
        for t in e.ground.terms:
            one = detect_circuit(Polynomial.constant(G.n, 1))
            prod = tuple(sorted(e.product + tuple(lo[i] for i in t.I) + tuple(hi[j] for j in t.J)))
            out.add(Circuit(t.alpha, one), prod)
            top = max(top, H.product(prod).total_degree())
    out.degree = top
    return out, H


@pytest.mark.parametrize("seed", range(12))
def test_sa_certificates_replay_as_sonc(seed):
    rng = random.Random(900 + seed)
    n = rng.randint(1, 3)
    extra = [("lin", linear_form([rng.randint(-1, 1) for _ in range(n)], rng.randint(1, 2)))]
    G = ConstraintSystem.hypercube(n, extra)
    f = random_polynomial(rng, n, 2)
    solved = 0
    for shape_degree in (2, 4):
        r = cubecert.sa_solve(f, G, shape_degree, SCHMUEDGEN)
        if r.status != "optimal":
            continue
        cert = sa_certificate(r)
        assert cert.kind == SA and verify(f, r.bound, G, cert).accepted
        solved += 1
        sonc, H = replay_as_sonc(cert, G)
        assert verify(f, r.bound, H, sonc).accepted
        assert not verify(f, r.bound + Fraction(1, 7), H, sonc).accepted
    assert solved >= 1
