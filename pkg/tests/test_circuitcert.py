import itertools
import random
from fractions import Fraction

import mpmath
import pytest

from certlab import exactlp
from certlab.circuitcert import (
    CircuitPolynomial,
    NotACircuit,
    SoncDecomposition,
    binomial_square_circuit,
    circuit_is_sos,
    circuit_number_compare,
    circuit_number_float,
    detect_circuit,
    is_nonnegative_circuit,
    quadratic_gram,
    quadratic_sonc_membership,
    verify_sonc_decomposition,
)
from certlab.hierarchy import witness_generalized_motzkin, witness_signed_quadric
from certlab.matrixkit import BinomialSquare
from certlab.polycore import Polynomial

from gen import random_nonneg_circuit

M2 = witness_generalized_motzkin(2)
MOTZKIN_SUPPORT = [(0, 0), (2, 4), (4, 2)]


def poly2(d):
    return Polynomial(2, d)


# examples


def test_detect_examples():
    c = detect_circuit(M2)
    assert c.vertices == tuple(MOTZKIN_SUPPORT)
    assert c.inner_exp == (2, 2) and c.lambdas == (Fraction(1, 3),) * 3
    with pytest.raises(NotACircuit) as exc:
        detect_circuit(witness_signed_quadric(2))
    assert exc.value.reason == "too_many_interior"
    sq = detect_circuit(Polynomial.monomial((2, 0)))
    assert sq.degenerate and sq.vertices == ((2, 0),)
    with pytest.raises(NotACircuit) as exc:
        detect_circuit(Polynomial.zero(2))
    assert exc.value.reason == "zero_polynomial"


@pytest.mark.parametrize(
    "vertices,coeffs,inner,reason",
    [
        ([(0, 0), (2, 0), (4, 0)], [1, 1, 1], None, "not_simplex"),
        ([(0, 0), (1, 0)], [1, 1], None, "odd_vertex"),
        ([(0, 0), (2, 0)], [1, -1], None, "nonpositive_vertex_coefficient"),
        ([(0, 0), (2, 0)], [1, 1], (3, 0), "inner_outside_hull"),
        ([(0, 0), (2, 0)], [1, 1], (1, 1), "inner_outside_hull"),
        ([(0, 0), (2, 0), (0, 2)], [1, 1, 1], (1, 1), "inner_on_boundary"),
    ],
)
def test_build_rejections(vertices, coeffs, inner, reason):
    with pytest.raises(NotACircuit) as exc:
        CircuitPolynomial.build(vertices, coeffs, inner, -1)
    assert exc.value.reason == reason


def test_circuit_number_examples():
    assert circuit_number_compare(detect_circuit(M2)) == 0
    worse = poly2({(0, 0): 1, (2, 4): 1, (4, 2): 1, (2, 2): -4})
    assert circuit_number_compare(detect_circuit(worse)) == 1
    zero_inner = CircuitPolynomial.build(MOTZKIN_SUPPORT, [1, 1, 1], (2, 2), 0)
    assert circuit_number_compare(zero_inner) == -1
    assert abs(circuit_number_float(detect_circuit(M2)) - 3) < 1e-12
    with pytest.raises(ValueError):
        circuit_number_compare(detect_circuit(Polynomial.monomial((2, 0))))


def test_nonnegativity_examples():
    assert is_nonnegative_circuit(detect_circuit(M2))
    assert not is_nonnegative_circuit(detect_circuit(poly2({(0, 0): 1, (2, 4): 1, (4, 2): 1, (2, 2): -4})))
    binom = detect_circuit(poly2({(2, 0): 1, (1, 1): -2, (0, 2): 1}))
    assert is_nonnegative_circuit(binom) and circuit_number_compare(binom) == 0


def test_sos_examples():
    assert circuit_is_sos(detect_circuit(M2)) is False
    assert circuit_is_sos(detect_circuit(poly2({(2, 0): 1, (1, 1): -2, (0, 2): 1})))
    assert circuit_is_sos(detect_circuit(Polynomial(1, {(0,): 1, (4,): 1, (2,): -1})))


def test_even_inner_positive_coefficient_is_sos():
    c = CircuitPolynomial.build(MOTZKIN_SUPPORT, [1, 1, 1], (2, 2), 5)
    assert is_nonnegative_circuit(c) and circuit_is_sos(c)


def test_verify_decomposition_examples():
    c = detect_circuit(M2)
    assert verify_sonc_decomposition(M2, SoncDecomposition([(Fraction(1), c)])).accepted
    sq = detect_circuit(Polynomial.monomial((2, 0)))
    both = SoncDecomposition([(Fraction(1), c), (Fraction(1), sq)])
    assert verify_sonc_decomposition(M2 + Polynomial.monomial((2, 0)), both).accepted
    wrong = CircuitPolynomial.build(MOTZKIN_SUPPORT, [1, 1, 1], (2, 2), -2)
    rep = verify_sonc_decomposition(M2, SoncDecomposition([(Fraction(1), wrong)]))
    assert not rep.accepted and not rep.residual.is_zero()
    too_big = CircuitPolynomial.build(MOTZKIN_SUPPORT, [1, 1, 1], (2, 2), -4)
    rep = verify_sonc_decomposition(too_big.polynomial(), SoncDecomposition([(Fraction(1), too_big)]))
    assert not rep.accepted and rep.residual.is_zero()
    dec = SoncDecomposition.from_json(both.to_json())
    assert dec.polynomial(2) == both.polynomial(2)


def test_quadratic_membership_examples():
    res = quadratic_sonc_membership(witness_signed_quadric(2))
    assert not res.member
    assert res.gram.rows == tuple(tuple(Fraction(v) for v in r) for r in [[1, -1, -1], [-1, 1, 1], [-1, 1, 1]])
    assert exactlp.check_certificate(res.sdd.problem, res.sdd.outcome)
    for f in (poly2({(2, 0): 1, (0, 2): 1, (1, 1): -2}), Polynomial(1, {(0,): 1, (2,): 1, (1,): -2})):
        res = quadratic_sonc_membership(f)
        assert res.member
        assert verify_sonc_decomposition(f, res.decomposition).accepted
    with pytest.raises(ValueError):
        quadratic_sonc_membership(M2)


def test_binomial_square_circuit():
    sq = BinomialSquare(Fraction(1), Fraction(1), (1, 0), Fraction(-1), (0, 1))
    c = binomial_square_circuit(sq)
    assert c.vertices == ((0, 2), (2, 0)) and c.inner_exp == (1, 1) and c.inner_coeff == -2
    assert circuit_number_compare(c) == 0
    assert c.polynomial() == sq.polynomial()
    mono = binomial_square_circuit(BinomialSquare(Fraction(3), Fraction(1), (1, 0), Fraction(0), (1, 0)))
    assert mono.degenerate and mono.polynomial() == Polynomial.monomial((2, 0), 3)
    assert binomial_square_circuit(BinomialSquare(Fraction(0), Fraction(1), (1, 0), Fraction(0), (1, 0))) is None


def test_json_roundtrip_and_scaling():
    c = detect_circuit(M2)
    assert CircuitPolynomial.from_json(c.to_json()) == c
    assert c.scaled(2).polynomial() == M2 * 2
    with pytest.raises(ValueError):
        c.scaled(0)


# Theta against mpmath on random circuits


def _theta_mp(c):
    mpmath.mp.dps = 60
    mp = lambda q: mpmath.mpf(q.numerator) / q.denominator  # noqa: E731
    return mpmath.fprod(mpmath.power(mp(b) / mp(l), mp(l)) for b, l in zip(c.vertex_coeffs, c.lambdas))


def test_circuit_number_compare_against_mpmath():
    rng = random.Random(21)
    for _ in range(120):
        base = random_nonneg_circuit(rng, rng.randint(1, 3), rng.choice([2, 4, 6]))
        coeffs = [b * Fraction(rng.randint(1, 9), rng.randint(1, 9)) for b in base.vertex_coeffs]
        inner = Fraction(rng.randint(-40, 40), rng.randint(1, 7))
        c = CircuitPolynomial.build(base.vertices, coeffs, base.inner_exp, inner)
        theta = _theta_mp(c)
        gap = mpmath.mpf(abs(inner).numerator) / abs(inner).denominator - theta
        if abs(gap) < mpmath.mpf(10) ** -40:
            assert circuit_number_compare(c) == 0
        else:
            assert circuit_number_compare(c) == (1 if gap > 0 else -1)
        expected_nonneg = gap <= mpmath.mpf(10) ** -40 or (inner > 0 and all(k % 2 == 0 for k in c.inner_exp))
        assert is_nonnegative_circuit(c) == bool(expected_nonneg)


def test_nonnegative_circuits_are_nonnegative_on_a_grid():
    rng = random.Random(22)
    grid = [Fraction(k, 2) for k in range(-4, 5)]
    for _ in range(30):
        n = rng.randint(1, 2)
        c = random_nonneg_circuit(rng, n, rng.choice([2, 4, 6]))
        p = c.polynomial()
        for pt in itertools.product(grid, repeat=n):
            assert p.eval(pt) >= 0


# quadratic reduction against a brute-force circuit-support oracle


RATIOS = [Fraction(a, b) for a in range(1, 7) for b in range(1, 7)]


def _grid_sonc_witness(Q):
    """Search splits of each off-diagonal entry into binomial circuits ``p x_i^2 + 2c x_i x_j + q x_j^2`` with ``pq = c^2``.

    Any hit is a SONC decomposition (monomial squares absorb the rest of the diagonal).
    """
    m = Q.size
    pairs = [(i, j) for i in range(m) for j in range(i + 1, m) if Q[i, j] != 0]
    for ts in itertools.product(RATIOS, repeat=len(pairs)):
        used = [Fraction(0)] * m
        for (i, j), t in zip(pairs, ts):
            c = abs(Q[i, j])
            used[i] += c * t
            used[j] += c / t
        if all(used[i] <= Q[i, i] for i in range(m)):
            return True
    return False


def test_quadratic_membership_against_circuit_oracle():
    rng = random.Random(23)
    agree = {True: 0, False: 0}
    for _ in range(120):
        n = rng.randint(1, 2)
        basis_pairs = [(a, b) for a in range(n + 1) for b in range(a, n + 1)]
        terms = {}
        for a, b in basis_pairs:
            e = [0] * n
            if a:
                e[a - 1] += 1
            if b:
                e[b - 1] += 1
            v = rng.randint(0, 6) if a == b else rng.choice([0, 0, rng.randint(-4, 4)])
            terms[tuple(e)] = terms.get(tuple(e), 0) + v
        f = Polynomial(n, terms)
        if f.is_zero():
            continue
        res = quadratic_sonc_membership(f)
        _, Q = quadratic_gram(f)
        hit = _grid_sonc_witness(Q)
        if hit:
            assert res.member
        if res.member:
            assert verify_sonc_decomposition(f, res.decomposition).accepted
            agree[True] += 1
        else:
            assert not hit
            assert exactlp.check_certificate(res.sdd.problem, res.sdd.outcome)
            agree[False] += 1
    assert agree[True] > 10 and agree[False] > 10
