import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from certlab.hierarchy import witness_generalized_motzkin, witness_signed_quadric
from certlab.polycore import (
    Polynomial,
    add,
    evaluate,
    format_rational,
    linear_form,
    mul,
    multilinear_reduce,
    subset_monomial,
    subsets_upto,
    to_rational,
    total_degree,
    variables_used,
)

N = 3
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.tuples(*[st.integers(0, 3)] * N)
polys = st.dictionaries(exps, rationals, max_size=6).map(lambda d: Polynomial(N, d))
points = st.tuples(*[rationals] * N)


def x(i, n=2):
    return Polynomial.var(n, i)


# worked examples


def test_add_examples():
    assert add(x(0), -x(0)).is_zero()
    assert add(1 + x(0) ** 2, 2 * x(0)) == Polynomial(2, {(0, 0): 1, (1, 0): 2, (2, 0): 1})
    lin = 1 - x(0) - x(1)
    expected = Polynomial(2, {(0, 0): 1, (2, 0): 1, (0, 2): 1, (1, 0): -2, (0, 1): -2, (1, 1): 2})
    assert mul(lin, lin) == expected == witness_signed_quadric(2)
    assert len(expected) == 6


def test_mul_examples():
    assert mul(x(0), x(0)) == Polynomial.monomial((2, 0))
    assert mul(x(0), 1 - x(1)) == x(0) - x(0) * x(1)


def test_eval_examples():
    M2, N2 = witness_generalized_motzkin(2), witness_signed_quadric(2)
    assert evaluate(M2, (1, 1)) == 0
    assert evaluate(N2, (1, 0)) == 0
    assert evaluate(M2, (0, 0)) == 1
    assert M2([Fraction(1, 2), 2]) == M2.eval([Fraction(1, 2), 2])


def test_degree_examples():
    assert total_degree(witness_generalized_motzkin(2)) == 6
    for n in range(1, 5):
        assert total_degree(witness_signed_quadric(n)) == 2
    assert total_degree(Polynomial.constant(2, 5)) == 0
    assert Polynomial.zero(2).total_degree() == -1


def test_multilinear_examples():
    assert multilinear_reduce(x(0) ** 2 - x(0)).is_zero()
    assert multilinear_reduce(Polynomial.monomial((3, 2))) == Polynomial.monomial((1, 1))
    assert multilinear_reduce(witness_generalized_motzkin(2)) == 1 - x(0) * x(1)


def test_variables_used_examples():
    assert variables_used(Polynomial.monomial((1, 0, 1))) == {0, 2}
    assert variables_used(witness_generalized_motzkin(2)) == {0, 1}
    assert variables_used(Polynomial.constant(3, 7)) == frozenset()


def test_rejects_floats_and_mismatched_arity():
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)
    with pytest.raises(ValueError):
        Polynomial(2, {(1,): 1})
    with pytest.raises(ValueError):
        x(0, 2) + x(0, 3)


def test_string_inputs_and_format():
    assert to_rational("3/4") == Fraction(3, 4)
    assert format_rational(Fraction(-3, 2)) == "-3/2"
    assert format_rational(Fraction(4)) == "4"


def test_grlex_order_and_str():
    p = witness_generalized_motzkin(2)
    degs = [sum(e) for e in p.support()]
    assert degs == sorted(degs)
    assert str(linear_form([1, -2], 3)) == "3 + x1 - 2*x2"


def test_helpers():
    assert subset_monomial(3, [0, 2], 5) == Polynomial(3, {(1, 0, 1): 5})
    assert subsets_upto([0, 1, 2], 2) == [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2)]


# properties


@given(polys, polys, polys)
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p).is_zero()


@given(polys, polys, points)
def test_eval_is_homomorphism(p, q, pt):
    assert (p + q).eval(pt) == p.eval(pt) + q.eval(pt)
    assert (p * q).eval(pt) == p.eval(pt) * q.eval(pt)


@given(polys, polys)
def test_degree_of_product(p, q):
    if not p.is_zero() and not q.is_zero():
        assert (p * q).total_degree() == p.total_degree() + q.total_degree()


@given(polys)
def test_multilinear_reduce_agrees_on_cube(p):
    ml = p.multilinear_reduce()
    assert ml.is_multilinear()
    assert ml.multilinear_reduce() == ml
    for v in itertools.product((0, 1), repeat=N):
        assert ml.eval(v) == p.eval(v)


@given(polys)
def test_cube_ideal_quotients_identity(p):
    rebuilt = p.multilinear_reduce()
    for i, q in p.cube_ideal_quotients().items():
        xi = Polynomial.var(N, i)
        rebuilt = rebuilt + q * (xi * xi - xi)
    assert rebuilt == p


@settings(max_examples=50)
@given(polys)
def test_json_roundtrip(p):
    assert Polynomial.from_json(p.to_json()) == p
    assert hash(Polynomial.from_json(p.to_json())) == hash(p)


@given(polys, st.integers(0, 3))
def test_power(p, k):
    expected = Polynomial.constant(N, 1)
    for _ in range(k):
        expected = expected * p
    assert p**k == expected
