from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from novikov_fibring.coefficients import (
    CoefficientRing,
    parse_field,
    primes_of_denominators,
    reduce_mod_p,
    ring_ops,
)
from novikov_fibring.errors import DenominatorDivisible, NotAUnit, PresentationSyntaxError

Q = CoefficientRing.rationals()
F5 = CoefficientRing.prime_field(5)
Z2loc = CoefficientRing.localization([2])

rationals = st.fractions(max_denominator=50).filter(lambda x: abs(x) < 1000)


def test_inverse_examples():
    assert ring_ops("inv", Q, Fraction(2, 3)) == Fraction(3, 2)
    assert ring_ops("inv", F5, 2) == 3
    with pytest.raises(NotAUnit):
        ring_ops("inv", Z2loc, 3)
    assert Z2loc.inv(Fraction(1, 4)) == 4


def test_units_of_localisation():
    R = CoefficientRing.localization([2, 3])
    assert R.is_unit(Fraction(-3, 8))
    assert not R.is_unit(5)
    with pytest.raises(NotAUnit):
        R.coerce(Fraction(1, 5))


def test_primes_of_denominators_examples():
    assert primes_of_denominators([Fraction(1, 2), Fraction(3, 4)]) == {2}
    assert primes_of_denominators([5]) == frozenset()
    assert primes_of_denominators([Fraction(1, 6), Fraction(1, 10)]) == {2, 3, 5}


def test_reduce_mod_p_examples():
    assert reduce_mod_p(Fraction(1, 2), 3) == 2
    with pytest.raises(DenominatorDivisible):
        reduce_mod_p(Fraction(1, 2), 2)
    assert reduce_mod_p(7, 5) == 2


def test_parse_field():
    assert str(parse_field("Q")) == "Q"
    assert parse_field("Fp:7").p == 7
    assert parse_field("Zloc:3,2").primes == {2, 3}
    assert str(parse_field("Zloc:3,2")) == "Zloc:2,3"
    with pytest.raises(PresentationSyntaxError):
        parse_field("Fp:9")
    with pytest.raises(PresentationSyntaxError):
        parse_field("R")


def test_prime_field_residues_are_canonical():
    assert F5.coerce(-1) == 4
    assert F5.coerce(Fraction(1, 2)) == 3
    assert F5.add(4, 3) == 2


@given(rationals, rationals, rationals)
def test_field_axioms_over_q(x, y, z):
    assert Q.mul(Q.mul(x, y), z) == Q.mul(x, Q.mul(y, z))
    assert Q.mul(x, Q.add(y, z)) == Q.add(Q.mul(x, y), Q.mul(x, z))
    if x != 0:
        assert Q.mul(x, Q.inv(x)) == 1


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
def test_field_axioms_over_f7(x, y, z):
    F = CoefficientRing.prime_field(7)
    assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))
    if x:
        assert F.mul(x, F.inv(x)) == 1


@given(rationals, rationals, st.sampled_from([3, 7, 11]))
def test_reduction_is_a_ring_homomorphism(x, y, p):
    try:
        rx, ry = reduce_mod_p(x, p), reduce_mod_p(y, p)
    except DenominatorDivisible:
        return
    assert reduce_mod_p(x + y, p) == (rx + ry) % p
    assert reduce_mod_p(x * y, p) == (rx * ry) % p
