import math
import random

import pytest

from novikov_fibring.groupring import (
    GroupRing,
    element_from_json,
    gr_mul,
    graded_support,
    is_positive_support,
    mul_truncated,
    parse_element,
    truncate,
    valuation,
)
from novikov_fibring.presentation import Character, normal_form

from helpers import ALL_GROUPS, presentation, random_element, random_word, ring


def test_multiplication_examples():
    R = ring("z2")
    a = R.generator("a")
    assert (1 - a) * (1 + a) == 1 - a * a
    x = R.parse("2*a*b^-1 - 1/2 + b")
    assert x * R.one() == x
    B = ring("bs12")
    t, aa = B.generator("t"), B.generator("a")
    assert t * aa == aa * aa * t


def test_valuation_examples():
    R = ring("klein")
    phi = Character((0, 1))
    t, a = R.generator("t"), R.generator("a")
    assert valuation(t + t * t, phi) == 1
    assert valuation(R.zero(), phi) == math.inf
    assert valuation(a + R.monomial((3,)), phi) == -1


def test_truncation_examples():
    R = ring("klein")
    phi = Character((0, 1))
    t = R.generator("t")
    x = 1 + t + t * t
    assert truncate(x, 1, phi) == 1 + t
    assert truncate(x, -1, phi) == 0
    rest = x - truncate(x, 0, phi)
    assert is_positive_support(rest, phi)


def test_positive_support_examples():
    R = ring("klein")
    phi = Character((0, 1))
    t = R.generator("t")
    assert is_positive_support(t, phi)
    assert not is_positive_support(1 + t, phi)
    assert is_positive_support(R.zero(), phi)


def test_parse_and_format_round_trip():
    R = ring("z2")
    x = parse_element(R, "2*a*b^-1 - 1/2 + b")
    assert parse_element(R, str(x)) == x
    assert element_from_json(R, x.to_json()) == x


def test_terms_are_normal_forms_without_zeros():
    R = ring("z2")
    x = R.parse("b*a - a*b + 3")
    assert x == R.scalar(3)
    assert all(normal_form(R.rs, w) == w for w in x.terms)


@pytest.mark.parametrize("name", ["z2", "bs12", "trefoil", "comm_a2"])
def test_graded_laws_on_random_elements(name):
    rng = random.Random(name)
    R = ring(name)
    F = GroupRing.free(R.presentation, R.coeffs)
    phi = Character(ALL_GROUPS[name][0])
    for _ in range(40):
        x = random_element(rng, R)
        y = random_element(rng, R)
        # valuation is super-additive
        assert valuation(x * y, phi) >= valuation(x, phi) + valuation(y, phi)
        # truncation splits x into two parts with disjoint level ranges
        k = rng.randint(-3, 3)
        lo = truncate(x, k, phi)
        hi = x - lo
        assert lo + hi == x
        assert all(phi(w) <= k for w in lo.terms) and all(phi(w) > k for w in hi.terms)
        # truncated products agree with truncating the product
        assert mul_truncated(x, y, phi, k) == truncate(x * y, k, phi)
        # multiplying in the free group ring then reducing gives the same result
        xf, yf = F.from_terms(x.terms), F.from_terms(y.terms)
        assert R.from_terms(gr_mul(xf, yf).terms) == x * y
        # graded support partitions the element with increasing levels
        parts = graded_support(x, phi)
        assert [lv for lv, _ in parts] == sorted({phi(w) for w in x.terms})
        total = R.zero()
        for _, part in parts:
            total = total + part
        assert total == x


def test_multiplication_is_associative():
    rng = random.Random(7)
    R = ring("bs12")
    for _ in range(20):
        x, y, z = (random_element(rng, R, 3, 3) for _ in range(3))
        assert (x * y) * z == x * (y * z)


def test_involution_is_an_anti_automorphism():
    rng = random.Random(3)
    R = ring("trefoil")
    for _ in range(20):
        x, y = random_element(rng, R), random_element(rng, R)
        assert (x * y).involution() == y.involution() * x.involution()
        assert x.involution().involution() == x


def test_json_is_sorted_by_level_then_shortlex():
    R = ring("z2")
    phi = Character((1, 0))
    x = R.parse("a^2 + b + a^-1 + 1")
    words = [t["word"] for t in x.to_json(phi)]
    assert words == ["a^-1", "1", "b", "a^2"]
