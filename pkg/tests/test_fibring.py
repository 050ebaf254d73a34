import json
import math
import random
from fractions import Fraction

import pytest

from novikov_fibring.chain import dualize
from novikov_fibring.coefficients import CoefficientRing
from novikov_fibring.errors import NoCharacters, NotACocycle, ShapeMismatch, UnverifiedInput
from novikov_fibring.fibring import (
    Budget,
    Certificate,
    SearchFailure,
    certificate_from_json,
    contraction_residual,
    dual_coboundary_check,
    error_matrices,
    extract_primes,
    flip_cobound,
    primitive_characters,
    search_certificate,
    sikorav_verdict,
    sphere_sample,
    verify_certificate,
)
from novikov_fibring.groupring import mat_mul, valuation
from novikov_fibring.presentation import Character, parse_presentation

from helpers import character, complex_, koszul, presentation, random_element, ring


def cert_for(name, values, n=1, field="Q"):
    c = complex_(name, field)
    cert = search_certificate(c, character(name, values), n)
    assert isinstance(cert, Certificate), cert
    return c, cert


def test_z2_certificate():
    c, cert = cert_for("z2", (1, 0))
    assert cert.verified and verify_certificate(c, cert)
    assert cert.degree == 1 and len(cert.s) == 2


def test_free_group_has_no_certificate():
    res = search_certificate(complex_("f2"), Character((1, 0)), 1, Budget(precision=8))
    assert isinstance(res, SearchFailure)


def test_klein_bottle_both_directions():
    for values in [(0, 1), (0, -1)]:
        _, cert = cert_for("klein", values)
        assert cert.verified


def test_bs12_only_minus_side():
    assert isinstance(search_certificate(complex_("bs12"), Character((0, 1)), 1), SearchFailure)
    _, cert = cert_for("bs12", (0, -1))
    assert cert.verified


def test_corrupted_certificate_is_rejected():
    c, cert = cert_for("z2", (1, 0))
    R = c.ring
    bad_s = [[row[:] for row in m] for m in cert.s]
    bad_s[0][0][0] = bad_s[0][0][0] + R.parse("1/2")
    bad = Certificate(cert.presentation, cert.phi, cert.coeffs, 1, bad_s, [])
    assert not verify_certificate(c, bad)


def test_shape_mismatch():
    c, cert = cert_for("z2", (1, 0))
    bad = Certificate(cert.presentation, cert.phi, cert.coeffs, 1, [cert.s[1], cert.s[0]], [])
    with pytest.raises(ShapeMismatch):
        verify_certificate(c, bad)


def test_certificate_transported_to_a_multiple():
    c, cert = cert_for("trefoil", (3, 2))
    for k in (2, 3):
        scaled = Certificate(cert.presentation, cert.phi.scaled(k), cert.coeffs, 1, cert.s, cert.E)
        assert verify_certificate(c, scaled)


def test_certificate_json_round_trip():
    c, cert = cert_for("bs12", (0, -1))
    data = json.loads(json.dumps(cert.to_json()))
    cert2, c2 = certificate_from_json(data)
    assert verify_certificate(c2, cert2)
    assert cert2.phi == cert.phi


def test_degree_two_with_koszul_resolution():
    c = koszul("z2")
    cert = search_certificate(c, character("z2", (1, 2)), 2)
    assert isinstance(cert, Certificate) and cert.verified
    with pytest.raises(ValueError):
        search_certificate(complex_("z2"), character("z2", (1, 0)), 2)


def test_degree_three_for_z3():
    cert = search_certificate(koszul("z3"), character("z3", (1, -1, 1)), 3)
    assert cert.verified


def test_residual_decays_for_cycles():
    rng = random.Random(1)
    c, cert = cert_for("trefoil", (3, 2))
    R = c.ring
    E1 = error_matrices(c, cert.s, 1)[1]
    for _ in range(5):
        y = [random_element(rng, R)]
        z = mat_mul([y], c.boundary(2), R)[0]
        v0 = min(valuation(x, cert.phi) for x in z)
        for K in range(1, 4):
            res = contraction_residual(c, cert, z, 1, K)
            power = [z]
            for _ in range(K):
                power = mat_mul(power, E1, R)
            assert res == power[0]
            assert min(valuation(x, cert.phi) for x in res) >= v0 + K


def test_flip_examples():
    c, cert = cert_for("z2", (1, 0))
    R = c.ring
    (w0,) = flip_cobound(c, cert, [R.zero(), R.zero()], 1, 3)
    assert w0.known_zero() and w0.precision >= 3
    d = dualize(c)
    y = [[R.parse("a*b - 2 + a^-1")]]
    z = mat_mul(y, d.coboundaries[1], R)[0]
    w = flip_cobound(c, cert, z, 1, 3)
    assert dual_coboundary_check(c, w, z, 1, 3, -cert.phi)
    with pytest.raises(NotACocycle):
        flip_cobound(c, cert, [R.one(), R.zero()], 1, 3)
    with pytest.raises(NotACocycle):
        flip_cobound(c, cert, [R.one()], 0, 3)


def test_extract_primes_integral_certificate():
    c, cert = cert_for("z2", (1, 0))
    rep = extract_primes(cert, c)
    assert rep.primes == ()
    assert rep.localized_verified
    assert [p for p, _ in rep.reductions] == [2, 3, 5] and all(ok for _, ok in rep.reductions)


def test_extract_primes_half_coefficient():
    c, cert = cert_for("z2", (1, 0))
    R = c.ring
    s0 = [[cert.s[0][0][0] + R.parse("1/2*a"), cert.s[0][0][1]]]
    half = Certificate(cert.presentation, cert.phi, cert.coeffs, 1, [s0, cert.s[1]], [])
    assert verify_certificate(c, half)
    rep = extract_primes(half, c)
    assert 2 in rep.primes
    assert dict(rep.reductions)[3] and dict(rep.reductions)[5]


def test_extract_primes_needs_rational_input():
    c, cert = cert_for("z2", (1, 0), field="Fp:5")
    with pytest.raises(UnverifiedInput):
        extract_primes(cert, c)


def test_verdicts():
    assert sikorav_verdict(presentation("z2"), character("z2", (1, 0))).label == "FibredFP1"
    v = sikorav_verdict(presentation("bs12"), character("bs12", (0, 1)))
    assert v.label == "NotFibred" and v.certified_directions() == (False, True)
    assert sikorav_verdict(presentation("trefoil"), character("trefoil", (3, 2))).label == "FibredFP1"
    f2 = sikorav_verdict(presentation("f2"), Character((1, 1)))
    assert f2.label == "NotFibred" and f2.exit_code == 1


def test_verdict_without_oracle_is_inconclusive():
    v = sikorav_verdict(presentation("bs12"), character("bs12", (0, 1)), use_oracle=False)
    assert v.label == "Inconclusive" and v.exit_code == 2


def test_verdict_over_f2_field():
    v = sikorav_verdict(presentation("z2"), character("z2", (1, 1)), CoefficientRing.prime_field(2))
    assert v.label == "FibredFP1" and v.field == "Fp:2"


def test_sphere_sampling():
    res = sphere_sample(presentation("z2"), 1)
    assert [ch.values for ch, _ in res] == [(1, 0), (0, 1), (1, 1), (1, -1)]
    assert all(v.label == "FibredFP1" for _, v in res)
    f2 = sphere_sample(presentation("f2"), 2)
    assert f2 and all(v.label == "NotFibred" for _, v in f2)
    tref = primitive_characters(presentation("trefoil"), 3)
    assert [ch.values for ch in tref] == [(3, 2)]


def test_perfect_group_has_no_characters():
    p = parse_presentation("gens a b\nrel a^2\nrel b^3\nrel a b a b a b a b a b")
    with pytest.raises(NoCharacters):
        sphere_sample(p, 2)
