import math
import random

import pytest

from novikov_fibring.errors import InsufficientPrecision, NonMonomialLeadingTerm, NotPositiveSupport
from novikov_fibring.novikov import (
    NotInRowSpace,
    NovikovApprox,
    NovikovMatrix,
    eliminate,
    geometric_transform,
    nmat_mul,
    nov_add,
    nov_invert,
    nov_mul,
    solve_left,
)
from novikov_fibring.presentation import Character

from helpers import complex_, random_element, ring

PHI_T = Character((0, 1))  # a -> 0, t -> 1 on the Klein bottle and BS groups


def approx(x, phi=PHI_T, k=math.inf):
    return NovikovApprox(x, k, phi)


def test_multiplication_examples():
    R = ring("klein")
    t = R.generator("t")
    assert nov_mul(approx(1 + t), approx(1 - t), 2).head == 1 - t * t
    assert nov_mul(approx(1 + t, k=4), approx(R.zero()), 7).head == 0
    B = ring("bs12")
    tb, ab = B.generator("t"), B.generator("a")
    assert nov_mul(approx(tb), approx(ab), 1).head == ab * ab * tb


def test_multiplication_precision_demand():
    R = ring("klein")
    t = R.generator("t")
    x = approx(1 + t, k=2)
    y = approx(1 - t, k=3)
    assert nov_mul(x, y).precision == 2
    with pytest.raises(InsufficientPrecision):
        nov_mul(x, y, 3)
    # a factor of valuation 2 lifts the other factor's precision by 2
    assert nov_mul(x, approx(t * t)).precision == 4


def test_inverse_examples():
    R = ring("klein")
    t = R.generator("t")
    assert nov_invert(approx(1 - t), 3).head == 1 + t + t * t + t * t * t
    g = R.parse("a*t^2")
    inv = nov_invert(approx(g))
    assert inv.is_exact and inv.head == R.parse("t^-2*a^-1")
    y = nov_invert(approx(2 - t), 2)
    assert y.head == R.parse("1/2 + 1/4*t + 1/8*t^2")
    assert nov_mul(approx(2 - t), y, 2).head == 1


def test_inverse_requires_monomial_leading_term():
    R = ring("klein")
    with pytest.raises(NonMonomialLeadingTerm):
        nov_invert(approx(R.parse("1 + a + t")), 3)
    Z = ring("z2").with_coefficients(__import__("novikov_fibring").CoefficientRing.integers())
    with pytest.raises(NonMonomialLeadingTerm):
        nov_invert(NovikovApprox(Z.parse("2 - b"), math.inf, Character((0, 1))), 3)


def test_inverse_precision_loss():
    R = ring("klein")
    t = R.generator("t")
    x = approx(R.parse("t^-1 - 1"), k=4)
    # valuation -1, so the inverse is known to 4 - 2 * (-1) = 6
    assert nov_invert(x).precision == 6
    with pytest.raises(InsufficientPrecision):
        nov_invert(x, 7)


@pytest.mark.parametrize("name,values", [("klein", (0, 1)), ("bs12", (0, -1)), ("trefoil", (3, 2)), ("z2", (1, 1))])
def test_inverse_identity_on_random_elements(name, values):
    rng = random.Random(name)
    R = ring(name)
    phi = Character(values)
    done = 0
    while done < 25:
        x = random_element(rng, R, 4, 4)
        g = random_element(rng, R, 1, 3, 1)
        if not g.terms:
            continue
        (w,) = g.terms
        lead_level = phi(w)
        tail = R.from_terms({u: c for u, c in x.terms.items() if phi(u) > lead_level})
        y = R.monomial(w, rng.choice([1, -1, 2, -3])) + tail
        inv = nov_invert(NovikovApprox(y, math.inf, phi), 5)
        assert nov_mul(NovikovApprox(y, math.inf, phi), inv, 5).head == 1
        done += 1


def test_precision_monotonicity():
    R = ring("klein")
    x = approx(R.parse("1 - t - a*t"))
    hi = nov_invert(x, 6)
    for k in range(6):
        assert nov_invert(x, k).head == hi.truncated(k).head


def test_addition_precision_is_minimum():
    R = ring("klein")
    x = nov_add(approx(R.one(), k=3), approx(R.one(), k=5))
    assert x.precision == 3 and x.head == 2


def test_geometric_transform_examples():
    R = ring("klein")
    t = R.generator("t")
    zero = NovikovMatrix.exact([[R.zero()]], PHI_T)
    B = NovikovMatrix.exact([[R.parse("a + t")]], PHI_T)
    assert geometric_transform(zero, B, 3).heads() == B.heads()
    G = geometric_transform(NovikovMatrix.exact([[t]], PHI_T), NovikovMatrix.exact([[R.one()]], PHI_T), 2)
    assert G.heads() == [[1 + t + t * t]]
    A = NovikovMatrix.exact([[t, R.zero()], [t, t]], PHI_T)
    I = NovikovMatrix.identity(R, 2, PHI_T)
    G = geometric_transform(A, I, 1)
    assert G.heads() == [[1 + t, R.zero()], [t, 1 + t]]


def test_geometric_transform_inverts_identity_minus_a():
    R = ring("klein")
    A = NovikovMatrix.exact([[R.parse("t + a*t"), R.parse("t^2")], [R.parse("-t"), R.parse("2*t")]], PHI_T)
    B = NovikovMatrix.exact([[R.parse("1 + a")], [R.parse("t^-1")]], PHI_T)
    k = 5
    G = geometric_transform(A, B, k)
    I = NovikovMatrix.identity(R, 2, PHI_T)
    lhs = nmat_mul(I - A, G, cap=k)
    assert lhs.agrees_with(B.cap(k), k - 1)


def test_geometric_transform_rejects_non_positive():
    R = ring("klein")
    A = NovikovMatrix.exact([[R.parse("1 + t")]], PHI_T)
    with pytest.raises(NotPositiveSupport):
        geometric_transform(A, A, 2)


def test_eliminate_examples():
    R = ring("klein")
    t = R.generator("t")
    rec = eliminate(NovikovMatrix.exact([[1 - t]], PHI_T), 3)
    assert rec.pivots == [(0, 0, 0)] and rec.complete
    rec = eliminate(NovikovMatrix.exact([[R.zero(), R.zero()]], PHI_T), 3)
    assert rec.pivots == [] and rec.echelon.is_known_zero()
    D2 = complex_("z2").boundary(2)
    rec = eliminate(NovikovMatrix.exact(D2, Character((1, 0))), 3)
    assert [(i, j) for i, j, _ in rec.pivots] == [(0, 1)]


def test_eliminate_reports_stuck_block():
    D2 = complex_("bs12").boundary(2)
    rec = eliminate(NovikovMatrix.exact(D2, Character((0, 1))), 4)
    assert rec.stuck is not None and rec.stuck.rows == [0]


def test_eliminate_replays_and_is_deterministic():
    phi = Character((3, 2))
    D2 = complex_("trefoil").boundary(2)
    M = NovikovMatrix.exact(D2, phi)
    r1, r2 = eliminate(M, 6), eliminate(M, 6)
    assert r1.transcript == r2.transcript
    k = 4
    LMR = nmat_mul(nmat_mul(r1.left, M, cap=k), r1.right, cap=k)
    assert LMR.agrees_with(r1.echelon.cap(k), k)


def test_solve_left_and_row_space_failure():
    R = ring("klein")
    t = R.generator("t")
    M = NovikovMatrix.exact([[1 - t, R.zero()]], PHI_T)
    rec = eliminate(M, 5)
    T = NovikovMatrix.exact([[R.parse("a"), R.zero()]], PHI_T)
    S = solve_left(rec, T, 5)
    assert nmat_mul(S, M, cap=5).agrees_with(T.cap(5), 5)
    with pytest.raises(NotInRowSpace):
        solve_left(rec, NovikovMatrix.exact([[R.zero(), R.one()]], PHI_T), 5)
