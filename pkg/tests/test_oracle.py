import random

import pytest

from novikov_fibring.errors import NotFreeAbelian, NotOneRelator, OracleNotApplicable
from novikov_fibring.oracle import abelian_kernel_fg, brown_sigma, free_group_sigma, oracle_sigma
from novikov_fibring.presentation import Character, Presentation, inverse_word, parse_presentation

from helpers import ONE_RELATOR, character, presentation


def test_free_group_is_not_one_relator():
    with pytest.raises(NotOneRelator):
        brown_sigma(presentation("f2"), Character((1, 0)))
    m = free_group_sigma(presentation("f2"), Character((1, 0)))
    assert not m.in_sigma_plus and not m.in_sigma_minus


def test_bs12_is_one_sided():
    m = brown_sigma(presentation("bs12"), character("bs12", (0, 1)))
    assert (m.in_sigma_plus, m.in_sigma_minus) == (False, True)
    assert m.trace["heights"] == [0, 1, 1, 0, 0]


def test_trefoil_is_fibred():
    m = brown_sigma(presentation("trefoil"), character("trefoil", (3, 2)))
    assert m.in_sigma_plus and m.in_sigma_minus and m.kernel_finitely_generated


def test_bs23_has_neither_side():
    m = brown_sigma(presentation("bs23"), character("bs23", (0, 1)))
    assert not m.in_sigma_plus and not m.in_sigma_minus


def test_relator_must_involve_both_generators():
    p = parse_presentation("gens a b\nrel a^2")
    with pytest.raises(OracleNotApplicable):
        brown_sigma(p, Character((0, 1)))


@pytest.mark.parametrize("name", sorted(ONE_RELATOR))
def test_brown_invariances(name):
    p = presentation(name)
    r = p.relators[0]
    rng = random.Random(name)
    for values in ONE_RELATOR[name]:
        phi = character(name, values)
        base = brown_sigma(p, phi)
        for _ in range(5):
            k = rng.randrange(len(r))
            rotated = Presentation(p.generators, (r[k:] + r[:k],), p.name)
            assert brown_sigma(rotated, phi) == base
        inverted = Presentation(p.generators, (inverse_word(r),), p.name)
        assert brown_sigma(inverted, phi) == base
        for s in (2, 3):
            assert brown_sigma(p, phi.scaled(s)) == base
        neg = brown_sigma(p, -phi)
        assert (neg.in_sigma_plus, neg.in_sigma_minus) == (base.in_sigma_minus, base.in_sigma_plus)


def test_abelian_kernel_oracle():
    assert abelian_kernel_fg(presentation("z2"), Character((1, 0)))
    assert abelian_kernel_fg(presentation("z3"), Character((1, 1, 1)))
    with pytest.raises(NotFreeAbelian):
        abelian_kernel_fg(presentation("klein"), Character((0, 1)))


def test_oracle_dispatch():
    assert oracle_sigma(presentation("z3"), Character((1, 0, 0))).method == "free-abelian"
    assert oracle_sigma(presentation("f2"), Character((1, 0))).method == "free-group"
    assert oracle_sigma(presentation("bs12"), Character((0, 1))).method == "brown"
