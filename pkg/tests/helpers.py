"""Shared corpus tables and random generators for the test suite."""
from __future__ import annotations

import random
from functools import lru_cache

from novikov_fibring import (
    GroupRing,
    corpus_path,
    load_resolution,
    parse_presentation,
    presentation_complex,
    validate_character,
)
from novikov_fibring.coefficients import CoefficientRing, parse_field

# Two-generator one-relator groups with the characters sampled for each.
ONE_RELATOR = {
    "z2": [(1, 0), (0, 1), (1, 1), (1, -1), (2, -1)],
    "klein": [(0, 1), (0, -1), (0, 2)],
    "klein_squares": [(1, -1), (-1, 1), (2, -2)],
    "bs12": [(0, 1), (0, -1), (0, 2)],
    "bs13": [(0, 1), (0, -1), (0, 3)],
    "bs1m2": [(0, 1), (0, -1), (0, 2)],
    "bs23": [(0, 1), (0, -1), (0, 2)],
    "trefoil": [(3, 2), (-3, -2), (6, 4)],
    "torus25": [(5, 2), (-5, -2), (10, 4)],
    "torus34": [(4, 3), (-4, -3), (8, 6)],
    "comm_a2": [(1, 0), (0, 1), (1, 1), (1, -1), (3, 1)],
    "comm_a3": [(1, 0), (0, 1), (1, 1), (2, -1), (3, 1)],
}

OTHER = {
    "f2": [(1, 0), (0, 1), (1, 1), (2, -1)],
    "z3": [(1, 0, 0), (1, 1, 0), (1, -1, 1)],
}

ALL_GROUPS = {**ONE_RELATOR, **OTHER}


@lru_cache(maxsize=None)
def presentation(name: str):
    return parse_presentation(corpus_path(f"{name}.grp").read_text(encoding="utf-8"))


@lru_cache(maxsize=None)
def ring(name: str, field: str = "Q"):
    return GroupRing.of(presentation(name), parse_field(field))


@lru_cache(maxsize=None)
def complex_(name: str, field: str = "Q"):
    return presentation_complex(presentation(name), ring=ring(name, field))


@lru_cache(maxsize=None)
def koszul(name: str, field: str = "Q"):
    return load_resolution(corpus_path(f"{name}_koszul.res"), ring(name, field))


def character(name: str, values):
    return validate_character(tuple(values), presentation(name))


def random_word(rng: random.Random, ngens: int, max_len: int = 6) -> tuple:
    n = rng.randint(0, max_len)
    return tuple(rng.randrange(2 * ngens) for _ in range(n))


def random_element(rng: random.Random, R, terms: int = 4, max_len: int = 4, coeff_range: int = 3):
    items = []
    for _ in range(rng.randint(1, terms)):
        c = rng.randint(-coeff_range, coeff_range)
        items.append((random_word(rng, R.presentation.rank, max_len), c))
    return R.from_terms(items)
