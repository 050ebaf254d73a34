"""Independent ground truth for refuting fibring.

These routines never look at certificates.  They are the only place a
"not fibred" answer can come from, so they are kept small and auditable.

Brown's criterion for a two-generator one-relator group ``<a, b | r>``
(K. S. Brown, "Trees, valuations, and the Bieri-Neumann-Strebel invariant",
Invent. Math. 90, 1987): walk once around the cyclically reduced relator and
record the height ``phi(prefix)`` at every vertex.  The class ``[phi]`` lies
in the BNS invariant exactly when the minimum height is attained at a single
vertex, or at two cyclically consecutive vertices (a single edge on which
``phi`` vanishes).  The membership of ``[-phi]`` is read off the maximum.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import NotFreeAbelian, NotOneRelator, OracleNotApplicable
from .presentation import Character, Presentation, cyclically_reduce, free_reduce


@dataclass(frozen=True)
class SigmaMembership:
    in_sigma_plus: bool
    in_sigma_minus: bool
    method: str
    trace: dict = field(default_factory=dict, compare=False)

    @property
    def kernel_finitely_generated(self) -> bool:
        return self.in_sigma_plus and self.in_sigma_minus

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "in_sigma_plus": self.in_sigma_plus,
            "in_sigma_minus": self.in_sigma_minus,
            "kernel_finitely_generated": self.kernel_finitely_generated,
            "trace": self.trace,
        }


def _extremum_is_simple(heights: list, positions: list) -> bool:
    """One vertex, or two vertices adjacent on the cyclic walk."""
    if len(positions) == 1:
        return True
    if len(positions) == 2:
        i, j = positions
        n = len(heights)
        return (j - i) % n == 1 or (i - j) % n == 1
    return False


def height_walk(r, phi: Character) -> list:
    """Heights of the cyclic walk: vertex k is the prefix of length k (k < len r)."""
    heights, h = [], 0
    for letter in r:
        heights.append(h)
        h += phi((letter,))
    if h != 0:
        raise ValueError("character does not vanish on the relator")
    return heights


def brown_sigma(p: Presentation, phi: Character) -> SigmaMembership:
    if len(p.relators) != 1:
        raise NotOneRelator(f"Brown's criterion needs exactly one relator, got {len(p.relators)}")
    if p.rank != 2:
        raise OracleNotApplicable("Brown's criterion is implemented for two generators only")
    r = cyclically_reduce(free_reduce(p.relators[0]))
    used = {l >> 1 for l in r}
    if used != {0, 1}:
        raise OracleNotApplicable("the relator must involve both generators")
    heights = height_walk(r, phi)
    lo, hi = min(heights), max(heights)
    at_min = [k for k, h in enumerate(heights) if h == lo]
    at_max = [k for k, h in enumerate(heights) if h == hi]
    plus = _extremum_is_simple(heights, at_min)
    minus = _extremum_is_simple(heights, at_max)
    trace = {
        "relator": p.format_word(r),
        "heights": heights,
        "minimum": lo,
        "minimum_vertices": at_min,
        "maximum": hi,
        "maximum_vertices": at_max,
    }
    return SigmaMembership(plus, minus, "brown", trace)


def free_group_sigma(p: Presentation, phi: Character) -> SigmaMembership:
    """Free groups of rank at least two have empty BNS invariant."""
    if p.relators:
        raise OracleNotApplicable("presentation has relators")
    if p.rank < 2:
        raise OracleNotApplicable("the infinite cyclic group has full invariant")
    return SigmaMembership(False, False, "free-group", {"rank": p.rank})


def _is_commutator(r) -> tuple | None:
    """Return the generator pair if ``r`` is a cyclic conjugate of [x, y]^{+-1}."""
    if len(r) != 4:
        return None
    for k in range(4):
        w = r[k:] + r[:k]
        a, b, c, d = w
        if c == a ^ 1 and d == b ^ 1 and a >> 1 != b >> 1:
            return tuple(sorted((a >> 1, b >> 1)))
    return None


def is_free_abelian_presentation(p: Presentation) -> bool:
    pairs = set()
    for r in p.relators:
        pr = _is_commutator(cyclically_reduce(r))
        if pr is None:
            return False
        pairs.add(pr)
    return pairs == set(combinations(range(p.rank), 2))


def abelian_kernel_fg(p: Presentation, phi: Character) -> bool:
    """Kernel of a nonzero character of Z^n is Z^(n-1), hence finitely generated."""
    if not is_free_abelian_presentation(p):
        raise NotFreeAbelian("relators are not exactly the pairwise commutators of the generators")
    if not any(phi.values):
        raise ValueError("zero character")
    return True


def oracle_sigma(p: Presentation, phi: Character) -> SigmaMembership | None:
    """Consult whichever oracle applies; ``None`` when none does."""
    if not p.relators:
        try:
            return free_group_sigma(p, phi)
        except OracleNotApplicable:
            return SigmaMembership(True, True, "cyclic", {"rank": p.rank})
    if is_free_abelian_presentation(p):
        abelian_kernel_fg(p, phi)
        return SigmaMembership(True, True, "free-abelian", {"rank": p.rank})
    try:
        return brown_sigma(p, phi)
    except OracleNotApplicable:
        return None
