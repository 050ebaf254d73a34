"""Finite free chain complexes over a group ring.

Chains are row vectors: ``C_i = RG^{n_i}`` and the boundary ``D_i`` is an
``n_i x n_{i-1}`` matrix acting on the right, so ``x |-> x @ D_i``.  With this
orientation the complex condition reads ``D_{i+1} @ D_i == 0`` and the
presentation complex has ``D_1`` the column ``(x_j - 1)`` and ``D_2`` the Fox
Jacobian (one row per relator).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .coefficients import CoefficientRing
from .errors import NotAComplex, ResolutionFormatError, ShapeMismatch
from .groupring import GroupRing, mat_is_zero, mat_mul, parse_element, zero_matrix
from .presentation import Presentation, RewritingSystem, fox_derivative


@dataclass
class ChainComplex:
    """``ranks[i]`` is the rank of ``C_i``; ``boundaries[i]`` is ``D_i`` for ``i >= 1``.

    ``complete`` records that the complex is a whole resolution, so that
    ``C_{top+1} = 0`` may be assumed.
    """

    ring: GroupRing
    ranks: list
    boundaries: dict = field(default_factory=dict)
    complete: bool = False
    source: str = "presentation"
    text: str | None = None

    @property
    def top(self) -> int:
        return len(self.ranks) - 1

    def rank(self, i: int) -> int:
        if 0 <= i < len(self.ranks):
            return self.ranks[i]
        return 0

    def boundary(self, i: int) -> list:
        """``D_i``; outside the stored range it is the zero map of the right shape."""
        if i in self.boundaries:
            return self.boundaries[i]
        return zero_matrix(self.ring, self.rank(i), self.rank(i - 1))

    def max_certifiable_degree(self) -> int:
        return self.top if self.complete else self.top - 1

    def with_coefficients(self, coeffs: CoefficientRing) -> "ChainComplex":
        """Push every boundary entry through the coefficient change."""
        ring = self.ring.with_coefficients(coeffs)
        bds = {i: [[ring.from_terms(x.terms) for x in row] for row in d] for i, d in self.boundaries.items()}
        return ChainComplex(ring, list(self.ranks), bds, self.complete, self.source, self.text)


def presentation_complex(
    p: Presentation,
    rs: RewritingSystem | None = None,
    coeffs: CoefficientRing | None = None,
    ring: GroupRing | None = None,
) -> ChainComplex:
    """The cellular chain complex of the universal cover of the presentation 2-complex."""
    if ring is None:
        ring = GroupRing.of(p, coeffs, rs)
    n = p.rank
    d1 = [[ring.generator(j) - 1] for j in range(n)]
    d2 = [[fox_derivative(r, j, ring) for j in range(n)] for r in p.relators]
    bds = {1: d1}
    ranks = [1, n]
    if p.relators:
        bds[2] = d2
        ranks.append(len(p.relators))
    c = ChainComplex(ring, ranks, bds, complete=False, source="presentation")
    if not verify_complex(c):
        raise NotAComplex("presentation complex fails D2 @ D1 == 0; is the rewriting system confluent?")
    if not p.relators:
        # the presentation complex of a free group is a graph, hence aspherical
        c.complete = True
    return c


def verify_complex(c: ChainComplex) -> bool:
    """True iff every consecutive composition is exactly zero and shapes fit."""
    for i, d in c.boundaries.items():
        if len(d) != c.rank(i) or any(len(row) != c.rank(i - 1) for row in d):
            return False
    for i in range(1, c.top):
        if i in c.boundaries and i + 1 in c.boundaries:
            if c.rank(i + 1) and c.rank(i - 1):
                if not mat_is_zero(mat_mul(c.boundaries[i + 1], c.boundaries[i], c.ring)):
                    return False
    return True


@dataclass
class CochainData:
    """Coboundaries of ``Hom(C, RG)`` made into left modules.

    ``coboundaries[i]`` maps ``C^{i-1} -> C^i`` and is the transpose of
    ``D_i`` with every entry sent through ``g -> g^-1``.  Since
    ``phi(g^-1) = -phi(g)`` the support conditions flip sign.
    """

    ring: GroupRing
    ranks: list
    coboundaries: dict

    def compose_is_zero(self) -> bool:
        for i in self.coboundaries:
            if i + 1 in self.coboundaries and self.ranks[i - 1] and self.ranks[i + 1]:
                # cochains are row vectors too: y |-> y @ delta_i
                if not mat_is_zero(mat_mul(self.coboundaries[i], self.coboundaries[i + 1], self.ring)):
                    return False
        return True


def _dual_matrix(d: list, rows: int, cols: int) -> list:
    return [[d[i][j].involution() for i in range(rows)] for j in range(cols)]


def dualize(c: ChainComplex) -> CochainData:
    cob = {i: _dual_matrix(d, c.rank(i), c.rank(i - 1)) for i, d in c.boundaries.items()}
    return CochainData(c.ring, list(c.ranks), cob)


def undualize(d: CochainData) -> ChainComplex:
    """Inverse of :func:`dualize` (the involution and transpose are both involutive)."""
    bds = {i: _dual_matrix(m, d.ranks[i - 1], d.ranks[i]) for i, m in d.coboundaries.items()}
    return ChainComplex(d.ring, list(d.ranks), bds)


# ------------------------------------------------------------ resolution files

_RANKS = re.compile(r"ranks((?:\s+\d+)+)\s*$")
_BOUNDARY = re.compile(r"boundary\s+(\d+)\s*$")


def parse_resolution(text: str, ring: GroupRing) -> ChainComplex:
    """Parse a resolution file.

    Format (``#`` starts a comment, blank lines ignored)::

        ranks 1 2 1
        complete            # optional: the complex is a whole resolution
        boundary 1
        a - 1               # D_1 entries, row by row (n_1 rows of n_0)
        b - 1
        boundary 2
        1 - b
        a - 1

    Block ``boundary i`` holds the ``n_i * n_{i-1}`` entries of ``D_i``.
    """
    ranks = None
    complete = False
    blocks: dict[int, list] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _RANKS.match(line)
        if m:
            if ranks is not None:
                raise ResolutionFormatError(f"line {lineno}: ranks declared twice")
            ranks = [int(x) for x in m.group(1).split()]
            continue
        if line == "complete":
            complete = True
            continue
        m = _BOUNDARY.match(line)
        if m:
            current = int(m.group(1))
            if current in blocks:
                raise ResolutionFormatError(f"line {lineno}: boundary {current} given twice")
            blocks[current] = []
            continue
        if current is None:
            raise ResolutionFormatError(f"line {lineno}: entry outside a boundary block")
        try:
            blocks[current].append(parse_element(ring, line))
        except Exception as exc:  # re-raise with the location
            raise ResolutionFormatError(f"line {lineno}: {exc}") from exc
    if ranks is None:
        raise ResolutionFormatError("missing 'ranks' header")
    bds = {}
    for i, entries in blocks.items():
        if not 1 <= i < len(ranks):
            raise ResolutionFormatError(f"boundary {i} outside the declared ranks")
        rows, cols = ranks[i], ranks[i - 1]
        if len(entries) != rows * cols:
            raise ResolutionFormatError(
                f"boundary {i} has {len(entries)} entries, expected {rows} x {cols} = {rows * cols}"
            )
        bds[i] = [entries[r * cols : (r + 1) * cols] for r in range(rows)]
    for i in range(1, len(ranks)):
        if i not in bds:
            raise ResolutionFormatError(f"boundary {i} missing")
    c = ChainComplex(ring, ranks, bds, complete=complete, source="resolution", text=text)
    if not verify_complex(c):
        raise NotAComplex("consecutive boundaries do not compose to zero")
    return c


def load_resolution(path, ring: GroupRing) -> ChainComplex:
    return parse_resolution(Path(path).read_text(encoding="utf-8"), ring)


def check_shapes(c: ChainComplex, i: int, s: list, rows: int, cols: int, what: str):
    if len(s) != rows or any(len(r) != cols for r in s):
        got = (len(s), len(s[0]) if s else 0)
        raise ShapeMismatch(f"{what} in degree {i} has shape {got}, expected {(rows, cols)}")
