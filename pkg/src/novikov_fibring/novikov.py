"""Finite-precision arithmetic in the Novikov completion of RG.

A :class:`NovikovApprox` is a group ring element ``head`` together with a
precision ``kappa``: it stands for any Novikov series whose terms at
phi-levels ``<= kappa`` are exactly ``head``.  Exact group ring elements have
precision ``inf``.  Every operation works out which precision its inputs
support and raises :class:`InsufficientPrecision` when asked for more.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InsufficientPrecision, NonMonomialLeadingTerm, NotPositiveSupport, ShapeMismatch
from .groupring import (
    GroupRing,
    GroupRingElement,
    graded_support,
    leading_part,
    mul_truncated,
    truncate,
    valuation,
)
from .presentation import Character

INF = math.inf


class NovikovApprox:
    __slots__ = ("head", "precision", "phi")

    def __init__(self, head: GroupRingElement, precision, phi: Character):
        if precision != INF:
            head = truncate(head, precision, phi)
        self.head = head
        self.precision = precision
        self.phi = phi

    @classmethod
    def exact(cls, x: GroupRingElement, phi: Character) -> "NovikovApprox":
        return cls(x, INF, phi)

    @property
    def ring(self) -> GroupRing:
        return self.head.ring

    @property
    def is_exact(self) -> bool:
        return self.precision == INF

    def lower_valuation(self):
        """A lower bound for the valuation of every series this represents."""
        if self.head.terms:
            return valuation(self.head, self.phi)
        return self.precision + 1 if self.precision != INF else INF

    def known_zero(self) -> bool:
        return not self.head.terms

    def truncated(self, kappa) -> "NovikovApprox":
        if kappa > self.precision:
            raise InsufficientPrecision(kappa, self.precision)
        return NovikovApprox(self.head, kappa, self.phi)

    def cap(self, kappa) -> "NovikovApprox":
        return self if kappa >= self.precision else NovikovApprox(self.head, kappa, self.phi)

    def __add__(self, other):
        return nov_add(self, _lift(other, self))

    def __sub__(self, other):
        return nov_sub(self, _lift(other, self))

    def __neg__(self):
        return NovikovApprox(-self.head, self.precision, self.phi)

    def __mul__(self, other):
        return nov_mul(self, _lift(other, self))

    def __eq__(self, other):
        if not isinstance(other, NovikovApprox):
            return NotImplemented
        return self.precision == other.precision and self.head == other.head

    def agrees_with(self, other: "NovikovApprox", kappa) -> bool:
        """True when both are known and equal at every level <= kappa."""
        if kappa > self.precision or kappa > other.precision:
            return False
        return truncate(self.head, kappa, self.phi) == truncate(other.head, kappa, self.phi)

    def __repr__(self):
        p = "inf" if self.precision == INF else self.precision
        return f"NovikovApprox({self.head}, precision={p})"

    def to_json(self) -> dict:
        return {
            "terms": self.head.to_json(self.phi),
            "precision": None if self.precision == INF else self.precision,
        }


def _lift(x, like: NovikovApprox) -> NovikovApprox:
    if isinstance(x, NovikovApprox):
        return x
    if isinstance(x, GroupRingElement):
        return NovikovApprox.exact(x, like.phi)
    return NovikovApprox.exact(like.ring.scalar(x), like.phi)


def _resolve(kappa, available):
    if kappa is None:
        return available
    if kappa > available:
        raise InsufficientPrecision(kappa, available)
    return kappa


def nov_add(x: NovikovApprox, y: NovikovApprox, kappa=None) -> NovikovApprox:
    k = _resolve(kappa, min(x.precision, y.precision))
    return NovikovApprox(x.head + y.head, k, x.phi)


def nov_sub(x: NovikovApprox, y: NovikovApprox, kappa=None) -> NovikovApprox:
    k = _resolve(kappa, min(x.precision, y.precision))
    return NovikovApprox(x.head - y.head, k, x.phi)


def mul_available(x: NovikovApprox, y: NovikovApprox):
    vx, vy = x.lower_valuation(), y.lower_valuation()
    if vx == INF or vy == INF:
        return INF
    return min(x.precision + vy, y.precision + vx)


def nov_mul(x: NovikovApprox, y: NovikovApprox, kappa=None) -> NovikovApprox:
    """Product exact at every level <= kappa.

    Each factor must be known to ``kappa`` minus the other's valuation.
    """
    avail = mul_available(x, y)
    k = _resolve(kappa, avail)
    if not x.head.terms or not y.head.terms:
        return NovikovApprox(x.ring.zero(), k, x.phi)
    return NovikovApprox(mul_truncated(x.head, y.head, x.phi, k), k, x.phi)


def is_admissible_pivot(x: NovikovApprox) -> bool:
    """Leading level part is a single monomial with a unit coefficient."""
    if not x.head.terms:
        return False
    lead = leading_part(x.head, x.phi)
    if len(lead.terms) != 1:
        return False
    (c,) = lead.terms.values()
    return x.ring.coeffs.is_unit(c)


def nov_invert(x: NovikovApprox, kappa=None) -> NovikovApprox:
    """Inverse of an element whose leading part is a unit monomial c*g.

    The result is known at least to ``kappa``, and deeper when the leading
    level is negative and the input allows it, so that ``x * y`` is known
    to ``kappa``.

    Writing ``x = c g (1 - a)`` with ``a`` of positive support, the inverse
    is ``(1 + a + a^2 + ...) g^-1 c^-1``; the sum is finite at each level
    because the valuation of ``a^i`` is at least ``i``.
    """
    phi = x.phi
    ring = x.ring
    co = ring.coeffs
    if not x.head.terms:
        raise NonMonomialLeadingTerm("cannot invert an element with unknown leading term")
    lead = leading_part(x.head, phi)
    if len(lead.terms) != 1:
        raise NonMonomialLeadingTerm(f"leading part {lead} is not a monomial")
    ((g, c),) = lead.terms.items()
    if not co.is_unit(c):
        raise NonMonomialLeadingTerm(f"leading coefficient {c} is not a unit of {co}")
    v = phi(g)
    ginv = ring.word_inverse(g)
    cinv = co.inv(c)
    if x.is_exact and len(x.head.terms) == 1:
        return NovikovApprox(ring.monomial(ginv, cinv), INF, phi)
    avail = x.precision - 2 * v
    if kappa is None:
        if avail == INF:
            raise InsufficientPrecision(INF, "finite (series inverse needs a target precision)")
        kappa = avail
    elif kappa > avail:
        raise InsufficientPrecision(kappa, avail)
    else:
        # with a negative leading level, go deeper when possible so that
        # x * y is still known to kappa
        kappa = max(kappa, min(avail, kappa - v))
    bound = kappa + v
    shifted = mul_truncated(ring.monomial(ginv, cinv), x.head, phi, bound)
    a = ring.one() - shifted
    total = ring.one()
    power = ring.one()
    while True:
        power = mul_truncated(power, a, phi, bound)
        if not power.terms:
            break
        total = total + power
    y = mul_truncated(total, ring.monomial(ginv, cinv), phi, kappa)
    return NovikovApprox(y, kappa, phi)


# ------------------------------------------------------------------ matrices


class NovikovMatrix:
    """Matrix of Novikov approximations under a common character."""

    def __init__(self, rows: Sequence[Sequence[NovikovApprox]], phi: Character, shape=None):
        self.rows = [list(r) for r in rows]
        self.phi = phi
        if shape is None:
            shape = (len(self.rows), len(self.rows[0]) if self.rows else 0)
        self.shape = shape
        for r in self.rows:
            if len(r) != shape[1]:
                raise ShapeMismatch("ragged Novikov matrix")

    @classmethod
    def exact(cls, mat: Sequence[Sequence[GroupRingElement]], phi: Character, cols=None) -> "NovikovMatrix":
        rows = [[NovikovApprox.exact(x, phi) for x in row] for row in mat]
        return cls(rows, phi, (len(rows), len(rows[0]) if rows else (cols or 0)))

    @classmethod
    def identity(cls, ring: GroupRing, n: int, phi: Character) -> "NovikovMatrix":
        return cls(
            [[NovikovApprox.exact(ring.one() if i == j else ring.zero(), phi) for j in range(n)] for i in range(n)],
            phi,
            (n, n),
        )

    @classmethod
    def zeros(cls, ring: GroupRing, rows: int, cols: int, phi: Character) -> "NovikovMatrix":
        return cls([[NovikovApprox.exact(ring.zero(), phi) for _ in range(cols)] for _ in range(rows)], phi, (rows, cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    @property
    def precision(self):
        return min((x.precision for r in self.rows for x in r), default=INF)

    def lower_valuation(self):
        return min((x.lower_valuation() for r in self.rows for x in r), default=INF)

    def uniform(self) -> "NovikovMatrix":
        """Truncate every entry to the common (minimal) precision."""
        k = self.precision
        return NovikovMatrix([[x.cap(k) for x in r] for r in self.rows], self.phi, self.shape)

    def truncated(self, kappa) -> "NovikovMatrix":
        return NovikovMatrix([[x.truncated(kappa) for x in r] for r in self.rows], self.phi, self.shape)

    def cap(self, kappa) -> "NovikovMatrix":
        return NovikovMatrix([[x.cap(kappa) for x in r] for r in self.rows], self.phi, self.shape)

    def heads(self) -> list:
        return [[x.head for x in r] for r in self.rows]

    def truncate_heads(self, kappa) -> list:
        """Group ring matrix of the heads truncated at ``kappa``."""
        return [[truncate(x.head, kappa, self.phi) for x in r] for r in self.rows]

    def is_known_zero(self) -> bool:
        return all(x.known_zero() for r in self.rows for x in r)

    def __matmul__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        return nmat_mul(self, other)

    def __sub__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        return NovikovMatrix(
            [[nov_sub(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.phi, self.shape
        )

    def __add__(self, other: "NovikovMatrix") -> "NovikovMatrix":
        return NovikovMatrix(
            [[nov_add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.rows, other.rows)], self.phi, self.shape
        )

    def agrees_with(self, other: "NovikovMatrix", kappa) -> bool:
        return self.shape == other.shape and all(
            a.agrees_with(b, kappa) for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb)
        )

    def to_json(self) -> dict:
        return {
            "precision": None if self.precision == INF else self.precision,
            "entries": [[x.head.to_json(self.phi) for x in r] for r in self.rows],
        }


def nmat_mul(a: NovikovMatrix, b: NovikovMatrix, kappa=None, cap=INF) -> NovikovMatrix:
    """Matrix product; each entry is exact to the precision its terms allow.

    ``kappa`` demands a precision (raising if unavailable); ``cap`` merely
    limits the work done.
    """
    m, n = a.shape
    n2, p = b.shape
    if n != n2:
        raise ShapeMismatch(f"cannot multiply {a.shape} by {b.shape}")
    phi = a.phi
    ring = _ring_of(a, b)
    rows = []
    for i in range(m):
        row = []
        for j in range(p):
            prec = INF
            for k in range(n):
                prec = min(prec, mul_available(a.rows[i][k], b.rows[k][j]))
            target = min(prec, cap)
            if kappa is not None:
                if kappa > prec:
                    raise InsufficientPrecision(kappa, prec)
                target = kappa
            acc = ring.zero()
            for k in range(n):
                x, y = a.rows[i][k], b.rows[k][j]
                if x.head.terms and y.head.terms:
                    acc = acc + mul_truncated(x.head, y.head, phi, target)
            row.append(NovikovApprox(acc, target, phi))
        rows.append(row)
    return NovikovMatrix(rows, phi, (m, p))


def _ring_of(*mats) -> GroupRing:
    for m in mats:
        for r in m.rows:
            for x in r:
                return x.ring
    raise ShapeMismatch("cannot infer the ring of empty matrices")


def geometric_transform(A: NovikovMatrix, B: NovikovMatrix, kappa, side: str = "left") -> NovikovMatrix:
    """``(sum_i A^i) B`` (or ``B (sum_i A^i)`` for ``side='right'``) at precision kappa.

    Every entry of ``A`` must have positive support, so the i-th term has
    valuation at least ``i`` plus that of ``B`` and the sum is finite at
    each level.
    """
    n, n2 = A.shape
    if n != n2:
        raise ShapeMismatch("geometric transform needs a square matrix")
    for i, row in enumerate(A.rows):
        for j, x in enumerate(row):
            if any(A.phi(w) <= 0 for w in x.head.terms) or x.precision < 0:
                raise NotPositiveSupport(f"entry ({i}, {j}) of A is not of positive support")
    vA = max(1, A.lower_valuation()) if A.lower_valuation() != INF else INF
    acc = B.cap(kappa)
    if kappa > acc.precision:
        raise InsufficientPrecision(kappa, acc.precision)
    acc = B.truncated(kappa) if B.precision != INF else B.cap(kappa)
    term = acc
    if vA == INF:
        return acc
    while not term.is_known_zero():
        term = nmat_mul(A, term, kappa) if side == "left" else nmat_mul(term, A, kappa)
        acc = acc + term
    return acc


# --------------------------------------------------------------- elimination


@dataclass
class StuckReport:
    rows: list
    cols: list
    entries: list  # serialised leading parts of the remaining block
    reason: str

    def to_json(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "reason": self.reason, "leading_parts": self.entries}


@dataclass
class EliminationRecord:
    pivots: list  # (row, col, valuation)
    transcript: list  # ("row", target, source, multiplier) / ("col", target, source, multiplier)
    echelon: NovikovMatrix
    left: NovikovMatrix
    right: NovikovMatrix
    pivot_inverses: list = field(default_factory=list)
    stuck: StuckReport | None = None
    steps: int = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    @property
    def complete(self) -> bool:
        return self.stuck is None


class StepBudgetExhausted(Exception):
    pass


def eliminate(M, kappa, phi: Character | None = None, max_steps: int = 10**6) -> EliminationRecord:
    """Row and column reduce ``M`` at working precision ``kappa``.

    Only pivots whose leading level part is a unit monomial are used; among
    those the one of minimal valuation, then smallest (row, col), is taken.
    Produces ``left @ M @ right == echelon`` with the pivots the only
    nonzero entries, or stops with a :class:`StuckReport`.
    """
    if not isinstance(M, NovikovMatrix):
        M = NovikovMatrix.exact(M, phi)
    phi = M.phi
    m, k = M.shape
    ring = _ring_of(M) if m and k else None
    A = M.cap(kappa)
    if ring is None:
        return EliminationRecord([], [], A, A, A)
    L = NovikovMatrix.identity(ring, m, phi)
    R = NovikovMatrix.identity(ring, k, phi)
    rows_active = list(range(m))
    cols_active = list(range(k))
    pivots, transcript, inverses = [], [], []
    steps = 0

    def fmt(x):
        return x.head.to_json(phi)

    while rows_active and cols_active:
        best = None
        for i in rows_active:
            for j in cols_active:
                x = A.rows[i][j]
                if is_admissible_pivot(x):
                    key = (valuation(x.head, phi), i, j)
                    if best is None or key < best:
                        best = key
        if best is None:
            nonzero = [(i, j) for i in rows_active for j in cols_active if not A.rows[i][j].known_zero()]
            if nonzero:
                stuck = StuckReport(
                    list(rows_active),
                    list(cols_active),
                    [[leading_part(A.rows[i][j].head, phi).to_json(phi) for j in cols_active] for i in rows_active],
                    "no entry of the remaining block has a unit monomial leading term",
                )
                return EliminationRecord(pivots, transcript, A, L, R, inverses, stuck, steps)
            break
        v, i, j = best
        d = A.rows[i][j]
        dinv = nov_invert(d, min(kappa, d.precision - 2 * v) if d.precision != INF else kappa)
        inverses.append(dinv)
        pivots.append((i, j, v))
        for r in rows_active:
            if r == i or A.rows[r][j].known_zero():
                continue
            c = nov_mul(A.rows[r][j], dinv).cap(kappa)
            transcript.append(("row", r, i, fmt(c)))
            A.rows[r] = [nov_sub(A.rows[r][q], nov_mul(c, A.rows[i][q]).cap(kappa)).cap(kappa) for q in range(k)]
            L.rows[r] = [nov_sub(L.rows[r][q], nov_mul(c, L.rows[i][q]).cap(kappa)).cap(kappa) for q in range(m)]
            steps += k + m
        for q in cols_active:
            if q == j or A.rows[i][q].known_zero():
                continue
            c = nov_mul(dinv, A.rows[i][q]).cap(kappa)
            transcript.append(("col", q, j, fmt(c)))
            for r in range(m):
                A.rows[r][q] = nov_sub(A.rows[r][q], nov_mul(A.rows[r][j], c).cap(kappa)).cap(kappa)
            for r in range(k):
                R.rows[r][q] = nov_sub(R.rows[r][q], nov_mul(R.rows[r][j], c).cap(kappa)).cap(kappa)
            steps += k + m
        if steps > max_steps:
            raise StepBudgetExhausted(f"elimination exceeded {max_steps} steps")
        rows_active.remove(i)
        cols_active.remove(j)
    return EliminationRecord(pivots, transcript, A, L, R, inverses, None, steps)


class NotInRowSpace(Exception):
    def __init__(self, row, column):
        self.row = row
        self.column = column
        super().__init__(f"row {row} of the target has a nonzero component in non-pivot column {column}")


def solve_left(record: EliminationRecord, T: NovikovMatrix, kappa) -> NovikovMatrix:
    """Solve ``S @ M = T`` using a complete elimination record of ``M``.

    With ``left @ M @ right = echelon`` one needs ``u @ echelon = T @ right``,
    which is solved pivot by pivot, and then ``S = u @ left``.
    """
    if record.stuck is not None:
        raise ValueError("elimination record is stuck")
    phi = T.phi
    m = record.left.shape[0]
    TR = nmat_mul(T, record.right, cap=kappa)
    pivot_cols = {j for _, j, _ in record.pivots}
    ring = _ring_of(T)
    U = NovikovMatrix.zeros(ring, T.shape[0], m, phi)
    for r in range(T.shape[0]):
        for q in range(TR.shape[1]):
            if q not in pivot_cols and not TR.rows[r][q].known_zero():
                raise NotInRowSpace(r, q)
        for (i, j, _), dinv in zip(record.pivots, record.pivot_inverses):
            U.rows[r][i] = nov_mul(TR.rows[r][j], dinv).cap(kappa)
    return nmat_mul(U, record.left, cap=kappa)
