"""Group rings RG as sparse formal sums of normal-form words.

A :class:`GroupRing` bundles the presentation, a confluent rewriting system
(the word-problem oracle) and a coefficient ring.  Elements are immutable
maps from normal-form words to nonzero scalars.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from bisect import bisect_right
from typing import Iterable, Mapping

from .coefficients import CoefficientRing
from .errors import PresentationSyntaxError, UndeclaredGenerator
from .presentation import (
    Character,
    Presentation,
    RewritingSystem,
    free_rewriting_system,
    inverse_word,
    knuth_bendix,
    syllables,
)

INF = math.inf


class GroupRing:
    def __init__(self, presentation: Presentation, rs: RewritingSystem, coeffs: CoefficientRing):
        self.presentation = presentation
        self.rs = rs
        self.coeffs = coeffs
        self._products: dict[tuple, tuple] = {}

    @classmethod
    def of(cls, presentation: Presentation, coeffs: CoefficientRing | None = None, rs: RewritingSystem | None = None):
        """Group ring of a presentation, completing it with Knuth-Bendix if needed."""
        if rs is None:
            rs = knuth_bendix(presentation)
        return cls(presentation, rs, coeffs or CoefficientRing.rationals())

    @classmethod
    def free(cls, presentation: Presentation, coeffs: CoefficientRing | None = None):
        free_p = Presentation(presentation.generators, (), presentation.name + " (free)")
        return cls(free_p, free_rewriting_system(presentation.rank), coeffs or CoefficientRing.integers())

    def with_coefficients(self, coeffs: CoefficientRing) -> "GroupRing":
        return GroupRing(self.presentation, self.rs, coeffs)

    def __repr__(self):
        return f"GroupRing({self.presentation.name or 'G'}, {self.coeffs})"

    # -- words
    def word_product(self, u: tuple, v: tuple) -> tuple:
        if not u:
            return v
        if not v:
            return u
        key = (u, v)
        w = self._products.get(key)
        if w is None:
            w = self.rs.normal_form(u + v)
            if len(self._products) < 2_000_000:
                self._products[key] = w
        return w

    def word_inverse(self, u: tuple) -> tuple:
        return self.rs.normal_form(inverse_word(u))

    # -- elements
    def from_terms(self, terms: Mapping | Iterable) -> "GroupRingElement":
        items = terms.items() if isinstance(terms, Mapping) else terms
        out: dict[tuple, object] = {}
        nf = self.rs.normal_form
        co = self.coeffs
        for w, c in items:
            w = nf(w)
            c = co.coerce(c)
            if w in out:
                c = co.add(out[w], c)
            out[w] = c
        return GroupRingElement(self, {w: c for w, c in out.items() if c != 0})

    def zero(self) -> "GroupRingElement":
        return GroupRingElement(self, {})

    def one(self) -> "GroupRingElement":
        return GroupRingElement(self, {(): 1})

    def monomial(self, word, coeff=1) -> "GroupRingElement":
        return self.from_terms({tuple(word): coeff})

    def scalar(self, c) -> "GroupRingElement":
        return self.from_terms({(): c})

    def generator(self, name_or_index) -> "GroupRingElement":
        i = name_or_index if isinstance(name_or_index, int) else self.presentation.generators.index(name_or_index)
        return self.monomial((2 * i,))

    def image(self, x: "GroupRingElement") -> "GroupRingElement":
        """Map an element of another group ring on the same generators into this one."""
        return self.from_terms(x.terms)

    def parse(self, text: str) -> "GroupRingElement":
        return parse_element(self, text)


class GroupRingElement:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: GroupRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- basic protocol
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, GroupRingElement):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.scalar(other).terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"<{format_element(self)}>"

    def __str__(self):
        return format_element(self)

    @property
    def support(self):
        return list(self.terms)

    def coefficient(self, word) -> object:
        return self.terms.get(tuple(word), 0)

    def sorted_terms(self, phi: Character | None = None):
        if phi is None:
            return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))
        return sorted(self.terms.items(), key=lambda kv: (phi(kv[0]), len(kv[0]), kv[0]))

    # -- arithmetic
    def _coerce(self, other):
        if isinstance(other, GroupRingElement):
            return other
        return self.ring.scalar(other)

    def __add__(self, other):
        other = self._coerce(other)
        co = self.ring.coeffs
        out = dict(self.terms)
        for w, c in other.terms.items():
            s = co.add(out[w], c) if w in out else c
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
        return GroupRingElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        co = self.ring.coeffs
        return GroupRingElement(self.ring, {w: co.neg(c) for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, GroupRingElement):
            return self.scale(other)
        return gr_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "GroupRingElement":
        co = self.ring.coeffs
        c = co.coerce(c)
        if c == 0:
            return self.ring.zero()
        return GroupRingElement(self.ring, {w: v for w, v in ((w, co.mul(c, x)) for w, x in self.terms.items()) if v != 0})

    def involution(self) -> "GroupRingElement":
        """Image under the anti-automorphism g -> g^-1 (coefficients kept)."""
        inv = self.ring.word_inverse
        return GroupRingElement(self.ring, {inv(w): c for w, c in self.terms.items()})

    def left_shift(self, word) -> "GroupRingElement":
        return self.ring.monomial(word) * self

    def to_json(self, phi: Character | None = None) -> list:
        p = self.ring.presentation
        return [{"word": p.format_word(w), "coeff": str(c)} for w, c in self.sorted_terms(phi)]


def element_from_json(ring: GroupRing, data: list) -> GroupRingElement:
    p = ring.presentation
    return ring.from_terms([(p.parse_word(t["word"]), t["coeff"]) for t in data])


def gr_add(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    return x + y


def gr_mul(x: GroupRingElement, y: GroupRingElement) -> GroupRingElement:
    ring = x.ring
    co = ring.coeffs
    wp = ring.word_product
    out: dict = {}
    for u, a in x.terms.items():
        for v, b in y.terms.items():
            w = wp(u, v)
            c = co.mul(a, b)
            if w in out:
                c = co.add(out[w], c)
            out[w] = c
    return GroupRingElement(ring, {w: c for w, c in out.items() if c != 0})


def mul_truncated(x: GroupRingElement, y: GroupRingElement, phi: Character, kappa) -> GroupRingElement:
    """The product x*y with only the terms at phi-level <= kappa."""
    if kappa == INF:
        return gr_mul(x, y)
    ring = x.ring
    co = ring.coeffs
    wp = ring.word_product
    ys = sorted(((phi(v), v, b) for v, b in y.terms.items()), key=lambda t: t[0])
    ylevels = [t[0] for t in ys]
    out: dict = {}
    for u, a in x.terms.items():
        lu = phi(u)
        stop = bisect_right(ylevels, kappa - lu)
        for k in range(stop):
            _, v, b = ys[k]
            w = wp(u, v)
            c = co.mul(a, b)
            if w in out:
                c = co.add(out[w], c)
            out[w] = c
    return GroupRingElement(ring, {w: c for w, c in out.items() if c != 0})


def valuation(x: GroupRingElement, phi: Character):
    """Minimum of phi over the support; +inf for zero."""
    if not x.terms:
        return INF
    return min(phi(w) for w in x.terms)


def top_level(x: GroupRingElement, phi: Character):
    if not x.terms:
        return -INF
    return max(phi(w) for w in x.terms)


def truncate(x, kappa, phi: Character) -> GroupRingElement:
    """Keep exactly the terms at phi-level at most ``kappa``."""
    head = getattr(x, "head", x)
    if kappa == INF:
        return head
    return GroupRingElement(head.ring, {w: c for w, c in head.terms.items() if phi(w) <= kappa})


def is_positive_support(x, phi: Character) -> bool:
    head = getattr(x, "head", x)
    return all(phi(w) > 0 for w in head.terms)


def graded_support(x: GroupRingElement, phi: Character) -> list:
    """Pairs (level, sub-sum) partitioning x by phi-level, increasing."""
    levels: dict[int, dict] = {}
    for w, c in x.terms.items():
        levels.setdefault(phi(w), {})[w] = c
    return [(lv, GroupRingElement(x.ring, levels[lv])) for lv in sorted(levels)]


def leading_part(x: GroupRingElement, phi: Character) -> GroupRingElement:
    if not x.terms:
        return x
    v = valuation(x, phi)
    return GroupRingElement(x.ring, {w: c for w, c in x.terms.items() if phi(w) == v})


# ------------------------------------------------------------------ matrices
# Matrices are lists of rows; row vectors are multiplied on the right.


def identity_matrix(ring: GroupRing, n: int) -> list:
    return [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)]


def zero_matrix(ring: GroupRing, rows: int, cols: int) -> list:
    return [[ring.zero() for _ in range(cols)] for _ in range(rows)]


def mat_mul(a: list, b: list, ring: GroupRing | None = None) -> list:
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise ValueError(f"shape mismatch {rows}x{len(a[0])} * {inner}x{cols}")
    ring = ring or (a[0][0].ring if a and a[0] else b[0][0].ring)
    out = []
    for i in range(rows):
        row = []
        for j in range(cols):
            acc = ring.zero()
            for k in range(inner):
                if a[i][k] and b[k][j]:
                    acc = acc + a[i][k] * b[k][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(a: list, b: list) -> list:
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a: list, b: list) -> list:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_is_zero(a: list) -> bool:
    return all(not x for row in a for x in row)


def mat_map(f, a: list) -> list:
    return [[f(x) for x in row] for row in a]


def mat_valuation(a: list, phi: Character):
    return min((valuation(x, phi) for row in a for x in row), default=INF)


def matrix_to_json(a: list, phi: Character | None = None) -> list:
    return [[x.to_json(phi) for x in row] for row in a]


def matrix_from_json(ring: GroupRing, data: list) -> list:
    return [[element_from_json(ring, x) for x in row] for row in data]


# ------------------------------------------------------------ text format

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<letter>[A-Za-z_][A-Za-z0-9_]*(?:\^[+-]?\d+)?)|(?P<op>[+\-*]))"
)


def parse_element(ring: GroupRing, text: str) -> GroupRingElement:
    """Parse ``coeff*word +- ...`` where a word is a product of letters.

    Factors are separated by ``*`` or whitespace; ``1`` alone is the
    identity.  Example: ``2*a*b^-1 - 1/2 + b``.
    """
    p = ring.presentation
    index = {g: i for i, g in enumerate(p.generators)}
    pos = 0
    terms: list = []
    sign, coeff, word, have_factor = 1, None, [], False
    pending_op = True  # start of expression behaves like after '+'

    def flush():
        nonlocal coeff, word, have_factor
        if have_factor:
            c = coeff if coeff is not None else 1
            terms.append((tuple(word), sign * _to_fraction(c)))
        coeff, word, have_factor = None, [], False

    text = text.strip()
    if not text or text == "0":
        return ring.zero()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PresentationSyntaxError(f"cannot parse group ring element near {text[pos:]!r}")
        pos = m.end()
        if m.group("op") in ("+", "-"):
            if have_factor:
                flush()
                sign = 1
            elif not pending_op:
                raise PresentationSyntaxError(f"dangling operator in {text!r}")
            sign = sign * (-1 if m.group("op") == "-" else 1)
            pending_op = True
            continue
        if m.group("op") == "*":
            if not have_factor:
                raise PresentationSyntaxError(f"'*' without left factor in {text!r}")
            continue
        pending_op = False
        if m.group("num") is not None:
            c = _to_fraction(m.group("num"))
            coeff = c if coeff is None else coeff * c
            have_factor = True
        else:
            tok = m.group("letter")
            name, _, exp = tok.partition("^")
            if name not in index:
                raise UndeclaredGenerator(f"undeclared generator {name!r} in {text!r}")
            e = int(exp) if exp else 1
            code = 2 * index[name] + (1 if e < 0 else 0)
            word.extend([code] * abs(e))
            have_factor = True
    if not have_factor:
        raise PresentationSyntaxError(f"expression ends with an operator: {text!r}")
    flush()
    return ring.from_terms(terms)


def _to_fraction(s):
    return Fraction(s)


def format_element(x: GroupRingElement) -> str:
    if not x.terms:
        return "0"
    p = x.ring.presentation
    parts = []
    for w, c in x.sorted_terms():
        neg = c < 0
        mag = -c if neg else c
        if not w:
            body = str(mag)
        else:
            word = "*".join(_letter_tokens(p, w))
            body = word if mag == 1 else f"{mag}*{word}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def _letter_tokens(p: Presentation, w) -> list:
    out = []
    for g, e in syllables(w):
        name = p.generators[g]
        out.append(name if e == 1 else f"{name}^{e}")
    return out
