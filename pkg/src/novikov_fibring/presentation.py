"""Finite presentations, words, characters and rewriting systems.

Words are tuples of letter codes: generator ``i`` is ``2*i`` and its formal
inverse is ``2*i + 1``.  With this encoding the natural integer order on
letters is the shortlex letter order (each generator immediately followed by
its inverse) and ``letter ^ 1`` is the inverse letter.
"""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Callable, Iterable, Mapping, Sequence

from .errors import (
    BudgetExhausted,
    DuplicateGenerator,
    NonzeroOnRelator,
    NotConfluent,
    PresentationSyntaxError,
    UndeclaredGenerator,
    ZeroCharacter,
)

Word = tuple  # tuple[int, ...]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_LETTER = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)(?:\^([+-]?\d+))?\Z")

DEFAULT_MAX_RULES = 10_000
DEFAULT_MAX_PAIRS = 100_000


def inverse_word(w: Word) -> Word:
    return tuple(l ^ 1 for l in reversed(w))


def free_reduce(w: Sequence[int]) -> Word:
    out: list[int] = []
    for l in w:
        if out and out[-1] == l ^ 1:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def cyclically_reduce(w: Sequence[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == w[j - 1] ^ 1:
        i += 1
        j -= 1
    return w[i:j]


def syllables(w: Word) -> list[tuple[int, int]]:
    """Group a word into (generator index, nonzero exponent) pairs."""
    out: list[list[int]] = []
    for l in w:
        g, e = l >> 1, (-1 if l & 1 else 1)
        if out and out[-1][0] == g and (out[-1][1] > 0) == (e > 0):
            out[-1][1] += e
        else:
            out.append([g, e])
    return [(g, e) for g, e in out]


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple
    name: str = ""
    rules: tuple = ()
    order: str = "shortlex"

    def __post_init__(self):
        seen = set()
        for g in self.generators:
            if not _IDENT.match(g):
                raise PresentationSyntaxError(f"invalid generator name {g!r}")
            if g in seen:
                raise DuplicateGenerator(f"generator {g!r} declared twice")
            seen.add(g)
        if self.order not in ORDERS:
            raise PresentationSyntaxError(f"unknown word order {self.order!r}")
        n = 2 * len(self.generators)
        for r in self.relators:
            if any(not 0 <= l < n for l in r):
                raise UndeclaredGenerator("relator uses an undeclared generator")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letter(self, l: int) -> str:
        g = self.generators[l >> 1]
        return g + "^-1" if l & 1 else g

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        parts = []
        for g, e in syllables(w):
            name = self.generators[g]
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def parse_word(self, text: str, line: int | None = None, offset: int = 0) -> Word:
        letters: list[int] = []
        index = {g: i for i, g in enumerate(self.generators)}
        for m in re.finditer(r"\S+", text):
            tok = m.group()
            if tok == "1":
                continue
            lm = _LETTER.match(tok)
            if not lm:
                raise PresentationSyntaxError(f"bad letter {tok!r}", line, offset + m.start() + 1)
            name, exp = lm.group(1), int(lm.group(2) or 1)
            if name not in index:
                raise UndeclaredGenerator(
                    f"undeclared generator {name!r}"
                    + (f" (line {line}, column {offset + m.start() + 1})" if line else "")
                )
            code = 2 * index[name] + (1 if exp < 0 else 0)
            letters.extend([code] * abs(exp))
        return tuple(letters)

    def to_text(self) -> str:
        lines = []
        if self.name:
            lines.append(f"group {self.name}")
        lines.append("gens " + " ".join(self.generators))
        if self.order != "shortlex":
            lines.append(f"order {self.order}")
        for r in self.relators:
            lines.append("rel " + self.format_word(r))
        for lhs, rhs in self.rules:
            lines.append(f"rule {self.format_word(lhs)} -> {self.format_word(rhs)}")
        return "\n".join(lines) + "\n"

    def exponent_matrix(self) -> list[list[int]]:
        """Rows: relators; columns: exponent sums of each generator."""
        rows = []
        for r in self.relators:
            row = [0] * self.rank
            for l in r:
                row[l >> 1] += -1 if l & 1 else 1
            rows.append(row)
        return rows


def parse_presentation(text: str) -> Presentation:
    """Parse the line-oriented presentation format.

    Statements: ``group <name>``, ``gens <id> ...``, ``rel <word>``,
    ``rule <word> -> <word>`` and ``order shortlex|recursive``.  ``#`` starts
    a comment.
    """
    name = ""
    gens: list[str] | None = None
    order = "shortlex"
    pending: list[tuple[str, int, int, str]] = []  # (kind, line, col, payload)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        col0 = len(line) - len(line.lstrip())
        keyword, _, rest = stripped.partition(" ")
        rest_col = col0 + len(keyword) + 1
        if keyword == "group":
            name = rest.strip()
        elif keyword == "gens":
            if gens is not None:
                raise PresentationSyntaxError("second 'gens' statement", lineno, col0 + 1)
            gens = rest.split()
            seen = set()
            for g in gens:
                if not _IDENT.match(g):
                    raise PresentationSyntaxError(f"invalid generator name {g!r}", lineno, rest_col + rest.find(g) + 1)
                if g in seen:
                    raise DuplicateGenerator(f"generator {g!r} declared twice (line {lineno})")
                seen.add(g)
        elif keyword == "order":
            order = rest.strip()
            if order not in ORDERS:
                raise PresentationSyntaxError(f"unknown word order {order!r}", lineno, rest_col + 1)
        elif keyword in ("rel", "rule"):
            pending.append((keyword, lineno, rest_col, rest))
        else:
            raise PresentationSyntaxError(f"unknown statement {keyword!r}", lineno, col0 + 1)
    if gens is None:
        raise PresentationSyntaxError("missing 'gens' statement")
    probe = Presentation(tuple(gens), (), name, (), order)
    relators, rules = [], []
    for kind, lineno, col, payload in pending:
        if kind == "rel":
            w = free_reduce(probe.parse_word(payload, lineno, col))
            if not w:
                raise PresentationSyntaxError("relator is empty after free reduction", lineno, col + 1)
            relators.append(w)
        else:
            if "->" not in payload:
                raise PresentationSyntaxError("rule needs '->'", lineno, col + 1)
            lhs_text, rhs_text = payload.split("->", 1)
            lhs = probe.parse_word(lhs_text, lineno, col)
            rhs = probe.parse_word(rhs_text, lineno, col + len(lhs_text) + 2)
            rules.append((lhs, rhs))
    return Presentation(tuple(gens), tuple(relators), name, tuple(rules), order)


# ---------------------------------------------------------------- characters


@dataclass(frozen=True)
class Character:
    """Integral character, stored primitive together with its positive scale.

    Calling the character on a word returns the value of the character as
    supplied, i.e. ``scale`` times the primitive value.
    """

    values: tuple
    scale: int = 1
    _letter_values: tuple = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        lv = []
        for v in self.values:
            lv.extend((v * self.scale, -v * self.scale))
        object.__setattr__(self, "_letter_values", tuple(lv))

    def __call__(self, w: Sequence[int]) -> int:
        lv = self._letter_values
        return sum(lv[l] for l in w)

    @property
    def primitive(self) -> "Character":
        return self if self.scale == 1 else Character(self.values, 1)

    @property
    def full_values(self) -> tuple:
        return tuple(v * self.scale for v in self.values)

    def __neg__(self) -> "Character":
        return Character(tuple(-v for v in self.values), self.scale)

    def scaled(self, k: int) -> "Character":
        if k <= 0:
            raise ValueError("scale must be positive")
        return Character(self.values, self.scale * k)

    def format(self, p: Presentation) -> str:
        return ",".join(f"{g}={v}" for g, v in zip(p.generators, self.full_values))


def validate_character(values: Mapping[str, int] | Sequence[int], p: Presentation) -> Character:
    if isinstance(values, Mapping):
        missing = [g for g in p.generators if g not in values]
        if missing:
            raise UndeclaredGenerator(f"no value for generator(s) {', '.join(missing)}")
        extra = [g for g in values if g not in p.generators]
        if extra:
            raise UndeclaredGenerator(f"unknown generator(s) {', '.join(extra)}")
        vals = [int(values[g]) for g in p.generators]
    else:
        vals = [int(v) for v in values]
        if len(vals) != p.rank:
            raise UndeclaredGenerator(f"expected {p.rank} values, got {len(vals)}")
    raw = Character(tuple(vals))
    for r in p.relators:
        v = raw(r)
        if v != 0:
            raise NonzeroOnRelator(p.format_word(r), v)
    g = 0
    for v in vals:
        g = gcd(g, v)
    if g == 0:
        raise ZeroCharacter("character vanishes on every generator")
    return Character(tuple(v // g for v in vals), g)


def parse_character(text: str, p: Presentation) -> Character:
    values = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*=\s*([+-]?\d+)", part)
        if not m:
            raise PresentationSyntaxError(f"bad character entry {part!r}")
        if m.group(1) in values:
            raise PresentationSyntaxError(f"generator {m.group(1)!r} given twice")
        values[m.group(1)] = int(m.group(2))
    return validate_character(values, p)


# ----------------------------------------------------------- word orderings


def shortlex_greater(u: Word, v: Word) -> bool:
    return (len(u), u) > (len(v), v)


@lru_cache(maxsize=1 << 16)
def recursive_greater(u: Word, v: Word) -> bool:
    """Recursive path ordering read from the left.

    ``u > v`` iff the tail of ``u`` is at least ``v``, or the first letter of
    ``u`` is larger and ``u`` beats the tail of ``v``, or the first letters
    agree and the tails compare.  Used for groups such as BS(1,2) whose
    shortlex completion is infinite.
    """
    if not u:
        return False
    if not v:
        return True
    a, u1 = u[0], u[1:]
    b, v1 = v[0], v[1:]
    if u1 == v or recursive_greater(u1, v):
        return True
    if a > b:
        return recursive_greater(u, v1)
    if a == b:
        return recursive_greater(u1, v1)
    return False


ORDERS: dict[str, Callable[[Word, Word], bool]] = {
    "shortlex": shortlex_greater,
    "recursive": recursive_greater,
}


# -------------------------------------------------------- rewriting systems


class RewritingSystem:
    """Finite string rewriting system over generators and formal inverses."""

    def __init__(self, ngens: int, rules: Mapping[Word, Word], order: str = "shortlex", confluent: bool = False):
        self.ngens = ngens
        self.rules = dict(rules)
        self.order = order
        self.confluent = confluent
        self._lengths = sorted({len(l) for l in self.rules})
        self._cache: dict[Word, Word] = {}

    def __len__(self):
        return len(self.rules)

    def normal_form(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        hit = self._cache.get(w)
        if hit is not None:
            return hit
        res = _rewrite(w, self.rules, self._lengths)
        if len(self._cache) < 500_000:
            self._cache[w] = res
        return res

    def multiply(self, u: Word, v: Word) -> Word:
        return self.normal_form(u + v)

    def inverse(self, u: Word) -> Word:
        return self.normal_form(inverse_word(u))

    def sort_key(self, w: Word):
        return (len(w), w)


def _rewrite(w: Word, rules: Mapping[Word, Word], lengths: Sequence[int]) -> Word:
    out: list[int] = []
    stack = list(reversed(w))
    while stack:
        out.append(stack.pop())
        n = len(out)
        for L in lengths:
            if L > n:
                break
            rhs = rules.get(tuple(out[n - L:]))
            if rhs is not None:
                del out[n - L:]
                stack.extend(reversed(rhs))
                break
    return tuple(out)


def normal_form(rs: RewritingSystem, w: Sequence[int]) -> Word:
    return rs.normal_form(w)


def _critical_pairs(l1, r1, l2, r2):
    for k in range(1, min(len(l1), len(l2))):
        if l1[-k:] == l2[:k]:
            yield r1 + l2[k:], l1[:-k] + r2


def _inclusions(l1, r1, l2, r2):
    # l2 occurs strictly inside l1
    n = len(l2)
    if n >= len(l1):
        return
    for i in range(len(l1) - n + 1):
        if l1[i:i + n] == l2:
            yield r1, l1[:i] + r2 + l1[i + n:]


def _contains(big: Word, small: Word) -> bool:
    n = len(small)
    return any(big[i:i + n] == small for i in range(len(big) - n + 1))


def check_local_confluence(rules: Mapping[Word, Word]) -> bool:
    """Resolve every overlap and inclusion ambiguity of the rule set."""
    lengths = sorted({len(l) for l in rules})
    items = list(rules.items())
    for l1, r1 in items:
        for l2, r2 in items:
            for a, b in _critical_pairs(l1, r1, l2, r2):
                if _rewrite(a, rules, lengths) != _rewrite(b, rules, lengths):
                    return False
            if l1 != l2:
                for a, b in _inclusions(l1, r1, l2, r2):
                    if _rewrite(a, rules, lengths) != _rewrite(b, rules, lengths):
                        return False
    return True


def knuth_bendix(
    p: Presentation,
    max_rules: int = DEFAULT_MAX_RULES,
    max_pairs: int = DEFAULT_MAX_PAIRS,
    order: str | None = None,
) -> RewritingSystem:
    """Complete the presentation to a finite confluent rewriting system.

    Equations are processed first-in first-out; each new rule removes the
    rules it makes reducible and enqueues its critical pairs with every
    current rule.  Hand-written ``rule`` lines of the presentation are seeded
    before the relators.
    """
    order = order or p.order
    gt = ORDERS[order]
    eqs: deque[tuple[Word, Word]] = deque()
    for i in range(p.rank):
        eqs.append(((2 * i, 2 * i + 1), ()))
        eqs.append(((2 * i + 1, 2 * i), ()))
    for lhs, rhs in p.rules:
        if not gt(lhs, rhs):
            raise NotConfluent(
                f"rule {p.format_word(lhs)} -> {p.format_word(rhs)} does not decrease in the {order} order"
            )
        eqs.append((lhs, rhs))
    for r in p.relators:
        eqs.append((r, ()))

    rules: dict[Word, Word] = {}
    lengths: list[int] = []
    npairs = 0
    while eqs:
        u, v = eqs.popleft()
        u = _rewrite(u, rules, lengths)
        v = _rewrite(v, rules, lengths)
        if u == v:
            continue
        if gt(v, u):
            u, v = v, u
        for l in [l for l in rules if _contains(l, u)]:
            eqs.append((l, rules.pop(l)))
        rules[u] = v
        lengths = sorted({len(l) for l in rules})
        if len(rules) > max_rules:
            raise BudgetExhausted(f"Knuth-Bendix exceeded {max_rules} rules")
        for l, r in list(rules.items()):
            for cp in _critical_pairs(u, v, l, r):
                eqs.append(cp)
                npairs += 1
            if l != u:
                for cp in _critical_pairs(l, r, u, v):
                    eqs.append(cp)
                    npairs += 1
        if npairs > max_pairs:
            raise BudgetExhausted(f"Knuth-Bendix exceeded {max_pairs} critical pairs")

    final = {l: _rewrite(r, rules, lengths) for l, r in rules.items()}
    final = dict(sorted(final.items(), key=lambda kv: (len(kv[0]), kv[0])))
    ok = check_local_confluence(final)
    rs = RewritingSystem(p.rank, final, order, confluent=ok)
    for r in p.relators:
        if rs.normal_form(r) != ():
            raise NotConfluent("relator does not reduce to the identity")
    if not ok:
        raise NotConfluent("completed system failed the local confluence check")
    return rs


def free_rewriting_system(ngens: int) -> RewritingSystem:
    rules = {}
    for i in range(ngens):
        rules[(2 * i, 2 * i + 1)] = ()
        rules[(2 * i + 1, 2 * i)] = ()
    return RewritingSystem(ngens, rules, "shortlex", confluent=True)


def fox_derivative(r: Word, x: int, ring) -> "GroupRingElement":  # noqa: F821
    """Free derivative of ``r`` with respect to generator index ``x``.

    ``ring`` is a group ring; words of the result are reduced in it, so
    passing the free group ring gives the free Fox derivative and passing the
    ring of the presented group gives its image there.
    """
    terms: dict[Word, int] = {}
    for i, l in enumerate(r):
        if l >> 1 != x:
            continue
        if l & 1:
            key, c = tuple(r[: i + 1]), -1
        else:
            key, c = tuple(r[:i]), 1
        terms[key] = terms.get(key, 0) + c
    return ring.from_terms(terms)
