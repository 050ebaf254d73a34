"""Exact coefficient rings: Q, F_p, Z and the localisations Z_P.

Scalars are plain Python values (``int`` or ``Fraction``); the ring object
knows how to normalise, add, multiply and invert them.  Nothing here ever
touches floating point.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from sympy import factorint, isprime

from .errors import DenominatorDivisible, NotAUnit, PresentationSyntaxError


@dataclass(frozen=True)
class CoefficientRing:
    kind: str  # "Q", "Fp", "Z", "Zloc"
    p: int = 0
    primes: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("Q", "Fp", "Z", "Zloc"):
            raise ValueError(f"unknown coefficient ring {self.kind!r}")
        if self.kind == "Fp" and not isprime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.kind == "Zloc":
            for q in self.primes:
                if not isprime(q):
                    raise ValueError(f"{q} is not prime")

    # construction helpers
    @classmethod
    def rationals(cls):
        return cls("Q")

    @classmethod
    def integers(cls):
        return cls("Z")

    @classmethod
    def prime_field(cls, p: int):
        return cls("Fp", p=p)

    @classmethod
    def localization(cls, primes: Iterable[int]):
        return cls("Zloc", primes=frozenset(primes))

    @property
    def is_field(self) -> bool:
        return self.kind in ("Q", "Fp")

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "Fp" else 0

    def __str__(self):
        if self.kind == "Fp":
            return f"Fp:{self.p}"
        if self.kind == "Zloc":
            return "Zloc:" + ",".join(str(q) for q in sorted(self.primes))
        return self.kind

    # scalars
    def coerce(self, x) -> int | Fraction:
        if isinstance(x, str):
            x = Fraction(x)
        if self.kind == "Fp":
            x = Fraction(x)
            if x.denominator % self.p == 0:
                raise DenominatorDivisible(f"denominator of {x} divisible by {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        x = Fraction(x)
        if x.denominator == 1:
            return x.numerator
        if self.kind == "Z":
            raise NotAUnit(f"{x} is not an integer")
        if self.kind == "Zloc" and not _supported_by(x.denominator, self.primes):
            raise NotAUnit(f"{x} does not lie in Z localised at {sorted(self.primes)}")
        return x

    def zero(self):
        return 0

    def one(self):
        return 1

    def add(self, x, y):
        s = x + y
        return s % self.p if self.kind == "Fp" else s

    def neg(self, x):
        return (-x) % self.p if self.kind == "Fp" else -x

    def sub(self, x, y):
        s = x - y
        return s % self.p if self.kind == "Fp" else s

    def mul(self, x, y):
        s = x * y
        return s % self.p if self.kind == "Fp" else s

    def normalize(self, x):
        if self.kind == "Fp":
            return x % self.p
        if isinstance(x, Fraction) and x.denominator == 1:
            return x.numerator
        return x

    def is_unit(self, x) -> bool:
        if x == 0:
            return False
        if self.kind in ("Q", "Fp"):
            return True
        if self.kind == "Z":
            return x in (1, -1)
        f = Fraction(x)
        return _supported_by(abs(f.numerator), self.primes) and _supported_by(f.denominator, self.primes)

    def inv(self, x):
        if not self.is_unit(x):
            raise NotAUnit(f"{x} is not a unit of {self}")
        if self.kind == "Fp":
            return pow(x, -1, self.p)
        if self.kind == "Z":
            return x
        return self.normalize(1 / Fraction(x))

    def format(self, x) -> str:
        return str(x)


def _supported_by(n: int, primes) -> bool:
    n = abs(n)
    for q in primes:
        while n % q == 0:
            n //= q
    return n == 1


def ring_ops(op: str, ring: CoefficientRing, x, y=None):
    """Dispatch ``add``, ``mul``, ``neg`` or ``inv`` in ``ring``."""
    if op == "add":
        return ring.add(x, y)
    if op == "mul":
        return ring.mul(x, y)
    if op == "neg":
        return ring.neg(x)
    if op == "inv":
        return ring.inv(x)
    raise ValueError(f"unknown ring operation {op!r}")


def primes_of_denominators(xs: Iterable) -> frozenset:
    out: set[int] = set()
    for x in xs:
        d = Fraction(x).denominator
        if d > 1:
            out.update(factorint(d))
    return frozenset(out)


def reduce_mod_p(x, p: int) -> int:
    x = Fraction(x)
    if x.denominator % p == 0:
        raise DenominatorDivisible(f"{p} divides the denominator of {x}")
    return x.numerator * pow(x.denominator, -1, p) % p


def parse_field(text: str) -> CoefficientRing:
    """Parse ``Q``, ``Z``, ``Fp:<p>`` or ``Zloc:<p1,p2,...>``."""
    text = text.strip()
    if text == "Q":
        return CoefficientRing.rationals()
    if text == "Z":
        return CoefficientRing.integers()
    m = re.fullmatch(r"Fp:(\d+)", text)
    if m:
        p = int(m.group(1))
        if not isprime(p):
            raise PresentationSyntaxError(f"{p} is not prime")
        return CoefficientRing.prime_field(p)
    m = re.fullmatch(r"Zloc:(\d+(?:,\d+)*)?", text)
    if m:
        primes = [int(q) for q in (m.group(1) or "").split(",") if q]
        for q in primes:
            if not isprime(q):
                raise PresentationSyntaxError(f"{q} is not prime")
        return CoefficientRing.localization(primes)
    raise PresentationSyntaxError(f"unknown field selector {text!r}")
