"""What a rational certificate says beyond the rationals.

A certificate over Q has finitely many primes in its denominators.  It
re-verifies over the integers localised at those primes and over F_q for
every other prime q.  The same certificate also cobounds cocycles of the
dual complex over the opposite Novikov completion.
"""
from fractions import Fraction

from novikov_fibring import parse_presentation, presentation_complex, validate_character
from novikov_fibring.chain import dualize
from novikov_fibring.cli import corpus_path
from novikov_fibring.fibring import (
    Certificate,
    dual_coboundary_check,
    extract_primes,
    flip_cobound,
    search_certificate,
)
from novikov_fibring.groupring import mat_mul

p = parse_presentation(corpus_path("z2.grp").read_text())
phi = validate_character({"a": 1, "b": 0}, p)
c = presentation_complex(p)
R = c.ring
cert = search_certificate(c, phi, 1)
print("primes of the integral certificate:", extract_primes(cert, c).to_json())

# Adding a*(1/2) to sbar_0 keeps the error positive, but brings in the prime 2.
s0 = [[cert.s[0][0][0] + R.monomial((0,), Fraction(1, 2)), cert.s[0][0][1]]]
half = Certificate(p, phi, cert.coeffs, 1, [s0, cert.s[1]], [])
print("primes after adding a/2:", extract_primes(half, c).to_json())

y = [[R.parse("a*b - 2 + a^-1")]]
z = mat_mul(y, dualize(c).coboundaries[1], R)[0]
w = flip_cobound(c, cert, z, 1, 3)
print("cocycle z =", [str(x) for x in z])
print("w =", w)
print("w cobounds z at precision 3:", dual_coboundary_check(c, w, z, 1, 3, -phi))
