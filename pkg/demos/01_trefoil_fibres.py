"""The trefoil knot group fibres over the circle.

The group <x, y | x^2 y^-3> has a single character up to scale,
phi(x) = 3, phi(y) = 2.  We search for truncated chain contractions over
the Novikov completions of phi and -phi, print one of them, and check
that its error matrices have strictly positive support.
"""
from novikov_fibring import parse_presentation, presentation_complex, validate_character
from novikov_fibring.cli import corpus_path
from novikov_fibring.fibring import error_matrices, search_certificate, sikorav_verdict, verify_certificate

p = parse_presentation(corpus_path("trefoil.grp").read_text())
phi = validate_character({"x": 3, "y": 2}, p)
c = presentation_complex(p)

cert = search_certificate(c, phi, 1)
print("truncated contraction found at level", cert.budget_used)
for i, s in enumerate(cert.s):
    print(f"  sbar_{i} =", [[str(x) for x in row] for row in s])

for i, E in enumerate(error_matrices(c, cert.s, 1)):
    print(f"  E_{i} =", [[str(x) for x in row] for row in E])
print("verified exactly:", verify_certificate(c, cert))

v = sikorav_verdict(p, phi, complex_=c)
print("verdict:", v.label)
