"""BS(1,2) is certified on one side only.

In <a, t | t a t^-1 a^-2> the character t -> 1 kills a.  The kernel is the
dyadic rationals, which is not finitely generated, yet a contraction exists
over one of the two Novikov completions.  The verdict "not fibred" comes
from Brown's criterion, never from a failed search.
"""
from novikov_fibring import parse_presentation, presentation_complex, validate_character
from novikov_fibring.cli import corpus_path
from novikov_fibring.fibring import sikorav_verdict
from novikov_fibring.oracle import brown_sigma

p = parse_presentation(corpus_path("bs12.grp").read_text())
phi = validate_character({"a": 0, "t": 1}, p)
v = sikorav_verdict(p, phi, complex_=presentation_complex(p))

for d in (v.plus, v.minus):
    side = "+phi" if d.sign > 0 else "-phi"
    status = "certified" if d.certified else f"no certificate ({d.failure.reason})"
    print(f"{side}: {status}")

m = brown_sigma(p, phi)
print("height walk around the relator:", m.trace["heights"])
print("[phi] in Sigma:", m.in_sigma_plus, " [-phi] in Sigma:", m.in_sigma_minus)
print("verdict:", v.label)
