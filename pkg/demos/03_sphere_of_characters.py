"""Sweep the character sphere of <a, t | [t, a^2]>.

Characters are sampled on a small integer grid, one per antipodal pair,
and each receives a fibring verdict.  The kernel is finitely generated
exactly when the character is nonzero on a.
"""
from novikov_fibring import parse_presentation
from novikov_fibring.cli import corpus_path
from novikov_fibring.fibring import sphere_sample

p = parse_presentation(corpus_path("comm_a2.grp").read_text())
for phi, v in sphere_sample(p, grid=2):
    plus, minus = v.certified_directions()
    print(f"{phi.format(p):>12}  {v.label:<12} certified: {'+' if plus else '.'}{'-' if minus else '.'}")
