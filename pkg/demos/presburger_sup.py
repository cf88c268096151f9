"""
Suprema of constructible functions
==================================

Functions of a natural number s built from powers q^(a s + b), affine
factors in s and geometric-series factors 1/(1 - q^a).  At a fixed q the
supremum over the domain is found exactly by enumerating up to a tail
bound beyond which every term decreases.
"""
from fractions import Fraction

from jetcount.presburger import classify_nonneg, eval_constructible, parse_constructible, sup_over_domain

f = parse_constructible("s * q^(-s) ; s >= 0")
for q in (Fraction(3, 2), 2, 3):
    print(f"q={q}: ", sup_over_domain(f, q))

# The fiber of x^2 over 0 mod p^k on even k, written as a function of s = k.
g = parse_constructible("q^(s/2) ; s >= 0 mod 2 0")
print([eval_constructible(g, 3, s) for s in g.domain.points(8)])
print(sup_over_domain(g, 3))

# Normalised by p^k the same fiber has bounded size.
h = parse_constructible("q^(-s/2) ; s >= 0 mod 2 0")
print(sup_over_domain(h, 3))

for text in ("q^(s) * geom(-1)", "1 - q^(s) ; s >= 1", "q^(s) - 1 ; s >= 0"):
    print(f"{text:22s} ->", classify_nonneg(parse_constructible(text)))
