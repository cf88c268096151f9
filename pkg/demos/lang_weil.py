"""
Component counts from F_p points
================================

#Z(F_p) / p^dim approaches the number of top-dimensional components that
are defined over F_p.  For two crossing lines the ratio is (2p-1)/p.  For
V(x^2+1) the two points exist only when p = 1 mod 4, so the estimate
depends on which primes are sampled.
"""
import numpy as np

from jetcount.measures import estimate_components, estimate_dimension, langweil_check
from jetcount.schemes import AffineScheme

axes = AffineScheme.from_text("axes", ["x", "y"], ["x*y"], 1)
rep = langweil_check(axes, 2, [5, 7, 11, 13, 17, 19, 23])
for row in rep.rows:
    print(f"p={row.p:3d}  count={row.count:3d}  ratio={str(row.ratio):6s}  deviation*sqrt(p)={row.deviation:.4f}")
print("empirical constant:", rep.empirical_constant)

# The deviation times sqrt(p) is exactly 1/sqrt(p) here.
print(np.allclose([r.deviation for r in rep.rows], [r.p ** -0.5 for r in rep.rows]))

print(estimate_components(axes, [97, 101, 103]))
circle = AffineScheme.from_text("W", ["x"], ["x^2 + 1"], 0)
print(estimate_components(circle, [5, 13, 17]))      # every prime is 1 mod 4
print(estimate_components(circle, [5, 7, 11, 13]))   # mixed residues: not stable

print(estimate_dimension(axes, [101, 103]))
