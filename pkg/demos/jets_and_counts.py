"""
Jet equations and point counts
==============================

Writes down the first jet equations of a plane curve, then checks that
counting points of the jet scheme over F_p agrees with counting points of
the curve over the truncated power series ring F_p[t]/(t^(k+1)).
"""
from jetcount.counting import count_points, count_points_jetring, count_points_naive
from jetcount.schemes import AffineScheme, jet_prolong

# A line with an embedded double line: x1 * x2^2 = 0 in the plane.
X = AffineScheme.from_text("X", ["x1", "x2"], ["x1*x2^2"], 1)
for k in range(3):
    J = jet_prolong(X, k).scheme
    print(f"J_{k}(X): {len(J.variables)} variables")
    for eq in J.equations:
        print("   ", eq)

# Jet scheme points over F_p are curve points over F_p[t]/(t^(k+1)).
cusp = AffineScheme.from_text("cusp", ["x", "y"], ["x^2 + y^3"], 1)
for p in (3, 5):
    for k in (1, 2):
        jets = count_points_naive(jet_prolong(cusp, k).scheme, p, 1).count
        ring = count_points_jetring(cusp, p, k + 1).count
        print(f"p={p} k={k}:  #J_k(F_p) = {jets:4d}   #X(F_p[t]/t^{k + 1}) = {ring:4d}")

# The double point V(x^2) has p^k points mod p^(2k): x must be divisible by p^k.
double = AffineScheme.from_text("double", ["x"], ["x^2"], 0)
for k in (1, 2, 3):
    res = count_points(double, 3, 2 * k, method="tree")
    print(f"#V(x^2)(Z/3^{2 * k}) = {res.count}  ({res.nodes_visited} tree nodes)")
