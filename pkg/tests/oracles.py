"""Brute-force oracles, independent of the package code paths.

Frozen tables below were produced once by these functions and are kept as
literals so a regression in either side shows up as a mismatch.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product


def brute_count(fs, m, modulus, keep=None):
    """Points x in (Z/modulus)^m with every f(x) = 0 mod modulus."""
    n = 0
    for x in product(range(modulus), repeat=m):
        if all(f(*x) % modulus == 0 for f in fs) and (keep is None or keep(x)):
            n += 1
    return n


def _series_mul(a, b, p):
    e = len(a)
    out = [0] * e
    for i, ai in enumerate(a):
        if ai:
            for j in range(e - i):
                out[i + j] = (out[i + j] + ai * b[j]) % p
    return out


def series_count(f, m, p, e):
    """Points of V(f) over F_p[t]/(t^e); ``f`` acts on coefficient lists via
    the callables ``add``/``mul`` passed in."""
    def add(a, b):
        return [(x + y) % p for x, y in zip(a, b)]

    def mul(a, b):
        return _series_mul(a, b, p)

    n = 0
    for coeffs in product(range(p), repeat=m * e):
        xs = [list(coeffs[i * e:(i + 1) * e]) for i in range(m)]
        if not any(f(add, mul, *xs)):
            n += 1
    return n


def square_histogram(p, k, restrict_zero=False):
    """How many x mod p^k give each value of x^2 mod p^k."""
    N = p**k
    h = [0] * N
    for x in range(N):
        if restrict_zero and x % p:
            continue
        h[x * x % N] += 1
    return h


def quadric_fiber(n, y, p, k, singular=False):
    """#{x mod p^k : x_1^2+...+x_n^2 = y}; with ``singular`` all x_i = 0 mod p.

    For odd p the only singular F_p point of a sum of squares is the origin.
    """
    N = p**k
    h = square_histogram(p, k, singular)
    dist = [1] + [0] * (N - 1)
    for _ in range(n):
        new = [0] * N
        for a, ca in enumerate(dist):
            if ca:
                for b, cb in enumerate(h):
                    if cb:
                        new[(a + b) % N] += ca * cb
        dist = new
    return dist[y % N]


def quadric_gh(n, y, p, k):
    scale = Fraction(p) ** (k * (n - 1))
    return Fraction(quadric_fiber(n, y, p, k)) / scale, Fraction(quadric_fiber(n, y, p, k, True)) / scale


# #X(F_p[t]/(t^{k+1})) for X in {V(x^2), V(xy), V(x^2+y^3)}, p in {3,5}, k in {1,2}
JET_RING_COUNTS = {
    ("x^2", 3, 1): 3, ("x^2", 3, 2): 3, ("x^2", 5, 1): 5, ("x^2", 5, 2): 5,
    ("x*y", 3, 1): 21, ("x*y", 3, 2): 81, ("x*y", 5, 1): 65, ("x*y", 5, 2): 425,
    ("x^2 + y^3", 3, 1): 15, ("x^2 + y^3", 3, 2): 45, ("x^2 + y^3", 5, 1): 45, ("x^2 + y^3", 5, 2): 225,
}

# (g, h) of the sum of n squares at y = 0
QUADRIC_GH = {
    (3, 3, 1): (Fraction(1), Fraction(1, 9)),
    (3, 3, 2): (Fraction(11, 9), Fraction(1, 3)),
    (3, 3, 3): (Fraction(11, 9), Fraction(1, 3)),
    (3, 5, 1): (Fraction(1), Fraction(1, 25)),
    (3, 5, 2): (Fraction(29, 25), Fraction(1, 5)),
    (3, 5, 3): (Fraction(29, 25), Fraction(1, 5)),
    (4, 3, 1): (Fraction(11, 9), Fraction(1, 27)),
    (4, 3, 2): (Fraction(35, 27), Fraction(1, 9)),
    (4, 3, 3): (Fraction(107, 81), Fraction(11, 81)),
    (4, 5, 1): (Fraction(29, 25), Fraction(1, 125)),
    (4, 5, 2): (Fraction(149, 125), Fraction(1, 25)),
    (4, 5, 3): (Fraction(749, 625), Fraction(29, 625)),
}


def random_system(rng, max_vars=3, max_deg=3, max_eqs=2):
    """Random integer system as (variables, list of {exponents: coeff})."""
    m = rng.randint(1, max_vars)
    variables = tuple("xyz"[:m])
    eqs = []
    for _ in range(rng.randint(1, max_eqs)):
        terms = {}
        for _ in range(rng.randint(1, 4)):
            exps = [0] * m
            for _ in range(rng.randint(0, max_deg)):
                exps[rng.randrange(m)] += 1
            terms[tuple(exps)] = terms.get(tuple(exps), 0) + rng.randint(-4, 4)
        eqs.append(terms)
    return variables, eqs


def as_callable(terms):
    def f(*x):
        total = 0
        for exps, c in terms.items():
            t = c
            for xi, e in zip(x, exps):
                t *= xi**e
            total += t
        return total
    return f
