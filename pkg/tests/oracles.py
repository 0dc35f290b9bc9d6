"""Brute-force reference computations, independent of the library code paths."""

import itertools
from fractions import Fraction
from math import comb


def rank_q(rows):
    """Rank over Q by plain Fraction elimination."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(m[0]) if m else 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


def cone_points(rays, box):
    """Integer points of cone(rays) in [-box, box]^d, via a rational solve per point."""
    d = len(rays[0])
    out = []
    for x in itertools.product(range(-box, box + 1), repeat=d):
        if in_cone(rays, x):
            out.append(x)
    return out


def in_cone(rays, x):
    # 1- and 2-dimensional cones only: test nonnegative combinations of pairs
    d = len(x)
    if not any(x):
        return True
    for r in rays:
        nz = [i for i in range(d) if r[i]]
        if nz:
            lam = Fraction(x[nz[0]], r[nz[0]])
            if lam >= 0 and all(Fraction(x[i]) == lam * r[i] for i in range(d)):
                return True
    for r, s in itertools.combinations(rays, 2):
        det = r[0] * s[1] - r[1] * s[0] if d == 2 else 0
        if d != 2 or det == 0:
            continue
        a = Fraction(x[0] * s[1] - x[1] * s[0], det)
        b = Fraction(r[0] * x[1] - r[1] * x[0], det)
        if a >= 0 and b >= 0:
            return True
    return False


def irreducibles(points):
    pts = set(points)
    nonzero = [p for p in pts if any(p)]
    out = []
    for p in nonzero:
        if not any(tuple(a - b for a, b in zip(p, q)) in pts and any(a - b for a, b in zip(p, q)) for q in nonzero if q != p):
            out.append(list(p))
    return sorted(out)


def hh_polynomial(m):
    """dim HH_q(k[x_1..x_n]) at multidegree m (m ≥ 0): C(|supp m|, q)."""
    s = sum(1 for x in m if x)
    return [comb(s, q) for q in range(len(m) + 2)]


def hh_truncated(a, qmax, w):
    """dim HH_q(k[x]/(x^a)) over Q at weight w, from the 2-periodic resolution.

    C_{2i} = A shifted by a*i, C_{2i+1} = A shifted by a*i + 1; odd
    differentials vanish, even ones multiply by a*x^(a-1).
    """
    out = []
    for q in range(qmax + 1):
        i, odd = divmod(q, 2)
        if q == 0:
            out.append(1 if 0 <= w < a else 0)
        elif odd:
            # coker of x^(a-1) on A[a*i + 1]: weights a*i+1 .. a*i+a-1
            out.append(1 if a * i + 1 <= w <= a * i + a - 1 else 0)
        else:
            # ker of x^(a-1) on A[a*i]: x^j with j ≥ 1
            out.append(1 if a * i + 1 <= w <= a * i + a - 1 else 0)
    return out


def line_bundle_p1(a):
    """(h^0, h^1) of O(a) on P^1."""
    return (max(a + 1, 0), max(-a - 1, 0))


def cusp_omega_dims(d):
    """dim_Q of (Ω¹ of k[x,y]/(y^2 - x^3)) in t-degree d, with x = t^2, y = t^3.

    A_d is one-dimensional for d in <2, 3>; the single relation
    2y dy - 3x^2 dx has degree 6 and is a nonzerodivisor multiple.
    """
    def inside(n):
        return n == 0 or n >= 2

    return int(inside(d - 2) if d >= 2 else 0) + int(inside(d - 3) if d >= 3 else 0) - int(d >= 6 and inside(d - 6))


def line_bundle_p2(a):
    """(h^0, h^1, h^2) of O(a) on P^2."""
    return (comb(a + 2, 2) if a >= 0 else 0, 0, comb(-a - 1, 2) if a <= -3 else 0)
