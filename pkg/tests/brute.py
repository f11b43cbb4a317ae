"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the package's geometry or solvers; where a library
does the job (numpy, scipy) it is used instead.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import minimum_spanning_tree


# ---------------------------------------------------------------------------
# exact linear algebra


def nullspace(rows, d):
    """Basis of ``{x : r . x = 0 for r in rows}`` over the rationals."""
    m = [list(map(Fraction, r)) for r in rows]
    pivots, r = [], 0
    for c in range(d):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        m[r] = [x / m[r][c] for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(d) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * d
        x[f] = Fraction(1)
        for i, c in enumerate(pivots):
            x[c] = -m[i][f]
        basis.append(x)
    return basis


def rank(rows, d):
    return d - len(nullspace(rows, d))


def solve_square(A, b):
    """Unique solution of ``A x = b`` or None."""
    d = len(A)
    aug = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    for c in range(d):
        piv = next((i for i in range(c, d) if aug[i][c] != 0), None)
        if piv is None:
            return None
        aug[c], aug[piv] = aug[piv], aug[c]
        for i in range(d):
            if i != c and aug[i][c] != 0:
                f = aug[i][c] / aug[c][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return tuple(aug[i][d] / aug[i][i] for i in range(d))


def primitive(w, c):
    """Scale ``(w, c)`` to coprime integers (positive multiple)."""
    vals = list(map(Fraction, w)) + [Fraction(c)]
    den = math.lcm(*(v.denominator for v in vals))
    ints = [int(v * den) for v in vals]
    g = math.gcd(*ints) or 1
    ints = [v // g for v in ints]
    return tuple(ints[:-1]), ints[-1]


def hkey(h):
    """Comparable key for any halfspace-like object with ``w`` and ``c``."""
    return primitive(h.w, h.c)


# ---------------------------------------------------------------------------
# polyhedra conv(V) + C, C = cone of the orientation


def _signs(senses):
    return [1 if s == "min" else -1 for s in senses]


def brute_facets(V, senses):
    """Facets ``w . z >= c`` of conv(V) + C as primitive integer pairs.

    Tries every choice of k nondominated points and d - k cone directions
    that spans a hyperplane and keeps the valid ones.
    """
    d = len(senses)
    s = _signs(senses)
    pts = sorted({tuple(Fraction(x) * si for x, si in zip(v, s)) for v in V})
    # a vertex is never dominated by another point, so only those can span
    spanning = [p for p in pts if not any(q != p and all(a <= b for a, b in zip(q, p)) for q in pts)]
    out = set()
    for k in range(1, d + 1):
        for P in itertools.combinations(spanning, k):
            diffs = [[a - b for a, b in zip(p, P[0])] for p in P[1:]]
            for D in itertools.combinations(range(d), d - k):
                rows = diffs + [[1 if j == i else 0 for j in range(d)] for i in D]
                ns = nullspace(rows, d)
                if len(ns) != 1:
                    continue
                w = ns[0]
                if all(x <= 0 for x in w):
                    w = [-x for x in w]
                if any(x < 0 for x in w):
                    continue
                c = sum(a * b for a, b in zip(w, P[0]))
                if all(sum(a * b for a, b in zip(w, v)) >= c for v in pts):
                    wz = [a * si for a, si in zip(w, s)]
                    out.add(primitive(wz, c))
    return out


def brute_vertices(H, d):
    """Vertices of ``{z : w . z >= c for (w, c) in H}`` by d-subset intersection."""
    H = [(tuple(map(Fraction, w)), Fraction(c)) for w, c in H]
    out = set()
    for S in itertools.combinations(H, d):
        z = solve_square([w for w, _ in S], [c for _, c in S])
        if z is None:
            continue
        if all(sum(a * b for a, b in zip(w, z)) >= c for w, c in H):
            out.add(z)
    return out


def brute_extreme(V, senses):
    """Points of V where the tight brute-force facets have full-rank normals."""
    d = len(senses)
    facets = brute_facets(V, senses)
    out = set()
    for v in {tuple(map(Fraction, p)) for p in V}:
        tight = [w for w, c in facets if sum(a * b for a, b in zip(w, v)) == c]
        if rank(tight, d) == d:
            out.add(v)
    return out


def in_hull(H, z):
    return all(sum(a * Fraction(b) for a, b in zip(w, z)) >= c for w, c in H)


# ---------------------------------------------------------------------------
# combinatorial problems


def brute_assignment(cost):
    n = len(cost)
    return min(sum(cost[i][p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def brute_knapsack(weights, values, capacity):
    """Optimal 0/1 knapsack value by enumerating all subsets with numpy."""
    n = len(weights)
    masks = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    load = masks @ np.asarray(weights, dtype=np.int64)
    value = masks @ np.asarray(values, dtype=np.int64)
    return int(value[load <= capacity].max())


def mst_weight(cost):
    # csgraph treats 0 as "no edge"; shift every edge by 1 and subtract after
    n = len(cost)
    m = np.asarray(cost, dtype=float) + 1.0
    np.fill_diagonal(m, 0.0)
    return round(minimum_spanning_tree(m).sum()) - (n - 1)


def brute_tsp(cost):
    n = len(cost)
    best = None
    for p in itertools.permutations(range(1, n)):
        t = (0,) + p
        v = sum(cost[t[i]][t[(i + 1) % n]] for i in range(n))
        best = v if best is None else min(best, v)
    return best


# ---------------------------------------------------------------------------
# hypervolume


def hv_inclusion_exclusion(points, ref):
    """Volume of the union of boxes ``[p, ref]`` by inclusion-exclusion."""
    total = 0
    pts = [tuple(p) for p in points]
    for k in range(1, len(pts) + 1):
        sign = 1 if k % 2 else -1
        for S in itertools.combinations(pts, k):
            corner = [max(p[i] for p in S) for i in range(len(ref))]
            vol = 1
            for a, b in zip(corner, ref):
                vol *= max(0, b - a)
            total += sign * vol
    return total
