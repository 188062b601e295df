"""Independent reference computations used to check the package.

Nothing here imports reflab: roots come from brute-force word enumeration,
cones from explicit 2x2 solves, lexicographic keys from sympy.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import sympy


def gram_exact(labels, weights=None):
    """B(i, j) from bond labels in {1, 2, 3, inf}; inf bonds take weight -1 unless given."""
    n = len(labels)
    g = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            m = labels[i][j]
            if i == j:
                g[i][j] = Fraction(1)
            elif m == 2:
                g[i][j] = Fraction(0)
            elif m == 3:
                g[i][j] = Fraction(-1, 2)
            else:
                g[i][j] = Fraction(weights[i][j]) if weights else Fraction(-1)
    return g


def universal_labels(n=3):
    return [[1 if i == j else "inf" for j in range(n)] for i in range(n)]


def B(u, v, g):
    return sum(u[i] * g[i][j] * v[j] for i in range(len(u)) for j in range(len(v)))


def refl(v, s, g):
    c = 2 * sum(v[j] * g[s][j] for j in range(len(v)))
    out = list(v)
    out[s] -= c
    return tuple(out)


def brute_roots(g, depth):
    """Positive roots w(alpha_j), |w| <= depth, mapped to the least |w| producing them."""
    n = len(g)
    best = {}
    for j in range(n):
        e = tuple(Fraction(int(i == j)) for i in range(n))
        for k in range(depth + 1):
            for word in product(range(n), repeat=k):
                if any(a == b for a, b in zip(word, word[1:])):
                    continue
                v = e
                for s in reversed(word):
                    v = refl(v, s, g)
                if all(x >= 0 for x in v):
                    key = tuple(int(x) if x.denominator == 1 else x for x in v)
                    if key not in best or best[key] > k:
                        best[key] = k
    return best


def universal_root_count(depth, n=3):
    return n * ((n - 1) ** (depth + 1) - 1) // (n - 2) if n > 2 else 2 * (depth + 1)


def in_cone(gv, a, b):
    """g = x a + y b with x, y >= 0, by solving on the first independent coordinate pair."""
    n = len(a)
    for i in range(n):
        for j in range(i + 1, n):
            det = Fraction(a[i] * b[j] - a[j] * b[i])
            if det:
                x = (gv[i] * b[j] - gv[j] * b[i]) / det
                y = (a[i] * gv[j] - a[j] * gv[i]) / det
                ok = all(x * a[k] + y * b[k] == gv[k] for k in range(n))
                return ok and x >= 0 and y >= 0
    return False


def naive_violations(order, coeffs):
    """All (a, g, b) with g in cone(a, b) but not between a and b; cubic scan."""
    pos = {r: k for k, r in enumerate(order)}
    bad = []
    for ia, a in enumerate(order):
        for b in order[ia + 1:]:
            for gid in order:
                if gid in (a, b):
                    continue
                if in_cone(coeffs[gid], coeffs[a], coeffs[b]) and not pos[a] < pos[gid] < pos[b]:
                    bad.append((a, gid, b))
    return bad


def sympy_lex_key(v, basis):
    """Coordinates of v / sum(v) in the ordered basis, via sympy."""
    M = sympy.Matrix([[sympy.Rational(str(x)) for x in col] for col in basis]).T
    h = sum(sympy.Rational(str(x)) for x in v)
    rhs = sympy.Matrix([sympy.Rational(str(x)) / h for x in v])
    return tuple(M.solve(rhs))


def greedy_depth(v, g):
    """Depth by descending: while some B(v, alpha_s) > 0, replace v by s(v)."""
    v = tuple(Fraction(x) for x in v)
    n = len(v)
    d = 0
    while sum(1 for x in v if x) > 1 or max(v) != 1:
        for s in range(n):
            if sum(v[j] * g[s][j] for j in range(n)) > 0:
                v = refl(v, s, g)
                d += 1
                break
        else:
            raise ValueError("stuck")
    return d
