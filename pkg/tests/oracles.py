"""Independent reference computations used to derive frozen test values.

Nothing here imports the package under test.
"""
from fractions import Fraction

import numpy as np


def a_matrix(m, n):
    # straight from the displayed 4x4 matrix
    return np.array([[0, 0, 1, 1], [m - 1, m, 0, 0], [n, n, n - 1, n], [1, 1, 1, 1]],
                    dtype=object)


def product(pairs):
    out = np.identity(4, dtype=object)
    out = np.array([[int(x) for x in row] for row in out], dtype=object)
    for m, n in pairs:
        out = out.dot(a_matrix(m, n))
    return out


def minimal_pairs(depth):
    pairs, n = [], 10
    for _ in range(depth):
        m = 3 * (n + 1)
        pairs.append((m, n))
        n = 2 * m - 1
    return pairs


def simulate_return(apply, x, a, b, limit=10**6):
    """Return time and visit counts (1-based index function supplied by caller)."""
    y, r = apply(x), 1
    while not a <= y < b:
        y, r = apply(y), r + 1
        if r > limit:
            raise RuntimeError("no return")
    return r, y


def naive_iet(lengths, perm):
    """Definition-level IET: returns (T, index) closures over Fractions."""
    lengths = [Fraction(x) for x in lengths]
    n = len(lengths)

    def index(x):
        c = Fraction(0)
        for j, l in enumerate(lengths):
            if c <= x < c + l:
                return j + 1
            c += l
        raise ValueError(x)

    def T(x):
        j = index(x)
        before = sum(lengths[:j - 1], Fraction(0))
        after = sum((lengths[k] for k in range(n) if perm[k] < perm[j - 1]), Fraction(0))
        return x - before + after

    return T, index
