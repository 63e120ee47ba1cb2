"""Finite-difference stencil weights."""
from functools import lru_cache
from fractions import Fraction
from math import factorial

import numpy as np


@lru_cache(maxsize=None)
def _weights(offsets: tuple, order: int) -> tuple:
    x = np.array(offsets, dtype=float)
    vander = np.vander(x, len(x), increasing=True).T
    rhs = np.zeros(len(x))
    rhs[order] = factorial(order)
    return tuple(np.linalg.solve(vander, rhs))


def fd_weights(offsets, order: int) -> np.ndarray:
    """Weights w with sum(w * f(x0 + o*h)) / h**order ~ f^(order)(x0)."""
    if order >= len(offsets):
        raise ValueError("stencil too short for the requested derivative")
    return np.array(_weights(tuple(float(o) for o in offsets), order))


CENTRAL5 = (-2, -1, 0, 1, 2)
FORWARD5 = (0, 1, 2, 3, 4)
BACKWARD5 = (0, -1, -2, -3, -4)


@lru_cache(maxsize=None)
def exact_weights(offsets: tuple, order: int) -> tuple:
    """Stencil weights as exact fractions (Gauss-Jordan over the rationals)."""
    n = len(offsets)
    if order >= n:
        raise ValueError("stencil too short for the requested derivative")
    rows = [[Fraction(o) ** m for o in offsets] + [Fraction(factorial(order) if m == order else 0)] for m in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if rows[r][c] != 0)
        rows[c], rows[p] = rows[p], rows[c]
        pivot = rows[c][c]
        rows[c] = [x / pivot for x in rows[c]]
        for r in range(n):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    return tuple(row[n] for row in rows)


def weights_as(offsets, order: int, dtype=np.longdouble) -> np.ndarray:
    """Exact weights rounded once to ``dtype``."""
    fr = exact_weights(tuple(int(o) for o in offsets), order)
    return np.array([dtype(w.numerator) / dtype(w.denominator) for w in fr], dtype=dtype)
