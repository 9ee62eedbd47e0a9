"""Independent brute-force oracles over prime fields, in plain integer arithmetic.

Nothing here imports the package; the tests compare the package against these.
"""
from __future__ import annotations

from itertools import combinations


def legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def least_nonsquare(p: int) -> int:
    return next(n for n in range(2, p) if legendre(n, p) == -1)


def det3(p: int, P, Q, R) -> int:
    (x1, y1), (x2, y2), (x3, y3) = P, Q, R
    return ((x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)) % p


def proportional(p: int, u, v) -> bool:
    """u and v span at most a line (all 2x2 minors vanish)."""
    n = len(u)
    return all((u[i] * v[j] - u[j] * v[i]) % p == 0 for i in range(n) for j in range(i + 1, n))


def collinear(p: int, A, B, C) -> bool:
    return proportional(p, [b - a for a, b in zip(A, B)], [c - a for a, c in zip(A, C)])


def first_collinear_triple(p: int, S):
    for A, B, C in combinations(S, 3):
        if collinear(p, A, B, C):
            return A, B, C
    return None


def chord_class(p: int, X, A, B) -> str:
    """'external' / 'internal' for X on line AB, X not in {A, B}."""
    c = next(i for i in range(len(A)) if (A[i] - B[i]) % p)
    return "external" if legendre((X[c] - A[c]) * (X[c] - B[c]), p) == 1 else "internal"


def point_kinds(p: int, S, X) -> set[str]:
    kinds = set()
    for A, B in combinations(S, 2):
        if collinear(p, X, A, B):
            kinds.add(chord_class(p, X, A, B))
    return kinds


def covered_points(p: int, S, dim: int) -> set[tuple]:
    """Every point of AG(dim, p) off S lying on a secant of S (walk each secant)."""
    Sset = set(map(tuple, S))
    out = set()
    for A, B in combinations(S, 2):
        d = [(b - a) % p for a, b in zip(A, B)]
        for t in range(p):
            X = tuple((a + t * di) % p for a, di in zip(A, d))
            if X not in Sset:
                out.add(X)
    return out


def cubic_points(p: int, n: int) -> list[tuple[int, int]]:
    """Affine points of Y(X^2 - n) = 1 over F_p by direct search."""
    return [(x, y) for x in range(p) for y in range(p) if (y * (x * x - n) - 1) % p == 0]
