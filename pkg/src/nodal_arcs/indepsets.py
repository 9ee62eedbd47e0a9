"""Maximal 3-independent subsets of finite abelian groups Z_n1 x ... x Z_nk.

A subset M is maximal 3-independent when (a) no x1+x2+x3 (repetition
allowed) vanishes for x_i in M and (b) every y outside M satisfies
x1+x2+y = 0 for some x1, x2 in M.  It is *good* when x1 != x2 can always be
chosen in (b).

Elements are tuples of residues.  Every constructor certifies its output
with :func:`is_maximal_3indep` before returning it.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable

from .errors import ConstructionUncertified, InvalidParameters, NotFound, OrderTooSmall

SEARCH_GUARD = 10_000

Elem = tuple[int, ...]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    factors: tuple[int, ...]

    def __post_init__(self):
        if not self.factors or any(n < 1 for n in self.factors):
            raise InvalidParameters(f"bad cyclic factors {self.factors}")

    @property
    def order(self) -> int:
        out = 1
        for n in self.factors:
            out *= n
        return out

    def elements(self) -> list[Elem]:
        return [tuple(e) for e in itertools.product(*(range(n) for n in self.factors))]

    def add(self, x: Elem, y: Elem) -> Elem:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.factors))

    def neg(self, x: Elem) -> Elem:
        return tuple(-a % n for a, n in zip(x, self.factors))

    def scale(self, k: int, x: Elem) -> Elem:
        return tuple(k * a % n for a, n in zip(x, self.factors))

    def zero(self) -> Elem:
        return tuple(0 for _ in self.factors)

    def element_order(self, x: Elem) -> int:
        out = 1
        for a, n in zip(x, self.factors):
            k = n // gcd(a, n)
            out = out * k // gcd(out, k)
        return out

    def encode(self, x: Elem) -> int:
        v = 0
        for a, n in zip(x, self.factors):
            v = v * n + a
        return v


@dataclass
class IndepSet:
    group: FiniteAbelianGroup
    members: frozenset
    good: bool
    # how the set was obtained, e.g. {"method": "two_coset", "variant": "literal"}
    provenance: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.members)

    def to_json(self) -> dict:
        return {"factors": list(self.group.factors),
                "members": [list(x) for x in sorted(self.members)],
                "good": self.good}


def is_maximal_3indep(M: Iterable[Elem], G: FiniteAbelianGroup) -> tuple[bool, bool]:
    """Return (maximal 3-independent, good)."""
    M = set(M)
    sums: set[Elem] = set()
    distinct_sums: set[Elem] = set()
    ml = sorted(M)
    for i, x in enumerate(ml):
        for y in ml[i:]:
            s = G.add(x, y)
            sums.add(s)
            if x != y:
                distinct_sums.add(s)
    # (a): x1 + x2 = -x3 never happens
    if any(G.neg(x) in sums for x in M):
        return False, False
    outside = [y for y in G.elements() if y not in M]
    if not all(G.neg(y) in sums for y in outside):
        return False, False
    return True, all(G.neg(y) in distinct_sums for y in outside)


def _certified(G, members, provenance) -> IndepSet | None:
    ok, good = is_maximal_3indep(members, G)
    if not (ok and good):
        return None
    return IndepSet(G, frozenset(members), True, provenance)


def two_coset_set(n: int, m: int, r: int, rp: int, variant: str = "literal") -> set[Elem]:
    """The two-piece set in Z_n x Z_m (K = Z_n x 0, H = 0 x Z_m, R = (r,0), R' = (0,rp)).

    ``(K + T) - {T}  U  (H + R) - {removed}`` with T = R' - 2R.  The removed
    element is -2T + R for ``variant="literal"`` and R - 2R' for
    ``variant="corrected"``; the two agree exactly when 4R = 0.
    """
    T = (-2 * r % n, rp % m)
    first = {(k, rp % m) for k in range(n)} - {T}
    if variant == "literal":
        removed = ((-2 * T[0] + r) % n, (-2 * T[1]) % m)
    elif variant == "corrected":
        removed = (r % n, (-2 * rp) % m)
    else:
        raise InvalidParameters(f"unknown variant {variant!r}")
    second = {(r % n, h) for h in range(m)} - {removed}
    return first | second


def build_mazzi3i(n: int, m: int, r: int = 1, rp: int = 1,
                  variant: str = "auto") -> IndepSet:
    """Good maximal 3-independent subset of Z_n x Z_m from the two-coset pattern.

    ``n`` is the order of the K-factor (containing R), ``m`` the order of the
    H-factor (containing R').  With ``variant="auto"`` the literal set is
    tried first and the corrected removal is used only if the literal one
    fails certification; the variant actually used is recorded.
    """
    if gcd(n, m) != 1:
        raise InvalidParameters(f"factor orders {n} and {m} must be coprime")
    G = FiniteAbelianGroup((n, m))
    if G.element_order((r % n, 0)) <= 3 or G.element_order((0, rp % m)) <= 3:
        raise OrderTooSmall("R and R' must have order greater than 3")
    variants = ["literal", "corrected"] if variant == "auto" else [variant]
    for v in variants:
        members = two_coset_set(n, m, r, rp, v)
        out = _certified(G, members, {"method": "two_coset", "variant": v, "R": r, "R'": rp})
        if out is not None:
            return out
    raise ConstructionUncertified(
        f"two-coset set for Z_{n} x Z_{m}, R={r}, R'={rp}, variant={variant} "
        "is not a good maximal 3-independent set")


def exhaustive_3indep_search(G: FiniteAbelianGroup, target_size: int,
                             forbidden: Iterable[Elem] = (), *, good: bool = True,
                             node_limit: int | None = None) -> IndepSet:
    """Backtracking search, in increasing element order, for a (good) maximal
    3-independent set of exactly ``target_size`` elements avoiding ``forbidden``."""
    if G.order > SEARCH_GUARD:
        raise InvalidParameters(f"group order {G.order} exceeds search guard {SEARCH_GUARD}")
    forbidden = set(forbidden)
    elems = [x for x in G.elements() if x not in forbidden]
    nodes = 0

    def extendable(chosen: list[Elem], sums: set[Elem], x: Elem) -> bool:
        # adding x must keep (a): 3x, 2x + c, x + (c1 + c2) all non-zero
        z = G.zero()
        if G.scale(3, x) == z:
            return False
        nx = G.neg(x)
        if nx in sums:
            return False
        for c in chosen:
            if G.add(G.scale(2, x), c) == z:
                return False
        return True

    def rec(start: int, chosen: list[Elem], sums: set[Elem]):
        nonlocal nodes
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise NotFound(f"node limit {node_limit} reached")
        if len(chosen) == target_size:
            ok, is_good = is_maximal_3indep(chosen, G)
            if ok and (is_good or not good):
                return list(chosen)
            return None
        for idx in range(start, len(elems)):
            if len(elems) - idx < target_size - len(chosen):
                break
            x = elems[idx]
            if not extendable(chosen, sums, x):
                continue
            new_sums = set(sums)
            for c in chosen:
                new_sums.add(G.add(c, x))
            new_sums.add(G.add(x, x))
            chosen.append(x)
            found = rec(idx + 1, chosen, new_sums)
            chosen.pop()
            if found is not None:
                return found
        return None

    found = rec(0, [], set())
    if found is None:
        raise NotFound(f"no {'good ' if good else ''}maximal 3-independent set of size "
                       f"{target_size} in Z_{'xZ_'.join(map(str, G.factors))}")
    ok, is_good = is_maximal_3indep(found, G)
    return IndepSet(G, frozenset(found), is_good,
                    {"method": "exhaustive", "target": target_size})


def smallest_maximal_3indep(G: FiniteAbelianGroup, forbidden: Iterable[Elem] = (),
                            *, prefer_good: bool = True) -> IndepSet:
    """Smallest maximal 3-independent set, preferring good ones of that size."""
    forbidden = list(forbidden)
    for size in range(1, G.order + 1):
        attempts = [True, False] if prefer_good else [False]
        for want_good in attempts:
            try:
                return exhaustive_3indep_search(G, size, forbidden, good=want_good)
            except NotFound:
                continue
    raise NotFound("no maximal 3-independent set avoids the forbidden elements")


def build_product_3indep(m1: int, m2: int, forbidden: Iterable[Elem] = ()) -> IndepSet:
    """Good maximal 3-independent subset of Z_m1 x Z_m2 of size m1 + m2 - 3.

    Tries the two-coset pattern for every admissible (R, R') and both factor
    roles, in a fixed order, keeping the first certified set that avoids
    ``forbidden``; falls back to exhaustive search.
    """
    if m1 <= 4 or m2 <= 4:
        raise OrderTooSmall("both factors must have order greater than 4")
    if gcd(m1, m2) != 1:
        raise InvalidParameters(f"{m1} and {m2} must be coprime")
    G = FiniteAbelianGroup((m1, m2))
    forbidden = set(forbidden)
    target = m1 + m2 - 3
    for swap in (False, True):
        n, m = (m2, m1) if swap else (m1, m2)
        for r in range(1, n):
            if n // gcd(r, n) <= 3:
                continue
            for rp in range(1, m):
                if m // gcd(rp, m) <= 3:
                    continue
                try:
                    S = build_mazzi3i(n, m, r, rp)
                except ConstructionUncertified:
                    continue
                members = {(b, a) for a, b in S.members} if swap else set(S.members)
                if len(members) != target or members & forbidden:
                    continue
                prov = dict(S.provenance, swapped=swap)
                out = _certified(G, members, prov)
                if out is not None:
                    return out
    return exhaustive_3indep_search(G, target, forbidden)


def crt_to_cyclic(x: Elem, m1: int, m2: int) -> int:
    """Isomorphism Z_m1 x Z_m2 -> Z_{m1 m2}, (a, b) -> a*m2 + b*m1."""
    a, b = x
    return (a * m2 + b * m1) % (m1 * m2)


def cyclic_to_crt(k: int, m1: int, m2: int) -> Elem:
    """Inverse of :func:`crt_to_cyclic`."""
    a = k * pow(m2, -1, m1) % m1
    b = k * pow(m1, -1, m2) % m2
    return (a, b)
