"""Assembly of the plane constructions: the complete-arc candidate A u E built
from a two-coset 3-independent set, and the almost bicovering arc made of
whole cosets of K plus the exceptional points.

Construction never depends on the asymptotic size bounds; those are exposed
as exact integer flags, and completeness is left to the verifiers.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import gcd

from .cubicgroup import CubicPoint, NodalCubic
from .errors import (InternalAssertionFailure, InvalidParameters, NotFound,
                     OrderTooSmall)
from .gfield import GF, FieldElement
from .indepsets import (FiniteAbelianGroup, build_mazzi3i, build_product_3indep,
                        crt_to_cyclic, cyclic_to_crt, is_maximal_3indep,
                        smallest_maximal_3indep)
from .planegeom import (center_point, collinear3, exceptional_set, is_arc,
                        minus_three_is_nonsquare)


def _ge_minus_sqrt(q: int, c: int, rhs: int) -> bool:
    """Exact truth of q + 1 - c*sqrt(q) >= rhs for integers c >= 0."""
    left = q + 1 - rhs
    return left >= 0 and left * left >= c * c * q


@dataclass(frozen=True)
class GuaranteeFlags:
    thm1_bound: bool          # m <= q^(1/4) / sqrt(6)
    thm2_bound: bool          # m <= q^(1/4) / 4
    bico_bound: bool          # q+1-(16m^2-8m+2)sqrt(q) >= 16m^2+24m+1
    var_bound: bool           # q+1-(6m^2-6m+2)sqrt(q) >= 8m^2+8m+1
    archinuovi_bound: bool    # q+1-(6m^2-6m+2)sqrt(q) >= 4m^2+8m+1

    @classmethod
    def compute(cls, q: int, m: int) -> GuaranteeFlags:
        return cls(
            thm1_bound=36 * m ** 4 <= q,
            thm2_bound=256 * m ** 4 <= q,
            bico_bound=_ge_minus_sqrt(q, 16 * m * m - 8 * m + 2, 16 * m * m + 24 * m + 1),
            var_bound=_ge_minus_sqrt(q, 6 * m * m - 6 * m + 2, 8 * m * m + 8 * m + 1),
            archinuovi_bound=_ge_minus_sqrt(q, 6 * m * m - 6 * m + 2, 4 * m * m + 8 * m + 1),
        )

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class ArcParams:
    field: GF
    m: int | None = None
    tbar: FieldElement | None = None
    m1: int | None = None
    m2: int | None = None
    beta_sq: FieldElement | int | None = None


@dataclass
class PlaneArc:
    """A constructed point set of AG(2,q) together with how it was obtained."""

    curve: NodalCubic
    m: int
    points: list[tuple[int, int]]
    construction: str
    exceptional: list[tuple[int, int]]
    flags: GuaranteeFlags
    labels: list[int] = field(default_factory=list)
    params: list[int] = field(default_factory=list)      # dlog exponents of the curve points used
    tbar: FieldElement | None = None
    center: tuple[int, int] | None = None
    claimed_size: int | None = None
    notes: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        C = self.curve
        out = {
            "construction": self.construction,
            "field": C.Fq.descriptor(),
            "beta_sq": C.beta_sq.value,
            "m": self.m,
            "tbar": self.tbar.encode() if self.tbar is not None else None,
            "M": self.labels,
            "params": self.params,
            "exceptional": [list(P) for P in self.exceptional],
            "points": [list(P) for P in self.points],
            "size": self.size,
            "claimed_size": self.claimed_size,
            "flags": self.flags.to_json(),
            "center": list(self.center) if self.center is not None else None,
        }
        if self.notes:
            out["notes"] = self.notes
        return out


def _xy(P: CubicPoint) -> tuple[int, int]:
    if not P.is_affine:
        raise InternalAssertionFailure(f"{P!r} is not an affine point")
    return (P.x.value, P.y.value)


def _check_index(curve: NodalCubic, m: int, *, proper: bool) -> None:
    q = curve.q
    if m is None or m < 1 or (q + 1) % m:
        raise InvalidParameters(f"m = {m} must divide q+1 = {q + 1}")
    if gcd(m, 6) != 1:
        raise InvalidParameters(f"m = {m} must be coprime to 6")
    if proper and m in (1, q + 1):
        raise InvalidParameters(f"m = {m} must be a proper divisor of q+1")


def build_theorem1_arc(params: ArcParams) -> PlaneArc:
    """A u E, with A the two-coset good maximal 3-independent subset of G = K x H.

    K = <g^m> has order n = (q+1)/m and H = <g^n> has order m, so (a, b) in
    Z_n x Z_m corresponds to the parameter g^(m a + n b).  When E has three
    points and A u E is not an arc, exceptional points are dropped (last
    first) until it is; the dropped points are recorded.
    """
    curve = NodalCubic(params.field, params.beta_sq)
    q, m = curve.q, params.m
    _check_index(curve, m, proper=False)
    n = (q + 1) // m
    if gcd(m, n) != 1:
        raise InvalidParameters(f"m = {m} and (q+1)/m = {n} must be coprime")
    if m <= 3 or n <= 3:
        raise OrderTooSmall(f"both factor orders must exceed 3 (got {n} and {m})")

    def exponent(a: int, b: int) -> int:
        return (m * a + n * b) % (q + 1)

    choices = [(1, 1)]
    if params.tbar is not None:
        target = curve.dlog(params.tbar)
        choices = [(r, rp) for r in range(1, n) for rp in range(1, m)
                   if n // gcd(r, n) > 3 and m // gcd(rp, m) > 3
                   and exponent(-2 * r, rp) == target]
        if not choices:
            raise InvalidParameters("tbar is not of the form R' - 2R with R, R' of order > 3")
    S = build_mazzi3i(n, m, *choices[0])
    r, rp = choices[0]
    exps = sorted(exponent(a, b) for a, b in S.members)
    pts = [_xy(curve.param_to_point(curve.g ** e)) for e in exps]
    E = exceptional_set(params.field, curve.beta_sq)
    kept = list(E)
    dropped = []
    while not is_arc(params.field, pts + kept)[0]:
        if len(kept) <= 1:
            raise InternalAssertionFailure("A u {(0, -9/(8 beta^2))} is not an arc")
        dropped.append(kept.pop())
    notes = {"indep_variant": S.provenance["variant"], "R": r, "R'": rp}
    if dropped:
        notes["dropped_exceptional"] = [list(P) for P in dropped]
    return PlaneArc(curve=curve, m=m, points=sorted(pts + kept), construction="theorem1",
                    exceptional=kept, flags=GuaranteeFlags.compute(q, m),
                    params=exps, tbar=curve.g ** exponent(-2 * r, rp),
                    claimed_size=m + n - 2, notes=notes)


def find_Q1_Q2(field: GF, beta_sq=None) -> tuple[CubicPoint, CubicPoint]:
    """The unique points of G on the lines joining (0, -9/(8 beta^2)) to (+-beta sqrt(-3), 0)."""
    if not minus_three_is_nonsquare(field):
        raise InvalidParameters("needs s odd and p = 2 mod 3 (three exceptional points)")
    curve = NodalCubic(field, beta_sq)
    E0, Ep, Em = exceptional_set(field, curve.beta_sq)
    found = []
    for E in (Ep, Em):
        hits = [P for P in curve.affine_points() if collinear3(field, E0, E, _xy(P))]
        if len(hits) != 1:
            raise InternalAssertionFailure(f"expected one point of G on the line, found {len(hits)}")
        found.append(hits[0])
    return found[0], found[1]


def _scaled_to_contain(labels: set[int], m: int, target: int | None,
                       forbidden: set[int]) -> set[int]:
    """Image of ``labels`` under the first automorphism x -> u x of Z_m that
    contains ``target`` and avoids ``forbidden``."""
    for u in range(1, m):
        if gcd(u, m) != 1:
            continue
        img = {u * x % m for x in labels}
        if (target is None or target in img) and not img & forbidden:
            return img
    raise NotFound("no automorphic image of M contains tbar's coset and avoids the forbidden cosets")


def build_almost_bicovering(params: ArcParams) -> PlaneArc:
    """Union of the cosets of K indexed by a maximal 3-independent M in G/K, plus E.

    Coset g^i K has label i in Z_m.  With m1, m2 given, M is the size
    m1+m2-3 set of Z_m1 x Z_m2 carried to Z_m by (a, b) -> a m2 + b m1;
    otherwise a smallest maximal 3-independent subset of Z_m is used.  When
    E has three points the cosets of Q1 and Q2 are excluded from M.
    """
    F = params.field
    curve = NodalCubic(F, params.beta_sq)
    q = curve.q
    m = params.m
    if params.m1 is not None or params.m2 is not None:
        if params.m1 is None or params.m2 is None:
            raise InvalidParameters("m1 and m2 must be given together")
        if m is not None and m != params.m1 * params.m2:
            raise InvalidParameters(f"m = {m} differs from m1*m2 = {params.m1 * params.m2}")
        m = params.m1 * params.m2
    _check_index(curve, m, proper=True)
    n = (q + 1) // m

    forbidden: set[int] = set()
    notes: dict = {}
    if minus_three_is_nonsquare(F):
        Q1, Q2 = find_Q1_Q2(F, curve.beta_sq)
        forbidden = {curve.coset_label(curve.point_to_param(Q), m) for Q in (Q1, Q2)}
        notes["Q1"], notes["Q2"] = _xy(Q1), _xy(Q2)
        notes["forbidden_labels"] = sorted(forbidden)
    target = curve.coset_label(params.tbar, m) if params.tbar is not None else None
    if target is not None and target in forbidden:
        raise NotFound("tbar lies in a forbidden coset")

    if params.m1 is not None:
        m1, m2 = params.m1, params.m2
        fb = {cyclic_to_crt(i, m1, m2) for i in forbidden}
        S = build_product_3indep(m1, m2, fb)
        labels = {crt_to_cyclic(x, m1, m2) for x in S.members}
        notes["indep"] = dict(S.provenance)
    else:
        Zm = FiniteAbelianGroup((m,))
        S = smallest_maximal_3indep(Zm, [(i,) for i in forbidden])
        labels = {x[0] for x in S.members}
        notes["indep"] = dict(S.provenance)
    labels = _scaled_to_contain(labels, m, target, forbidden)
    ok, good = is_maximal_3indep({(i,) for i in labels}, FiniteAbelianGroup((m,)))
    if not ok:
        raise InternalAssertionFailure("coset labels are not maximal 3-independent in Z_m")
    notes["M_good"] = good

    exps = sorted((i + m * k) % (q + 1) for i in labels for k in range(n))
    pts = [_xy(curve.param_to_point(curve.g ** e)) for e in exps]
    E = exceptional_set(F, curve.beta_sq)
    tbar = params.tbar if params.tbar is not None else curve.g ** min(labels)
    return PlaneArc(curve=curve, m=m, points=sorted(pts + E), construction="bicovering",
                    exceptional=E, flags=GuaranteeFlags.compute(q, m),
                    labels=sorted(labels), params=exps, tbar=tbar,
                    center=center_point(F, curve.beta_sq),
                    claimed_size=len(labels) * n + len(E), notes=notes)

