"""The cubic Y(X^2 - beta^2) = 1 and its group of F_q-rational non-singular points.

Points are parametrised by mu_{q+1} = {v in F_{q^2} : v^(q+1) = 1}:
``Q_v = ((v+1)/(v-1) * beta, (v-1)^2 / (4 v beta^2))`` with ``Q_1 = X_inf``.
Addition is multiplication of parameters.  :meth:`NodalCubic.geometric_add`
is an independent projective chord-tangent implementation used as an oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameters, NotACosetRep, NotInMu, SingularPoint
from .gfield import (GF, FieldElement, in_mu, is_mth_power_in_mu, mu_generator,
                     quadratic_extension)


@dataclass(frozen=True)
class CubicPoint:
    """``kind`` is "affine", "xinf" (neutral inflection) or "yinf" (isolated double point)."""

    kind: str
    x: FieldElement | None = None
    y: FieldElement | None = None

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"

    def encode(self):
        if self.kind == "xinf":
            return "Xinf"
        if self.kind == "yinf":
            return "Yinf"
        return [self.x.value, self.y.value]

    def __repr__(self):
        if self.kind != "affine":
            return "Xinf" if self.kind == "xinf" else "Yinf"
        return f"({self.x!r}, {self.y!r})"


XINF = CubicPoint("xinf")
YINF = CubicPoint("yinf")


@dataclass(frozen=True)
class CosetSpec:
    m: int
    tbar: FieldElement


class NodalCubic:
    """The curve over a given F_q, with beta^2 a fixed non-square of F_q."""

    def __init__(self, Fq: GF, beta_sq: FieldElement | int | None = None):
        if Fq.order % 2 == 0 or Fq.p <= 3:
            raise InvalidParameters("need odd q with characteristic > 3")
        self.Fq = Fq
        self.q = Fq.order
        self.F2 = quadratic_extension(Fq, beta_sq)
        self.beta = self.F2.beta
        self.beta_sq = self.F2.beta_sq
        self.g = mu_generator(self.F2)
        self._dlog: dict[int, int] | None = None

    # --- parameters and points ---

    @property
    def order(self) -> int:
        return self.q + 1

    def mu(self) -> list[FieldElement]:
        """mu_{q+1} listed as g^0, g^1, ..., g^q."""
        out, v = [], self.F2.one
        for _ in range(self.q + 1):
            out.append(v)
            v = v * self.g
        return out

    def dlog(self, v: FieldElement) -> int:
        """Exponent e in [0, q] with v = g^e."""
        if self._dlog is None:
            self._dlog = {v.value: i for i, v in enumerate(self.mu())}
        try:
            return self._dlog[v.value]
        except KeyError:
            raise NotInMu(f"{v!r} is not in mu_{self.q + 1}") from None

    def on_curve(self, x: FieldElement, y: FieldElement) -> bool:
        return y * (x * x - self.beta_sq) == self.Fq.one

    def param_to_point(self, v: FieldElement) -> CubicPoint:
        if not in_mu(v):
            raise NotInMu(f"{v!r} is not in mu_{self.q + 1}")
        if v == self.F2.one:
            return XINF
        b = self.beta
        x = (v + 1) / (v - 1) * b
        y = (v - 1) * (v - 1) / (4 * v * self.F2.embed(self.beta_sq))
        return CubicPoint("affine", x.to_base(), y.to_base())

    def point_to_param(self, P: CubicPoint) -> FieldElement:
        if P.kind == "yinf":
            raise SingularPoint("Y_inf is the isolated double point")
        if P.kind == "xinf":
            return self.F2.one
        if not self.on_curve(P.x, P.y):
            raise InvalidParameters(f"{P!r} is not on the cubic")
        x = self.F2.embed(P.x)
        return (x + self.beta) / (x - self.beta)

    def points(self) -> list[CubicPoint]:
        """All q+1 points of G, in the order of :meth:`mu`."""
        return [self.param_to_point(v) for v in self.mu()]

    def affine_points(self) -> list[CubicPoint]:
        return [P for P in self.points() if P.is_affine]

    # --- group law ---

    def group_add(self, v: FieldElement, w: FieldElement) -> FieldElement:
        return v * w

    def _proj(self, P: CubicPoint) -> tuple[FieldElement, FieldElement, FieldElement]:
        F = self.Fq
        if P.kind == "xinf":
            return (F.one, F.zero, F.zero)
        if P.kind == "yinf":
            return (F.zero, F.one, F.zero)
        return (P.x, P.y, F.one)

    def _from_proj(self, X, Y, Z) -> CubicPoint:
        if Z.value != 0:
            return CubicPoint("affine", X / Z, Y / Z)
        if X.value != 0:
            return XINF
        return YINF

    def _grad(self, X, Y, Z):
        # F(X, Y, Z) = X^2 Y - n Y Z^2 - Z^3
        n = self.beta_sq
        return (2 * X * Y, X * X - n * Z * Z, -2 * n * Y * Z - 3 * Z * Z)

    def _third(self, A, B, tangent: bool):
        """Third intersection of the line AB (tangent at A if ``tangent``) with the cubic.

        Along lambda*A + mu*B the cubic restricts to
        lambda^3 F(A) + lambda^2 mu (grad F(A).B) + lambda mu^2 (grad F(B).A) + mu^3 F(B).
        """
        F = self.Fq
        gA = self._grad(*A)
        if tangent:
            # grad F(A).B = 0 here, so the form is mu^2 (c1 lambda + c0 mu)
            B = self._tangent_partner(A, gA)
            gB = self._grad(*B)
            c1 = sum((gi * ai for gi, ai in zip(gB, A)), F.zero)
            c0 = self._eval(B)
            return tuple(c0 * a - c1 * b for a, b in zip(A, B))
        gB = self._grad(*B)
        c2 = sum((gi * bi for gi, bi in zip(gA, B)), F.zero)
        c1 = sum((gi * ai for gi, ai in zip(gB, A)), F.zero)
        return tuple(c1 * a - c2 * b for a, b in zip(A, B))

    def _tangent_partner(self, A, gA):
        """A point B != A on the line gA . (X, Y, Z) = 0."""
        F = self.Fq
        a, b, c = gA
        # kernel of (a, b, c) is spanned by two of (b,-a,0), (c,0,-a), (0,c,-b)
        for B in ((b, -a, F.zero), (c, F.zero, -a), (F.zero, c, -b)):
            if any(x.value for x in B) and not _proportional(A, B):
                return B
        raise SingularPoint("tangent requested at a singular point")

    def _eval(self, P):
        X, Y, Z = P
        return X * X * Y - self.beta_sq * Y * Z * Z - Z * Z * Z

    def geometric_add(self, P: CubicPoint, Q: CubicPoint) -> CubicPoint:
        """Chord-tangent sum with neutral element X_inf, computed projectively."""
        if P.kind == "yinf" or Q.kind == "yinf":
            raise SingularPoint("Y_inf is singular")
        O = self._proj(XINF)
        A, B = self._proj(P), self._proj(Q)
        R = self._third(A, B, tangent=(P == Q))
        Rp = self._from_proj(*R)
        S = self._third(O, self._proj(Rp), tangent=(Rp == XINF))
        out = self._from_proj(*S)
        if out.kind == "yinf":
            raise SingularPoint("chord-tangent sum reached the double point")
        return out

    # --- subgroup K and its cosets ---

    def check_index(self, m: int) -> None:
        if m <= 0 or (self.q + 1) % m:
            raise InvalidParameters(f"m = {m} does not divide q+1 = {self.q + 1}")

    def default_tbar(self, m: int) -> FieldElement:
        """g^j for the least j >= 1 with j not divisible by m."""
        self.check_index(m)
        j = 1 if m != 1 else 0
        while m > 1 and j % m == 0:
            j += 1
        return self.g ** j

    def subgroup_params(self, m: int) -> list[FieldElement]:
        """K = the m-th powers in mu_{q+1}, as powers of g^m."""
        self.check_index(m)
        gm = self.g ** m
        out, v = [], self.F2.one
        for _ in range((self.q + 1) // m):
            out.append(v)
            v = v * gm
        return out

    def coset_params(self, spec: CosetSpec, *, require_rep: bool = True) -> list[FieldElement]:
        """Parameters of K_T = t * K, computed by multiplying tbar into K."""
        self.check_index(spec.m)
        if require_rep and is_mth_power_in_mu(spec.tbar, spec.m):
            raise NotACosetRep(f"tbar is an {spec.m}-th power; its coset is K itself")
        if not in_mu(spec.tbar):
            raise NotInMu("tbar must lie in mu_{q+1}")
        return [spec.tbar * k for k in self.subgroup_params(spec.m)]

    def coset_params_u(self, spec: CosetSpec) -> list[FieldElement]:
        """The same coset from the u-parametrisation tbar*((u+beta)/(u-beta))^m, u in F_q, plus tbar."""
        self.check_index(spec.m)
        if is_mth_power_in_mu(spec.tbar, spec.m):
            raise NotACosetRep(f"tbar is an {spec.m}-th power")
        b = self.beta
        seen = {spec.tbar.value: spec.tbar}
        for u in self.Fq.elements():
            uu = self.F2.embed(u)
            v = spec.tbar * ((uu + b) / (uu - b)) ** spec.m
            seen.setdefault(v.value, v)
        return [seen[k] for k in sorted(seen)]

    def coset_points(self, spec: CosetSpec) -> list[CubicPoint]:
        params = self.coset_params(spec)
        other = self.coset_params_u(spec)
        if sorted(v.value for v in params) != [v.value for v in other]:
            raise AssertionError("coset parametrisations disagree")
        return [self.param_to_point(v) for v in params]

    def coset_label(self, v: FieldElement, m: int) -> int:
        """Index i in Z_m of the coset g^i K containing v."""
        return self.dlog(v) % m

    def coset_by_label(self, i: int, m: int) -> list[FieldElement]:
        gi = self.g ** (i % m)
        return [gi * k for k in self.subgroup_params(m)]


def _proportional(A, B) -> bool:
    """True iff the homogeneous vectors A and B define the same projective point."""
    a0, a1, a2 = A
    b0, b1, b2 = B
    return (a0 * b1 - a1 * b0).value == 0 and (a0 * b2 - a2 * b0).value == 0 \
        and (a1 * b2 - a2 * b1).value == 0


def collinear_params(u: FieldElement, v: FieldElement, w: FieldElement) -> bool:
    """Group-theoretic collinearity rule for three points of G: uvw = 1."""
    return (u * v * w) == u.field.one
