"""Caps in AG(N,q), N = 0 mod 4, lifted from plane arcs.

With q' = q^((N-2)/2) and a fixed basis of F_q' over F_q, a point of AG(N,q)
is a vector (flatten(x), flatten(y), u, v).  An arc A lifts to
{(a, a^2, u, v) : a in F_q', (u, v) in A}; a center Q = (x0, y0) is added as
{(a, a^2 - c, x0, y0)} with c = tau (center external to all its secants)
or tau^2 (internal to all of them), tau the least non-square of F_q'.

Coverage is computed fibre by fibre over the plane coordinates (u, v): a
point X lies on a secant either because two cap points share its fibre and
X's front block is on their line, or because a plane secant ab passes
through X's plane point w = (1-t)a + tb and
front(X) = (1-t)front(A) + t front(B) for some A over a, B over b.
"""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import CenterNotACenter, InvalidParameters, NotACap
from .gfield import GF, FieldElement, find_nonsquare
from .planegeom import direction_keys, find_collinear_triple, point_keys
from .sampling import sample_points

EXHAUSTIVE_GUARD = 10 ** 9
_TABLE_LIMIT = 1 << 26


class LiftField:
    """F_q' = F_q[x]/(f) with f the least monic irreducible of degree (N-2)/2."""

    def __init__(self, base: GF, N: int):
        if N < 4 or N % 4:
            raise InvalidParameters(f"N = {N} must be a positive multiple of 4")
        self.base = base
        self.N = N
        self.ext_degree = (N - 2) // 2
        self.ext = GF.extension(base, self.ext_degree)
        self.modulus = list(self.ext.modulus) if self.ext is not base else None

    def flatten(self, x: FieldElement) -> list[int]:
        """Coordinates of x in the power basis, as packed F_q values."""
        if self.ext is self.base:
            return [x.value]
        return [c.value for c in x.components()]

    def unflatten(self, coords) -> FieldElement:
        if self.ext is self.base:
            return self.base(int(coords[0]))
        return self.ext.from_components([int(c) for c in coords])

    def alpha_blocks(self, shift: FieldElement | None = None) -> np.ndarray:
        """Rows (flatten(a), flatten(a^2 - shift)) for every a in F_q', canonical order."""
        rows = []
        for a in self.ext.elements():
            sq = a * a if shift is None else a * a - shift
            rows.append(self.flatten(a) + self.flatten(sq))
        return np.asarray(rows, dtype=np.int64).reshape(-1, 2 * self.ext_degree)

    def nonsquare(self) -> FieldElement:
        return find_nonsquare(self.ext)


@dataclass
class Cap:
    field: GF
    N: int
    points: np.ndarray                 # (size, N) packed F_q values
    completion: str = "none"           # "none" | "tau" | "tau2"
    lift: LiftField | None = None
    provenance: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.points)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "field": self.field.descriptor(),
            "lift_modulus": self.lift.modulus if self.lift is not None else None,
            "completion": self.completion,
            "size": self.size,
            "provenance": self.provenance,
            "points": self.points.tolist(),
        }


def artifact_hash(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()


def lift_arc(field: GF, arc, N: int) -> Cap:
    lift = LiftField(field, N)
    blocks = lift.alpha_blocks()
    rows = []
    for (u, v) in sorted((int(a), int(b)) for a, b in arc):
        plane = np.tile(np.asarray([u, v], dtype=np.int64), (len(blocks), 1))
        rows.append(np.hstack([blocks, plane]))
    pts = np.vstack(rows) if rows else np.zeros((0, N), dtype=np.int64)
    return Cap(field, N, pts, "none", lift)


def complete_with_center(cap: Cap, center, center_class: str) -> Cap:
    """Add the fibre over ``center``; ``center_class`` is "external" or "internal"."""
    if cap.completion != "none":
        raise InvalidParameters("cap is already completed")
    lift = cap.lift or LiftField(cap.field, cap.N)
    tau = lift.nonsquare()
    if center_class == "external":
        shift, kind = tau, "tau"
    elif center_class == "internal":
        shift, kind = tau * tau, "tau2"
    else:
        raise CenterNotACenter(f"center classified as {center_class!r}")
    blocks = lift.alpha_blocks(shift)
    plane = np.tile(np.asarray([int(c) for c in center], dtype=np.int64), (len(blocks), 1))
    pts = np.vstack([cap.points, np.hstack([blocks, plane])])
    prov = dict(cap.provenance, center=[int(c) for c in center], tau=tau.value)
    return Cap(cap.field, cap.N, pts, kind, lift, prov)


def is_cap(field: GF, points, threads: int = 1) -> tuple[bool, tuple | None]:
    """(True, None) if no three points are collinear, else (False, witness triple)."""
    pts = np.asarray(points, dtype=np.int64)
    if len(np.unique(point_keys(field, pts))) != len(pts):
        raise InvalidParameters("point set contains repeated points")
    w = find_collinear_triple(field, pts, threads)
    if w is None:
        return True, None
    return False, tuple(tuple(int(c) for c in pts[i]) for i in w)


# --- coverage ---

@dataclass
class CoverageReport:
    mode: str
    checked: int          # ambient points examined that are not in the cap
    covered: int
    in_cap: int
    samples: int | None = None
    seed: int | None = None

    @property
    def fraction(self) -> float:
        return self.covered / self.checked if self.checked else 1.0

    @property
    def complete(self) -> bool | None:
        return self.covered == self.checked if self.mode == "exhaustive" else None

    def to_json(self) -> dict:
        return {"mode": self.mode, "checked": self.checked, "covered": self.covered,
                "uncovered": self.checked - self.covered, "in_cap": self.in_cap,
                "coverage": round(self.fraction, 12), "is_complete": self.complete,
                "samples": self.samples, "seed": self.seed}


class _Fibres:
    """Cap points grouped by their plane coordinates (the last two)."""

    def __init__(self, field: GF, pts: np.ndarray):
        F, q = field, field.order
        self.F, self.q = F, q
        self.dim = pts.shape[1] - 2
        pk = pts[:, -2] * q + pts[:, -1]
        self.plane_keys, inv = np.unique(pk, return_inverse=True)
        self.plane = np.stack([self.plane_keys // q, self.plane_keys % q], axis=1)
        G = len(self.plane_keys)
        self.members = [pts[inv == g, :-2] for g in range(G)]
        width = max(len(x) for x in self.members)
        # padded with repeats of the first front; repeats are harmless in the cross test
        self.fronts = np.stack([np.vstack([x, np.repeat(x[:1], width - len(x), axis=0)])
                                for x in self.members])
        self.front_keys = [point_keys(F, x) for x in self.members]
        self.nkeys = q ** self.dim
        self.fronts32 = self.fronts.astype(np.int32) if q * self.nkeys < 2 ** 31 else None
        if G * self.nkeys <= _TABLE_LIMIT:
            self.table = np.zeros((G, self.nkeys), dtype=bool)
            for g, k in enumerate(self.front_keys):
                self.table[g, k] = True
            self.sorted_keys = None
        else:
            self.table = None
            self.sorted_keys = np.sort(np.concatenate(
                [g * self.nkeys + k for g, k in enumerate(self.front_keys)]))
        self._build_incidence()

    def _build_incidence(self) -> None:
        """Every (w, g1, g2, t) with w = (1-t) a_g1 + t a_g2 for distinct fibres, t != 0, 1."""
        F, q = self.F, self.q
        G = len(self.plane)
        if G < 2:
            self.inc = np.zeros((0, 4), dtype=np.int64)
            return
        g1, g2 = np.nonzero(np.ones((G, G), dtype=bool) & ~np.eye(G, dtype=bool))
        ts = np.arange(2, q, dtype=np.int64) if F.base is None else \
            np.asarray([x.value for x in F.elements() if x.value not in (0, 1)], dtype=np.int64)
        a, b = self.plane[g1], self.plane[g2]
        D = F.vsub(b, a)
        # keep one orientation (g1 < g2) and all t; w = a + t (b - a)
        keep = g1 < g2
        g1, g2, a, D = g1[keep], g2[keep], a[keep], D[keep]
        W = F.vadd(a[:, None, :], F.vmul(ts[None, :, None], D[:, None, :]))
        wk = W[..., 0] * q + W[..., 1]
        rows = np.stack([wk, np.repeat(g1[:, None], len(ts), 1),
                         np.repeat(g2[:, None], len(ts), 1),
                         np.repeat(ts[None, :], len(g1), 0)], axis=-1).reshape(-1, 4)
        self.inc = rows[np.argsort(rows[:, 0], kind="stable")]

    def member(self, g: np.ndarray, keys: np.ndarray) -> np.ndarray:
        if self.table is not None:
            return self.table[g, keys]
        full = g * self.nkeys + keys
        pos = np.searchsorted(self.sorted_keys, full)
        pos = np.minimum(pos, len(self.sorted_keys) - 1)
        return self.sorted_keys[pos] == full

    def cross_covered(self, wk: np.ndarray, front: np.ndarray) -> np.ndarray:
        """For points with plane keys wk and front blocks ``front``: covered by a
        secant joining two different fibres."""
        F = self.F
        out = np.zeros(len(wk), dtype=bool)
        lo = np.searchsorted(self.inc[:, 0], wk, side="left")
        hi = np.searchsorted(self.inc[:, 0], wk, side="right")
        cnt = hi - lo
        if cnt.sum() == 0:
            return out
        sample_idx = np.repeat(np.arange(len(wk)), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        rows = self.inc[np.repeat(lo, cnt) + offs]
        g1, g2, t = rows[:, 1], rows[:, 2], rows[:, 3]
        one = 1 if F.base is None else F.one.value
        c1 = F.vsub(one, t)
        inv_t = F.vinv(t)
        X = front[sample_idx]                                 # (r, dim)
        if F.base is None and self.fronts32 is not None:
            # B = X/t - ((1-t)/t) A, one reduction per coordinate, in int32
            q = F.order
            s = (q - c1 * inv_t % q).astype(np.int32)[:, None]
            xs = (X * inv_t[:, None] % q).astype(np.int32)
            A = self.fronts32[g1]
            keys = np.zeros(A.shape[:2], dtype=np.int32)
            for d in range(self.dim - 1, -1, -1):
                keys = keys * q + (xs[:, d:d + 1] + s * A[:, :, d]) % q
        else:
            A = self.fronts[g1]
            B = F.vmul(F.vsub(X[:, None, :], F.vmul(c1[:, None, None], A)), inv_t[:, None, None])
            keys = point_keys(F, B)
        hit = self.member(np.broadcast_to(g2[:, None], keys.shape), keys).any(axis=1)
        np.logical_or.at(out, sample_idx[hit], True)
        return out

    def same_fibre(self, g: int, front: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(in_cap, covered) for front blocks lying over fibre g."""
        M = self.members[g]
        D = self.F.vsub(front[:, None, :], M[None, :, :])
        keys = direction_keys(self.F, D)
        in_cap = (keys < 0).any(axis=1)
        s = np.sort(keys, axis=1)
        covered = ((s[:, 1:] == s[:, :-1]) & (s[:, 1:] >= 0)).any(axis=1)
        return in_cap, covered & ~in_cap


def _classify(fib: _Fibres, P: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = fib.q
    wk = P[:, -2] * q + P[:, -1]
    front = P[:, :-2]
    covered = fib.cross_covered(wk, front)
    in_cap = np.zeros(len(P), dtype=bool)
    gidx = np.searchsorted(fib.plane_keys, wk)
    gidx = np.minimum(gidx, len(fib.plane_keys) - 1)
    on = fib.plane_keys[gidx] == wk
    for g in np.unique(gidx[on]):
        sel = np.nonzero(on & (gidx == g))[0]
        ic, cv = fib.same_fibre(int(g), front[sel])
        in_cap[sel] = ic
        covered[sel] |= cv
    covered &= ~in_cap
    return in_cap, covered


def _all_fronts(F: GF, dim: int) -> np.ndarray:
    q = F.order
    idx = np.arange(q ** dim, dtype=np.int64)
    return np.stack([(idx // q ** i) % q for i in range(dim)], axis=1)


def cap_coverage(field: GF, points, mode: str = "sample", samples: int = 0,
                 seed: int = 0, threads: int = 1, chunk: int = 2048,
                 check_cap: bool = True) -> CoverageReport:
    """Fraction of ambient points outside the cap that lie on one of its secants."""
    pts = np.asarray(points, dtype=np.int64)
    F, q, N = field, field.order, pts.shape[1]
    if check_cap:
        ok, w = is_cap(F, pts, threads)
        if not ok:
            raise NotACap(f"collinear triple {w}")
    fib = _Fibres(F, pts)
    if mode == "exhaustive":
        if q ** N > EXHAUSTIVE_GUARD:
            raise InvalidParameters(f"q^N = {q ** N} exceeds exhaustive guard {EXHAUSTIVE_GUARD}")
        fronts = _all_fronts(F, N - 2)
        jobs = [(u, v) for u in range(q) for v in range(q)]

        def run(job):
            P = np.hstack([fronts, np.tile(np.asarray(job, dtype=np.int64), (len(fronts), 1))])
            ic, cv = _classify(fib, P)
            return int(ic.sum()), int(cv.sum())
        total = q ** N
    elif mode == "sample":
        P_all = sample_points(q, N, samples, seed)
        jobs = [P_all[i:i + chunk] for i in range(0, len(P_all), chunk)]

        def run(P):
            ic, cv = _classify(fib, P)
            return int(ic.sum()), int(cv.sum())
        total = samples
    else:
        raise InvalidParameters(f"unknown mode {mode!r}")
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        res = list(ex.map(run, jobs))
    in_cap = sum(r[0] for r in res)
    covered = sum(r[1] for r in res)
    return CoverageReport(mode, total - in_cap, covered, in_cap,
                          samples if mode == "sample" else None,
                          seed if mode == "sample" else None)


def build_theorem2_cap(field: GF, m1: int | None, m2: int | None, N: int, *, beta_sq=None,
                       tbar=None, m: int | None = None):
    """Almost bicovering arc -> exhaustive classification of its center -> lift -> complete.

    With m1 = m2 = None the arc uses a smallest maximal 3-independent set of Z_m.
    Returns (cap, arc, center_class, flags)."""
    from .arcbuilder import ArcParams, build_almost_bicovering
    from .planegeom import point_class

    LiftField(field, N)  # validates N before the plane work
    arc = build_almost_bicovering(ArcParams(field, m=m, tbar=tbar, m1=m1, m2=m2, beta_sq=beta_sq))
    cls = point_class(field, arc.points, arc.center)
    center_class = {"external_only": "external", "internal_only": "internal",
                    "uncovered": "external"}.get(cls, cls)
    cap = lift_arc(field, arc.points, N)
    cap = complete_with_center(cap, arc.center, center_class)
    cap.provenance["arc_sha256"] = artifact_hash(arc.to_json())
    cap.provenance["center_class"] = cls
    return cap, arc, center_class, arc.flags
