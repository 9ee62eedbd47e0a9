"""Exact incidence geometry of AG(2,q): collinearity, segment position,
arc and bicovering verification, and the exceptional points off the cubic.

Points are pairs of packed field values.  The verifiers are vectorised over
numpy arrays and know nothing about how an arc was constructed; the only
curve knowledge here is the equation Y(X^2 - beta^2) = 1, used for the
exceptional-point checks and to annotate reports.
"""
from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidParameters, NotAnArc
from .gfield import GF, FieldElement, is_square, sqrt
from .sampling import sample_points

PlanePoint = tuple[int, int]

EXHAUSTIVE_GUARD = 10 ** 4


class SegmentPosition(enum.Enum):
    EXTERNAL = "external"
    INTERNAL = "internal"
    ON_ENDPOINT = "on_endpoint"
    NOT_COLLINEAR = "not_collinear"


def _val(x) -> int:
    return x.value if isinstance(x, FieldElement) else int(x)


def as_points(S) -> np.ndarray:
    """Normalise an iterable of points to an (n, dim) int64 array."""
    rows = [[_val(c) for c in P] for P in S]
    if not rows:
        return np.zeros((0, 2), dtype=np.int64)
    return np.asarray(rows, dtype=np.int64)


def collinear3(F: GF, P, Q, R) -> bool:
    """det [[x1, y1, 1], [x2, y2, 1], [x3, y3, 1]] == 0; repeated points count as collinear."""
    x1, y1 = (F(_val(c)) for c in P)
    x2, y2 = (F(_val(c)) for c in Q)
    x3, y3 = (F(_val(c)) for c in R)
    det = (x2 - x1) * (y3 - y1) - (y2 - y1) * (x3 - x1)
    return det.value == 0


def segment_position(F: GF, P, P1, P2) -> SegmentPosition:
    """Position of P relative to the segment P1P2 on their common line.

    The affine frame is the first coordinate in which P1 and P2 differ; any
    other frame rescales the chord product by a square.
    """
    P, P1, P2 = ([F(_val(c)) for c in X] for X in (P, P1, P2))
    if P1 == P2:
        raise InvalidParameters("segment endpoints must be distinct")
    if P == P1 or P == P2:
        return SegmentPosition.ON_ENDPOINT
    if not collinear3(F, P, P1, P2):
        return SegmentPosition.NOT_COLLINEAR
    c = next(i for i in range(len(P)) if P1[i] != P2[i])
    prod = (P[c] - P1[c]) * (P[c] - P2[c])
    return SegmentPosition.EXTERNAL if is_square(prod) else SegmentPosition.INTERNAL


# --- vectorised direction hashing (any dimension) ---

def direction_keys(F: GF, D: np.ndarray) -> np.ndarray:
    """Pack each non-zero vector of D (shape (..., N)) scaled to have first
    non-zero coordinate 1.  Zero vectors map to -1."""
    D = np.asarray(D, dtype=np.int64)
    N = D.shape[-1]
    if F.order ** N >= 2 ** 62:
        raise InvalidParameters("q^N too large for packed direction keys")
    nz = D != 0
    piv_idx = np.argmax(nz, axis=-1)
    pivot = np.take_along_axis(D, piv_idx[..., None], axis=-1)
    normed = F.vmul(D, F.vinv(pivot))
    weights = F.order ** np.arange(N, dtype=np.int64)
    keys = (normed * weights).sum(-1)
    return np.where(nz.any(-1), keys, -1)


def point_keys(F: GF, P: np.ndarray) -> np.ndarray:
    weights = F.order ** np.arange(P.shape[-1], dtype=np.int64)
    return (np.asarray(P, dtype=np.int64) * weights).sum(-1)


def find_collinear_triple(F: GF, pts: np.ndarray, threads: int = 1):
    """Return indices (i, j, k) of a collinear triple, or None.

    For each i, directions towards every j > i are hashed; a repeated
    direction is a triple whose smallest index is i.  The witness with the
    smallest (i, j, k) found per chunk is returned, independent of ``threads``.
    """
    n = len(pts)
    if n < 3:
        return None

    def scan(rng):
        for i in rng:
            rest = pts[i + 1:]
            keys = direction_keys(F, F.vsub(rest, pts[i]))
            if (keys < 0).any():
                j = i + 1 + int(np.argmax(keys < 0))
                raise InvalidParameters(f"repeated point at indices {i} and {j}")
            order = np.argsort(keys, kind="stable")
            sk = keys[order]
            dup = np.nonzero(sk[1:] == sk[:-1])[0]
            if len(dup):
                cands = sorted((int(min(order[d], order[d + 1])), int(max(order[d], order[d + 1])))
                               for d in dup)
                j, k = cands[0]
                return (i, i + 1 + j, i + 1 + k)
        return None

    chunks = _chunks(range(n - 2), threads)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        results = list(ex.map(scan, chunks))
    for r in results:
        if r is not None:
            return r
    return None


def _chunks(rng: range, parts: int) -> list[range]:
    parts = max(1, parts)
    n = len(rng)
    step = -(-n // parts) if n else 1
    return [rng[i:i + step] for i in range(0, n, step)] or [rng]


def is_arc(F: GF, S, threads: int = 1) -> tuple[bool, tuple | None]:
    """(True, None) when no three points of S are collinear, else (False, triple)."""
    pts = as_points(S)
    if len(np.unique(point_keys(F, pts))) != len(pts):
        raise InvalidParameters("point set contains repeated points")
    w = find_collinear_triple(F, pts, threads)
    if w is None:
        return True, None
    return False, tuple(tuple(int(c) for c in pts[i]) for i in w)


# --- bicovering ---

@dataclass
class BicoverReport:
    arc: list
    mode: str
    uncovered: list = field(default_factory=list)
    external_only: list = field(default_factory=list)
    internal_only: list = field(default_factory=list)
    bicovered_count: int = 0
    points_checked: int = 0
    is_bicovering: bool | None = None
    center: PlanePoint | None = None
    on_curve: list = field(default_factory=list)

    @property
    def complete(self) -> bool | None:
        if self.mode != "exhaustive":
            return None
        return not self.uncovered

    def to_json(self) -> dict:
        enc = lambda pts: [list(p) for p in pts]
        return {
            "arc_size": len(self.arc),
            "mode": self.mode,
            "points_checked": self.points_checked,
            "uncovered": enc(self.uncovered),
            "external_only": enc(self.external_only),
            "internal_only": enc(self.internal_only),
            "bicovered_count": self.bicovered_count,
            "is_complete": self.complete,
            "is_bicovering": self.is_bicovering,
            "center": list(self.center) if self.center is not None else None,
            "not_bicovered_on_curve": enc(self.on_curve),
        }


def _classify_chunk(F: GF, arc: np.ndarray, P: np.ndarray) -> np.ndarray:
    """Per point: bit 0 = external to some secant, bit 1 = internal to some secant,
    bit 2 = the point belongs to the arc."""
    k = len(arc)
    out = np.zeros(len(P), dtype=np.int8)
    if len(P) == 0 or k == 0:
        return out
    D = F.vsub(P[:, None, :], arc[None, :, :])  # (c, k, 2)
    keys = direction_keys(F, D)
    out[(keys < 0).any(axis=1)] |= 4
    order = np.argsort(keys, axis=1, kind="stable")
    sk = np.take_along_axis(keys, order, axis=1)
    rows, cols = np.nonzero((sk[:, 1:] == sk[:, :-1]) & (sk[:, 1:] >= 0))
    if len(rows) == 0:
        return out
    a = order[rows, cols]
    b = order[rows, cols + 1]
    A, B, X = arc[a], arc[b], P[rows]
    coord = np.where(A[:, 0] != B[:, 0], 0, 1)
    r = np.arange(len(rows))
    prod = F.vmul(F.vsub(X[r, coord], A[r, coord]), F.vsub(X[r, coord], B[r, coord]))
    ext = F.square_table[prod]
    np.bitwise_or.at(out, rows[ext], 1)
    np.bitwise_or.at(out, rows[~ext], 2)
    return out


def bicover_classify(F: GF, S, mode: str = "exhaustive", samples: int = 0,
                     seed: int = 0, threads: int = 1,
                     beta_sq: FieldElement | int | None = None,
                     chunk: int = 2048) -> BicoverReport:
    """Classify ambient points by the secants of the arc S through them."""
    arc = as_points(S)
    ok, witness = is_arc(F, arc, threads)
    if not ok:
        raise NotAnArc(f"collinear triple {witness}")
    q = F.order
    if mode == "exhaustive":
        xs, ys = np.meshgrid(np.arange(q), np.arange(q), indexing="ij")
        P = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(np.int64)
    elif mode == "sample":
        P = sample_points(q, 2, samples, seed)
        P = P[np.unique(point_keys(F, P), return_index=True)[1]]
        P = P[np.lexsort((P[:, 1], P[:, 0]))]
    else:
        raise InvalidParameters(f"unknown mode {mode!r}")
    pieces = [P[i:i + chunk] for i in range(0, len(P), chunk)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as ex:
        flags = np.concatenate(list(ex.map(lambda c: _classify_chunk(F, arc, c), pieces))) \
            if pieces else np.zeros(0, dtype=np.int8)
    outside = (flags & 4) == 0
    tup = lambda rows: [(int(x), int(y)) for x, y in rows]
    rep = BicoverReport(arc=tup(arc), mode=mode)
    rep.points_checked = int(outside.sum())
    rep.uncovered = tup(P[outside & (flags == 0)])
    rep.external_only = tup(P[outside & (flags == 1)])
    rep.internal_only = tup(P[outside & (flags == 2)])
    rep.bicovered_count = int((outside & (flags == 3)).sum())
    not_bico = rep.uncovered + rep.external_only + rep.internal_only
    if mode == "exhaustive":
        rep.is_bicovering = not not_bico
        if len(not_bico) == 1:
            rep.center = not_bico[0]
    if beta_sq is not None:
        n = F(_val(beta_sq))
        rep.on_curve = sorted(P_ for P_ in not_bico
                              if (F(P_[1]) * (F(P_[0]) * F(P_[0]) - n)) == F.one)
    return rep


def point_secants(F: GF, S, P) -> list[tuple[int, int, SegmentPosition]]:
    """All secants of S through the point P, with P's position on each."""
    arc = as_points(S)
    out = []
    for i in range(len(arc)):
        for j in range(i + 1, len(arc)):
            if collinear3(F, P, arc[i], arc[j]):
                out.append((i, j, segment_position(F, P, arc[i], arc[j])))
    return out


def point_class(F: GF, S, P) -> str:
    """"bicovered", "external_only", "internal_only" or "uncovered" for one point."""
    kinds = {pos for _, _, pos in point_secants(F, S, P)}
    ext = SegmentPosition.EXTERNAL in kinds
    inn = SegmentPosition.INTERNAL in kinds
    if ext and inn:
        return "bicovered"
    if ext:
        return "external_only"
    if inn:
        return "internal_only"
    return "uncovered"


# --- exceptional points ---

def minus_three_is_nonsquare(F: GF) -> bool:
    return not is_square(F.from_int(-3))


def exceptional_set(F: GF, beta_sq) -> list[PlanePoint]:
    """(0, -9/(8 beta^2)), plus (+-beta*sqrt(-3), 0) when -3 is a non-square.

    ``+beta*sqrt(-3)`` denotes the smaller (canonical order) square root of
    -3*beta^2 in F_q.
    """
    if F.p <= 3:
        raise InvalidParameters("characteristic must exceed 3")
    n = F(_val(beta_sq))
    pts = [(0, (F.from_int(-9) / (8 * n)).value)]
    by_square = minus_three_is_nonsquare(F)
    by_criterion = F.s % 2 == 1 and F.p % 3 == 2
    if by_square != by_criterion:
        raise AssertionError("square test and s-odd/p=2 mod 3 criterion disagree on -3")
    if by_square:
        c = sqrt(F.from_int(-3) * n)
        pts += [(c.value, 0), ((-c).value, 0)]
    return pts


def curve_affine_points(F: GF, beta_sq) -> list[PlanePoint]:
    """(u, 1/(u^2 - beta^2)) for every u in F_q, straight from the equation."""
    n = F(_val(beta_sq))
    return [(u.value, (1 / (u * u - n)).value) for u in F.elements()]


def verify_fuori(F: GF, beta_sq) -> bool:
    """No exceptional point is collinear with two distinct affine points of the cubic."""
    if F.order > EXHAUSTIVE_GUARD:
        raise InvalidParameters(f"q exceeds exhaustive guard {EXHAUSTIVE_GUARD}")
    curve = as_points(curve_affine_points(F, beta_sq))
    for E in exceptional_set(F, beta_sq):
        keys = direction_keys(F, F.vsub(curve, np.asarray(E, dtype=np.int64)))
        if (keys < 0).any() or len(np.unique(keys)) != len(keys):
            return False
    return True


def center_point(F: GF, beta_sq) -> PlanePoint:
    """P0 = (0, -1/beta^2)."""
    n = F(_val(beta_sq))
    return (0, (F.from_int(-1) / n).value)
