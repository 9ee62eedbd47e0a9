from __future__ import annotations

from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from nodal_arcs.cubicgroup import XINF, YINF, CosetSpec, NodalCubic, collinear_params
from nodal_arcs.errors import InvalidParameters, NotACosetRep, NotInMu, SingularPoint
from nodal_arcs.gfield import GF
from oracles import cubic_points, det3, least_nonsquare


@pytest.fixture(scope="module", params=[13, 19, 29])
def curve(request):
    return NodalCubic(GF.prime_power(request.param))


def test_default_beta_sq_is_least_nonsquare(curve):
    assert curve.beta_sq.value == least_nonsquare(curve.q)


def test_points_are_exactly_the_affine_points_plus_neutral(curve):
    pts = curve.points()
    assert pts[0] == XINF
    affine = sorted((P.x.value, P.y.value) for P in pts[1:])
    assert affine == sorted(cubic_points(curve.q, curve.beta_sq.value))
    assert len(set(affine)) == curve.q


def test_param_round_trip(curve):
    for v in curve.mu():
        assert curve.point_to_param(curve.param_to_point(v)) == v
    with pytest.raises(SingularPoint):
        curve.point_to_param(YINF)
    with pytest.raises(NotInMu):
        curve.param_to_point(curve.F2.embed(curve.Fq(2)))


def test_group_law_matches_chord_tangent(curve):
    mu = curve.mu()
    for v, w in product(mu, mu):
        assert curve.geometric_add(curve.param_to_point(v), curve.param_to_point(w)) == \
            curve.param_to_point(curve.group_add(v, w))


def test_collinearity_rule_matches_determinant(curve):
    """Three distinct affine points of G are collinear iff their parameters multiply to 1."""
    q = curve.q
    mu = curve.mu()[1:]
    pts = {v.value: curve.param_to_point(v) for v in mu}
    xy = lambda v: (pts[v.value].x.value, pts[v.value].y.value)
    for i, u in enumerate(mu):
        for v in mu[i + 1:]:
            for w in mu:
                if w in (u, v):
                    continue
                assert (det3(q, xy(u), xy(v), xy(w)) == 0) == collinear_params(u, v, w)


def test_cosets_partition_group(curve):
    for m in (d for d in range(2, curve.q + 1) if (curve.q + 1) % d == 0):
        seen = []
        for i in range(m):
            seen += [v.value for v in curve.coset_by_label(i, m)]
        assert sorted(seen) == sorted(v.value for v in curve.mu())


def test_coset_parametrisations_agree():
    curve = NodalCubic(GF.prime_power(19))
    for j in range(1, 20):
        if j % 5 == 0:
            with pytest.raises(NotACosetRep):
                curve.coset_points(CosetSpec(5, curve.g ** j))
            continue
        pts = curve.coset_points(CosetSpec(5, curve.g ** j))
        assert len(pts) == 4 and all(P.is_affine for P in pts)


def test_bad_index_rejected():
    curve = NodalCubic(GF.prime_power(19))
    with pytest.raises(InvalidParameters):
        curve.subgroup_params(3)


def test_rejects_small_characteristic():
    with pytest.raises(InvalidParameters):
        NodalCubic(GF.prime_power(3))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 139), st.integers(0, 139), st.integers(0, 139))
def test_group_law_associative_and_closed_q139(i, j, k):
    curve = _c139()
    u, v, w = (curve.g ** e for e in (i, j, k))
    P = lambda x: curve.param_to_point(x)
    left = curve.geometric_add(curve.geometric_add(P(u), P(v)), P(w))
    right = curve.geometric_add(P(u), curve.geometric_add(P(v), P(w)))
    assert left == right == P(u * v * w)


_C139 = []


def _c139():
    if not _C139:
        _C139.append(NodalCubic(GF.prime_power(139)))
    return _C139[0]


def test_extension_field_curve():
    curve = NodalCubic(GF.prime_power(5, 2))
    assert len(curve.affine_points()) == 25
    for P in curve.affine_points():
        assert curve.on_curve(P.x, P.y)
