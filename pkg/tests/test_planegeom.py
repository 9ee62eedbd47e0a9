from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from nodal_arcs.errors import InvalidParameters, NotAnArc
from nodal_arcs.gfield import GF
from nodal_arcs.planegeom import (SegmentPosition, bicover_classify, center_point,
                                  collinear3, curve_affine_points, exceptional_set, is_arc,
                                  minus_three_is_nonsquare, point_class, segment_position,
                                  verify_fuori)
from oracles import (chord_class, collinear, cubic_points, first_collinear_triple,
                     least_nonsquare, point_kinds)

F13, F19 = GF.prime_power(13), GF.prime_power(19)


def pts_strategy(q, max_size):
    return st.lists(st.tuples(st.integers(0, q - 1), st.integers(0, q - 1)),
                    unique=True, max_size=max_size)


@settings(max_examples=200, deadline=None)
@given(pts_strategy(13, 9))
def test_is_arc_matches_triple_oracle(S):
    ok, w = is_arc(F13, S)
    assert ok == (first_collinear_triple(13, S) is None)
    if not ok:
        assert collinear(13, *w)


@settings(max_examples=100, deadline=None)
@given(pts_strategy(19, 12), st.integers(1, 3))
def test_is_arc_thread_independent(S, threads):
    assert is_arc(F19, S, threads) == is_arc(F19, S, 1)


def greedy_arc(q: int, seed: int, size: int) -> list[tuple[int, int]]:
    import random
    rng = random.Random(seed)
    S: list[tuple[int, int]] = []
    while len(S) < size:
        P = (rng.randrange(q), rng.randrange(q))
        if P not in S and first_collinear_triple(q, S + [P]) is None:
            S.append(P)
    return S


def test_curve_is_not_an_arc_but_its_cosets_are():
    from nodal_arcs.cubicgroup import NodalCubic
    curve = NodalCubic(F19)
    pts = curve_affine_points(F19, 2)
    ok, w = is_arc(F19, pts)
    assert not ok and collinear(19, *w)
    for i in range(5):
        coset = [curve.param_to_point(v) for v in curve.coset_by_label(i, 5)]
        coset = [(P.x.value, P.y.value) for P in coset if P.is_affine]
        assert is_arc(F19, coset)[0]


def test_is_arc_on_extension_field():
    from nodal_arcs.cubicgroup import NodalCubic
    F = GF.prime_power(5, 2)
    curve = NodalCubic(F)
    coset = [curve.param_to_point(v) for v in curve.coset_by_label(1, 13)]
    assert is_arc(F, [(P.x.value, P.y.value) for P in coset])[0]
    assert not is_arc(F, [(0, 0), (1, 1), (2, 2)])[0]


def _ns(F):
    from nodal_arcs.gfield import find_nonsquare
    return find_nonsquare(F).value


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.integers(0, 18)] * 6), st.integers(0, 18))
def test_segment_position_matches_oracle(coords, t):
    P1, P2 = coords[:2], coords[2:4]
    if P1 == P2:
        with pytest.raises(InvalidParameters):
            segment_position(F19, (0, 0), P1, P2)
        return
    X = tuple((a + t * (b - a)) % 19 for a, b in zip(P1, P2))
    pos = segment_position(F19, X, P1, P2)
    if X in (P1, P2):
        assert pos is SegmentPosition.ON_ENDPOINT
    else:
        assert pos.value == chord_class(19, X, P1, P2)
    off = coords[4:6]
    if not collinear(19, off, P1, P2):
        assert segment_position(F19, off, P1, P2) is SegmentPosition.NOT_COLLINEAR


def test_collinear3():
    assert collinear3(F19, (0, 0), (1, 1), (5, 5))
    assert not collinear3(F19, (0, 0), (1, 1), (5, 6))


@pytest.mark.parametrize("q", [13, 19])
def test_curve_points_match_search(q):
    F = GF.prime_power(q)
    pts = curve_affine_points(F, least_nonsquare(q))
    assert sorted(pts) == sorted(cubic_points(q, least_nonsquare(q)))


@pytest.mark.parametrize("q", [7, 11, 13])
def test_bicover_exhaustive_matches_oracle(q):
    F = GF.prime_power(q)
    S = sorted(greedy_arc(q, q, q // 2 + 1))
    rep = bicover_classify(F, S)
    expect = {"uncovered": [], "external_only": [], "internal_only": []}
    bico = 0
    for x in range(q):
        for y in range(q):
            if (x, y) in S:
                continue
            k = point_kinds(q, S, (x, y))
            if k == {"external", "internal"}:
                bico += 1
            elif k == {"external"}:
                expect["external_only"].append((x, y))
            elif k == {"internal"}:
                expect["internal_only"].append((x, y))
            else:
                expect["uncovered"].append((x, y))
    assert rep.uncovered == expect["uncovered"]
    assert rep.external_only == expect["external_only"]
    assert rep.internal_only == expect["internal_only"]
    assert rep.bicovered_count == bico
    assert rep.points_checked == q * q - len(S)
    for P in expect["external_only"][:5]:
        assert point_class(F, S, P) == "external_only"


def test_bicover_sample_mode_and_threads():
    S = greedy_arc(19, 1, 10)
    a = bicover_classify(F19, S, "sample", 500, 3, threads=1)
    b = bicover_classify(F19, S, "sample", 500, 3, threads=3)
    assert a.to_json() == b.to_json()
    assert a.complete is None and a.is_bicovering is None
    with pytest.raises(InvalidParameters):
        bicover_classify(F19, S, "bogus")


def test_bicover_rejects_non_arc():
    with pytest.raises(NotAnArc):
        bicover_classify(F19, [(0, 0), (1, 1), (2, 2)])


@pytest.mark.parametrize("p,s,size", [(5, 1, 3), (11, 1, 3), (17, 1, 3), (13, 1, 1),
                                      (19, 1, 1), (5, 2, 1), (5, 3, 3)])
def test_exceptional_set_size(p, s, size):
    F = GF.prime_power(p, s)
    E = exceptional_set(F, _ns(F))
    assert len(E) == size
    assert minus_three_is_nonsquare(F) == (size == 3)


@pytest.mark.parametrize("q", [5, 11, 13, 17, 19, 23])
def test_exceptional_points_never_on_a_secant_of_the_curve(q):
    F = GF.prime_power(q)
    n = least_nonsquare(q)
    assert verify_fuori(F, n)
    C = cubic_points(q, n)
    for E in exceptional_set(F, n):
        assert E not in C
        assert not point_kinds(q, C, E)


def test_exceptional_first_point_value():
    # (0, -9/(8 n)) at q = 19, n = 2
    assert exceptional_set(F19, 2)[0] == (0, (-9 * pow(16, -1, 19)) % 19)
    assert center_point(F19, 2) == (0, (-pow(2, -1, 19)) % 19)
