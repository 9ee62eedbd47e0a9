from __future__ import annotations

from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from nodal_arcs.auxcurves import (BivarPoly, CosetScanner, CurveParams, GenusBounds,
                                  build_M, build_M_closed, build_M_substitution, build_g,
                                  build_hl, check_degenerate, check_identities,
                                  count_points_M, hw_window, secant_witnesses, seeded_ab,
                                  witness_summary)
from nodal_arcs.cubicgroup import NodalCubic
from nodal_arcs.errors import InvalidParameters
from nodal_arcs.gfield import GF
from oracles import chord_class, collinear

C19 = NodalCubic(GF.prime_power(19))


def coset_xy(curve, m, tbar):
    pts = [curve.param_to_point(tbar * k) for k in curve.subgroup_params(m)]
    return [(P.x.value, P.y.value) for P in pts]


def oracle_witnesses(curve, m, tbar, P):
    """Secants of the whole coset K_T through P, with P's position."""
    q = curve.q
    out = {}
    for A, B in combinations(coset_xy(curve, m, tbar), 2):
        if collinear(q, P, A, B):
            out[tuple(sorted((A, B)))] = chord_class(q, P, A, B)
    return out


@pytest.mark.parametrize("q,m", [(19, 5), (29, 5), (41, 7)])
def test_witnesses_equal_geometric_secants_full_sweep(q, m):
    curve = C19 if q == 19 else NodalCubic(GF.prime_power(q))
    tbar = curve.default_tbar(m)
    sc = CosetScanner(curve, m, tbar)
    for a in range(q):
        for b in range(q):
            cp = CurveParams(curve, a, b, m, tbar)
            if check_degenerate(cp):
                continue
            got = {tuple(sorted((w.P1, w.P2))): w.position.value
                   for w in secant_witnesses(cp, sc)}
            assert got == oracle_witnesses(curve, m, tbar, (a, b))


def test_degenerate_conditions():
    n = C19.beta_sq.value
    for a in range(19):
        b = pow((a * a - n) % 19, -1, 19)
        assert check_degenerate(CurveParams(C19, a, b, 5)) == ["on_curve", "AB=(A-1)^3"]
    E0 = (0, (-9 * pow(8 * n, -1, 19)) % 19)
    assert check_degenerate(CurveParams(C19, *E0, 5)) == ["A^3=-1 and B=1-(A-1)^3",
                                                          "exceptional"]
    assert check_degenerate(CurveParams(C19, 3, 4, 5)) == []
    with pytest.raises(InvalidParameters):
        CurveParams(C19, 0, pow(19 - n, -1, 19), 5).require_off_curve()


@pytest.mark.parametrize("q,m", [(19, 5), (29, 5), (41, 7)])
def test_M_dual_routes_agree_and_rational(q, m):
    curve = C19 if q == 19 else NodalCubic(GF.prime_power(q))
    for a, b in seeded_ab(curve, m, 5, 1):
        cp = CurveParams(curve, a, b, m)
        assert build_M_substitution(cp) == build_M_closed(cp)
        M = build_M(cp)
        assert M.in_base() and M.degrees() == (2 * m, 2 * m) and M.is_symmetric()


def test_M_zeros_match_scanner():
    cp = CurveParams(C19, 1, 2, 5)
    M = build_M(cp)
    sc = CosetScanner(C19, 5)
    F = C19.Fq
    direct = sorted((r, v) for r in range(19) for v in range(19)
                    if M(F(r), F(v)).value == 0)
    assert direct == sorted(map(tuple, sc.zeros(cp).tolist()))


def test_build_g_symmetric():
    g = build_g(C19, 3, 4)
    assert g.is_symmetric() and g.degrees() == (2, 2)


def test_hl_rational_and_u_bijective():
    hl = build_hl(C19, C19.default_tbar(5), 5)
    F = C19.Fq
    us = {hl.u(F(z)).value for z in range(19)}
    assert us <= {x for x, _ in coset_xy(C19, 5, C19.default_tbar(5))}


@pytest.mark.parametrize("p,s,m", [(19, 1, 5), (29, 1, 5), (5, 3, 7), (139, 1, 35)])
def test_identities_pass(p, s, m):
    curve = C19 if p == 19 else NodalCubic(GF.prime_power(p, s))
    rep = check_identities(curve, m, trials=100, seed=0, ab_trials=5)
    assert rep["all_passed"], rep
    assert rep["coset_param_checked"] == 100 and rep["coset_param_failed"] == 0


def test_hw_window_values():
    w = hw_window(19, 5)
    assert (w["genus_bound"], w["slack"], w["vacuous"]) == (61, 40, True)
    assert (w["lo"], w["hi"]) == (20 - 40 - 531, 20 + 40 + 531)  # isqrt(4*61^2*19) = 531
    big = hw_window(10 ** 9 + 7, 5)
    assert not big["vacuous"] and big["lo"] < 10 ** 9 < big["hi"]
    assert GenusBounds.for_m(5).g_plane == 61


def test_count_points_q19():
    cp = CurveParams(C19, 3, 4, 5)
    rep = count_points_M(cp)
    assert rep["count"] == 0 and rep["window"] == "vacuous"
    assert rep["window_detail"]["contains_count"]


def test_witness_summary_counts():
    cp = CurveParams(C19, 1, 1, 5)
    ws = secant_witnesses(cp)
    s = witness_summary(ws)
    assert s["witnesses"] == len(ws) == s["external"] + s["internal"]


@settings(max_examples=40, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(1, 18),
                       min_size=1, max_size=6))
def test_bivar_normalized_is_monic_scaling(coeffs):
    F = C19.Fq
    P = BivarPoly(F, {k: F(v) for k, v in coeffs.items()})
    N = P.normalized()
    assert N[max(coeffs)] == F.one
    assert N.scaled(P.leading()) == P
