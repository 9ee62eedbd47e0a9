from __future__ import annotations

from itertools import combinations_with_replacement

import pytest
from hypothesis import given, settings, strategies as st

from nodal_arcs.errors import InvalidParameters, NotFound, OrderTooSmall
from nodal_arcs.indepsets import (FiniteAbelianGroup, build_mazzi3i, build_product_3indep,
                                  crt_to_cyclic, cyclic_to_crt, is_maximal_3indep,
                                  two_coset_set, smallest_maximal_3indep)


def oracle(M: set, orders: tuple) -> tuple[bool, bool]:
    """Direct definition: no x+y+z = 0 in M; every outside y has y + a + b = 0 for
    some a, b in M (good: with a != b)."""
    add = lambda *xs: tuple(sum(c) % n for c, n in zip(zip(*xs), orders))
    zero = tuple(0 for _ in orders)
    for x, y, z in combinations_with_replacement(sorted(M), 3):
        if add(x, y, z) == zero:
            return False, False
    from itertools import product
    good = True
    for y in product(*(range(n) for n in orders)):
        if y in M:
            continue
        pairs = [(a, b) for a, b in combinations_with_replacement(sorted(M), 2)
                 if add(y, a, b) == zero]
        if not pairs:
            return False, False
        good &= any(a != b for a, b in pairs)
    return True, good


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([(7,), (11,), (5, 7), (13,)]), st.data())
def test_is_maximal_3indep_matches_oracle(orders, data):
    G = FiniteAbelianGroup(orders)
    elems = G.elements()
    M = set(data.draw(st.lists(st.sampled_from(elems), max_size=len(elems) // 2)))
    assert is_maximal_3indep(M, G) == oracle(M, orders)


@pytest.mark.parametrize("n,m", [(4, 5), (5, 7), (7, 5), (5, 11), (7, 11)])
def test_two_coset_set_is_good_maximal(n, m):
    S = build_mazzi3i(n, m)
    assert len(S.members) == n + m - 3  # the two pieces share one element
    assert oracle(set(S.members), (n, m)) == (True, True)


def test_literal_and_corrected_agree_when_4R_is_zero():
    assert two_coset_set(4, 5, 1, 1, "literal") == two_coset_set(4, 5, 1, 1, "corrected")
    assert two_coset_set(5, 7, 1, 1, "literal") != two_coset_set(5, 7, 1, 1, "corrected")


@pytest.mark.parametrize("m1,m2", [(5, 7), (7, 5), (5, 11)])
def test_product_set_size_and_certificate(m1, m2):
    S = build_product_3indep(m1, m2)
    assert len(S.members) == m1 + m2 - 3
    assert oracle(set(S.members), (m1, m2)) == (True, True)


def test_product_set_avoids_forbidden():
    S = build_product_3indep(5, 7, forbidden={(1, 1), (2, 3)})
    assert not S.members & {(1, 1), (2, 3)}


def test_product_rejects_small_or_non_coprime():
    with pytest.raises(OrderTooSmall):
        build_product_3indep(3, 7)
    with pytest.raises(InvalidParameters):
        build_product_3indep(5, 10)


def test_crt_round_trip():
    for k in range(35):
        assert crt_to_cyclic(cyclic_to_crt(k, 5, 7), 5, 7) == k
    # additive isomorphism
    for j in range(35):
        a = cyclic_to_crt(j, 5, 7)
        b = cyclic_to_crt(3, 5, 7)
        assert cyclic_to_crt((j + 3) % 35, 5, 7) == ((a[0] + b[0]) % 5, (a[1] + b[1]) % 7)


def test_no_maximal_set_in_z7():
    # brute force over all subsets agrees
    from itertools import combinations
    assert not any(oracle({(x,) for x in c}, (7,))[0]
                   for k in range(1, 7) for c in combinations(range(7), k))
    with pytest.raises(NotFound):
        smallest_maximal_3indep(FiniteAbelianGroup((7,)))


@pytest.mark.parametrize("m", [5, 11, 13])
def test_smallest_maximal_in_cyclic(m):
    S = smallest_maximal_3indep(FiniteAbelianGroup((m,)))
    assert oracle(set(S.members), (m,))[0]
    # nothing smaller is maximal
    from itertools import combinations
    G = FiniteAbelianGroup((m,))
    for k in range(1, len(S.members)):
        assert not any(oracle(set(c), (m,))[0] for c in combinations(G.elements(), k))
