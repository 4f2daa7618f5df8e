"""Multiset partitions and the chain-rule sums built from them."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from folijet.partitions import enumerate_partitions, fdb_p, fdb_p_hat, fdb_p_tilde

# Bell numbers B_1..B_10
BELL = [1, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975]


def brute_force_multisets(k):
    """All (r_1..r_k) with sum s*r_s = k by direct nested enumeration."""
    ranges = [range(k // s + 1) for s in range(1, k + 1)]
    return {tuple(r) for r in itertools.product(*ranges)
            if sum(s * rs for s, rs in enumerate(r, start=1)) == k}


def test_k1_single_partition():
    parts = enumerate_partitions(1)
    assert len(parts) == 1
    assert parts[0].multiplicities == (1,)
    assert parts[0].r == 1
    assert parts[0].weight == 1


def test_k2_by_hand():
    parts = {p.multiplicities: p for p in enumerate_partitions(2)}
    assert set(parts) == {(2, 0), (0, 1)}
    assert parts[(2, 0)].weight == 1 and parts[(2, 0)].r == 2
    assert parts[(0, 1)].weight == 1 and parts[(0, 1)].r == 1


def test_k4_matches_brute_force_enumeration():
    parts = enumerate_partitions(4)
    assert len(parts) == 5
    assert {p.multiplicities for p in parts} == brute_force_multisets(4)


@pytest.mark.parametrize("k", range(1, 13))
def test_multisets_complete_and_unique(k):
    parts = enumerate_partitions(k)
    seen = {p.multiplicities for p in parts}
    assert len(seen) == len(parts)
    assert seen == brute_force_multisets(k)
    for p in parts:
        assert sum(s * rs for s, rs in enumerate(p.multiplicities, start=1)) == k
        assert p.r == sum(p.multiplicities)
        assert isinstance(p.weight, int) and p.weight > 0
        assert isinstance(p.multinomial, int) and p.multinomial > 0


@pytest.mark.parametrize("k", range(1, 11))
def test_unit_inputs_give_bell_numbers(k):
    assert sum(p.weight for p in enumerate_partitions(k)) == BELL[k - 1]
    assert fdb_p(k, [1] * k, [1] * k) == BELL[k - 1]


def test_rejects_k_zero():
    with pytest.raises(ValueError):
        enumerate_partitions(0)


def test_top_reduced_sums_vanish_at_order_one():
    assert fdb_p_tilde(1, [3.0], [2.0]) == 0
    assert fdb_p_hat(1, [3.0], [2.0]) == 0


def test_order_two_closed_form():
    w = [2.0 + 1j, -0.5j]
    z = [1.5, 0.25 - 2j]
    assert fdb_p(2, w, z) == pytest.approx(w[0] * z[1] + w[1] * z[0] ** 2)


def test_fdb_p3_units_is_five():
    assert fdb_p(3, [1, 1, 1], [1, 1, 1]) == 5


@settings(max_examples=40, deadline=None)
@given(k=st.integers(min_value=1, max_value=9), data=st.data())
def test_top_term_splittings_are_exact_ring_identities(k, data):
    ints = st.integers(min_value=-4, max_value=4)
    w = [data.draw(ints) for _ in range(k)]
    z = [data.draw(ints) for _ in range(k)]
    full = fdb_p(k, w, z)
    assert fdb_p_tilde(k, w, z) + w[0] * z[k - 1] == full
    assert fdb_p_hat(k, w, z) + w[k - 1] * z[0] ** k == full


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        fdb_p(3, [1, 1], [1, 1, 1])
