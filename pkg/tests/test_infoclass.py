import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ontomaton import (
    ConsistencyError,
    UpdateRule,
    class_unitary,
    compute_info_classes,
    entropy_profile,
    evolve,
    is_invertible,
    quotient_dynamics,
)
from ontomaton.automaton import cycle_decomposition
from ontomaton.infoclass import InfoClassPartition, partition_to_dict

from oracles import pairwise_classes

FUNNEL = UpdateRule.from_map([1, 2, 1, 2])

small_rules = st.integers(1, 12).flatmap(
    lambda n: st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(UpdateRule.from_map)
)


def as_sets(part):
    return [frozenset(m) for m in part.members()]


def test_examples():
    inv = compute_info_classes(UpdateRule.from_map([2, 0, 1]))
    assert inv.num_classes == 3 and inv.merge_time_bound == 0
    const = compute_info_classes(UpdateRule.from_map([0] * 5))
    assert const.num_classes == 1 and const.merge_time_bound == 1
    part = compute_info_classes(FUNNEL)
    assert as_sets(part) == pairwise_classes([1, 2, 1, 2]) == [frozenset({0, 2}), frozenset({1, 3})]
    assert part.class_of.tolist() == [0, 1, 0, 1]
    assert part.representatives.tolist() == [0, 1]


@settings(max_examples=200, deadline=None)
@given(small_rules)
def test_matches_pairwise_oracle(rule):
    part = compute_info_classes(rule)
    assert as_sets(part) == pairwise_classes(rule.map.tolist())
    # ids contiguous and ordered by minimal member
    assert part.representatives.tolist() == sorted(part.representatives.tolist())
    assert sorted(set(part.class_of.tolist())) == list(range(part.num_classes))
    for c, members in enumerate(part.members()):
        assert part.representatives[c] == min(members)
    assert part.merge_time_bound <= rule.size
    # merging happens within the bound
    T = part.merge_time_bound
    for x in range(rule.size):
        for y in range(rule.size):
            same = evolve(rule, x, T) == evolve(rule, y, T)
            assert same == (part.class_of[x] == part.class_of[y])


@settings(max_examples=200, deadline=None)
@given(small_rules)
def test_quotient_is_well_defined_bijection(rule):
    part = compute_info_classes(rule)
    q = quotient_dynamics(rule, part)
    assert is_invertible(q)
    cls = part.class_of
    for x in range(rule.size):
        assert q.map[cls[x]] == cls[rule.map[x]]
    U = class_unitary(rule)
    assert U.dimension == len(pairwise_classes(rule.map.tolist()))


def test_quotient_examples():
    const = UpdateRule.from_map([2, 2, 2])
    assert quotient_dynamics(const, compute_info_classes(const)).map.tolist() == [0]
    perm = UpdateRule.from_map([3, 0, 1, 2])
    assert quotient_dynamics(perm, compute_info_classes(perm)) == perm
    q = quotient_dynamics(FUNNEL, compute_info_classes(FUNNEL))
    assert q.map.tolist() == [1, 0]


def test_quotient_rejects_foreign_partition():
    other = compute_info_classes(UpdateRule.from_map([0, 0, 0, 0]))
    with pytest.raises(ConsistencyError):
        quotient_dynamics(FUNNEL, other)
    short = compute_info_classes(UpdateRule.from_map([0, 0]))
    with pytest.raises(ConsistencyError):
        quotient_dynamics(FUNNEL, short)


def test_class_unitary_examples():
    np.testing.assert_array_equal(class_unitary(UpdateRule.from_map([0, 0, 0])).matrix(), [[1]])
    np.testing.assert_array_equal(class_unitary(FUNNEL).matrix(), [[0, 1], [1, 0]])
    rng = np.random.default_rng(12)
    succ = rng.integers(0, 12, size=12)
    while is_invertible(UpdateRule.from_map(succ)):
        succ = rng.integers(0, 12, size=12)
    assert class_unitary(UpdateRule.from_map(succ)).dimension == len(pairwise_classes(succ.tolist()))


def test_entropy_examples():
    perm = UpdateRule.from_map([1, 2, 3, 4, 5, 6, 7, 0])
    assert entropy_profile(perm, 5) == [3.0] * 6
    assert entropy_profile(UpdateRule.from_map([4] * 8), 3) == [3.0, 0.0, 0.0, 0.0]
    assert entropy_profile(FUNNEL, 3) == [2.0, 1.0, 1.0, 1.0]
    assert entropy_profile(FUNNEL, 0) == [2.0]


@settings(max_examples=100, deadline=None)
@given(small_rules)
def test_entropy_monotone_with_recurrent_limit(rule):
    prof = entropy_profile(rule, rule.size + 1)
    assert all(b <= a for a, b in zip(prof, prof[1:]))
    recurrent = sum(len(c) for c in cycle_decomposition(rule).cycles)
    assert prof[-1] == math.log2(recurrent)
    constant = len(set(prof)) == 1
    assert constant == is_invertible(rule)


def test_exhaustive_four_state_rules():
    for succ in product(range(4), repeat=4):
        rule = UpdateRule.from_map(succ)
        assert as_sets(compute_info_classes(rule)) == pairwise_classes(list(succ))


def test_larger_rule_runs_fast():
    rng = np.random.default_rng(0)
    rule = UpdateRule.from_map(rng.integers(0, 200_000, size=200_000))
    part = compute_info_classes(rule)
    q = quotient_dynamics(rule, part)
    assert is_invertible(q)
    recurrent = sum(len(c) for c in cycle_decomposition(rule).cycles)
    assert part.num_classes == recurrent


def test_partition_export():
    d = partition_to_dict(compute_info_classes(FUNNEL))
    assert d["classes"] == {"0": [0, 2], "1": [1, 3]}
    assert isinstance(compute_info_classes(FUNNEL), InfoClassPartition)
