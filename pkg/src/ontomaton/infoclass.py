"""Information classes of irreversible automata and their invertible quotient dynamics.

Two states belong to the same information class when some forward iterate
sends them to the same state. The induced dynamics on classes is a
bijection, so it can be lifted to a permutation unitary even when the
underlying rule loses information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .automaton import StateSpace, UpdateRule, _check_time, cycle_decomposition, evolve_all
from .errors import ConsistencyError
from .hilbert import PermutationUnitary, lift_to_unitary


@dataclass(frozen=True, eq=False)
class InfoClassPartition:
    class_of: np.ndarray
    representatives: np.ndarray
    merge_time_bound: int

    @property
    def num_classes(self) -> int:
        return int(self.representatives.shape[0])

    def members(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.num_classes)]
        for s, c in enumerate(self.class_of.tolist()):
            groups[c].append(s)
        return groups

    def __eq__(self, other):
        if not isinstance(other, InfoClassPartition):
            return NotImplemented
        return np.array_equal(self.class_of, other.class_of)

    def __hash__(self):
        return hash(self.class_of.tobytes())


def _partition_from_keys(keys: np.ndarray, merge_time_bound: int) -> InfoClassPartition:
    # Classes numbered by their minimal member, which is the first
    # occurrence of each key when scanning states in index order.
    _, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.shape[0])
    class_of = rank[inverse.reshape(-1)].astype(np.int64)
    reps = first[order].astype(np.int64)
    class_of.setflags(write=False)
    reps.setflags(write=False)
    return InfoClassPartition(class_of, reps, merge_time_bound)


def compute_info_classes(rule: UpdateRule) -> InfoClassPartition:
    """Partition the states into information classes.

    The partition "same state after t ticks" coarsens as ``t`` grows and
    stops changing once every state has reached its cycle, i.e. at the
    deepest transient depth. Iterates at that depth are the class keys; the
    depth is reported as ``merge_time_bound``.
    """
    transients = cycle_decomposition(rule).transients
    depth = max((d for _, d in transients.values()), default=0)
    return _partition_from_keys(evolve_all(rule, depth), depth)


def quotient_dynamics(rule: UpdateRule, part: InfoClassPartition) -> UpdateRule:
    """The rule induced on classes: class ``C`` goes to the class of ``rule(rep(C))``."""
    cls = np.asarray(part.class_of)
    if cls.shape != (rule.size,):
        raise ConsistencyError(f"partition covers {cls.shape[0]} states, rule has {rule.size}")
    expected = compute_info_classes(rule)
    if not np.array_equal(cls, expected.class_of):
        bad = int(np.flatnonzero(cls != expected.class_of)[0])
        raise ConsistencyError(f"partition was not derived from this rule (first mismatch at state {bad})")
    succ = cls[rule.map]
    image = succ[part.representatives]
    if not np.array_equal(succ, image[cls]):
        bad = int(np.flatnonzero(succ != image[cls])[0])
        raise ConsistencyError(f"class dynamics not well defined at state {bad}")
    q = UpdateRule(StateSpace(part.num_classes), image)
    if np.unique(image).shape[0] != part.num_classes:
        raise ConsistencyError("quotient dynamics is not a bijection on classes")
    return q


def class_unitary(rule: UpdateRule) -> PermutationUnitary:
    part = compute_info_classes(rule)
    return lift_to_unitary(quotient_dynamics(rule, part))


def entropy_profile(rule: UpdateRule, t_max: int) -> list[float]:
    """``log2`` of the image size after ``t`` ticks, for ``t = 0..t_max``."""
    t_max = _check_time(t_max)
    current = np.arange(rule.size, dtype=np.int64)
    out = []
    for t in range(t_max + 1):
        if t:
            current = np.unique(rule.map[current])
        out.append(math.log2(current.shape[0]))
    return out


def partition_to_dict(part: InfoClassPartition) -> dict:
    return {
        "num_classes": part.num_classes,
        "merge_time_bound": part.merge_time_bound,
        "classes": {str(c): members for c, members in enumerate(part.members())},
    }
