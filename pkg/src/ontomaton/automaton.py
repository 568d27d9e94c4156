"""Finite deterministic automata: state spaces, update maps and their classical dynamics.

States are dense integer indices ``0..size-1``. Labels are carried along as
metadata only. Rules are immutable; the successor table is stored as a
read-only ``int64`` array so that it can be shared freely.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import InputError, RuleFileError

#: Intended desk-scale envelope for classical operations. Not enforced.
DESK_SCALE_STATES = 10**6


@dataclass(frozen=True)
class StateSpace:
    size: int
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, (int, np.integer)):
            raise InputError(f"size must be an integer, got {self.size!r}")
        if self.size < 1:
            raise InputError(f"size must be >= 1, got {self.size}")
        object.__setattr__(self, "size", int(self.size))
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.size:
                raise InputError(f"expected {self.size} labels, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise InputError("labels must be unique")
            object.__setattr__(self, "labels", labels)

    def check(self, s) -> int:
        if isinstance(s, bool) or not isinstance(s, (int, np.integer)):
            raise InputError(f"state index must be an integer, got {s!r}")
        if not 0 <= s < self.size:
            raise InputError(f"state {s} out of range for a space of {self.size} states")
        return int(s)


@dataclass(frozen=True, eq=False)
class UpdateRule:
    """A total successor map on a :class:`StateSpace`; ``map[i]`` is the successor of ``i``."""

    space: StateSpace
    map: np.ndarray

    def __post_init__(self):
        m = np.array(self.map, dtype=np.int64, copy=True).reshape(-1)
        if m.shape[0] != self.space.size:
            raise InputError(f"map has {m.shape[0]} entries for a space of {self.space.size} states")
        bad = np.flatnonzero((m < 0) | (m >= self.space.size))
        if bad.size:
            i = int(bad[0])
            raise InputError(f"map[{i}] = {int(m[i])} is not a valid state index")
        m.setflags(write=False)
        object.__setattr__(self, "map", m)

    @classmethod
    def from_map(cls, successors: Sequence[int], labels: Optional[Sequence[str]] = None) -> "UpdateRule":
        return cls(StateSpace(len(successors), None if labels is None else tuple(labels)), np.asarray(successors))

    @classmethod
    def identity(cls, n: int) -> "UpdateRule":
        return cls(StateSpace(n), np.arange(n))

    @classmethod
    def cyclic_shift(cls, n: int) -> "UpdateRule":
        return cls(StateSpace(n), (np.arange(n) + 1) % n)

    @property
    def size(self) -> int:
        return self.space.size

    def __eq__(self, other):
        if not isinstance(other, UpdateRule):
            return NotImplemented
        return self.space == other.space and np.array_equal(self.map, other.map)

    def __hash__(self):
        return hash((self.space, self.map.tobytes()))

    def __repr__(self):
        return f"UpdateRule(size={self.size}, map={self.map.tolist()!r})"


@dataclass(frozen=True)
class Trajectory:
    start: int
    steps: tuple[int, ...]
    eventual_period: int
    transient_length: int = 0


@dataclass(frozen=True)
class CycleDecomposition:
    """Cycles of a functional graph plus, for every non-cyclic state, where it drains.

    ``cycles`` are ordered by their minimal state, each starting at that state
    and listed in the order the rule visits them. ``transients`` maps a state
    to ``(cycle_index, distance)``: the cycle it eventually enters and the
    number of steps until it first lands on a cyclic state.
    """

    cycles: tuple[tuple[int, ...], ...]
    transients: dict = field(default_factory=dict)

    @property
    def cycle_lengths(self) -> list[int]:
        return [len(c) for c in self.cycles]


def step(rule: UpdateRule, s: int) -> int:
    return int(rule.map[rule.space.check(s)])


def evolve(rule: UpdateRule, s: int, t: int) -> int:
    """State reached from ``s`` after ``t`` ticks.

    Large ``t`` is handled by detecting the eventual cycle and reducing
    modulo its period, so the cost is bounded by the trajectory length.
    """
    s = rule.space.check(s)
    t = _check_time(t)
    seen: dict[int, int] = {}
    path: list[int] = []
    cur = s
    for k in range(t):
        if cur in seen:
            mu = seen[cur]
            period = k - mu
            return path[mu + (t - mu) % period]
        seen[cur] = k
        path.append(cur)
        cur = int(rule.map[cur])
    return cur


def evolve_all(rule: UpdateRule, t: int) -> np.ndarray:
    """The map ``s -> evolve(rule, s, t)`` for every state at once, by repeated squaring."""
    t = _check_time(t)
    result = np.arange(rule.size, dtype=np.int64)
    power = rule.map
    while t:
        if t & 1:
            result = power[result]
        t >>= 1
        if t:
            power = power[power]
    return result


def trajectory(rule: UpdateRule, s: int) -> Trajectory:
    """Follow ``s`` until the first repeated state.

    ``steps`` lists the distinct states visited, starting with ``s``; the
    next state would be the first repeat.
    """
    s = rule.space.check(s)
    seen: dict[int, int] = {}
    steps: list[int] = []
    cur = s
    while cur not in seen:
        seen[cur] = len(steps)
        steps.append(cur)
        cur = int(rule.map[cur])
    mu = seen[cur]
    return Trajectory(start=s, steps=tuple(steps), eventual_period=len(steps) - mu, transient_length=mu)


def cycle_decomposition(rule: UpdateRule) -> CycleDecomposition:
    # Linear-time colouring of the functional graph: 0 unvisited, 1 on the
    # current walk, 2 finished.
    n = rule.size
    succ = rule.map
    colour = np.zeros(n, dtype=np.int8)
    cycle_of = np.full(n, -1, dtype=np.int64)
    found: list[list[int]] = []
    for root in range(n):
        if colour[root]:
            continue
        walk = []
        cur = root
        while colour[cur] == 0:
            colour[cur] = 1
            walk.append(cur)
            cur = int(succ[cur])
        if colour[cur] == 1:
            start = walk.index(cur)
            cyc = walk[start:]
            for x in cyc:
                cycle_of[x] = len(found)
            found.append(cyc)
        for x in walk:
            colour[x] = 2

    # Canonical order: by minimal member, each rotated to start there.
    order = sorted(range(len(found)), key=lambda i: min(found[i]))
    relabel = {old: new for new, old in enumerate(order)}
    cycles = []
    for old in order:
        c = found[old]
        k = c.index(min(c))
        cycles.append(tuple(c[k:] + c[:k]))
    on_cycle = cycle_of >= 0
    cycle_of[on_cycle] = [relabel[int(i)] for i in cycle_of[on_cycle]]

    transients: dict[int, tuple[int, int]] = {}
    depth = np.where(on_cycle, 0, -1)
    for s in range(n):
        if depth[s] >= 0:
            continue
        walk = []
        cur = s
        while depth[cur] < 0:
            walk.append(cur)
            cur = int(succ[cur])
        d = int(depth[cur])
        target = int(cycle_of[cur]) if on_cycle[cur] else transients[cur][0]
        for x in reversed(walk):
            d += 1
            depth[x] = d
            transients[x] = (target, d)
    return CycleDecomposition(cycles=tuple(cycles), transients=dict(sorted(transients.items())))


def is_invertible(rule: UpdateRule) -> bool:
    counts = np.bincount(rule.map, minlength=rule.size)
    return bool(np.all(counts == 1))


def _check_time(t) -> int:
    if isinstance(t, bool) or not isinstance(t, (int, np.integer)):
        raise InputError(f"time must be an integer, got {t!r}")
    if t < 0:
        raise InputError(f"time must be non-negative, got {t}")
    return int(t)


# -- rule files ---------------------------------------------------------------

_RULE_KEYS = {"size", "labels", "map"}


def parse_rule(text: str, source: str = "<rule>") -> UpdateRule:
    """Parse a JSON rule document with fields ``size``, ``map`` and optional ``labels``.

    Errors name the offending line (syntax) or field (content).
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleFileError(f"{source}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return rule_from_dict(doc, source)


def rule_from_dict(doc, source: str = "<rule>") -> UpdateRule:
    if not isinstance(doc, dict):
        raise RuleFileError(source, "top level must be an object")
    unknown = sorted(set(doc) - _RULE_KEYS)
    if unknown:
        raise RuleFileError(f"{source}: {unknown[0]}", "unknown field")
    for key in ("size", "map"):
        if key not in doc:
            raise RuleFileError(f"{source}: {key}", "missing required field")
    size = doc["size"]
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise RuleFileError(f"{source}: size", f"must be a positive integer, got {size!r}")
    succ = doc["map"]
    if not isinstance(succ, list):
        raise RuleFileError(f"{source}: map", "must be an array of integers")
    if len(succ) != size:
        raise RuleFileError(f"{source}: map", f"has {len(succ)} entries but size is {size} (rule must be total)")
    for i, v in enumerate(succ):
        if isinstance(v, bool) or not isinstance(v, int):
            raise RuleFileError(f"{source}: map[{i}]", f"must be an integer, got {v!r}")
        if not 0 <= v < size:
            raise RuleFileError(f"{source}: map[{i}]", f"successor {v} out of range 0..{size - 1}")
    labels = doc.get("labels")
    if labels is not None:
        if not isinstance(labels, list) or not all(isinstance(x, str) for x in labels):
            raise RuleFileError(f"{source}: labels", "must be an array of strings")
        if len(labels) != size:
            raise RuleFileError(f"{source}: labels", f"has {len(labels)} entries but size is {size}")
        if len(set(labels)) != size:
            raise RuleFileError(f"{source}: labels", "labels must be unique")
        labels = tuple(labels)
    return UpdateRule(StateSpace(size, labels), np.asarray(succ, dtype=np.int64))


def load_rule(path) -> UpdateRule:
    path = Path(path)
    return parse_rule(path.read_text(encoding="utf-8"), source=str(path))


def rule_to_dict(rule: UpdateRule) -> dict:
    doc = {"size": rule.size, "map": rule.map.tolist()}
    if rule.space.labels is not None:
        doc["labels"] = list(rule.space.labels)
    return doc
