"""Three-particle GHZ algebra and the 6-bit toy universe.

Basis order for three spins is lexicographic in ``(a, b, c)`` with ``+``
before ``-``, so index ``4*i + 2*j + k`` with ``0`` for ``+`` and ``1`` for
``-``. Single-particle operators act as ``X|+-> = |-+>`` and
``Y|+-> = +-i|-+>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import InputError, NormalizationError

NORM_TOL = 1e-10
COMMUTE_TOL = 1e-12

#: Per-letter action on a single spin: (new index for 0/1, phase for 0/1).
_ACTIONS = {
    "I": ((0, 1), (1.0, 1.0)),
    "X": ((1, 0), (1.0, 1.0)),
    "Y": ((1, 0), (1j, -1j)),
}

_SINGLE = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
}

#: The four mutually commuting products and their values on the GHZ state.
PRODUCT_IDENTITIES = {"XXX": -1, "XYY": +1, "YXY": +1, "YYX": +1}

OBSERVERS = ("A", "B", "C")


@dataclass(frozen=True)
class PauliWord:
    """Three letters from ``X``, ``Y`` (and ``I`` for padding), one per particle."""

    letters: str

    def __post_init__(self):
        letters = str(self.letters).upper()
        if len(letters) != 3 or any(ch not in _ACTIONS for ch in letters):
            raise InputError(f"a Pauli word is exactly three letters from X, Y, I; got {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    def __str__(self):
        return self.letters

    def matrix(self) -> np.ndarray:
        m = np.ones((1, 1), dtype=complex)
        for ch in self.letters:
            m = np.kron(m, _SINGLE[ch])
        return m

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        """Act letter by letter on an 8-amplitude vector."""
        psi = np.asarray(amplitudes, dtype=complex).reshape(2, 2, 2)
        for axis, ch in enumerate(self.letters):
            (to0, to1), (ph0, ph1) = _ACTIONS[ch]
            out = np.empty_like(psi)
            src0 = np.take(psi, 0, axis=axis) * ph0
            src1 = np.take(psi, 1, axis=axis) * ph1
            idx = [slice(None)] * 3
            idx[axis] = to0
            out[tuple(idx)] = src0
            idx[axis] = to1
            out[tuple(idx)] = src1
            psi = out
        return psi.reshape(8)


def _word(w) -> PauliWord:
    return w if isinstance(w, PauliWord) else PauliWord(w)


@dataclass(frozen=True, eq=False)
class ThreeQubitState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if amp.shape != (8,):
            raise InputError("a three-qubit state has 8 amplitudes")
        norm2 = float(np.sum(np.abs(amp) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"three-qubit state not normalised: {norm2!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def amplitude(self, signs: Sequence[int]) -> complex:
        i, j, k = (0 if s > 0 else 1 for s in signs)
        return complex(self.amplitudes[4 * i + 2 * j + k])


def ghz_state() -> ThreeQubitState:
    """``(|+,+,+> - |-,-,->)/sqrt 2``."""
    amp = np.zeros(8, dtype=complex)
    amp[0] = 1 / math.sqrt(2)
    amp[7] = -1 / math.sqrt(2)
    return ThreeQubitState(amp)


def pauli_word_expectation(state: ThreeQubitState, word) -> float:
    value = np.vdot(state.amplitudes, _word(word).apply(state.amplitudes))
    return float(value.real)


@dataclass(frozen=True)
class CommutationResult:
    commute: bool
    witness: Optional[tuple[str, str]] = None

    def __bool__(self):
        return self.commute


def check_commuting(words: Iterable) -> CommutationResult:
    ws = [_word(w) for w in words]
    mats = [w.matrix() for w in ws]
    for (i, p), (j, q) in combinations(enumerate(mats), 2):
        if np.max(np.abs(p @ q - q @ p)) > COMMUTE_TOL:
            return CommutationResult(False, (str(ws[i]), str(ws[j])))
    return CommutationResult(True)


# -- counterfactual assignments -----------------------------------------------

_VALUE_NAMES = ("Xa", "Ya", "Xb", "Yb", "Xc", "Yc")


def _product_value(word: str, values: dict) -> int:
    out = 1
    for ch, particle in zip(word, "abc"):
        out *= values[f"{ch}{particle}"]
    return out


def count_assignments(constraints: dict) -> int:
    """Number of ``+-1`` assignments to ``Xa, Ya, Xb, Yb, Xc, Yc`` meeting every ``word -> sign``."""
    n = 0
    for vals in product((1, -1), repeat=6):
        values = dict(zip(_VALUE_NAMES, vals))
        if all(_product_value(w, values) == s for w, s in constraints.items()):
            n += 1
    return n


@dataclass
class ContradictionReport:
    assignments_checked: int
    satisfying: int
    implied_xxx: int
    required_xxx: int
    satisfying_without_xxx: int
    satisfying_only_xxx: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def counterfactual_contradiction() -> ContradictionReport:
    """Try every definite value for the six possible measurements against the four identities.

    None fits. Multiplying the last three identities squares every ``Y``
    and leaves ``Xa Xb Xc``, which is checked per assignment to be ``+1``
    whenever those three hold.
    """
    implied = set()
    for vals in product((1, -1), repeat=6):
        v = dict(zip(_VALUE_NAMES, vals))
        if all(_product_value(w, v) == PRODUCT_IDENTITIES[w] for w in ("XYY", "YXY", "YYX")):
            implied.add(_product_value("XXX", v))
    (xxx,) = implied
    return ContradictionReport(
        assignments_checked=64,
        satisfying=count_assignments(PRODUCT_IDENTITIES),
        implied_xxx=xxx,
        required_xxx=PRODUCT_IDENTITIES["XXX"],
        satisfying_without_xxx=count_assignments({w: s for w, s in PRODUCT_IDENTITIES.items() if w != "XXX"}),
        satisfying_only_xxx=count_assignments({"XXX": PRODUCT_IDENTITIES["XXX"]}),
    )


# -- the 6-bit universe -------------------------------------------------------


@dataclass(frozen=True, order=True)
class SixBitState:
    settings: tuple[str, str, str]
    outcomes: tuple[int, int, int]

    def __post_init__(self):
        if len(self.settings) != 3 or any(s not in ("X", "Y") for s in self.settings):
            raise InputError(f"settings must be three of X/Y, got {self.settings!r}")
        if len(self.outcomes) != 3 or any(o not in (1, -1) for o in self.outcomes):
            raise InputError(f"outcomes must be three of +-1, got {self.outcomes!r}")
        object.__setattr__(self, "settings", tuple(self.settings))
        object.__setattr__(self, "outcomes", tuple(int(o) for o in self.outcomes))

    @property
    def setting_word(self) -> str:
        return "".join(self.settings)


def is_allowed(state: SixBitState) -> bool:
    """The law of the toy universe: an even number of ``Y`` settings fixes the outcome product."""
    required = PRODUCT_IDENTITIES.get(state.setting_word)
    if required is None:
        return True
    a, b, c = state.outcomes
    return a * b * c == required


def all_six_bit_states() -> list[SixBitState]:
    return [
        SixBitState(tuple(s), tuple(o))
        for s in product("XY", repeat=3)
        for o in product((1, -1), repeat=3)
    ]


@dataclass(frozen=True)
class SixBitLaw:
    allowed: tuple[SixBitState, ...]
    forbidden: tuple[SixBitState, ...]

    def __contains__(self, state) -> bool:
        return is_allowed(state)

    def by_setting(self) -> dict[str, list[tuple[int, int, int]]]:
        out: dict[str, list] = {"".join(s): [] for s in product("XY", repeat=3)}
        for st in self.allowed:
            out[st.setting_word].append(st.outcomes)
        return out


def enumerate_allowed_states() -> SixBitLaw:
    states = all_six_bit_states()
    return SixBitLaw(
        allowed=tuple(s for s in states if is_allowed(s)),
        forbidden=tuple(s for s in states if not is_allowed(s)),
    )


def law_to_dict(law: SixBitLaw) -> dict:
    return {
        "allowed_count": len(law.allowed),
        "forbidden_count": len(law.forbidden),
        "allowed": {w: [list(o) for o in outs] for w, outs in law.by_setting().items()},
    }


@dataclass
class SettingStats:
    count: int = 0
    sums: dict = field(default_factory=lambda: dict.fromkeys(("A", "B", "C", "AB", "AC", "BC", "ABC"), 0))

    def means(self) -> dict:
        return {k: (v / self.count if self.count else math.nan) for k, v in self.sums.items()}


@dataclass
class RunStatistics:
    CSV_HEADER = ("setting", "count", "mean_A", "mean_B", "mean_C", "mean_AB", "mean_AC", "mean_BC", "mean_ABC")

    seed: int
    n: int
    observer_means: dict
    pair_means: dict
    three_point_means: dict
    per_setting: dict

    def csv_rows(self) -> list[list]:
        rows = []
        for word in sorted(self.per_setting):
            st = self.per_setting[word]
            m = st.means()
            rows.append([word, st.count] + [float(m[k]) for k in ("A", "B", "C", "AB", "AC", "BC", "ABC")])
        return rows


def simulate_runs(n: int, seed: int) -> RunStatistics:
    """Draw ``n`` runs uniformly from the allowed states (numpy PCG64 seeded with ``seed``)."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    law = enumerate_allowed_states()
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(law.allowed), size=int(n))
    outcomes = np.array([s.outcomes for s in law.allowed], dtype=np.int64)[picks]
    words = np.array([s.setting_word for s in law.allowed])[picks]
    A, B, C = outcomes.T
    prods = {"A": A, "B": B, "C": C, "AB": A * B, "AC": A * C, "BC": B * C, "ABC": A * B * C}
    per_setting = {}
    for w in ("".join(s) for s in product("XY", repeat=3)):
        mask = words == w
        st = SettingStats(count=int(mask.sum()))
        st.sums = {k: int(v[mask].sum()) for k, v in prods.items()}
        per_setting[w] = st
    return RunStatistics(
        seed=int(seed),
        n=int(n),
        observer_means={k: float(prods[k].mean()) for k in ("A", "B", "C")},
        pair_means={k: float(prods[k].mean()) for k in ("AB", "AC", "BC")},
        three_point_means={w: st.means()["ABC"] for w, st in per_setting.items()},
        per_setting=per_setting,
    )
