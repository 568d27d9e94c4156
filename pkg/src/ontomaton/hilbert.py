"""Vector space analysis of an invertible automaton.

Each ontological state becomes an orthonormal basis vector and the update
rule becomes a permutation unitary (optionally dressed with phases). The
unitary is diagonalised cycle by cycle, which gives exact eigenphases
``2*pi*k/T`` for an undressed cycle of length ``T``. The eigenphase is the
one-tick energy: an eigenvector ``v`` satisfies ``U v = exp(-i*phi) v`` with
``phi`` in ``[0, 2*pi)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .automaton import StateSpace, UpdateRule, _check_time, cycle_decomposition, is_invertible
from .errors import InputError, InvertibilityError, NormalizationError, SizeError

#: Tolerance for exact algebraic identities (unitarity, norm preservation).
ALGEBRAIC_TOL = 1e-12
#: Tolerance for spectral statements (orthonormality, reconstruction).
SPECTRAL_TOL = 1e-10
#: Tolerance on the norm of a :class:`QuantumState`.
NORM_TOL = 1e-10
#: Largest dimension for which dense matrices are formed.
DENSE_LIMIT = 4096

TWO_PI = 2.0 * math.pi

PhasePolicy = Union[None, Sequence[complex], np.ndarray, Callable[[UpdateRule], Sequence[complex]]]


@dataclass(frozen=True, eq=False)
class PermutationUnitary:
    """``U e_i = phases[i] * e_{target[i]}``."""

    dimension: int
    target: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        tgt = np.array(self.target, dtype=np.int64, copy=True).reshape(-1)
        ph = np.array(self.phases, dtype=complex, copy=True).reshape(-1)
        if self.dimension < 1 or tgt.shape[0] != self.dimension or ph.shape[0] != self.dimension:
            raise InputError("target and phases must both have length dimension")
        if np.any((tgt < 0) | (tgt >= self.dimension)) or np.any(np.bincount(tgt, minlength=self.dimension) != 1):
            raise InvertibilityError("target is not a bijection")
        if np.any(np.abs(np.abs(ph) - 1.0) > ALGEBRAIC_TOL):
            raise InputError("every phase must have unit modulus")
        tgt.setflags(write=False)
        ph.setflags(write=False)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "phases", ph)

    @classmethod
    def from_permutation(cls, target, phases=None) -> "PermutationUnitary":
        target = np.asarray(target)
        if phases is None:
            phases = np.ones(target.shape[0], dtype=complex)
        return cls(int(target.shape[0]), target, phases)

    @property
    def trivial_phases(self) -> bool:
        return bool(np.all(self.phases == 1.0))

    def matrix(self) -> np.ndarray:
        _require_dense(self.dimension)
        m = np.zeros((self.dimension, self.dimension), dtype=complex)
        m[self.target, np.arange(self.dimension)] = self.phases
        return m

    def compose(self, first: "PermutationUnitary") -> "PermutationUnitary":
        """``self @ first``: apply ``first`` then ``self``."""
        if first.dimension != self.dimension:
            raise InputError("dimension mismatch")
        return PermutationUnitary(
            self.dimension, self.target[first.target], first.phases * self.phases[first.target]
        )

    def power(self, t: int) -> "PermutationUnitary":
        t = _check_time(t)
        result = PermutationUnitary(self.dimension, np.arange(self.dimension), np.ones(self.dimension, complex))
        base = self
        while t:
            if t & 1:
                result = base.compose(result)
            t >>= 1
            if t:
                base = base.compose(base)
        return result

    def apply(self, amplitudes: np.ndarray) -> np.ndarray:
        out = np.empty_like(amplitudes, dtype=complex)
        out[self.target] = self.phases * amplitudes
        return out


@dataclass(frozen=True, eq=False)
class QuantumState:
    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if a.size == 0:
            raise InputError("a state needs at least one amplitude")
        norm2 = float(np.sum(np.abs(a) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"state is not normalised: sum |a_i|^2 = {norm2!r}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def basis(cls, dimension: int, k: int) -> "QuantumState":
        a = np.zeros(dimension, dtype=complex)
        a[k] = 1.0
        return cls(a)

    @classmethod
    def normalized(cls, amplitudes) -> "QuantumState":
        a = np.asarray(amplitudes, dtype=complex)
        return cls(a / np.linalg.norm(a))

    @classmethod
    def random(cls, dimension: int, rng: np.random.Generator) -> "QuantumState":
        a = rng.standard_normal(dimension) + 1j * rng.standard_normal(dimension)
        return cls.normalized(a)

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True, eq=False)
class HamiltonianSpectrum:
    """Eigenphases, eigenvector columns and, per eigenpair, the index of its source cycle."""

    eigenphases: np.ndarray
    eigenvectors: np.ndarray
    cycle_origin: np.ndarray
    cycles: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def dimension(self) -> int:
        return self.eigenvectors.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.exp(-1j * self.eigenphases)

    def reconstruct(self, t: int = 1) -> np.ndarray:
        v = self.eigenvectors
        return (v * np.exp(-1j * t * self.eigenphases)) @ v.conj().T

    def hamiltonian(self) -> np.ndarray:
        """Hermitian ``H`` with ``U = exp(-i H)`` on the [0, 2*pi) branch."""
        v = self.eigenvectors
        return (v * self.eigenphases) @ v.conj().T


@dataclass(frozen=True, eq=False)
class Subspace:
    """Span of the retained eigenvectors together with their eigenphases."""

    basis: np.ndarray
    eigenphases: np.ndarray
    cycle_origin: np.ndarray

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]

    def restricted_unitary(self, t: int = 1) -> np.ndarray:
        return np.diag(np.exp(-1j * t * self.eigenphases))

    def project(self, psi: QuantumState) -> np.ndarray:
        return self.basis.conj().T @ psi.amplitudes

    def evolve(self, coefficients: np.ndarray, t: int) -> np.ndarray:
        return np.exp(-1j * t * self.eigenphases) * np.asarray(coefficients, dtype=complex)


@dataclass
class OntologyReport:
    passed: bool
    seed: Optional[int]
    times: list[int]
    basis_checks: int = 0
    superposition_checks: int = 0
    min_superposition_distance: float = math.inf
    witnesses: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "seed": self.seed,
            "times": self.times,
            "basis_checks": self.basis_checks,
            "superposition_checks": self.superposition_checks,
            "min_superposition_distance": self.min_superposition_distance,
            "witnesses": self.witnesses,
        }


def _require_dense(n: int) -> None:
    if n > DENSE_LIMIT:
        raise SizeError(f"dimension {n} exceeds the dense limit of {DENSE_LIMIT}")


def lift_to_unitary(rule: UpdateRule, phase_policy: PhasePolicy = None) -> PermutationUnitary:
    """Lift an invertible rule to its permutation unitary.

    ``phase_policy`` is ``None`` (all phases 1), a sequence of per-source
    phases, or a callable that receives the rule and returns such a sequence.
    """
    if not is_invertible(rule):
        raise InvertibilityError(
            "rule is not invertible; quotient it by information classes first "
            "(see ontomaton.infoclass.class_unitary)"
        )
    n = rule.size
    if phase_policy is None:
        phases = np.ones(n, dtype=complex)
    elif callable(phase_policy):
        phases = np.asarray(phase_policy(rule), dtype=complex)
    else:
        phases = np.asarray(phase_policy, dtype=complex)
    if phases.shape != (n,):
        raise InputError(f"phase policy must give {n} phases, got shape {phases.shape}")
    return PermutationUnitary(n, rule.map, phases)


def random_phase_policy(rng: np.random.Generator) -> Callable[[UpdateRule], np.ndarray]:
    def policy(rule: UpdateRule) -> np.ndarray:
        return np.exp(1j * rng.uniform(0.0, TWO_PI, rule.size))

    return policy


def extract_hamiltonian(U: PermutationUnitary) -> HamiltonianSpectrum:
    """Diagonalise ``U`` exactly, one cycle block at a time.

    On a cycle ``c_0 -> ... -> c_{T-1}`` whose phase product is
    ``exp(i*theta)``, the eigenvalues are the ``T``-th roots of that product.
    Eigenpairs are ordered by cycle (cycles sorted by minimal state), then by
    ascending eigenphase.
    """
    n = U.dimension
    _require_dense(n)
    cycles = cycle_decomposition(UpdateRule(StateSpace(n), U.target)).cycles
    phases = np.empty(n)
    vectors = np.zeros((n, n), dtype=complex)
    origin = np.empty(n, dtype=np.int64)
    col = 0
    for ci, cyc in enumerate(cycles):
        T = len(cyc)
        idx = np.asarray(cyc)
        # Phase picked up while walking from c_0 to c_j.
        cum = np.ones(T, dtype=complex)
        for j in range(1, T):
            cum[j] = cum[j - 1] * U.phases[idx[j - 1]]
        theta = cmath.phase(cum[-1] * U.phases[idx[-1]])
        if U.trivial_phases:
            block = [(TWO_PI * k / T, k) for k in range(T)]
        else:
            block = sorted(((-theta / T + TWO_PI * k / T) % TWO_PI, k) for k in range(T))
        j = np.arange(T)
        for phi, _ in block:
            lam = cmath.exp(-1j * phi)
            vectors[idx, col] = cum * lam ** (-j) / math.sqrt(T)
            phases[col] = phi
            origin[col] = ci
            col += 1
    return HamiltonianSpectrum(phases, vectors, origin, tuple(cycles))


def evolve_state(U: PermutationUnitary, psi: QuantumState, t: int) -> QuantumState:
    if psi.dimension != U.dimension:
        raise InputError(f"state has dimension {psi.dimension}, unitary has {U.dimension}")
    return QuantumState(U.power(t).apply(psi.amplitudes))


def born_probabilities(psi) -> np.ndarray:
    """``|alpha_i|^2`` for a :class:`QuantumState` or a raw amplitude vector."""
    if not isinstance(psi, QuantumState):
        psi = QuantumState(psi)
    return np.abs(psi.amplitudes) ** 2


def distance_to_basis(amplitudes: np.ndarray) -> float:
    """Distance from the nearest basis vector, minimised over a global phase."""
    return math.sqrt(max(0.0, 2.0 - 2.0 * float(np.max(np.abs(amplitudes)))))


def is_basis_image(amplitudes: np.ndarray, tol: float = ALGEBRAIC_TOL) -> bool:
    mod = np.abs(amplitudes)
    big = np.flatnonzero(np.abs(mod - 1.0) <= tol)
    if big.size != 1:
        return False
    rest = np.delete(mod, big[0])
    return bool(np.all(rest < tol))


def check_ontology_conservation(U: PermutationUnitary, trials: int = 20, seed: Optional[int] = 0) -> OntologyReport:
    """Check that ``U`` and sampled powers of it keep basis states as basis states,
    and that sampled genuine superpositions never come within 1e-6 of one.

    Failures are recorded as witnesses; nothing is raised.
    """
    rng = np.random.default_rng(seed)
    n = U.dimension
    horizon = max(4 * n, 8)
    times = sorted({1, *(int(x) for x in rng.integers(0, horizon, size=max(trials, 0)))})
    report = OntologyReport(passed=True, seed=seed, times=times)
    for t in times:
        Ut = U.power(t)
        for k in range(n):
            report.basis_checks += 1
            if not is_basis_image(Ut.apply(_unit(n, k))):
                report.passed = False
                report.witnesses.append({"kind": "basis", "state": k, "t": t})
    if n >= 2:
        for trial in range(max(trials, 1)):
            if trial % 2 == 0:
                i, j = rng.choice(n, size=2, replace=False)
                amp = np.zeros(n, dtype=complex)
                amp[i] = 1.0
                amp[j] = cmath.exp(1j * rng.uniform(0, TWO_PI))
                psi = QuantumState.normalized(amp)
            else:
                psi = QuantumState.random(n, rng)
            for t in times:
                d = distance_to_basis(U.power(t).apply(psi.amplitudes))
                report.superposition_checks += 1
                report.min_superposition_distance = min(report.min_superposition_distance, d)
                if d < 1e-6:
                    report.passed = False
                    report.witnesses.append({"kind": "superposition", "trial": trial, "t": t, "distance": d})
    return report


def _unit(n: int, k: int) -> np.ndarray:
    e = np.zeros(n, dtype=complex)
    e[k] = 1.0
    return e


def truncate_spectrum(H: HamiltonianSpectrum, e_max: float) -> Subspace:
    """Keep the eigenpairs whose eigenphase is at most ``e_max``."""
    if not e_max >= 0:
        raise InputError(f"e_max must be non-negative, got {e_max!r}")
    keep = H.eigenphases <= e_max
    return Subspace(H.eigenvectors[:, keep], H.eigenphases[keep], H.cycle_origin[keep])


def spectrum_to_dict(H: HamiltonianSpectrum) -> dict:
    return {
        "dimension": H.dimension,
        "cycles": [list(c) for c in H.cycles],
        "eigenpairs": [
            {"index": j, "eigenphase": float(H.eigenphases[j]), "cycle": int(H.cycle_origin[j])}
            for j in range(H.eigenphases.shape[0])
        ],
    }


def unitary_to_dict(U: PermutationUnitary) -> dict:
    return {
        "dimension": U.dimension,
        "target": U.target.tolist(),
        "phases_re": U.phases.real.tolist(),
        "phases_im": U.phases.imag.tolist(),
    }
