"""Hidden-variable density for the two-photon Bell experiment, and the quantum reference.

The density ``W(a, b, lam) = C |sin(2a + 2b - 4 lam)|`` lives on the cube
``[0, pi)^3`` of analyser angles ``a``, ``b`` and source polarisation
``lam``. Integrals of ``|sin|`` are done with Gauss-Legendre rules on the
smooth pieces between its zeros (which are known in closed form), and each
result is confirmed by doubling the rule order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Callable, Literal, Optional, Sequence

import numpy as np

from .errors import InputError, NormalizationError, QuadratureError

PI = math.pi
#: Base Gauss-Legendre order per smooth segment; doubled once to confirm.
GL_ORDER = 24
#: Successive estimates must agree this closely.
CONVERGENCE_TOL = 1e-8
NORM_TOL = 1e-10
#: Cells used to locate sign flips of an outcome rule without known breakpoints.
SCAN_CELLS = 4096


@lru_cache(maxsize=None)
def _gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _segment_rule(edges: np.ndarray, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for GL on each consecutive pair of ``edges`` (last axis)."""
    x, w = _gauss_legendre(order)
    lo = edges[..., :-1, None]
    hi = edges[..., 1:, None]
    half = 0.5 * (hi - lo)
    nodes = 0.5 * (hi + lo) + half * x
    weights = half * w
    return nodes, weights


def _abs_sin_edges(coef: float, offset: np.ndarray, lo: float, hi: float) -> np.ndarray:
    """Sorted integration edges in ``[lo, hi]`` that include every zero of ``sin(coef*x + offset)``."""
    offset = np.asarray(offset, dtype=float)
    u0 = coef * lo + offset
    u1 = coef * hi + offset
    umin = np.minimum(u0, u1)
    k0 = np.ceil(umin / PI)
    count = int(math.floor(abs(coef) * (hi - lo) / PI)) + 2
    ks = k0[..., None] + np.arange(count)
    zeros = (ks * PI - offset[..., None]) / coef
    zeros = np.clip(zeros, lo, hi)
    shape = offset.shape + (1,)
    edges = np.concatenate([np.full(shape, lo), zeros, np.full(shape, hi)], axis=-1)
    return np.sort(edges, axis=-1)


def integrate_abs_sin(coef: float, offset, lo: float = 0.0, hi: float = PI, order: int = GL_ORDER) -> np.ndarray:
    """``int_lo^hi |sin(coef*x + offset)| dx`` for an array of offsets.

    Raises :class:`QuadratureError` if the ``order`` and ``2*order`` results
    differ by more than ``CONVERGENCE_TOL``.
    """
    offset = np.asarray(offset, dtype=float)
    edges = _abs_sin_edges(coef, offset, lo, hi)

    def estimate(n):
        nodes, weights = _segment_rule(edges, n)
        vals = np.abs(np.sin(coef * nodes + offset[..., None, None]))
        return np.sum(vals * weights, axis=(-2, -1))

    return _confirm(estimate, order, "integral of |sin|")


def _confirm(estimate: Callable[[int], np.ndarray], order: int, what: str):
    coarse = estimate(order)
    fine = estimate(2 * order)
    gap = float(np.max(np.abs(fine - coarse)))
    if not gap < CONVERGENCE_TOL:
        raise QuadratureError(f"{what} did not converge (successive estimates differ by {gap:.3g})", float(np.max(fine)))
    return fine


# -- hidden-variable density --------------------------------------------------


@dataclass(frozen=True)
class HiddenVariableDensity:
    C: float

    def __post_init__(self):
        if not self.C > 0:
            raise InputError(f"normalisation must be positive, got {self.C!r}")

    def __call__(self, a, b, lam):
        a, b, lam = (np.mod(np.asarray(v, dtype=float), PI) for v in (a, b, lam))
        out = self.C * np.abs(np.sin(2 * a + 2 * b - 4 * lam))
        return float(out) if out.ndim == 0 else out

    def conditional(self, a, b, lam):
        """``p(lam | a, b)``; the lam-marginal is the constant ``2C``."""
        return self(a, b, lam) / (2.0 * self.C)

    def integral(self, order: int = GL_ORDER) -> float:
        return self.C * _cube_integral(order)


def _cube_integral(order: int = GL_ORDER) -> float:
    """``int |sin(2a + 2b - 4 lam)|`` over ``[0, pi)^3``; inner over lam, outer GL in a and b."""

    def estimate(n):
        x, w = _gauss_legendre(n)
        nodes = 0.5 * PI * (x + 1.0)
        weights = 0.5 * PI * w
        a, b = np.meshgrid(nodes, nodes, indexing="ij")
        inner = integrate_abs_sin(-4.0, 2 * a + 2 * b, 0.0, PI, order=n)
        return np.asarray(float(np.einsum("i,j,ij->", weights, weights, inner)))

    return float(_confirm(estimate, order, "normalisation integral"))


@lru_cache(maxsize=None)
def normalize_w() -> float:
    """The constant ``C`` that makes ``W`` integrate to 1 over the cube."""
    return 1.0 / _cube_integral()


def default_density() -> HiddenVariableDensity:
    return HiddenVariableDensity(normalize_w())


def w_density(a, b, lam, density: Optional[HiddenVariableDensity] = None):
    return (density or default_density())(a, b, lam)


Variable = Literal["a", "b", "lam"]
_VARIABLES = ("a", "b", "lam")


def marginal_values(which: Variable, grid: int = 256, density: Optional[HiddenVariableDensity] = None) -> np.ndarray:
    """``W`` integrated over ``which`` on a ``grid x grid`` midpoint grid of the remaining two variables."""
    if which == "lambda":
        which = "lam"
    if which not in _VARIABLES:
        raise InputError(f"variable must be one of {_VARIABLES}, got {which!r}")
    if grid < 8:
        raise InputError(f"grid must be >= 8, got {grid}")
    density = density or default_density()
    pts = (np.arange(grid) + 0.5) * PI / grid
    u, v = np.meshgrid(pts, pts, indexing="ij")
    if which == "lam":
        vals = integrate_abs_sin(-4.0, 2 * u + 2 * v)  # (a, b) grid
    else:
        vals = integrate_abs_sin(2.0, 2 * u - 4 * v)  # (other angle, lam) grid
    return density.C * vals


def marginal_flatness(which: Variable, grid: int = 256, density: Optional[HiddenVariableDensity] = None) -> float:
    """Largest relative deviation of the ``which``-marginal from its mean over the grid."""
    vals = marginal_values(which, grid, density)
    mean = float(np.mean(vals))
    return float(np.max(np.abs(vals - mean)) / mean)


def sample_w(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` points ``(a, b, lam)`` from ``W`` by rejection; shape ``(n, 3)``."""
    out = np.empty((0, 3))
    while out.shape[0] < n:
        m = 2 * (n - out.shape[0]) + 16
        pts = rng.uniform(0.0, PI, size=(m, 3))
        acc = rng.uniform(size=m) < np.abs(np.sin(2 * pts[:, 0] + 2 * pts[:, 1] - 4 * pts[:, 2]))
        out = np.concatenate([out, pts[acc]])
    return out[:n]


def sample_lambda(a: float, b: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` source polarisations from ``p(lam | a, b)`` by rejection."""
    out = np.empty(0)
    while out.shape[0] < n:
        m = 2 * (n - out.shape[0]) + 16
        lam = rng.uniform(0.0, PI, size=m)
        acc = rng.uniform(size=m) < np.abs(np.sin(2 * a + 2 * b - 4 * lam))
        out = np.concatenate([out, lam[acc]])
    return out[:n]


# -- deterministic outcome rules ----------------------------------------------


class OutcomeRule:
    """Deterministic ``+-1`` outcome as a function of analyser setting and ``lam``.

    Subclasses may override :meth:`breakpoints` to list the ``lam`` values in
    ``[0, pi)`` where the outcome flips; otherwise they are located numerically.
    """

    def __call__(self, setting: float, lam: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def breakpoints(self, setting: float) -> Optional[np.ndarray]:
        return None


class SignCosRule(OutcomeRule):
    """``sign(cos 2(setting - lam))``, with ``sign(0) = +1``."""

    def __call__(self, setting, lam):
        return np.where(np.cos(2.0 * (setting - np.asarray(lam))) >= 0.0, 1.0, -1.0)

    def breakpoints(self, setting):
        # cos 2(s - lam) = 0  <=>  lam = s + pi/4 + k pi/2
        return np.mod(setting + PI / 4 + np.arange(2) * PI / 2, PI)


class ConstantRule(OutcomeRule):
    def __init__(self, value: float = 1.0):
        self.value = float(value)

    def __call__(self, setting, lam):
        return np.full(np.shape(lam), self.value)

    def breakpoints(self, setting):
        return np.empty(0)


class FunctionRule(OutcomeRule):
    """Wrap a plain callable ``f(setting, lam) -> +-1``; flips are found by scanning."""

    def __init__(self, fn: Callable[[float, np.ndarray], np.ndarray]):
        self.fn = fn

    def __call__(self, setting, lam):
        return np.asarray(self.fn(setting, lam), dtype=float)


def _find_flips(rule: OutcomeRule, setting: float) -> np.ndarray:
    known = rule.breakpoints(setting)
    if known is not None:
        return np.asarray(known, dtype=float)
    grid = np.linspace(0.0, PI, SCAN_CELLS + 1)
    vals = rule(setting, grid)
    flips = []
    for i in np.flatnonzero(vals[1:] != vals[:-1]):
        lo, hi = grid[i], grid[i + 1]
        v_lo = vals[i]
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if rule(setting, np.array([mid]))[0] == v_lo:
                lo = mid
            else:
                hi = mid
        flips.append(0.5 * (lo + hi))
    return np.asarray(flips)


def hidden_variable_correlation(
    density: Optional[HiddenVariableDensity],
    outcome_rule: Optional[OutcomeRule],
    a: float,
    b: float,
    order: int = GL_ORDER,
) -> float:
    """``int dlam p(lam | a, b) A(a, lam) B(b, lam)`` over ``[0, pi)``.

    The same rule gives both observers' outcomes. ``density`` and
    ``outcome_rule`` default to the normalised ``W`` and :class:`SignCosRule`.
    """
    density = density or default_density()
    rule = outcome_rule or SignCosRule()
    a = float(a) % PI
    b = float(b) % PI
    offset = 2 * a + 2 * b
    sin_edges = _abs_sin_edges(-4.0, np.asarray(offset), 0.0, PI)
    edges = np.unique(np.concatenate([sin_edges, _find_flips(rule, a), _find_flips(rule, b), [0.0, PI]]))
    edges = edges[(edges >= 0.0) & (edges <= PI)]

    def estimate(n):
        nodes, weights = _segment_rule(edges, n)
        lam = nodes.reshape(-1)
        f = density.conditional(a, b, lam) * rule(a, lam) * rule(b, lam)
        return np.asarray(float(np.sum(f * weights.reshape(-1))))

    return float(_confirm(estimate, order, "hidden-variable correlation"))


def monte_carlo_correlation(outcome_rule: Optional[OutcomeRule], a: float, b: float, n: int, rng: np.random.Generator) -> float:
    rule = outcome_rule or SignCosRule()
    lam = sample_lambda(a, b, n, rng)
    return float(np.mean(rule(a, lam) * rule(b, lam)))


# -- quantum two-photon reference ---------------------------------------------

OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True, eq=False)
class TwoPhotonState:
    """Amplitudes over ``|HH>, |HV>, |VH>, |VV>``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=complex, copy=True).reshape(-1)
        if amp.shape != (4,):
            raise InputError("a two-photon state has exactly 4 amplitudes")
        norm2 = float(np.sum(np.abs(amp) ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise NormalizationError(f"two-photon state not normalised: {norm2!r}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def bell(cls) -> "TwoPhotonState":
        """``(|HH> + |VV>)/sqrt 2``."""
        return cls(np.array([1, 0, 0, 1]) / math.sqrt(2))

    @classmethod
    def product(cls, alpha: float, beta: float) -> "TwoPhotonState":
        """Linear polarisations at angles ``alpha`` and ``beta``."""
        return cls(np.kron(_analyser(alpha)[0], _analyser(beta)[0]))


@dataclass(frozen=True, eq=False)
class MeasurementDecomposition:
    """Amplitudes for outcomes ``(+,+), (+,-), (-,+), (-,-)`` at settings ``(a, b)``."""

    a: float
    b: float
    alphas: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.alphas) ** 2

    def correlation(self) -> float:
        signs = np.array([x * y for x, y in OUTCOMES], dtype=float)
        return float(np.dot(signs, self.probabilities))


def _analyser(angle: float) -> tuple[np.ndarray, np.ndarray]:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([c, s]), np.array([-s, c])


def measurement_decomposition(state: TwoPhotonState, a: float, b: float) -> MeasurementDecomposition:
    pa = dict(zip((1, -1), _analyser(a)))
    pb = dict(zip((1, -1), _analyser(b)))
    alphas = np.array([np.vdot(np.kron(pa[x], pb[y]), state.amplitudes) for x, y in OUTCOMES])
    return MeasurementDecomposition(float(a), float(b), alphas)


def quantum_correlation(state: TwoPhotonState, a: float, b: float) -> float:
    return measurement_decomposition(state, a, b).correlation()


def chsh_value(E: Callable[[float, float], float], a: float, a2: float, b: float, b2: float) -> float:
    """``E(a, b) - E(a, b') + E(a', b) + E(a', b')``."""
    return E(a, b) - E(a, b2) + E(a2, b) + E(a2, b2)


OPTIMAL_ANGLES = (0.0, PI / 4, PI / 8, 3 * PI / 8)


def local_chsh_values() -> list[tuple[tuple[int, int, int, int], float]]:
    """CHSH value of every deterministic local assignment ``(A(a), A(a'), B(b), B(b'))``."""
    out = []
    for A, A2, B, B2 in product((1, -1), repeat=4):
        table = {(0, 0): A * B, (0, 1): A * B2, (1, 0): A2 * B, (1, 1): A2 * B2}
        out.append(((A, A2, B, B2), float(chsh_value(lambda x, y: table[(x, y)], 0, 1, 0, 1))))
    return out


def correlation_curve(
    deltas: Sequence[float],
    state: Optional[TwoPhotonState] = None,
    outcome_rule: Optional[OutcomeRule] = None,
    a: float = 0.0,
) -> list[tuple[float, float, float]]:
    """Rows ``(delta, E_quantum, E_hidden_variable)`` with Bob's angle ``a + delta``."""
    state = state or TwoPhotonState.bell()
    density = default_density()
    return [
        (float(d), quantum_correlation(state, a, a + d), hidden_variable_correlation(density, outcome_rule, a, a + d))
        for d in deltas
    ]
