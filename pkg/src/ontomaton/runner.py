"""Run one experiment from a config, write its outputs and a checksummed manifest."""

from __future__ import annotations

import hashlib
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import bell, ghz, hilbert, infoclass
from ._io import complex_columns_csv, csv_text, dumps, fmt, write_json
from .automaton import cycle_decomposition, is_invertible, load_rule
from .config import ExperimentConfig

MANIFEST_NAME = "manifest.json"


@dataclass
class RunManifest:
    config: dict
    version: str
    duration_s: float
    outputs: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "tool": "ontomaton",
            "version": self.version,
            "config": self.config,
            "duration_s": self.duration_s,
            "outputs": self.outputs,
        }

    def verify(self, out_dir) -> list[str]:
        """Names of listed outputs that are missing or fail their checksum."""
        bad = []
        for entry in self.outputs:
            p = Path(out_dir) / entry["path"]
            if not p.is_file() or sha256(p) != entry["sha256"]:
                bad.append(entry["path"])
        return bad


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class _Writer:
    def __init__(self, out: Path):
        self.out = out
        self.files: list[str] = []

    def text(self, name: str, content: str) -> None:
        (self.out / name).write_text(content, encoding="utf-8")
        self.files.append(name)

    def json(self, name: str, obj) -> None:
        self.text(name, dumps(obj))


def _rng(cfg: ExperimentConfig) -> np.random.Generator:
    return np.random.default_rng(cfg.seed)


def _lift(cfg: ExperimentConfig, w: _Writer) -> None:
    rule = load_rule(cfg.rule)
    rng = _rng(cfg)
    policy = hilbert.random_phase_policy(rng) if cfg.param("phases") == "random" else None
    U = hilbert.lift_to_unitary(rule, policy)
    w.json("unitary.json", hilbert.unitary_to_dict(U))
    report = hilbert.check_ontology_conservation(U, cfg.param("trials"), seed=cfg.seed)
    w.json("ontology.json", report.as_dict())
    steps = cfg.param("steps")
    psi0 = hilbert.QuantumState.random(U.dimension, rng)
    psi1 = hilbert.evolve_state(U, psi0, steps)
    w.text("state_initial.csv", complex_columns_csv(psi0.amplitudes))
    w.text("state_final.csv", complex_columns_csv(psi1.amplitudes))
    p0 = hilbert.born_probabilities(psi0)
    p1 = hilbert.born_probabilities(psi1)
    w.text(
        "born.csv",
        csv_text(["index", "p_initial", "p_final"], [[i, float(p0[i]), float(p1[i])] for i in range(p0.shape[0])]),
    )


def _spectrum(cfg: ExperimentConfig, w: _Writer) -> None:
    rule = load_rule(cfg.rule)
    policy = hilbert.random_phase_policy(_rng(cfg)) if cfg.param("phases") == "random" else None
    U = hilbert.lift_to_unitary(rule, policy)
    H = hilbert.extract_hamiltonian(U)
    w.json("spectrum.json", hilbert.spectrum_to_dict(H))
    w.text("eigenvectors.csv", complex_columns_csv(H.eigenvectors))
    e_max = cfg.param("e_max")
    if e_max is not None:
        sub = hilbert.truncate_spectrum(H, e_max)
        w.json(
            "subspace.json",
            {
                "e_max": e_max,
                "dimension": sub.dimension,
                "eigenphases": sub.eigenphases.tolist(),
                "cycles": sub.cycle_origin.tolist(),
            },
        )
        w.text("subspace_basis.csv", complex_columns_csv(sub.basis))


def _infoclass(cfg: ExperimentConfig, w: _Writer) -> None:
    rule = load_rule(cfg.rule)
    part = infoclass.compute_info_classes(rule)
    q = infoclass.quotient_dynamics(rule, part)
    w.json("partition.json", infoclass.partition_to_dict(part))
    w.json(
        "quotient.json",
        {
            "num_classes": part.num_classes,
            "map": q.map.tolist(),
            "cycles": [list(c) for c in cycle_decomposition(q).cycles],
            "rule_invertible": is_invertible(rule),
        },
    )
    profile = infoclass.entropy_profile(rule, cfg.param("steps"))
    w.text("entropy.csv", csv_text(["t", "bits"], [[t, float(v)] for t, v in enumerate(profile)]))


def _bell(cfg: ExperimentConfig, w: _Writer) -> None:
    grid = cfg.param("grid")
    C = bell.normalize_w()
    density = bell.HiddenVariableDensity(C)
    state = bell.TwoPhotonState.bell()
    angles = cfg.param("angles") or list(bell.OPTIMAL_ANGLES)
    E_q = lambda x, y: bell.quantum_correlation(state, x, y)  # noqa: E731
    E_hv = lambda x, y: bell.hidden_variable_correlation(density, None, x, y)  # noqa: E731
    rng = _rng(cfg)
    samples = cfg.param("samples")
    a, a2, b, b2 = angles
    mc = {
        f"{fmt(x)},{fmt(y)}": bell.monte_carlo_correlation(None, x, y, samples, rng)
        for x, y in ((a, b), (a, b2), (a2, b), (a2, b2))
    }
    local = bell.local_chsh_values()
    w.json(
        "bell.json",
        {
            "normalization_C": C,
            "integral": density.integral(),
            "grid": grid,
            "marginal_flatness": {v: bell.marginal_flatness(v, grid, density) for v in ("a", "b", "lam")},
            "angles": angles,
            "chsh_quantum": bell.chsh_value(E_q, *angles),
            "chsh_hidden_variable": bell.chsh_value(E_hv, *angles),
            "chsh_local_max_abs": max(abs(v) for _, v in local),
            "monte_carlo": {"seed": cfg.seed, "samples": samples, "correlations": mc},
        },
    )
    points = cfg.param("points")
    deltas = np.linspace(0.0, math.pi / 2, points)
    rows = bell.correlation_curve(deltas, state)
    w.text("correlations.csv", csv_text(["delta", "E_quantum", "E_hidden_variable"], rows))


def _ghz(cfg: ExperimentConfig, w: _Writer) -> None:
    state = ghz.ghz_state()
    law = ghz.enumerate_allowed_states()
    w.json("allowed_states.json", ghz.law_to_dict(law))
    words = list(ghz.PRODUCT_IDENTITIES)
    comm = ghz.check_commuting(words)
    w.json(
        "algebra.json",
        {
            "expectations": {wd: ghz.pauli_word_expectation(state, wd) for wd in words},
            "single_particle": {
                wd: ghz.pauli_word_expectation(state, wd) for wd in ("XII", "YII", "IXI", "IYI", "IIX", "IIY")
            },
            "commute": comm.commute,
            "counterfactual": ghz.counterfactual_contradiction().as_dict(),
        },
    )
    stats = ghz.simulate_runs(cfg.param("n"), cfg.seed)
    w.text("runs.csv", csv_text(stats.CSV_HEADER, stats.csv_rows()))


EXPERIMENTS = {"lift": _lift, "spectrum": _spectrum, "infoclass": _infoclass, "bell": _bell, "ghz": _ghz}


def run(cfg: ExperimentConfig) -> RunManifest:
    """Execute ``cfg`` and write outputs plus ``manifest.json`` into ``cfg.out``.

    Output files depend only on the config and seed; the manifest also
    records wall-clock duration and so is excluded from byte comparison.
    """
    start = time.perf_counter()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    writer = _Writer(out)
    EXPERIMENTS[cfg.kind](cfg, writer)
    manifest = RunManifest(
        config=cfg.echo(),
        version=__version__,
        duration_s=round(time.perf_counter() - start, 6),
        outputs=[{"path": name, "sha256": sha256(out / name)} for name in writer.files],
    )
    write_json(out / MANIFEST_NAME, manifest.as_dict())
    return manifest
