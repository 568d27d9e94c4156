"""Experiment configuration: loading, defaults and validation.

A config is a YAML (or JSON) mapping::

    kind: spectrum          # lift | spectrum | infoclass | bell | ghz
    rule: rules/shift4.json # required for lift, spectrum, infoclass
    seed: 7
    out: runs/spectrum
    params:
      e_max: 3.14159

Paths are resolved relative to the config file.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .automaton import load_rule
from .errors import OntomatonError

KINDS = ("lift", "spectrum", "infoclass", "bell", "ghz")
RULE_KINDS = ("lift", "spectrum", "infoclass")
TOP_KEYS = ("kind", "rule", "seed", "out", "params")
MAX_SEED = 2**64 - 1

# name -> (type, minimum, default, kinds that accept it)
PARAMS: dict[str, tuple[type, Optional[float], Any, tuple[str, ...]]] = {
    "steps": (int, 0, 16, ("lift", "infoclass")),
    "trials": (int, 1, 20, ("lift",)),
    "phases": (str, None, "trivial", ("lift", "spectrum")),
    "e_max": (float, 0.0, None, ("spectrum",)),
    "grid": (int, 8, 256, ("bell",)),
    "points": (int, 2, 33, ("bell",)),
    "samples": (int, 1, 20000, ("bell",)),
    "angles": (list, None, None, ("bell",)),
    "n": (int, 1, 10000, ("ghz",)),
}
PHASE_POLICIES = ("trivial", "random")


class ConfigError(OntomatonError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


@dataclass
class ExperimentConfig:
    kind: str
    seed: int = 0
    out: Path = Path("out")
    rule: Optional[Path] = None
    params: dict = field(default_factory=dict)

    def param(self, name: str):
        return self.params.get(name, PARAMS[name][2])

    def echo(self) -> dict:
        return {
            "kind": self.kind,
            "rule": None if self.rule is None else str(self.rule),
            "seed": self.seed,
            "params": {k: self.params[k] for k in sorted(self.params)},
        }


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read ({exc.strerror})"]) from None
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        raise ConfigError([f"{where}: {getattr(exc, 'problem', None) or exc}"]) from None
    if doc is None:
        doc = {}
    if not isinstance(doc, dict):
        raise ConfigError([f"{path}: top level must be a mapping"])
    return doc


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def check_document(doc: dict, base: Path = Path(".")) -> list[str]:
    """Diagnostics for a raw config mapping; empty means valid. Rule files are parsed too."""
    diags: list[str] = []
    for key in doc:
        if key not in TOP_KEYS:
            diags.append(f"{key}: unknown key")
    kind = doc.get("kind")
    if kind not in KINDS:
        diags.append(f"kind: must be one of {', '.join(KINDS)}, got {kind!r}")
        kind = None
    seed = doc.get("seed", 0)
    if not _is_int(seed) or not 0 <= seed <= MAX_SEED:
        diags.append(f"seed: must be an integer in 0..2^64-1, got {seed!r}")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        diags.append(f"out: must be a path string, got {out!r}")

    rule = doc.get("rule")
    if kind in RULE_KINDS and rule is None:
        diags.append(f"rule: required for kind {kind}")
    if rule is not None:
        if kind is not None and kind not in RULE_KINDS:
            diags.append(f"rule: not used by kind {kind}")
        elif not isinstance(rule, str):
            diags.append(f"rule: must be a path string, got {rule!r}")
        else:
            try:
                load_rule(base / rule)
            except OSError as exc:
                diags.append(f"rule: cannot read {base / rule} ({exc.strerror})")
            except OntomatonError as exc:
                diags.append(f"rule: {exc}")

    params = doc.get("params", {}) or {}
    if not isinstance(params, dict):
        diags.append("params: must be a mapping")
        params = {}
    for name, value in params.items():
        where = f"params.{name}"
        if name not in PARAMS:
            diags.append(f"{where}: unknown key")
            continue
        typ, minimum, _, kinds = PARAMS[name]
        if kind is not None and kind not in kinds:
            diags.append(f"{where}: not used by kind {kind}")
            continue
        if typ is int:
            if not _is_int(value):
                diags.append(f"{where}: must be an integer, got {value!r}")
            elif value < minimum:
                diags.append(f"{where}: must be >= {minimum}, got {value}")
        elif typ is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                diags.append(f"{where}: must be a number, got {value!r}")
            elif not value >= minimum:
                diags.append(f"{where}: must be >= {minimum}, got {value}")
        elif name == "phases":
            if value not in PHASE_POLICIES:
                diags.append(f"{where}: must be one of {', '.join(PHASE_POLICIES)}, got {value!r}")
        elif name == "angles":
            if (
                not isinstance(value, list)
                or len(value) != 4
                or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
            ):
                diags.append(f"{where}: must be four numbers [a, a2, b, b2]")
    return diags


def build_config(doc: dict, base: Path = Path(".")) -> ExperimentConfig:
    diags = check_document(doc, base)
    if diags:
        raise ConfigError(diags)
    params = dict(doc.get("params") or {})
    if "e_max" in params:
        params["e_max"] = float(params["e_max"])
    if "angles" in params:
        params["angles"] = [float(x) for x in params["angles"]]
    out = doc.get("out")
    return ExperimentConfig(
        kind=doc["kind"],
        seed=int(doc.get("seed", 0)),
        out=base / out if out is not None else Path("out") / doc["kind"],
        rule=base / doc["rule"] if doc.get("rule") is not None else None,
        params=params,
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    return build_config(read_config_file(path), path.parent)
