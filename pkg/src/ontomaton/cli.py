"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 runtime or numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .config import KINDS, ConfigError, build_config, check_document, read_config_file
from .errors import OntomatonError
from .runner import run

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

# CLI flag -> params key
_PARAM_FLAGS = {"grid": "grid", "steps": "steps", "n": "n", "e_max": "e_max", "trials": "trials", "points": "points"}


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ontomaton", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", type=Path, help="YAML/JSON experiment config")
        sp.add_argument("--rule", type=Path, help="rule file (overrides config)")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", type=Path, help="output directory")
        sp.add_argument("--grid", type=int)
        sp.add_argument("--steps", type=int)
        sp.add_argument("--n", type=int, help="number of runs (ghz)")
        sp.add_argument("--e-max", dest="e_max", type=float, help="energy cut-off (spectrum)")
        sp.add_argument("--trials", type=int)
        sp.add_argument("--points", type=int, help="curve points (bell)")
    v = sub.add_parser("validate", help="check a config and its rule file without running")
    v.add_argument("config_path", nargs="?", type=Path)
    v.add_argument("--config", type=Path)
    return p


def _document(args, kind: str) -> tuple[dict, Path]:
    if args.config is not None:
        doc = read_config_file(args.config)
        base = args.config.parent
        doc.setdefault("kind", kind)
        if doc["kind"] != kind:
            raise ConfigError([f"kind: config says {doc['kind']!r} but subcommand is {kind!r}"])
    else:
        doc, base = {"kind": kind}, Path(".")
    # Flag paths are relative to the working directory, not the config.
    if args.rule is not None:
        doc["rule"] = str(args.rule.resolve())
    if args.out is not None:
        doc["out"] = str(args.out.resolve())
    if args.seed is not None:
        doc["seed"] = args.seed
    params = dict(doc.get("params") or {})
    for flag, key in _PARAM_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            params[key] = value
    if params:
        doc["params"] = params
    return doc, base


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "validate":
        path = args.config or args.config_path
        if path is None:
            print("validate: a config path is required", file=sys.stderr)
            return EXIT_INVALID
        try:
            diags = check_document(read_config_file(path), Path(path).parent)
        except ConfigError as exc:
            diags = exc.diagnostics
        for d in diags:
            print(d)
        return EXIT_INVALID if diags else EXIT_OK

    try:
        doc, base = _document(args, args.command)
        cfg = build_config(doc, base)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return EXIT_INVALID
    try:
        manifest = run(cfg)
    except (OntomatonError, OSError, ArithmeticError) as exc:
        print(f"{cfg.kind} failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"{cfg.kind}: wrote {len(manifest.outputs)} files to {cfg.out}")
    for entry in manifest.outputs:
        print(f"  {entry['path']}  {entry['sha256'][:16]}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
