"""Command-line front end: run a config file or a named figure preset."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_spec
from .experiments import (PRESETS, emit_csv, list_presets, run_preset, run_spec,
                          write_manifest)


def _parse_override(text: str) -> tuple[str, object]:
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(
            f"override must look like key=value, got {text!r}")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw   # bare strings (e.g. scheduler=mr) need no quoting
    return key, value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsoob",
        description="Simulate two operators sharing one reconfigurable reflector "
                    "and compare against closed-form predictions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment described by a JSON config file")
    p_run.add_argument("spec_file", help="JSON config; an empty file means all defaults")
    _common_flags(p_run)

    p_preset = sub.add_parser("preset", help="run a named figure preset")
    p_preset.add_argument("name", help="preset name, e.g. fig4 (see list-presets)")
    p_preset.add_argument("--override", action="append", default=[],
                          type=_parse_override, metavar="KEY=VALUE",
                          help="replace a config field; values are parsed as JSON "
                               "when possible (e.g. --override n_sweep=[16,64])")
    _common_flags(p_preset)

    sub.add_parser("list-presets", help="list preset names with one-line descriptions")
    return parser


def _common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default="results", metavar="DIR",
                   help="output directory for CSV and manifest (default: results)")
    p.add_argument("--seed", type=int, default=None,
                   help="replace the config's seed")
    p.add_argument("--analytic-only", action="store_true",
                   help="skip simulation; emit only the closed-form columns")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list-presets":
        for name, note in list_presets():
            print(f"{name:8s} {note}")
        return 0

    out = Path(args.out)
    if args.command == "preset":
        if args.name not in PRESETS:
            print(f"unknown preset {args.name!r}; available: "
                  f"{', '.join(sorted(PRESETS))}", file=sys.stderr)
            return 2
        rows = run_preset(args.name, overrides=dict(args.override) or None,
                          seed=args.seed, out_dir=out,
                          analytic_only=args.analytic_only)
        print(f"{args.name}: {len(rows)} rows -> {out / (args.name + '.csv')}")
        return 0

    # run <spec-file>
    try:
        spec = load_spec(args.spec_file)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    if args.seed is not None:
        import dataclasses
        spec = dataclasses.replace(spec, seed=args.seed)
    figure = Path(args.spec_file).stem or "run"
    rows, positions = run_spec(spec, figure=figure,
                               analytic_only=args.analytic_only)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, out / f"{figure}.csv")
    write_manifest(out / "manifest.json", figure, spec, positions)
    print(f"{figure}: {len(rows)} rows -> {out / (figure + '.csv')}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
