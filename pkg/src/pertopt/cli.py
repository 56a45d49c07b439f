"""Command-line front end: run, scan, tuneup, validate, version.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
Configs are JSON files with nested sections (objective / estimator /
optimizer / schedules); see the README for worked examples.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .experiments import (
    ConfigError,
    experiment_config_from_dict,
    landscape_scan,
    run_experiment,
    scan_config_from_dict,
    tuneup_configs_from_dict,
    two_stage_tuneup,
    write_scan_csv,
)
from .schedules import validate_schedules
from .experiments import _parse_schedules


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return config


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = experiment_config_from_dict(_load_config(args.config))
    if args.seed is not None:
        cfg = replace(cfg, base_seed=args.seed)
    if args.repeats is not None:
        cfg = replace(cfg, repeats=args.repeats)
    result = run_experiment(cfg, args.out)
    for path in result.trajectory_paths:
        print(path)
    print(result.summary_path)
    if result.failures:
        print(f"{len(result.failures)} run(s) failed; summary covers the rest")
    return 0


def _cmd_scan(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    scan = scan_config_from_dict(config)
    grid = landscape_scan(scan)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{config.get('name', 'scan')}_scan.csv"
    write_scan_csv(path, scan, grid)
    print(path)
    return 0


def _cmd_tuneup(args: argparse.Namespace) -> int:
    rough, fine, final_rb = tuneup_configs_from_dict(_load_config(args.config))
    if args.seed is not None:
        rough = replace(rough, base_seed=args.seed)
        fine = replace(fine, base_seed=args.seed)
    result = two_stage_tuneup(rough, fine, args.out, final_rb)
    print(f"best rough loss: {result.best_rough[1]!r} at iteration {result.best_rough[0]}")
    print(f"best fine loss: {result.best_fine[1]!r} at iteration {result.best_fine[0]}")
    print(f"interleaved fidelity: {result.interleaved_fidelity!r}")
    print(f"direct fidelity: {result.direct_fidelity!r}")
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    section = config.get("schedules", config)
    if not isinstance(section, dict):
        raise ConfigError("schedules section must be an object")
    schedules = _parse_schedules(section)
    report = validate_schedules(schedules)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.name}: {check.detail}")
    if report.all_passed:
        print("all conditions satisfied")
    else:
        n = len(report.failed())
        print(f"{n} condition(s) failed (advisory; runs are not blocked)")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pertopt",
        description="Zeroth-order pulse-calibration experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured experiment")
    p_run.add_argument("--config", required=True, help="JSON config path")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--seed", type=int, default=None, help="override base seed")
    p_run.add_argument("--repeats", type=int, default=None, help="override repeats")
    p_run.set_defaults(func=_cmd_run)

    p_scan = sub.add_parser("scan", help="two-parameter landscape scan")
    p_scan.add_argument("--config", required=True)
    p_scan.add_argument("--out", required=True)
    p_scan.set_defaults(func=_cmd_scan)

    p_tune = sub.add_parser("tuneup", help="two-stage gate tuneup")
    p_tune.add_argument("--config", required=True)
    p_tune.add_argument("--out", required=True)
    p_tune.add_argument("--seed", type=int, default=None, help="override both stage seeds")
    p_tune.set_defaults(func=_cmd_tuneup)

    p_val = sub.add_parser("validate", help="schedule convergence report")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(func=_cmd_validate)

    p_ver = sub.add_parser("version", help="print the package version")
    p_ver.set_defaults(func=lambda args: print(f"pertopt {__version__}") or 0)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
