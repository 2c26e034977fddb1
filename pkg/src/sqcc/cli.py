"""Command line front end.

    sqcc sweep --config reference.json [--mode analytic|montecarlo|both] [--seed N]
               [--out PATH] [--format csv|json] [--workers N]
    sqcc validate --config val.json --trials N --seed N [--out PATH]
    sqcc print-defaults

Exit codes: 0 success, 1 a validation check failed, 2 invalid input,
3 runtime or numerical error, 4 insufficient statistical power.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .core import DomainError, NumericalPhysicalityError, StatisticalPowerError
from .sweep import FORMATS, MODES, SweepSpec, render, run_sweep, validate_campaign

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_RUNTIME, EXIT_POWER = 0, 1, 2, 3, 4


def _load_spec(path, **overrides) -> SweepSpec:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise DomainError(f"cannot read config {path}: {e}") from e
    if not isinstance(data, dict):
        raise DomainError("config must be a JSON object")
    spec = SweepSpec.from_dict(data)
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return replace(spec, **overrides) if overrides else spec


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as e:
        raise DomainError(f"cannot write {out}: {e}") from e


def cmd_sweep(args):
    spec = _load_spec(args.config, mode=args.mode, seed=args.seed, output=args.out,
                      format=args.format, workers=args.workers, trials=args.trials)
    rows = run_sweep(spec)
    _emit(render(spec, rows), spec.output)
    return EXIT_OK


def cmd_validate(args):
    spec = _load_spec(args.config, trials=args.trials, seed=args.seed, mode="montecarlo")
    report = validate_campaign(spec, fault_v_el=args.inject_v_el_fault)
    _emit(json.dumps(report, indent=2) + "\n", args.out)
    return {"pass": EXIT_OK, "fail": EXIT_CHECK_FAILED}.get(report["status"], EXIT_POWER)


def cmd_print_defaults(args):
    d = SweepSpec().to_dict()
    for k in ("output", "workers", "format"):
        d.pop(k)
    sys.stdout.write(json.dumps(d, indent=2) + "\n")
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="sqcc", description=__doc__.split("\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sweep", help="distance x noise key-rate sweep")
    sp.add_argument("--config", required=True)
    sp.add_argument("--mode", choices=MODES)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=FORMATS)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--trials", type=int)
    sp.set_defaults(func=cmd_sweep)

    vp = sub.add_parser("validate", help="Monte Carlo vs closed-form consistency checks")
    vp.add_argument("--config", required=True)
    vp.add_argument("--trials", type=int, required=True)
    vp.add_argument("--seed", type=int, required=True)
    vp.add_argument("--out")
    vp.add_argument("--inject-v-el-fault", type=float, default=0.0, metavar="FRAC",
                    help="relative error added to v_el on the analytic side only (fault injection)")
    vp.set_defaults(func=cmd_validate)

    pp = sub.add_parser("print-defaults", help="emit the reference configuration template")
    pp.set_defaults(func=cmd_print_defaults)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except StatisticalPowerError as e:
        print(f"sqcc: insufficient statistical power: {e}", file=sys.stderr)
        return EXIT_POWER
    except (DomainError, TypeError) as e:
        print(f"sqcc: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalPhysicalityError, ArithmeticError, RuntimeError) as e:
        print(f"sqcc: runtime error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
