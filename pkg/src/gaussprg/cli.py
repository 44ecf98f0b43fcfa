"""Command-line front end.

Subcommands map one-to-one onto harness experiments: ``sample`` (emit
generator output as JSONL), ``moments`` (design moment verification),
``fool`` (gap experiments), ``check cw|tail|deriv|prop4`` (verification
suites) and ``plan`` (print a generator plan with its seed accounting).
Exit status is 0 iff every configured flag passed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .generator import config_to_json, plan
from .harness import ExperimentSpec, run_experiment


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        return json.load(fh)


def _build_spec(kind: str, cfg: dict, args: argparse.Namespace) -> ExperimentSpec:
    samples = dict(cfg.get("samples", {}))
    if getattr(args, "samples", None) is not None:
        # --samples overrides the kind's main count knob
        key = {"sample": "count", "fool": "n_gen"}.get(kind, "n_samples")
        samples[key] = args.samples
    return ExperimentSpec(
        kind=kind,
        ensemble=dict(cfg.get("ensemble", {})),
        generator=dict(cfg.get("generator", {})),
        samples=samples,
        seed=args.seed,
        out=args.out,
        jobs=args.jobs,
    )


def _add_common(p: argparse.ArgumentParser, need_out: bool = True) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--seed", default="00", help="master seed (hex)")
    p.add_argument("--samples", type=int, default=None, help="sample-count override")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker count")
    p.add_argument("--out", required=need_out, help="output path")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gaussprg")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="print generator parameters and seed accounting")
    p_plan.add_argument("--config", required=True, help="JSON with n, d, k, epsilon[, ell_cap]")
    p_plan.add_argument("--out", help="write the plan JSON here instead of stdout")

    for kind, helptext in (
        ("sample", "emit generator samples as JSONL"),
        ("moments", "verify design moments"),
        ("fool", "fooling-gap experiment sweep"),
    ):
        p = sub.add_parser(kind, help=helptext)
        _add_common(p)

    p_check = sub.add_parser("check", help="verification suites")
    check_sub = p_check.add_subparsers(dest="check_kind", required=True)
    for kind in ("cw", "tail", "deriv", "prop4"):
        p = check_sub.add_parser(kind)
        _add_common(p)

    args = parser.parse_args(argv)

    if args.command == "plan":
        cfg = _load_config(args.config)
        config = plan(
            n=int(cfg["n"]),
            d=int(cfg["d"]),
            k=int(cfg["k"]),
            epsilon=float(cfg["epsilon"]),
            ell_cap=cfg.get("ell_cap"),
        )
        text = config_to_json(config)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
                fh.write("\n")
        else:
            print(text)
        return 0

    kind = args.check_kind if args.command == "check" else args.command
    spec = _build_spec(kind, _load_config(args.config), args)
    result = run_experiment(spec)
    return 0 if result.passed else 1


if __name__ == "__main__":
    sys.exit(main())
