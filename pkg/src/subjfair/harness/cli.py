"""Command-line interface.

Subcommands: validate, audit, decide, baseline, simulate, oracle, report.
Exit codes: 0 clean, 1 audit found the process SF-unfair (with --strict) or
an oracle mismatch, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Any, Sequence

from .. import __version__
from ..aggregation import STRATEGY_KINDS, AggregationStrategy
from ..audit import UNFAIR
from ..core import AuditParams, InputError, validate_population
from .oracle import DEFAULT_BOUND, brute_force_oracle
from .report import audit_run, build_audit_doc, build_report_doc, dumps_doc, render_text
from .runfile import AuditRunFile, load_run, save_run
from .synth import SynthProfile, generate_population

EXIT_OK = 0
EXIT_UNFAIR = 1
EXIT_INPUT = 2


def _add_common(parser: argparse.ArgumentParser, with_params: bool = True) -> None:
    parser.add_argument("--input", required=True, help="audit-run file (JSON)")
    parser.add_argument(
        "--format", choices=("text", "json"), default="text", help="output form"
    )
    if with_params:
        parser.add_argument("--delta", type=float, help="override cluster threshold")
        parser.add_argument("--epsilon", type=float, help="override treatment threshold")
        parser.add_argument("--theta", type=float, help="override majority threshold")
        parser.add_argument(
            "--strategy", choices=STRATEGY_KINDS, help="override aggregation strategy"
        )


def _overridden(run: AuditRunFile, args: argparse.Namespace) -> tuple[AuditParams, AggregationStrategy]:
    params = AuditParams(
        delta=run.params.delta if args.delta is None else args.delta,
        epsilon=run.params.epsilon if args.epsilon is None else args.epsilon,
        theta=run.params.theta if args.theta is None else args.theta,
    )
    kind = run.strategy.kind if args.strategy is None else args.strategy
    rules = run.strategy.veto_rules if kind == "veto" else ()
    strategy = AggregationStrategy(kind=kind, theta=params.theta, veto_rules=rules)
    return params, strategy


def _emit(doc: dict[str, Any], fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(dumps_doc(doc))
    else:
        sys.stdout.write(render_text(doc))


def _cmd_validate(args: argparse.Namespace) -> int:
    run = load_run(args.input, validate=False)
    report = validate_population(run.population, run.perceptions, run.recommendations)
    if args.format == "json":
        doc = {
            "ok": report.ok,
            "violations": [
                {"code": v.code, "where": v.where, "message": v.message}
                for v in report
            ],
        }
        sys.stdout.write(dumps_doc(doc))
    else:
        if report.ok:
            sys.stdout.write("validation: clean\n")
        else:
            sys.stdout.write(f"validation: {len(report.violations)} violation(s)\n")
            for v in report:
                sys.stdout.write(f"  ! {v.where}: {v.message}\n")
    return EXIT_OK if report.ok else EXIT_INPUT


def _cmd_audit(args: argparse.Namespace) -> int:
    run = load_run(args.input)
    params, strategy = _overridden(run, args)
    result = audit_run(run, params, strategy)
    _emit(build_report_doc(result, group_attr=args.group_attr), args.format)
    if args.strict and result.report.sf == UNFAIR:
        return EXIT_UNFAIR
    return EXIT_OK


def _cmd_decide(args: argparse.Namespace) -> int:
    run = load_run(args.input)
    params, strategy = _overridden(run, args)
    result = audit_run(run, params, strategy)
    doc = build_audit_doc(result)
    if args.format == "json":
        _emit({"set_rec": doc["set_rec"], "dec": doc["dec"]}, "json")
    else:
        sys.stdout.write(
            "set recommendations: "
            + " ".join(f"{i}={doc['set_rec'][i]}" for i in sorted(doc["set_rec"]))
            + "\n"
        )
        sys.stdout.write(
            "decisions: "
            + " ".join(f"{i}={doc['dec'][i]}" for i in sorted(doc["dec"]))
            + "\n"
        )
    return EXIT_OK


def _cmd_baseline(args: argparse.Namespace) -> int:
    run = load_run(args.input)
    params, strategy = _overridden(run, args)
    result = audit_run(run, params, strategy)
    doc = build_report_doc(result, group_attr=args.group_attr, include_baselines=True)
    baselines = doc.get("baselines")
    if not baselines:
        raise InputError(
            "nothing to report: pass --group-attr or add a 'baseline' section to the run file"
        )
    if args.format == "json":
        _emit(baselines, "json")
    else:
        text = render_text(doc)
        keep = [
            line
            for line in text.splitlines()
            if line.startswith(("statistical parity", "objective IF", "subjective IF", "  - "))
        ]
        sys.stdout.write("\n".join(keep) + "\n")
    return EXIT_OK


def _parse_grid(raw: str | None, fallback: float) -> list[float]:
    if raw is None:
        return [fallback]
    try:
        return [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise InputError(f"expected a comma-separated list of numbers, got {raw!r}") from None


def _sweep_rows(run: AuditRunFile, args: argparse.Namespace) -> list[dict[str, Any]]:
    rows = []
    for delta in _parse_grid(args.deltas, run.params.delta):
        for epsilon in _parse_grid(args.epsilons, run.params.epsilon):
            for theta in _parse_grid(args.thetas, run.params.theta):
                params = AuditParams(delta=delta, epsilon=epsilon, theta=theta)
                strategy = AggregationStrategy(
                    kind=run.strategy.kind,
                    theta=theta,
                    veto_rules=run.strategy.veto_rules,
                )
                doc = build_audit_doc(audit_run(run, params, strategy))
                metrics: dict[str, float] = {
                    "sf_fair": 1.0 if doc["sf"]["verdict"] == "fair" else 0.0,
                    "dissenters": float(len(doc["sf"]["dissenters"])),
                    "isf_fair": float(doc["counts"]["isf_fair"]),
                    "relaxed_isf_fair": float(doc["counts"]["relaxed_isf_fair"]),
                    "obligations": float(len(doc["obligations"])),
                    "positive_decision_rate": sum(doc["dec"].values()) / doc["n"],
                }
                for label, count in doc["scenario_histogram"].items():
                    metrics[f"scenario_{label}"] = float(count)
                for label, count in doc["conflict_histogram"].items():
                    metrics[f"conflict_{label}"] = float(count)
                for metric, value in metrics.items():
                    rows.append(
                        {
                            "delta": delta,
                            "epsilon": epsilon,
                            "theta": theta,
                            "metric": metric,
                            "value": value,
                        }
                    )
    return rows


def _cmd_simulate(args: argparse.Namespace) -> int:
    if args.input is not None:
        run = load_run(args.input)
    else:
        manipulation = []
        for spec_str in args.manipulate or []:
            if ":" not in spec_str:
                raise InputError(
                    f"--manipulate expects AGENT:TARGET, got {spec_str!r}"
                )
            agent, target = spec_str.split(":", 1)
            manipulation.append((agent, target))
        profile = SynthProfile(
            n=args.n,
            cluster_density=args.density,
            base_positive_rate=args.rate,
            manipulation=tuple(manipulation),
            seed=args.seed,
        )
        run = generate_population(profile)

    if args.output is not None:
        save_run(run, args.output)
        sys.stdout.write(f"wrote {args.output}\n")

    if args.sweep:
        rows = _sweep_rows(run, args)
        if args.format == "json":
            sys.stdout.write(json.dumps(rows, indent=2, sort_keys=True) + "\n")
        else:
            buffer = io.StringIO()
            writer = csv.DictWriter(
                buffer, fieldnames=["delta", "epsilon", "theta", "metric", "value"]
            )
            writer.writeheader()
            writer.writerows(rows)
            sys.stdout.write(buffer.getvalue())
    elif args.output is None:
        sys.stdout.write(render_text(build_report_doc(audit_run(run))))
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    run = load_run(args.input)
    engine_doc = build_audit_doc(audit_run(run))
    oracle_doc = brute_force_oracle(run, bound=args.bound)
    if engine_doc == oracle_doc:
        sys.stdout.write("oracle: match\n")
        return EXIT_OK
    sys.stdout.write("oracle: MISMATCH\n")
    for key in sorted(set(engine_doc) | set(oracle_doc)):
        if engine_doc.get(key) != oracle_doc.get(key):
            sys.stdout.write(f"  field {key!r}:\n")
            sys.stdout.write(f"    engine: {json.dumps(engine_doc.get(key), sort_keys=True)}\n")
            sys.stdout.write(f"    oracle: {json.dumps(oracle_doc.get(key), sort_keys=True)}\n")
    return EXIT_UNFAIR


def _cmd_report(args: argparse.Namespace) -> int:
    run = load_run(args.input)
    params, strategy = _overridden(run, args)
    result = audit_run(run, params, strategy)
    doc = build_report_doc(result, group_attr=args.group_attr, include_baselines=True)
    _emit(doc, args.format)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subjfair",
        description="Subjective-fairness auditing and decision aggregation",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a run file against the model invariants")
    _add_common(p, with_params=False)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("audit", help="full fairness audit of a run file")
    _add_common(p)
    p.add_argument("--group-attr", help="also report statistical parity on this attribute")
    p.add_argument(
        "--strict", action="store_true", help="exit 1 when the process is SF-unfair"
    )
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("decide", help="run the two-stage decision pipeline only")
    _add_common(p)
    p.set_defaults(func=_cmd_decide)

    p = sub.add_parser("baseline", help="classical fairness baselines")
    _add_common(p)
    p.add_argument("--group-attr", help="statistical parity attribute")
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("simulate", help="generate synthetic runs and parameter sweeps")
    p.add_argument("--input", help="sweep an existing run file instead of generating")
    p.add_argument("--n", type=int, default=8, help="population size")
    p.add_argument("--density", type=float, default=0.3, help="off-diagonal perception density")
    p.add_argument("--rate", type=float, default=0.5, help="base positive recommendation rate")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument(
        "--manipulate",
        action="append",
        metavar="AGENT:TARGET",
        help="add a manipulative agent targeting an owner's cluster (repeatable)",
    )
    p.add_argument("--output", help="write the generated run file here")
    p.add_argument("--sweep", action="store_true", help="emit a parameter-sweep table")
    p.add_argument("--deltas", help="comma-separated delta grid")
    p.add_argument("--epsilons", help="comma-separated epsilon grid")
    p.add_argument("--thetas", help="comma-separated theta grid")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("oracle", help="compare the engine against the brute-force oracle")
    p.add_argument("--input", required=True)
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND, help="max population for the oracle")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("report", help="emit the full audit report")
    _add_common(p)
    p.add_argument("--group-attr", help="also report statistical parity on this attribute")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, FileNotFoundError, KeyError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
