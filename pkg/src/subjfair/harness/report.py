"""Audit orchestration and report emission.

``audit_run`` wires the full pipeline for one run file: validation,
clustering, both aggregation stages, fairness verdicts, obligations, the
explanation-level verdict, and the procedural check. Reports come in a
machine form (a plain dict, dumped as sorted JSON) and a human-readable
text form; both are deterministic for a given run file and engine version.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .. import __version__
from ..aggregation import AggregationStrategy, run_pipeline
from ..audit import (
    FAIR,
    ISF_SATISFIED,
    JUSTIFIABLE_BY_GROUP,
    NEITHER,
    NO_CONFLICT,
    RELAXED_ONLY,
    SYSTEM_SUSPECT,
    AuditReport,
    audit_population,
)
from ..baselines import dwork_if_check, statistical_parity_gap, subjective_if_check
from ..clustering import ClusterFamily, build_cluster_family
from ..core import AuditParams, InputError, ValidationReport, validate_population
from ..explanations import (
    AcceptanceLedger,
    AuditConfig,
    ExplanationObligation,
    ProceduralReport,
    derive_obligations,
    fairness_through_explanations,
    procedural_check,
)
from .runfile import AuditRunFile

REPORT_SCHEMA = "subjfair-report/1"

#: Report flag raised whenever any individual's conflict is SYSTEM_SUSPECT.
SYSTEM_REVIEW_FLAG = "ADMS recommendation requires review"


@dataclass(frozen=True)
class RunResult:
    """Everything one audit run produced."""

    run: AuditRunFile
    validation: ValidationReport
    family: ClusterFamily
    report: AuditReport
    obligations: tuple[ExplanationObligation, ...]
    explanation_fairness: str
    procedural: ProceduralReport


def audit_run(
    run: AuditRunFile,
    params: AuditParams | None = None,
    strategy: AggregationStrategy | None = None,
) -> RunResult:
    """Run the full audit for a run file.

    ``params``/``strategy`` override the file's own settings (used by
    parameter sweeps); the strategy's theta is kept aligned with params.

    Raises:
        InputError: if the inputs break the model invariants.
    """
    params = params or run.params
    if strategy is None:
        strategy = run.strategy
        if strategy.theta != params.theta:
            strategy = AggregationStrategy(
                kind=strategy.kind, theta=params.theta, veto_rules=strategy.veto_rules
            )

    validation = validate_population(
        run.population, run.perceptions, run.recommendations
    )
    if not validation.ok:
        raise InputError(
            "invalid audit inputs: " + "; ".join(validation.messages()[:5])
        )

    family = build_cluster_family(run.population, run.perceptions, params.delta)
    set_recs, decisions = run_pipeline(
        run.population, family, run.recommendations, strategy
    )
    report = audit_population(
        run.population, family, run.recommendations, params, set_recs, decisions, strategy
    )
    obligations = tuple(derive_obligations(report))
    ledger = run.ledger if run.ledger is not None else AcceptanceLedger()
    explanation_fairness = fairness_through_explanations(obligations, ledger)
    procedural = procedural_check(
        AuditConfig(
            params=params,
            strategy=strategy,
            validation_clean=validation.ok,
            ethicality_asserted=bool(run.metadata.get("ethicality_asserted", False)),
        )
    )
    return RunResult(
        run=run,
        validation=validation,
        family=family,
        report=report,
        obligations=obligations,
        explanation_fairness=explanation_fairness,
        procedural=procedural,
    )


def build_audit_doc(result: RunResult) -> dict[str, Any]:
    """The audit core as a plain document, comparable field-for-field with
    the brute-force oracle's output."""
    run = result.run
    report = result.report
    ids = list(run.population.individuals)
    scenarios = report.scenarios
    conflicts = report.conflicts
    return {
        "schema": REPORT_SCHEMA,
        "purpose": run.purpose,
        "n": len(ids),
        "params": {
            "delta": report.params.delta,
            "epsilon": report.params.epsilon,
            "theta": report.params.theta,
        },
        "strategy": {
            "kind": report.strategy.kind,
            "theta": report.strategy.theta,
            "veto_rules": [
                {
                    "attribute": r.attribute,
                    "op": r.op,
                    "value": r.operand,
                    "vetoes": r.vetoed_label,
                }
                for r in report.strategy.veto_rules
            ],
        },
        "clusters": {
            x: sorted(result.family.cluster_of(x).members) for x in ids
        },
        "membership": {i: sorted(result.family.containing(i)) for i in ids},
        "set_rec": {x: int(report.set_recommendations[x].value) for x in ids},
        "dec": {i: int(report.decisions[i].value) for i in ids},
        "verdicts": {
            x: {
                "isf": report.verdicts[x].isf,
                "relaxed_isf": report.verdicts[x].relaxed_isf,
                "satisfaction_ratio": report.verdicts[x].satisfaction_ratio,
            }
            for x in ids
        },
        "scenarios": dict(scenarios),
        "conflicts": dict(conflicts),
        "sf": {"verdict": report.sf, "dissenters": sorted(report.dissenters)},
        "counts": {
            "isf_fair": sum(1 for x in ids if report.verdicts[x].isf == FAIR),
            "relaxed_isf_fair": sum(
                1 for x in ids if report.verdicts[x].relaxed_isf == FAIR
            ),
        },
        "scenario_histogram": {
            label: sum(1 for x in ids if scenarios[x] == label)
            for label in (ISF_SATISFIED, RELAXED_ONLY, NEITHER)
        },
        "conflict_histogram": {
            label: sum(1 for x in ids if conflicts[x] == label)
            for label in (NO_CONFLICT, JUSTIFIABLE_BY_GROUP, SYSTEM_SUSPECT)
        },
        "obligations": [
            {
                "individual": o.individual,
                "kind": o.kind,
                "procedural_tags": sorted(o.procedural_tags),
            }
            for o in result.obligations
        ],
    }


def build_report_doc(
    result: RunResult,
    group_attr: str | None = None,
    include_baselines: bool = False,
) -> dict[str, Any]:
    """The full report document: audit core plus validation, explanation
    state, procedural tags, review flags, and optional baseline metrics."""
    doc = build_audit_doc(result)
    doc["engine_version"] = __version__
    doc["validation"] = {
        "ok": result.validation.ok,
        "violations": result.validation.messages(),
    }
    doc["explanation_fairness"] = result.explanation_fairness
    if result.run.ledger is not None:
        doc["ledger"] = result.run.ledger.as_rows()
    doc["procedural"] = {
        "satisfied": sorted(result.procedural.satisfied),
        "provenance": dict(sorted(result.procedural.provenance.items())),
    }
    flags = []
    if doc["conflict_histogram"][SYSTEM_SUSPECT] > 0:
        flags.append(SYSTEM_REVIEW_FLAG)
    doc["flags"] = flags

    baselines: dict[str, Any] = {}
    if group_attr is not None:
        parity = statistical_parity_gap(
            result.report.decisions, result.run.population, group_attr
        )
        baselines["statistical_parity"] = {
            "attribute": parity.attribute,
            "rates": {str(g): r for g, r in sorted(parity.rates.items(), key=lambda kv: str(kv[0]))},
            "gap": parity.gap,
        }
    if include_baselines and result.run.baseline is not None:
        scores = result.run.baseline.scores
        distances = result.run.baseline.distances
        baselines["objective_if"] = [
            {"pair": list(v.pair), "score_gap": v.score_gap, "distance": v.distance}
            for v in dwork_if_check(scores, distances)
        ]
        baselines["subjective_if"] = [
            {
                "observer": v.observer,
                "pair": list(v.pair),
                "score_gap": v.score_gap,
                "perceived_distance": v.perceived_distance,
            }
            for v in subjective_if_check(scores, distances)
        ]
    if baselines:
        doc["baselines"] = baselines
    return doc


def dumps_doc(doc: dict[str, Any]) -> str:
    """Canonical JSON form: deterministic bytes for a deterministic doc."""
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def render_text(doc: dict[str, Any]) -> str:
    """Human-readable report, ordered by individual id throughout."""
    lines = [
        f"subjective-fairness audit: purpose {doc['purpose']!r}, n={doc['n']}",
        "params: delta={delta} epsilon={epsilon} theta={theta}".format(**doc["params"])
        + f", strategy={doc['strategy']['kind']}",
    ]
    if "validation" in doc:
        state = "clean" if doc["validation"]["ok"] else "INVALID"
        lines.append(f"validation: {state}")
        for message in doc["validation"]["violations"]:
            lines.append(f"  ! {message}")

    sf = doc["sf"]
    if sf["dissenters"]:
        lines.append(
            f"SF: {sf['verdict']} ({len(sf['dissenters'])} dissenters: "
            + ", ".join(sf["dissenters"])
            + ")"
        )
    else:
        lines.append(f"SF: {sf['verdict']}, 0 dissenters")
    lines.append(
        f"ISF fair: {doc['counts']['isf_fair']}/{doc['n']}; "
        f"relaxed ISF fair: {doc['counts']['relaxed_isf_fair']}/{doc['n']}"
    )
    lines.append(
        "scenarios: "
        + " ".join(f"{k}={v}" for k, v in doc["scenario_histogram"].items())
    )
    lines.append(
        "conflicts: "
        + " ".join(f"{k}={v}" for k, v in doc["conflict_histogram"].items())
    )
    lines.append(
        "set recommendations: "
        + " ".join(f"{i}={doc['set_rec'][i]}" for i in sorted(doc["set_rec"]))
    )
    lines.append(
        "decisions: " + " ".join(f"{i}={doc['dec'][i]}" for i in sorted(doc["dec"]))
    )

    lines.append(f"obligations: {len(doc['obligations'])}")
    for o in doc["obligations"]:
        tags = ",".join(o["procedural_tags"])
        lines.append(f"  - {o['individual']}: {o['kind']} [{tags}]")
    if "explanation_fairness" in doc:
        lines.append(f"explanation fairness: {doc['explanation_fairness']}")
    if "procedural" in doc:
        satisfied = ", ".join(doc["procedural"]["satisfied"]) or "none"
        lines.append(f"procedural rules satisfied: {satisfied}")
    for flag in doc.get("flags", []):
        lines.append(f"flag: {flag}")

    baselines = doc.get("baselines", {})
    if "statistical_parity" in baselines:
        parity = baselines["statistical_parity"]
        rates = " ".join(f"{g}={r:.4f}" for g, r in parity["rates"].items())
        lines.append(
            f"statistical parity on {parity['attribute']!r}: {rates} "
            f"(gap {parity['gap']:.4f})"
        )
    if "objective_if" in baselines:
        lines.append(f"objective IF violations: {len(baselines['objective_if'])}")
        for v in baselines["objective_if"]:
            lines.append(
                f"  - ({v['pair'][0]}, {v['pair'][1]}): gap {v['score_gap']:.4f} "
                f"> distance {v['distance']:.4f}"
            )
    if "subjective_if" in baselines:
        lines.append(f"subjective IF violations: {len(baselines['subjective_if'])}")
        for v in baselines["subjective_if"]:
            lines.append(
                f"  - observer {v['observer']} on ({v['pair'][0]}, {v['pair'][1]}): "
                f"gap {v['score_gap']:.4f} > perceived {v['perceived_distance']:.4f}"
            )
    return "\n".join(lines) + "\n"
