"""Audit-run files: one self-contained JSON document per audit.

A run file carries everything needed to reproduce a report byte-for-byte:
population, perception table, recommendations, parameters, strategy, the
optional acceptance ledger, optional baseline-auditor inputs, and run
metadata. Field names mirror the engine's symbols (sim, rec, delta,
epsilon, theta) so files stay traceable next to the definitions.

``save_run`` writes a canonical form (sorted keys, two-space indent);
loading and re-saving any valid file is idempotent and preserves content.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..aggregation import (
    STRATEGY_KINDS,
    AggregationStrategy,
    VetoRule,
    validate_veto_rules,
)
from ..baselines import ObjectiveDistanceTable
from ..core import (
    BINARY,
    SCORE,
    AuditParams,
    InputError,
    Outcome,
    PerceptionTable,
    Population,
    RecommendationVector,
    validate_population,
)
from ..explanations import AcceptanceLedger

SCHEMA = "subjfair-run/1"


class RunFileError(InputError):
    """A run file is malformed, violates the schema, or fails validation."""

    def __init__(self, message: str, location: str | None = None) -> None:
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


@dataclass(frozen=True)
class BaselineInputs:
    """Optional inputs for the classical baseline auditors."""

    scores: Mapping[str, float]
    distances: ObjectiveDistanceTable

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "scores", {str(i): float(v) for i, v in self.scores.items()}
        )


@dataclass(frozen=True)
class AuditRunFile:
    """One audit run: inputs, parameters, and acceptance state."""

    population: Population
    perceptions: PerceptionTable
    recommendations: RecommendationVector
    params: AuditParams
    strategy: AggregationStrategy
    ledger: AcceptanceLedger | None = None
    baseline: BaselineInputs | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def purpose(self) -> str:
        return self.recommendations.purpose

    @property
    def n(self) -> int:
        return len(self.population)


def _require(doc: Mapping[str, Any], key: str, location: str = "") -> Any:
    if key not in doc:
        raise RunFileError(f"missing required field {key!r}", location or key)
    return doc[key]


def _expect_object(value: Any, location: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise RunFileError("expected an object", location)
    return value


def _expect_number(value: Any, location: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RunFileError(f"expected a number, got {value!r}", location)
    return float(value)


def _parse_outcome(value: Any, kind: str, location: str) -> Outcome:
    number = _expect_number(value, location)
    try:
        return Outcome(number, kind)
    except InputError as exc:
        raise RunFileError(str(exc), location) from None


def _parse_params(doc: Mapping[str, Any]) -> AuditParams:
    section = _expect_object(_require(doc, "params"), "params")
    try:
        return AuditParams(
            delta=_expect_number(_require(section, "delta", "params.delta"), "params.delta"),
            epsilon=_expect_number(section.get("epsilon", 0.0), "params.epsilon"),
            theta=_expect_number(section.get("theta", 0.5), "params.theta"),
        )
    except InputError as exc:
        raise RunFileError(str(exc), "params") from None


def _parse_strategy(doc: Mapping[str, Any], params: AuditParams) -> AggregationStrategy:
    section = doc.get("strategy")
    if section is None:
        return AggregationStrategy(theta=params.theta)
    section = _expect_object(section, "strategy")
    kind = section.get("kind", "majority")
    if kind not in STRATEGY_KINDS:
        raise RunFileError(f"unknown strategy kind {kind!r}", "strategy.kind")
    rules = []
    for idx, rule in enumerate(section.get("veto_rules", [])):
        where = f"strategy.veto_rules[{idx}]"
        rule = _expect_object(rule, where)
        try:
            rules.append(
                VetoRule(
                    attribute=str(_require(rule, "attribute", where)),
                    op=str(_require(rule, "op", where)),
                    operand=_require(rule, "value", where),
                    vetoed_label=int(rule.get("vetoes", 1)),
                )
            )
        except (InputError, TypeError, ValueError) as exc:
            raise RunFileError(str(exc), where) from None
    try:
        return AggregationStrategy(
            kind=kind,
            theta=_expect_number(section.get("theta", params.theta), "strategy.theta"),
            veto_rules=tuple(rules),
        )
    except InputError as exc:
        raise RunFileError(str(exc), "strategy") from None


def _parse_baseline(doc: Mapping[str, Any]) -> BaselineInputs | None:
    section = doc.get("baseline")
    if section is None:
        return None
    section = _expect_object(section, "baseline")
    scores = {
        str(i): _expect_number(v, f"baseline.scores.{i}")
        for i, v in _expect_object(_require(section, "scores", "baseline.scores"), "baseline.scores").items()
    }
    entries = {}
    for idx, row in enumerate(section.get("distances", [])):
        where = f"baseline.distances[{idx}]"
        if not (isinstance(row, list) and len(row) == 3):
            raise RunFileError("expected [x, y, distance]", where)
        entries[(str(row[0]), str(row[1]))] = _expect_number(row[2], where)
    overrides = {}
    for idx, row in enumerate(section.get("overrides", [])):
        where = f"baseline.overrides[{idx}]"
        if not (isinstance(row, list) and len(row) == 4):
            raise RunFileError("expected [observer, x, y, distance]", where)
        overrides[(str(row[0]), str(row[1]), str(row[2]))] = _expect_number(row[3], where)
    try:
        return BaselineInputs(scores, ObjectiveDistanceTable(entries, overrides))
    except InputError as exc:
        raise RunFileError(str(exc), "baseline") from None


def from_dict(doc: Mapping[str, Any]) -> AuditRunFile:
    """Build a run from a parsed document, reporting the offending field
    on any schema violation."""
    doc = _expect_object(doc, "<document>")
    schema = _require(doc, "schema")
    if schema != SCHEMA:
        raise RunFileError(f"unsupported schema {schema!r}, expected {SCHEMA!r}", "schema")

    individuals = _require(doc, "individuals")
    if not isinstance(individuals, list) or not all(isinstance(i, str) for i in individuals):
        raise RunFileError("expected a list of id strings", "individuals")
    attributes = doc.get("attributes")
    if attributes is not None:
        attributes = _expect_object(attributes, "attributes")
        for individual, values in attributes.items():
            _expect_object(values, f"attributes.{individual}")
    try:
        population = Population(tuple(individuals), attributes)
    except InputError as exc:
        raise RunFileError(str(exc), "individuals") from None

    sim = _expect_object(_require(doc, "sim"), "sim")
    entries: dict[tuple[str, str], float] = {}
    for observer, row in sim.items():
        row = _expect_object(row, f"sim.{observer}")
        for target, value in row.items():
            entries[(observer, target)] = _expect_number(value, f"sim.{observer}.{target}")
    try:
        perceptions = PerceptionTable(entries, doc.get("provenance", "declared"))
    except InputError as exc:
        raise RunFileError(str(exc), "provenance") from None

    rec = _expect_object(_require(doc, "rec"), "rec")
    kind = rec.get("kind", "binary")
    if kind not in (BINARY, SCORE):
        raise RunFileError(f"unknown outcome kind {kind!r}", "rec.kind")
    values = {
        str(i): _parse_outcome(v, kind, f"rec.values.{i}")
        for i, v in _expect_object(_require(rec, "values", "rec.values"), "rec.values").items()
    }
    recommendations = RecommendationVector(str(_require(doc, "purpose")), values)

    params = _parse_params(doc)
    strategy = _parse_strategy(doc, params)

    ledger = None
    if "ledger" in doc:
        rows = _expect_object(doc["ledger"], "ledger")
        for individual, states in rows.items():
            _expect_object(states, f"ledger.{individual}")
        try:
            ledger = AcceptanceLedger.from_rows(rows)
        except InputError as exc:
            raise RunFileError(str(exc), "ledger") from None

    metadata = doc.get("metadata", {})
    if metadata:
        metadata = _expect_object(metadata, "metadata")

    return AuditRunFile(
        population=population,
        perceptions=perceptions,
        recommendations=recommendations,
        params=params,
        strategy=strategy,
        ledger=ledger,
        baseline=_parse_baseline(doc),
        metadata=metadata,
    )


def to_dict(run: AuditRunFile) -> dict[str, Any]:
    """Canonical document form of a run. Optional sections are omitted
    when empty."""
    doc: dict[str, Any] = {
        "schema": SCHEMA,
        "purpose": run.purpose,
        "individuals": list(run.population.individuals),
        "provenance": run.perceptions.provenance,
        "sim": {
            observer: dict(sorted(row.items()))
            for observer, row in sorted(run.perceptions.as_rows().items())
        },
        "rec": {
            "kind": run.recommendations.kind,
            "values": {
                i: (int(o.value) if o.is_binary else o.value)
                for i, o in sorted(run.recommendations.values.items())
            },
        },
        "params": {
            "delta": run.params.delta,
            "epsilon": run.params.epsilon,
            "theta": run.params.theta,
        },
        "strategy": {
            "kind": run.strategy.kind,
            "theta": run.strategy.theta,
            "veto_rules": [
                {
                    "attribute": r.attribute,
                    "op": r.op,
                    "value": r.operand,
                    "vetoes": r.vetoed_label,
                }
                for r in run.strategy.veto_rules
            ],
        },
    }
    if run.population.attributes:
        doc["attributes"] = {
            i: dict(sorted(v.items()))
            for i, v in sorted(run.population.attributes.items())
        }
    if run.ledger is not None and len(run.ledger):
        doc["ledger"] = run.ledger.as_rows()
    if run.baseline is not None:
        doc["baseline"] = {
            "scores": dict(sorted(run.baseline.scores.items())),
            "distances": [
                [x, y, d] for (x, y), d in sorted(run.baseline.distances.entries.items())
            ],
            "overrides": [
                [o, x, y, d]
                for (o, x, y), d in sorted(run.baseline.distances.subjective_overrides.items())
            ],
        }
    if run.metadata:
        doc["metadata"] = dict(run.metadata)
    return doc


def validate_run(run: AuditRunFile) -> None:
    """Raise a RunFileError on any model-invariant violation."""
    report = validate_population(run.population, run.perceptions, run.recommendations)
    if not report.ok:
        first = report.violations[0]
        raise RunFileError(
            "; ".join(report.messages()[:5])
            + (f" (+{len(report.violations) - 5} more)" if len(report.violations) > 5 else ""),
            first.where,
        )
    if run.strategy.veto_rules:
        try:
            validate_veto_rules(run.strategy.veto_rules, run.population)
        except InputError as exc:
            raise RunFileError(str(exc), "strategy.veto_rules") from None


def loads_run(text: str, validate: bool = True) -> AuditRunFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RunFileError(
            f"malformed JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}"
        ) from None
    run = from_dict(doc)
    if validate:
        validate_run(run)
    return run


def load_run(path: str | Path, validate: bool = True) -> AuditRunFile:
    """Load a run file; with ``validate`` (default) reject any file whose
    inputs break the model invariants."""
    return loads_run(Path(path).read_text(encoding="utf-8"), validate=validate)


def dumps_run(run: AuditRunFile) -> str:
    return json.dumps(to_dict(run), indent=2, sort_keys=True) + "\n"


def save_run(run: AuditRunFile, path: str | Path) -> Path:
    """Write the canonical form; re-saving a loaded file is idempotent."""
    path = Path(path)
    path.write_text(dumps_run(run), encoding="utf-8")
    return path
