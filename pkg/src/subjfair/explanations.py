"""Explanation obligations and acceptance-driven fairness.

Every individual whose audit falls short of full individual fairness is owed
justifications. The engine tracks those obligations and the recorded
acceptance state of each one; it does not generate explanation content.
Acceptance is defeasible: ledger entries may be rewritten across rounds as
arguments land or fail, and the explanation-level verdict is re-derived from
the current ledger each time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from .aggregation import AggregationStrategy
from .audit import (
    FAIR,
    UNFAIR,
    ISF_SATISFIED,
    JUSTIFIABLE_BY_GROUP,
    SYSTEM_SUSPECT,
    AuditReport,
)
from .core import AuditParams, InputError

PENDING = "pending"
ACCEPTED = "accepted"
REJECTED = "rejected"
ACCEPTANCE_STATES = (ACCEPTED, REJECTED, PENDING)

#: Obligation kinds, in report order.
SYSTEM_RECOMMENDATION = "SYSTEM_RECOMMENDATION"
AGGREGATION_METHOD = "AGGREGATION_METHOD"
GROUP_IDENTIFICATION = "GROUP_IDENTIFICATION"
SYSTEM_ERROR_REVIEW = "SYSTEM_ERROR_REVIEW"
OBLIGATION_KINDS = (
    SYSTEM_RECOMMENDATION,
    AGGREGATION_METHOD,
    GROUP_IDENTIFICATION,
    SYSTEM_ERROR_REVIEW,
)

#: Procedural-fairness rule tags.
CONSISTENCY = "consistency"
ACCURACY = "accuracy"
ETHICALITY = "ethicality"
PROCEDURAL_TAGS = (CONSISTENCY, ACCURACY, ETHICALITY)

#: Which procedural rules each obligation kind speaks to. Justifying the
#: system's recommendation or reviewing a suspect one is about deciding on
#: the best available information; justifying the aggregation method is
#: about applying one uniform procedure; justifying a group identification
#: against the individual's self-perception is a question of values.
_KIND_TAGS: Mapping[str, frozenset[str]] = {
    SYSTEM_RECOMMENDATION: frozenset({ACCURACY}),
    AGGREGATION_METHOD: frozenset({CONSISTENCY}),
    GROUP_IDENTIFICATION: frozenset({ETHICALITY}),
    SYSTEM_ERROR_REVIEW: frozenset({ACCURACY}),
}


class LedgerIntegrityError(InputError):
    """A ledger entry references an obligation that was never issued."""


@dataclass(frozen=True)
class ExplanationObligation:
    """One justification the process owes one individual."""

    individual: str
    kind: str
    procedural_tags: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.kind not in OBLIGATION_KINDS:
            raise InputError(f"unknown obligation kind {self.kind!r}")
        object.__setattr__(self, "procedural_tags", frozenset(self.procedural_tags))

    @property
    def key(self) -> tuple[str, str]:
        return (self.individual, self.kind)


def derive_obligations(report: AuditReport) -> list[ExplanationObligation]:
    """Map each individual's scenario and conflict class to the
    justifications owed to them.

    Fully satisfied individuals (ISF holds, no conflict) are owed nothing.
    Anyone short of that is owed a justification of their own
    recommendation and of the aggregation method. A conflict that the final
    decision can justify additionally requires justifying the group
    identification; a conflict the decision cannot justify requires a
    review of the system's recommendation instead.

    Pure in the report: identical reports yield identical obligation
    lists, ordered by individual id.
    """
    obligations: list[ExplanationObligation] = []
    for individual in sorted(report.decisions.values):
        kinds: list[str] = []
        if report.scenarios[individual] != ISF_SATISFIED:
            kinds.append(SYSTEM_RECOMMENDATION)
            kinds.append(AGGREGATION_METHOD)
        if report.conflicts[individual] == JUSTIFIABLE_BY_GROUP:
            kinds.append(GROUP_IDENTIFICATION)
        elif report.conflicts[individual] == SYSTEM_SUSPECT:
            kinds.append(SYSTEM_ERROR_REVIEW)
        for kind in kinds:
            obligations.append(
                ExplanationObligation(individual, kind, _KIND_TAGS[kind])
            )
    return obligations


class AcceptanceLedger:
    """Mutable record of each obligation's acceptance state.

    States may be rewritten across explanation rounds; only the latest
    state per obligation counts. Unrecorded obligations are pending.
    """

    def __init__(
        self, entries: Mapping[tuple[str, str], str] | None = None
    ) -> None:
        self._entries: dict[tuple[str, str], str] = {}
        for (individual, kind), state in (entries or {}).items():
            self.record(individual, kind, state)

    def record(self, individual: str, kind: str, state: str) -> None:
        if state not in ACCEPTANCE_STATES:
            raise InputError(f"unknown acceptance state {state!r}")
        self._entries[(individual, kind)] = state

    def state(self, individual: str, kind: str) -> str:
        return self._entries.get((individual, kind), PENDING)

    def __iter__(self) -> Iterator[tuple[tuple[str, str], str]]:
        return iter(sorted(self._entries.items()))

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AcceptanceLedger):
            return NotImplemented
        return self._entries == other._entries

    def copy(self) -> "AcceptanceLedger":
        return AcceptanceLedger(dict(self._entries))

    def as_rows(self) -> dict[str, dict[str, str]]:
        """Nested ``{individual: {kind: state}}`` view."""
        rows: dict[str, dict[str, str]] = {}
        for (individual, kind), state in sorted(self._entries.items()):
            rows.setdefault(individual, {})[kind] = state
        return rows

    @classmethod
    def from_rows(cls, rows: Mapping[str, Mapping[str, str]]) -> "AcceptanceLedger":
        ledger = cls()
        for individual, states in rows.items():
            for kind, state in states.items():
                ledger.record(individual, kind, state)
        return ledger


def fairness_through_explanations(
    obligations: Iterable[ExplanationObligation],
    ledger: AcceptanceLedger,
) -> str:
    """Explanation-level verdict from the current acceptance states.

    Fair iff every obligation is accepted (vacuously fair with none --
    individuals owed nothing are presumed accepting). Unfair as soon as any
    obligation stands rejected. Pending otherwise.

    Raises:
        LedgerIntegrityError: if the ledger references an obligation that
            is not in ``obligations``.
    """
    keys = {o.key for o in obligations}
    for entry_key, _state in ledger:
        if entry_key not in keys:
            individual, kind = entry_key
            raise LedgerIntegrityError(
                f"ledger entry for ({individual}, {kind}) matches no obligation"
            )
    states = [ledger.state(*key) for key in keys]
    if any(s == REJECTED for s in states):
        return UNFAIR
    if all(s == ACCEPTED for s in states):
        return FAIR
    return PENDING


# --- procedural fairness -----------------------------------------------------

COMPUTED = "computed"
ASSERTED = "asserted"


@dataclass(frozen=True)
class AuditConfig:
    """Run metadata the procedural check inspects.

    parameter_overrides records any per-individual ad-hoc parameter sets an
    operator applied outside the uniform pipeline; a uniform run leaves it
    empty. ethicality cannot be computed and is operator-asserted.
    """

    params: AuditParams
    strategy: AggregationStrategy
    parameter_overrides: Mapping[str, AuditParams] = field(default_factory=dict)
    validation_clean: bool = True
    ethicality_asserted: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "parameter_overrides", dict(self.parameter_overrides))


@dataclass(frozen=True)
class ProceduralReport:
    satisfied: frozenset[str]
    provenance: Mapping[str, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "satisfied", frozenset(self.satisfied))
        object.__setattr__(self, "provenance", dict(self.provenance))


def procedural_check(config: AuditConfig) -> ProceduralReport:
    """Which procedural rules the run satisfies.

    consistency: one strategy and parameter set applied uniformly to all
    individuals. accuracy: the input validation report was empty.
    ethicality: echoed from the operator's assertion, never computed.
    """
    satisfied: set[str] = set()
    provenance: dict[str, str] = {}
    if not config.parameter_overrides:
        satisfied.add(CONSISTENCY)
        provenance[CONSISTENCY] = COMPUTED
    if config.validation_clean:
        satisfied.add(ACCURACY)
        provenance[ACCURACY] = COMPUTED
    if config.ethicality_asserted:
        satisfied.add(ETHICALITY)
        provenance[ETHICALITY] = ASSERTED
    return ProceduralReport(frozenset(satisfied), provenance)
