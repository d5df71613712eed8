"""Domain types, parameter validation, and the treatment-similarity metric.

Everything downstream (clustering, aggregation, auditing) is built on the
types in this module. All types are immutable after construction and safe to
share across concurrent audit runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterator, Mapping

#: Opaque unique token identifying one individual within a population.
IndividualId = str

#: Opaque token naming the issue under decision; one audit run concerns
#: exactly one purpose.
Purpose = str

#: Outcome kinds. One population uses one kind uniformly per purpose.
BINARY = "binary"
SCORE = "score"

#: Label 1 is the favorable ("good") outcome by convention.
GOOD_LABEL = 1
BAD_LABEL = 0

#: How the perception data was obtained. Informational only; the engine
#: treats every table the same way.
PROVENANCE_TAGS = ("declared", "fitted", "sampled", "dynamic")


class InputError(ValueError):
    """Malformed or incomplete caller-supplied data."""


class KindMismatchError(InputError):
    """Two outcomes of different kinds (binary vs score) were compared."""


class UnknownIndividualError(KeyError):
    """An operation referenced an id that is not part of the population."""


@dataclass(frozen=True)
class Outcome:
    """A single treatment outcome: a binary label or a score in [0, 1].

    Binary outcomes take values 0 and 1 only; label 1 is the favorable
    outcome. Score outcomes are reals in [0, 1].
    """

    value: float
    kind: str = BINARY

    def __post_init__(self) -> None:
        if self.kind not in (BINARY, SCORE):
            raise InputError(f"unknown outcome kind {self.kind!r}")
        object.__setattr__(self, "value", float(self.value))
        if self.kind == BINARY and self.value not in (0.0, 1.0):
            raise InputError(f"binary outcome must be 0 or 1, got {self.value}")
        if not 0.0 <= self.value <= 1.0:
            raise InputError(f"outcome value {self.value} outside [0, 1]")

    @classmethod
    def label(cls, value: int) -> "Outcome":
        """Binary outcome from a 0/1 label."""
        return cls(float(value), BINARY)

    @classmethod
    def score(cls, value: float) -> "Outcome":
        """Score outcome from a real in [0, 1]."""
        return cls(float(value), SCORE)

    @property
    def is_binary(self) -> bool:
        return self.kind == BINARY


def treatment_similarity(a: Outcome, b: Outcome) -> float:
    """Similarity in [0, 1] between two treatments of the same kind.

    Binary outcomes compare by exact match (1.0 if equal, else 0.0); score
    outcomes by ``1 - |a - b|``. Symmetric, and maximal on identical
    outcomes: ``treatment_similarity(a, a) == 1.0``.

    Raises:
        KindMismatchError: if ``a`` and ``b`` are of different kinds.
    """
    if a.kind != b.kind:
        raise KindMismatchError(
            f"cannot compare {a.kind} outcome with {b.kind} outcome"
        )
    if a.kind == BINARY:
        return 1.0 if a.value == b.value else 0.0
    return 1.0 - abs(a.value - b.value)


@dataclass(frozen=True)
class Population:
    """The ordered set of individuals one audit run is about.

    Attributes are optional objective features (group labels for the
    baseline auditors, veto-rule inputs). When present, every covered
    individual must carry the same attribute keys.
    """

    individuals: tuple[IndividualId, ...]
    attributes: Mapping[IndividualId, Mapping[str, Any]] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "individuals", tuple(self.individuals))
        if not self.individuals:
            raise InputError("population must contain at least one individual")
        if len(set(self.individuals)) != len(self.individuals):
            raise InputError("population contains duplicate ids")
        if self.attributes is not None:
            attrs = {i: dict(v) for i, v in self.attributes.items()}
            object.__setattr__(self, "attributes", attrs)
            known = set(self.individuals)
            keysets = set()
            for ind, values in attrs.items():
                if ind not in known:
                    raise InputError(f"attributes reference unknown id {ind!r}")
                keysets.add(frozenset(values))
            if len(keysets) > 1:
                raise InputError("attribute keys differ across individuals")

    def __len__(self) -> int:
        return len(self.individuals)

    def __contains__(self, individual: str) -> bool:
        return individual in self.individuals

    def attribute_keys(self) -> frozenset[str]:
        """Attribute keys shared by the covered individuals (empty if none)."""
        if not self.attributes:
            return frozenset()
        first = next(iter(self.attributes.values()))
        return frozenset(first)

    def attributes_of(self, individual: str) -> Mapping[str, Any]:
        if self.attributes is None:
            return {}
        return self.attributes.get(individual, {})


@dataclass(frozen=True)
class PerceptionTable:
    """Per-observer, non-symmetric similarity scores over the population.

    ``entries[(observer, target)]`` is how similar *observer* rates *target*
    to themself, in [0, 1]. Missing entries read as 0.0 (no perceived
    similarity), which keeps input files sparse. Symmetry is not required
    and not assumed anywhere: ``sim(x, z)`` and ``sim(z, x)`` are
    independent opinions.
    """

    entries: Mapping[tuple[IndividualId, IndividualId], float]
    provenance: str = "declared"

    def __post_init__(self) -> None:
        if self.provenance not in PROVENANCE_TAGS:
            raise InputError(
                f"provenance must be one of {PROVENANCE_TAGS}, got {self.provenance!r}"
            )
        object.__setattr__(
            self,
            "entries",
            {(str(o), str(t)): float(v) for (o, t), v in self.entries.items()},
        )

    @classmethod
    def from_rows(
        cls, rows: Mapping[str, Mapping[str, float]], provenance: str = "declared"
    ) -> "PerceptionTable":
        """Build from one similarity row per observer."""
        entries = {
            (observer, target): value
            for observer, row in rows.items()
            for target, value in row.items()
        }
        return cls(entries, provenance)

    def similarity(self, observer: str, target: str) -> float:
        """How similar ``observer`` rates ``target``; 0.0 when unstated."""
        return self.entries.get((observer, target), 0.0)

    def as_rows(self) -> dict[str, dict[str, float]]:
        """Nested ``{observer: {target: value}}`` view, observer-major."""
        rows: dict[str, dict[str, float]] = {}
        for (observer, target), value in self.entries.items():
            rows.setdefault(observer, {})[target] = value
        return rows


@dataclass(frozen=True)
class RecommendationVector:
    """Per-individual system recommendations for one purpose.

    All values must share one outcome kind. Totality over the population is
    checked by :func:`validate_population`, not at construction.
    """

    purpose: Purpose
    values: Mapping[IndividualId, Outcome]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))
        kinds = {o.kind for o in self.values.values()}
        if len(kinds) > 1:
            raise KindMismatchError(
                f"recommendation vector mixes outcome kinds {sorted(kinds)}"
            )

    @property
    def kind(self) -> str:
        for outcome in self.values.values():
            return outcome.kind
        return BINARY

    def __getitem__(self, individual: str) -> Outcome:
        try:
            return self.values[individual]
        except KeyError:
            raise UnknownIndividualError(individual) from None


@dataclass(frozen=True)
class DecisionVector:
    """Final binary decisions, one per individual, for one purpose."""

    purpose: Purpose
    values: Mapping[IndividualId, Outcome]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))
        for individual, outcome in self.values.items():
            if not outcome.is_binary:
                raise KindMismatchError(
                    f"decision for {individual!r} must be binary, got {outcome.kind}"
                )

    def __getitem__(self, individual: str) -> Outcome:
        try:
            return self.values[individual]
        except KeyError:
            raise UnknownIndividualError(individual) from None


@dataclass(frozen=True)
class AuditParams:
    """The three audit thresholds.

    delta: cluster threshold -- how similar a target must be rated to join
        the observer's perceived cluster, in [0, 1], inclusive filter.
    epsilon: treatment-similarity threshold -- two treatments count as
        similar when their similarity is strictly above epsilon, in [0, 1).
    theta: majority threshold -- an aggregate is positive when the positive
        fraction is strictly above theta, in [0, 1). 0.5 means absolute
        majority and is the default.
    """

    delta: float
    epsilon: float = 0.0
    theta: float = 0.5

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 1.0:
            raise InputError(f"delta must be in [0, 1], got {self.delta}")
        if not 0.0 <= self.epsilon < 1.0:
            raise InputError(f"epsilon must be in [0, 1), got {self.epsilon}")
        if not 0.0 <= self.theta < 1.0:
            raise InputError(f"theta must be in [0, 1), got {self.theta}")


# --- input validation -------------------------------------------------------

#: Violation codes emitted by validate_population.
SELF_SIMILARITY = "self_similarity"
VALUE_RANGE = "value_range"
MISSING_RECOMMENDATION = "missing_recommendation"
UNKNOWN_ID = "unknown_id"


@dataclass(frozen=True)
class Violation:
    code: str
    where: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __iter__(self) -> Iterator[Violation]:
        return iter(self.violations)

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]


def validate_population(
    pop: Population,
    perceptions: PerceptionTable,
    recs: RecommendationVector,
) -> ValidationReport:
    """Check the audit inputs against the model invariants.

    Returns an empty report on success; otherwise lists every violated
    invariant with its location. Checked:

    - every individual rates themself exactly 1.0 (self-similarity; missing
      diagonal entries read as 0.0 and therefore fail),
    - every perception value lies in [0, 1],
    - perception entries reference known ids only,
    - the recommendation vector is total over the population and references
      known ids only.
    """
    violations: list[Violation] = []
    known = set(pop.individuals)

    for individual in pop.individuals:
        own = perceptions.similarity(individual, individual)
        if own != 1.0:
            violations.append(
                Violation(
                    SELF_SIMILARITY,
                    f"sim({individual},{individual})",
                    f"self-similarity must be 1.0 for {individual}, got {own}",
                )
            )

    for (observer, target), value in sorted(perceptions.entries.items()):
        where = f"sim({observer},{target})"
        for individual in (observer, target):
            if individual not in known:
                violations.append(
                    Violation(UNKNOWN_ID, where, f"unknown id {individual} in perception table")
                )
        if not 0.0 <= value <= 1.0:
            violations.append(
                Violation(VALUE_RANGE, where, f"similarity {value} outside [0, 1]")
            )

    for individual in pop.individuals:
        if individual not in recs.values:
            violations.append(
                Violation(
                    MISSING_RECOMMENDATION,
                    f"rec({individual})",
                    f"no recommendation for {individual}",
                )
            )
    for individual in sorted(recs.values):
        if individual not in known:
            violations.append(
                Violation(
                    UNKNOWN_ID,
                    f"rec({individual})",
                    f"recommendation for unknown id {individual}",
                )
            )

    return ValidationReport(tuple(violations))
