"""Seeded synthetic populations, including manipulative agents.

A manipulative agent inflates their stated similarity toward every member
of a target owner's cluster, placing themselves in a cluster whose
aggregate label they hope to inherit. Because the cross-cluster decision
stage also counts the clusters *other* people put the agent in, the
manipulation does not necessarily pay off; ``find_manipulation_instance``
searches seeds for a case where it demonstrably does not.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .. import __version__
from ..aggregation import AggregationStrategy
from ..clustering import build_cluster_family
from ..core import (
    AuditParams,
    InputError,
    Outcome,
    PerceptionTable,
    Population,
    RecommendationVector,
    validate_population,
)
from .runfile import AuditRunFile

#: Parameters a generated run is audited with.
DEFAULT_PARAMS = AuditParams(delta=0.5, epsilon=0.0, theta=0.5)


@dataclass(frozen=True)
class SynthProfile:
    """Shape of a synthetic population.

    cluster_density is the probability that any off-diagonal perception
    entry is drawn at all (drawn values are uniform in [0, 1], so density 0
    leaves every cluster a singleton at the default delta).
    manipulation lists (agent, target owner) pairs: each agent's similarity
    toward every member of the target's cluster is raised above the cluster
    threshold after the honest table is drawn.
    """

    n: int
    cluster_density: float = 0.3
    base_positive_rate: float = 0.5
    manipulation: tuple[tuple[str, str], ...] = ()
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InputError(f"population size must be >= 1, got {self.n}")
        if not 0.0 <= self.cluster_density <= 1.0:
            raise InputError(f"cluster_density must be in [0, 1], got {self.cluster_density}")
        if not 0.0 <= self.base_positive_rate <= 1.0:
            raise InputError(
                f"base_positive_rate must be in [0, 1], got {self.base_positive_rate}"
            )
        object.__setattr__(
            self, "manipulation", tuple((str(a), str(t)) for a, t in self.manipulation)
        )


def individual_ids(n: int) -> list[str]:
    """Stable zero-padded ids i00, i01, ... for a population of size n."""
    width = max(2, len(str(n - 1)))
    return [f"i{k:0{width}d}" for k in range(n)]


def generate_population(profile: SynthProfile) -> AuditRunFile:
    """Draw a run file deterministically from the profile's seed.

    The honest table is drawn first (diagonal 1.0, off-diagonal entries
    drawn with probability cluster_density), recommendations second, and
    manipulation applied last: for each (agent, target) pair the agent's
    similarity toward every current member of the target's cluster is
    raised to clear the cluster threshold.
    """
    rng = random.Random(profile.seed)
    ids = individual_ids(profile.n)
    known = set(ids)

    rows: dict[str, dict[str, float]] = {}
    for observer in ids:
        row = {observer: 1.0}
        for target in ids:
            if target != observer and rng.random() < profile.cluster_density:
                row[target] = round(rng.random(), 3)
        rows[observer] = row

    rec_values = {
        i: Outcome.label(1 if rng.random() < profile.base_positive_rate else 0)
        for i in ids
    }

    delta = DEFAULT_PARAMS.delta
    boost = round(min(1.0, delta + (1.0 - delta) * 0.9), 3)
    for agent, target in profile.manipulation:
        for i in (agent, target):
            if i not in known:
                raise InputError(f"manipulation references unknown id {i!r}")
        target_members = [
            z for z in ids if rows[target].get(z, 0.0) >= delta
        ]
        for member in target_members:
            if member != agent:
                rows[agent][member] = max(rows[agent].get(member, 0.0), boost)

    population = Population(tuple(ids))
    perceptions = PerceptionTable.from_rows(rows, provenance="sampled")
    recommendations = RecommendationVector("synthetic", rec_values)
    report = validate_population(population, perceptions, recommendations)
    if not report.ok:
        raise AssertionError(f"generator produced invalid inputs: {report.messages()}")

    return AuditRunFile(
        population=population,
        perceptions=perceptions,
        recommendations=recommendations,
        params=DEFAULT_PARAMS,
        strategy=AggregationStrategy(theta=DEFAULT_PARAMS.theta),
        metadata={
            "seed": profile.seed,
            "engine_version": __version__,
            "generator": "synthetic",
            "manipulation": [list(pair) for pair in profile.manipulation],
        },
    )


def find_manipulation_instance(
    n: int = 6,
    cluster_density: float = 0.35,
    base_positive_rate: float = 0.5,
    max_seeds: int = 1000,
) -> AuditRunFile:
    """Search seeds for a run where manipulation demonstrably fails.

    Returns the first generated run in which the manipulating agent lands
    in a favorable cluster (both the target's cluster and the agent's own
    post-manipulation cluster carry label 1) yet the cross-cluster decision
    still denies them.

    Raises:
        LookupError: if no such instance appears within ``max_seeds``.
    """
    from ..aggregation import run_pipeline  # local import keeps module load light

    ids = individual_ids(n)
    agent, target = ids[0], ids[-1]
    for seed in range(max_seeds):
        profile = SynthProfile(
            n=n,
            cluster_density=cluster_density,
            base_positive_rate=base_positive_rate,
            manipulation=((agent, target),),
            seed=seed,
        )
        run = generate_population(profile)
        family = build_cluster_family(run.population, run.perceptions, run.params.delta)
        set_recs, decisions = run_pipeline(
            run.population, family, run.recommendations, run.strategy
        )
        if (
            set_recs[target].value == 1.0
            and set_recs[agent].value == 1.0
            and decisions[agent].value == 0.0
        ):
            return run
    raise LookupError(
        f"no manipulation-mitigation instance found within {max_seeds} seeds"
    )
