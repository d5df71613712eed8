"""Perceived-cluster construction and membership indexing.

Each individual owns one cluster: the set of people they rate at least
delta-similar to themself. Because similarity is non-symmetric, belonging to
someone's cluster says nothing about whose clusters you put them in, so a
separate inverse index tracks which clusters contain each individual.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import PerceptionTable, Population, UnknownIndividualError


@dataclass(frozen=True)
class PerceivedCluster:
    """The set of individuals ``owner`` considers similar to themself.

    Always contains the owner: everyone rates themself 1.0, which clears
    any threshold in [0, 1].
    """

    owner: str
    members: frozenset[str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "members", frozenset(self.members))
        if self.owner not in self.members:
            raise ValueError(f"cluster of {self.owner!r} must contain its owner")

    def __contains__(self, individual: str) -> bool:
        return individual in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClusterFamily:
    """All perceived clusters of one population, plus the inverse index.

    ``clusters`` maps each owner to their cluster; ``membership_index`` maps
    each individual to the owners whose clusters contain them. The two views
    are exact transposes of each other.
    """

    clusters: Mapping[str, PerceivedCluster]
    membership_index: Mapping[str, frozenset[str]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "clusters", dict(self.clusters))
        object.__setattr__(
            self,
            "membership_index",
            {i: frozenset(owners) for i, owners in self.membership_index.items()},
        )

    def cluster_of(self, individual: str) -> PerceivedCluster:
        try:
            return self.clusters[individual]
        except KeyError:
            raise UnknownIndividualError(individual) from None

    def containing(self, individual: str) -> frozenset[str]:
        """Owners whose clusters contain ``individual`` (never empty)."""
        try:
            return self.membership_index[individual]
        except KeyError:
            raise UnknownIndividualError(individual) from None


def perceived_cluster(
    x: str, pop: Population, perceptions: PerceptionTable, delta: float
) -> PerceivedCluster:
    """Build x's perceived cluster: everyone x rates >= delta similar.

    The threshold is inclusive, so delta = 0.0 admits the whole population.
    The owner is always a member regardless of the table contents.

    Raises:
        UnknownIndividualError: if ``x`` is not in the population.
    """
    if x not in pop:
        raise UnknownIndividualError(x)
    members = {z for z in pop.individuals if perceptions.similarity(x, z) >= delta}
    members.add(x)
    return PerceivedCluster(x, frozenset(members))


def build_cluster_family(
    pop: Population, perceptions: PerceptionTable, delta: float
) -> ClusterFamily:
    """One cluster per individual, plus the inverse membership index."""
    clusters = {
        x: perceived_cluster(x, pop, perceptions, delta) for x in pop.individuals
    }
    index: dict[str, set[str]] = {x: set() for x in pop.individuals}
    for owner, cluster in clusters.items():
        for member in cluster.members:
            index[member].add(owner)
    return ClusterFamily(clusters, {i: frozenset(o) for i, o in index.items()})
