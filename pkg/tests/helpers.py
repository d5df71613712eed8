"""Shared builders for the test suite."""

from __future__ import annotations

import random
from types import SimpleNamespace

from subjfair import (
    AuditParams,
    Outcome,
    PerceptionTable,
    Population,
    RecommendationVector,
    build_cluster_family,
)


def make_inputs(
    rows: dict[str, dict[str, float]],
    recs: dict[str, float],
    delta: float = 0.5,
    epsilon: float = 0.0,
    theta: float = 0.5,
    kind: str = "binary",
    attributes: dict[str, dict] | None = None,
    purpose: str = "test",
) -> SimpleNamespace:
    """Assemble validated audit inputs from plain dicts."""
    pop = Population(tuple(rows), attributes)
    table = PerceptionTable.from_rows(rows)
    make = Outcome.label if kind == "binary" else Outcome.score
    vector = RecommendationVector(purpose, {i: make(v) for i, v in recs.items()})
    params = AuditParams(delta=delta, epsilon=epsilon, theta=theta)
    family = build_cluster_family(pop, table, delta)
    return SimpleNamespace(
        pop=pop, table=table, recs=vector, params=params, family=family
    )


def random_rows(
    rng: random.Random, ids: list[str], density: float = 0.5
) -> dict[str, dict[str, float]]:
    """A valid perception table: diagonal 1.0, off-diagonal drawn at the
    given density with values on a coarse grid (so thresholds hit
    boundaries often)."""
    grid = [0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1.0]
    rows: dict[str, dict[str, float]] = {}
    for x in ids:
        row = {x: 1.0}
        for z in ids:
            if z != x and rng.random() < density:
                row[z] = rng.choice(grid)
        rows[x] = row
    return rows


def random_instance(
    rng: random.Random,
    max_n: int = 8,
    kind: str = "binary",
    delta: float | None = None,
    theta: float | None = None,
    epsilon: float = 0.0,
) -> SimpleNamespace:
    """A random valid audit instance for seeded property loops."""
    n = rng.randint(1, max_n)
    ids = [f"p{k}" for k in range(n)]
    rows = random_rows(rng, ids, density=rng.choice([0.2, 0.5, 0.8]))
    if kind == "binary":
        recs = {i: float(rng.randint(0, 1)) for i in ids}
    else:
        recs = {i: round(rng.random(), 3) for i in ids}
    if delta is None:
        delta = rng.choice([0.0, 0.3, 0.5, 0.8, 1.0])
    if theta is None:
        theta = rng.choice([0.25, 0.4, 0.5, 0.6, 0.75])
    return make_inputs(rows, recs, delta=delta, epsilon=epsilon, theta=theta, kind=kind)
