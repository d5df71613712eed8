"""Subjective-fairness auditing and decision-aggregation engine.

Given each individual's own perception of who is similar to them and a
decision-support system's recommendations, the engine decides who is
treated subjectively fairly, aggregates recommendations into defensible
decisions, and derives the explanation obligations owed for every conflict.
"""

from .core import (
    BINARY,
    SCORE,
    AuditParams,
    DecisionVector,
    IndividualId,
    InputError,
    KindMismatchError,
    Outcome,
    PerceptionTable,
    Population,
    Purpose,
    RecommendationVector,
    UnknownIndividualError,
    ValidationReport,
    treatment_similarity,
    validate_population,
)
from .clustering import (
    ClusterFamily,
    PerceivedCluster,
    build_cluster_family,
    perceived_cluster,
)
from .aggregation import (
    MAJORITY,
    PESSIMISTIC,
    TRUST_WEIGHTED,
    VETO,
    AggregationStrategy,
    ConfigError,
    SetRecommendationVector,
    VetoRule,
    aggregate_individual_decision,
    aggregate_set_recommendation,
    apply_veto,
    binarize,
    resolve_pessimistic,
    run_pipeline,
    trust_weight,
)
from .audit import (
    FAIR,
    UNFAIR,
    ISF_SATISFIED,
    RELAXED_ONLY,
    NEITHER,
    NO_CONFLICT,
    JUSTIFIABLE_BY_GROUP,
    SYSTEM_SUSPECT,
    AuditReport,
    FairnessVerdict,
    audit_population,
    classify_conflict,
    classify_scenario,
    isf,
    relaxed_isf,
    satisfaction_ratio,
    sf_process,
)
from .explanations import (
    ACCEPTED,
    PENDING,
    REJECTED,
    AcceptanceLedger,
    AuditConfig,
    ExplanationObligation,
    LedgerIntegrityError,
    ProceduralReport,
    derive_obligations,
    fairness_through_explanations,
    procedural_check,
)
from .baselines import (
    ObjectiveDistanceTable,
    ParityReport,
    PairViolation,
    ObserverViolation,
    dwork_if_check,
    statistical_parity_gap,
    subjective_if_check,
)

__version__ = "0.1.0"
