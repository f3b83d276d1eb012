"""Detection and analysis of DNS reflection attacks in sampled flow traces.

The package is organized as a pipeline: parse and sanitize a packet trace,
build a consensus list of misused names, detect per-victim attack events,
then fingerprint, cluster, size, and cross-validate them. A deterministic
scenario generator provides ground truth for end-to-end evaluation.
"""

from .amplifiers import (
    ClusterResult,
    StableSetReport,
    amplifier_inventory,
    amplifier_sets,
    churn_metrics,
    classify_amplifier_role,
    daily_amplifier_sets,
    dbscan_cluster,
    jaccard_distance_matrix,
    recency_join,
    stable_sets,
)
from .detector import (
    AttackEvent,
    DetectorConfig,
    aggregate_client_days,
    decile_ranks,
    detect_attacks,
    intensity_deciles,
    read_events,
    victim_summary,
    visibility_curve,
    write_events,
)
from .fingerprint import (
    EntityFingerprint,
    attribute_entity,
    build_name_timeline,
    classify_dnsid_pattern,
    field_cardinality_profile,
    parity_alternation_period,
    pure_parity_probability,
)
from .honeypot import (
    HoneypotEvent,
    HoneypotRequest,
    convergence_curve,
    infer_honeypot_attacks,
    intensity_comparison,
    overlap,
    read_honeypot_csv,
    score_honeypot_deciles,
)
from .selectors import (
    MisusedNameList,
    SelectorRanking,
    consensus_merge,
    jaccard,
    selector_any_volume,
    selector_ground_truth,
    selector_max_size,
)
from .sizing import (
    RecordSet,
    ZoneRecord,
    detect_rollover_plateaus,
    estimate_any_response_size,
    rank_amplification,
    request_size,
)
from .snoop import (
    ProbeResponse,
    classify_cache_state,
    classify_responder,
    sanitize_probe_responses,
    two_way_cache_state,
)
from .synth import (
    AttackSpec,
    GroundTruth,
    ScenarioConfig,
    generate_scenario,
    read_scenario,
    synthetic_prefix_table,
)
from .trace import (
    PacketRecord,
    PrefixTable,
    TraceMeta,
    annotate,
    parse_trace,
    sanitize,
    write_trace,
)

__version__ = "0.1.0"

__all__ = [
    "AttackEvent",
    "AttackSpec",
    "ClusterResult",
    "DetectorConfig",
    "EntityFingerprint",
    "GroundTruth",
    "HoneypotEvent",
    "HoneypotRequest",
    "MisusedNameList",
    "PacketRecord",
    "PrefixTable",
    "ProbeResponse",
    "RecordSet",
    "ScenarioConfig",
    "SelectorRanking",
    "StableSetReport",
    "TraceMeta",
    "ZoneRecord",
    "aggregate_client_days",
    "amplifier_inventory",
    "amplifier_sets",
    "annotate",
    "attribute_entity",
    "build_name_timeline",
    "churn_metrics",
    "classify_amplifier_role",
    "classify_cache_state",
    "classify_dnsid_pattern",
    "classify_responder",
    "consensus_merge",
    "convergence_curve",
    "daily_amplifier_sets",
    "dbscan_cluster",
    "decile_ranks",
    "detect_attacks",
    "detect_rollover_plateaus",
    "estimate_any_response_size",
    "field_cardinality_profile",
    "generate_scenario",
    "infer_honeypot_attacks",
    "intensity_comparison",
    "intensity_deciles",
    "jaccard",
    "jaccard_distance_matrix",
    "overlap",
    "parity_alternation_period",
    "parse_trace",
    "pure_parity_probability",
    "rank_amplification",
    "read_events",
    "read_honeypot_csv",
    "read_scenario",
    "recency_join",
    "request_size",
    "sanitize",
    "sanitize_probe_responses",
    "score_honeypot_deciles",
    "selector_any_volume",
    "selector_ground_truth",
    "selector_max_size",
    "stable_sets",
    "synthetic_prefix_table",
    "two_way_cache_state",
    "victim_summary",
    "visibility_curve",
    "write_events",
    "write_trace",
]
