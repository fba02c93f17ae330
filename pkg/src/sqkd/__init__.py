"""Key-rate bounds and Monte Carlo simulation for a single-state
semi-quantum key distribution protocol under collective attacks."""

from .attacks import (
    KrausChannel,
    ObservedStatistics,
    RestrictedAttack,
    attack_from_kraus,
    attack_from_unitary,
    compute_statistics,
    depolarizing_channel,
    identity_attack,
    load_attack,
    make_e_state,
    random_attack,
    random_unitary,
    save_attack,
)
from .keyrate import (
    KeyRateReport,
    bound_B,
    depolarizing_bound,
    depolarizing_stats,
    entropy_terms,
    key_rate_bound,
    lambda_from,
    load_statistics,
    save_statistics,
    threshold_b,
    threshold_q,
    x_error_from_bias,
)
from .protocol import (
    EstimatedStatistics,
    ProtocolConfig,
    ProtocolTranscript,
    RoundRecord,
    estimate_statistics,
    run_protocol,
    sample_outcome,
)

__all__ = [
    "KrausChannel",
    "ObservedStatistics",
    "RestrictedAttack",
    "attack_from_kraus",
    "attack_from_unitary",
    "compute_statistics",
    "depolarizing_channel",
    "identity_attack",
    "load_attack",
    "make_e_state",
    "random_attack",
    "random_unitary",
    "save_attack",
    "KeyRateReport",
    "bound_B",
    "depolarizing_bound",
    "depolarizing_stats",
    "entropy_terms",
    "key_rate_bound",
    "lambda_from",
    "load_statistics",
    "save_statistics",
    "threshold_b",
    "threshold_q",
    "x_error_from_bias",
    "EstimatedStatistics",
    "ProtocolConfig",
    "ProtocolTranscript",
    "RoundRecord",
    "estimate_statistics",
    "run_protocol",
    "sample_outcome",
]
