"""Delay and age of information in a two-node slotted channel with an energy-harvesting sensor."""

from .aoi import (AoiAnalysis, MomentSource, PmfTruncation, aoi_average, aoi_both, moments_t,
                  moments_x, pbar2, pmf_t, pmf_t_total_mass)
from .estimators import MacAnalyzer, SlotSimulator
from .exceptions import DomainError, ModeError, StabilityError, TruncationError
from .model import (QueueAnalysis, SuccessProbs, battery_nonempty_prob, queue_analysis,
                    service_rate, success_probs)
from .params import S2Power, SystemParams, db_to_linear
from .simulation import (ChannelMode, SimConfig, SimResult, derive_seed, resolve_slot_outcomes,
                         run, run_replication)

__version__ = "0.1.0"

__all__ = [
    "AoiAnalysis", "MomentSource", "PmfTruncation", "aoi_average", "aoi_both", "moments_t",
    "moments_x", "pbar2", "pmf_t", "pmf_t_total_mass", "MacAnalyzer", "SlotSimulator",
    "DomainError", "ModeError", "StabilityError", "TruncationError", "QueueAnalysis",
    "SuccessProbs", "battery_nonempty_prob", "queue_analysis", "service_rate", "success_probs",
    "S2Power", "SystemParams", "db_to_linear", "ChannelMode", "SimConfig", "SimResult",
    "derive_seed", "resolve_slot_outcomes", "run", "run_replication",
]
