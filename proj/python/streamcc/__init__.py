"""Online conformance checking of event streams under bounded memory."""

from ._streamcc import (
    ConformanceEngine,
    CostModel,
    EmptyWindow,
    Error,
    Event,
    ParseError,
    PetriNet,
    PolicyConfig,
    SearchBudgetExceeded,
    ValidationError,
    __version__,
    align,
    f1_score,
    load_log,
    load_pnml,
    replay,
    rmse,
    run_experiment,
    run_policies,
)

__all__ = [
    "ConformanceEngine",
    "CostModel",
    "EmptyWindow",
    "Error",
    "Event",
    "ParseError",
    "PetriNet",
    "PolicyConfig",
    "SearchBudgetExceeded",
    "ValidationError",
    "__version__",
    "align",
    "f1_score",
    "load_log",
    "load_pnml",
    "replay",
    "rmse",
    "run_experiment",
    "run_policies",
]
