"""Discrete-time simulator and statistical verification harness for
randomized broadcast protocols on partially active complete networks."""

from .core import (
    Algorithm,
    ConfigError,
    NetworkState,
    ProtocolConfig,
    RngStream,
    default_max_steps,
    default_segment_length,
    informed_count,
    is_complete,
    phase1_steps,
    sample_active,
)
from .protocols import (
    SegmentStatus,
    SegmentView,
    TraceResult,
    longest_uninformed_run,
    run,
    run_cyclic,
    run_improved_cyclic,
    run_naive,
    run_oracle,
    segment_view,
    step_naive,
)
from .theory import (
    ExactLaw,
    TheoryConstants,
    constant,
    cyclic_beats_naive,
    exact_naive_law,
    exact_oracle_law,
    lower_bound_tail,
    naive_step_kernel,
)
from .harness import (
    CellSummary,
    CheckResult,
    ExperimentSpec,
    GridCell,
    SummaryStats,
    SweepRow,
    TrialRow,
    VerifyReport,
    convergence_sweep,
    run_experiment,
    verify_suite,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm", "ConfigError", "NetworkState", "ProtocolConfig", "RngStream",
    "default_max_steps", "default_segment_length", "informed_count",
    "is_complete", "phase1_steps", "sample_active",
    "SegmentStatus", "SegmentView", "TraceResult", "longest_uninformed_run",
    "run", "run_cyclic", "run_improved_cyclic", "run_naive", "run_oracle",
    "segment_view", "step_naive",
    "ExactLaw", "TheoryConstants", "constant", "cyclic_beats_naive",
    "exact_naive_law", "exact_oracle_law", "lower_bound_tail",
    "naive_step_kernel",
    "CellSummary", "CheckResult", "ExperimentSpec", "GridCell",
    "SummaryStats", "SweepRow", "TrialRow", "VerifyReport",
    "convergence_sweep", "run_experiment", "verify_suite",
    "__version__",
]
