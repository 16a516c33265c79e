"""Sample-based observability of discrete-time LTI systems."""
from .sysmodel import (
    Eigenvalue, JordanBlock, ObservabilityReport, Provenance, Schedule, SystemSpec,
    dimension, load_schedule, load_system, validate,
)
from .spectral import (
    PathologyReport, is_pathological_period, minimal_pathological_period, pathology_report,
    rationalize_phase_gap,
)
from .obsmatrix import observability_matrix, rank_verdict, row_at

__version__ = "0.1.0"
