"""Feature screening for ultra-high-dimensional categorical data."""

from .backends import active_backend
from .data import (
    CategoricalDesign,
    CellTable,
    Method,
    ResponseKind,
    ResponseVector,
    ScreenResult,
    TrueModel,
    empirical_cells,
)
from .errors import (
    CatscreenError,
    ConfigError,
    DatasetError,
    DegenerateResponseError,
    DimensionError,
    NoSelectableFeaturesError,
    ValidationError,
)
from .screeners import ScreenerConfig, cat_sis, cat_sis_numerator_cellform, dc_sis, hlw_sis, mmle, screen
from .selection import Cutoff, RatioArgmax, SelectionRule, TopD, minimum_model_size, select
from .simulate import SimulationSpec, generate, sim_default

__version__ = "0.1.0"

from .bench import BenchReport, BenchSpec, consistency_probe, emit_tables, run_bench  # noqa: E402
from .penalized import (  # noqa: E402
    FitMetrics,
    PenalizedFit,
    PenaltySpec,
    adaptive_lasso,
    cv_select,
    elastic_net_grid,
    fit_glm_path,
    fit_metrics,
)
from .pipeline import (  # noqa: E402
    PipelineReport,
    PipelineSpec,
    final_model_size,
    iterative_screen,
    run_pipeline,
    stage_budget,
)

__all__ = [
    "CategoricalDesign",
    "CellTable",
    "Method",
    "ResponseKind",
    "ResponseVector",
    "ScreenResult",
    "TrueModel",
    "empirical_cells",
    "CatscreenError",
    "ConfigError",
    "DatasetError",
    "DegenerateResponseError",
    "DimensionError",
    "NoSelectableFeaturesError",
    "ValidationError",
    "ScreenerConfig",
    "cat_sis",
    "cat_sis_numerator_cellform",
    "dc_sis",
    "hlw_sis",
    "mmle",
    "screen",
    "Cutoff",
    "RatioArgmax",
    "SelectionRule",
    "TopD",
    "minimum_model_size",
    "select",
    "SimulationSpec",
    "generate",
    "sim_default",
    "active_backend",
    "BenchReport",
    "BenchSpec",
    "consistency_probe",
    "emit_tables",
    "run_bench",
    "FitMetrics",
    "PenalizedFit",
    "PenaltySpec",
    "adaptive_lasso",
    "cv_select",
    "elastic_net_grid",
    "fit_glm_path",
    "fit_metrics",
    "PipelineReport",
    "PipelineSpec",
    "final_model_size",
    "iterative_screen",
    "run_pipeline",
    "stage_budget",
    "__version__",
]
