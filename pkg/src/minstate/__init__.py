"""Minimal-state feature selection for tabular observables.

Given a feature table and a progression-score label, this package searches
for a small subset of columns (a "state") that predicts the score, that can
reconstruct the discarded columns, or both, by greedily minimizing a
cross-validated suitability cost over pluggable regression back-ends.
"""

__version__ = "0.1.0"

from .data import (
    Dataset,
    FeatureSubset,
    FoldPlan,
    ScalingSpec,
    as_subset,
    dps_from_points,
    load_csv,
    make_folds,
    project_features,
    read_schema,
    scale_unit_interval,
    synth_dataset,
    write_csv,
    write_schema,
)
from .errors import (
    ConfigurationError,
    EvaluationError,
    FitError,
    IngestionError,
    MinstateError,
    SchemaError,
    ShapeError,
    SubsetError,
    ValidationError,
)
from .metrics import (
    MetricsReport,
    aggregate_multi,
    correlation_coefficient,
    mae,
    mae_rmae,
    metrics_report,
    relative_rmse,
)
from .regressors import (
    HyperGrid,
    RegressorSpec,
    TrainedModel,
    boosted_trees,
    default_grids,
    elastic_net_objective,
    external_plugin,
    fit,
    fit_boosted_trees,
    fit_linear_elastic,
    fit_random_forest,
    fit_svr,
    fit_tree,
    kernel_matrix,
    linear_elastic,
    predict,
    random_forest,
    register_plugin,
    registered_plugins,
    svr,
    svr_dual_objective,
    tree,
)
from .selection import (
    ImportanceVector,
    SelectionResult,
    SelectionStep,
    embedded_rank_mdi,
    evaluate_selection,
    filter_rank_anova,
    filter_rank_mi,
    filter_rank_pca,
    sfs,
    targets_for,
    top_w,
)
from .suitability import (
    SuitabilityConfig,
    SuitabilityEvaluator,
    SuitabilityRecord,
    fold_cost,
    label_error,
    preset,
    reconstruction_error,
    rmse,
    suitability,
)
from .experiment import (
    METHODS,
    MethodOutcome,
    RunBundle,
    RunConfig,
    load_results,
    render_selection_matrix,
    render_table,
    run,
    write_bundle,
)
