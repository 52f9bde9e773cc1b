"""reviewpipe: conference review scoring, dequantization, reviewer bias
calibration, and acceptance-rate decision pipeline."""

from .assignment import (
    AssignmentConstraints,
    AssignmentResult,
    SimilaritySources,
    assign,
    check_constraints,
    combined_similarity,
)
from .calibration import (
    AcceptanceEstimate,
    CalibrationInputs,
    GridSpec,
    Hyperparams,
    acceptance_probability,
    aggregate_calibrated,
    build_covariance,
    calibrate_meta,
    fit_hyperparams,
    fit_sigma_q,
    nll,
    posterior,
)
from .dequant import DequantConfig, DequantResult, dequantize, dq_cost
from .pipeline import (
    GrayAreaReport,
    PipelineConfig,
    PipelineResult,
    emit_plots,
    gray_area,
    run_pipeline,
)
from .records import (
    AssignmentSet,
    MetaReviewForm,
    ReviewForm,
    ValidationReport,
    encode_likert,
    export_json,
    export_metas_csv,
    export_reviews_csv,
    likert_labels,
    load_reviews,
    validate,
)
from .scoring import (
    DecisionConfig,
    DecisionList,
    ReviewScore,
    ScoreTable,
    build_score_table,
    meta_score,
    normalize,
    paper_score,
    rank_and_cut,
    review_score,
    score_index,
)

__version__ = "0.1.0"
