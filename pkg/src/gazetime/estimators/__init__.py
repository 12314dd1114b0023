"""Self-contained preprocessors, classifiers and the pipeline abstraction."""

from .forest import ExtraTrees, RandomForest
from .neighbors import KNearestClassifier
from .pipeline import (
    CLASSIFIER_KINDS,
    PREPROCESSOR_KINDS,
    Pipeline,
    PipelineSpec,
    evaluate_pipeline,
    load_pipeline,
    pipeline_from_json,
    pipeline_to_json,
    save_pipeline,
)
from .preprocessing import (
    NoOpTransform,
    PCAProjection,
    UnitNormScaler,
    VarianceFilter,
)

__all__ = [
    "CLASSIFIER_KINDS",
    "PREPROCESSOR_KINDS",
    "ExtraTrees",
    "KNearestClassifier",
    "NoOpTransform",
    "PCAProjection",
    "Pipeline",
    "PipelineSpec",
    "RandomForest",
    "UnitNormScaler",
    "VarianceFilter",
    "evaluate_pipeline",
    "load_pipeline",
    "pipeline_from_json",
    "pipeline_to_json",
    "save_pipeline",
]
