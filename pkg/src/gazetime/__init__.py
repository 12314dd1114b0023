"""Subjective time-perception classification from eye-tracking recordings.

The package turns raw gaze/fixation CSV recordings into window features,
labels them from questionnaire answers, searches a small pipeline space
for the best classifier and evaluates it under several protocols.  See
the README for the CLI workflow.
"""

from .automl import SearchConfig, SearchResult, run_search
from .errors import GazetimeError
from .events import derive_saccades, slice_trial
from .features import FEATURE_NAMES, extract_all
from .io import load_dataset, load_dataset_dir, save_dataset, save_dataset_dir
from .labels import LabelSpec, SampleSet, label_dataset
from .protocols import condition_split_eval, finetune_eval, holdout_eval
from .records import Dataset, TrialRecord
from .screening import ScreeningPolicy, screen_trial
from .splitting import split_analysis_test
from .synth import SynthConfig, generate, generate_csvs

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "FEATURE_NAMES",
    "GazetimeError",
    "LabelSpec",
    "SampleSet",
    "ScreeningPolicy",
    "SearchConfig",
    "SearchResult",
    "SynthConfig",
    "TrialRecord",
    "__version__",
    "condition_split_eval",
    "derive_saccades",
    "extract_all",
    "finetune_eval",
    "generate",
    "generate_csvs",
    "holdout_eval",
    "label_dataset",
    "load_dataset",
    "load_dataset_dir",
    "run_search",
    "save_dataset",
    "save_dataset_dir",
    "screen_trial",
    "slice_trial",
    "split_analysis_test",
]
