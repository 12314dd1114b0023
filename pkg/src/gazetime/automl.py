"""Two-phase greedy pipeline search under a fixed evaluation budget.

Phase 1 enumerates every preprocessor/classifier combination with default
hyperparameters and keeps the best pair.  Phase 2 random-searches the
hyperparameters of that pair for up to ``max_hpo_steps`` evaluations,
stopping early after ``early_stop_patience`` consecutive valid evaluations
without a strict improvement of the incumbent mean accuracy.  Every
evaluation lands in the ledger, so a search is fully replayable from
(samples, config).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ._parallel import thread_map
from .errors import AllCombosInvalidError
from .estimators.pipeline import (
    Pipeline,
    PipelineSpec,
    default_classifier_params,
    default_preprocessor_params,
    evaluate_pipeline,
    fit_seed,
)

PREPROCESSOR_ORDER = ("none", "variance_threshold", "pca", "unit_norm")
CLASSIFIER_ORDER = ("random_forest", "extra_trees", "knn")

# declared random-search ranges (inclusive)
FOREST_N_TREES = (10, 500)
FOREST_MAX_DEPTH = (2, 32)  # plus the unlimited option
FOREST_MIN_SAMPLES_SPLIT = (2, 20)
FOREST_MAX_FEATURES = ("sqrt", "log2", "half")
KNN_K = (1, 50)
KNN_VOTES = ("uniform", "distance")
VT_TAU = (0.0, 0.5)

RESAMPLE_CAP = 1000  # attempts per step before the step counts as invalid


@dataclass(frozen=True)
class SearchConfig:
    max_hpo_steps: int = 1024
    early_stop_patience: int = 100
    n_eval_splits: int = 5
    train_fraction: float = 0.8
    metric: str = "accuracy"
    seed: int = 0

    def __post_init__(self):
        if self.metric != "accuracy":
            raise ValueError("only the accuracy metric is supported")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.early_stop_patience > self.max_hpo_steps:
            raise ValueError("patience cannot exceed the step budget")
        if self.max_hpo_steps < 1 or self.early_stop_patience < 1:
            raise ValueError("budget and patience must be positive")


@dataclass
class LedgerEntry:
    phase: int
    step: int
    spec: PipelineSpec
    valid: bool
    error: str
    split_accuracies: list[float]
    mean_accuracy: float
    wall_time_s: float
    incumbent_mean: float


@dataclass
class SearchResult:
    best_spec: PipelineSpec
    best_mean: float
    phase1_pair: tuple[str, str]
    ledger: list[LedgerEntry] = field(default_factory=list)
    stopped_early: bool = False


def _eval_seed(config: SearchConfig) -> int:
    return fit_seed(config.seed, 0)


def make_evaluator(X, y, config: SearchConfig):
    """Default evaluator: paired stratified splits shared by every spec."""
    seed = _eval_seed(config)

    def evaluate(spec: PipelineSpec):
        return evaluate_pipeline(spec, X, y, n_splits=config.n_eval_splits,
                                 train_fraction=config.train_fraction,
                                 seed=seed)

    return evaluate


def _timed_eval(evaluate, spec):
    start = time.perf_counter()
    try:
        mean, splits = evaluate(spec)
        err = ""
    except Exception as exc:  # invalid combination, recorded and skipped
        mean, splits, err = float("nan"), [], f"{type(exc).__name__}: {exc}"
    return mean, splits, err, time.perf_counter() - start


def phase1_enumerate(X, y, config: SearchConfig, evaluate=None,
                     threads: int = 1) -> tuple[tuple[str, str], list[LedgerEntry]]:
    """Evaluate all 12 default-parameter combinations; return the best pair.

    Ties resolve by enumeration order (none < variance_threshold < pca <
    unit_norm, then random_forest < extra_trees < knn).
    """
    if evaluate is None:
        evaluate = make_evaluator(X, y, config)
    n_features = X.shape[1]
    combos = [(pre, clf) for pre in PREPROCESSOR_ORDER
              for clf in CLASSIFIER_ORDER]
    specs = [PipelineSpec(pre, clf,
                          default_preprocessor_params(pre, n_features),
                          default_classifier_params(clf))
             for pre, clf in combos]
    results = thread_map(lambda s: _timed_eval(evaluate, s), specs, threads)
    entries = []
    best_idx, best_mean = -1, -np.inf
    for step, (spec, (mean, splits, err, wall)) in enumerate(
            zip(specs, results), start=1):
        valid = err == ""
        if valid and mean > best_mean:
            best_idx, best_mean = step - 1, mean
        entries.append(LedgerEntry(
            phase=1, step=step, spec=spec, valid=valid, error=err,
            split_accuracies=list(splits),
            mean_accuracy=float(mean) if valid else float("nan"),
            wall_time_s=wall,
            incumbent_mean=best_mean if best_idx >= 0 else float("nan")))
    if best_idx < 0:
        raise AllCombosInvalidError("every phase-1 combination failed to fit")
    return combos[best_idx], entries


def sample_spec(pair: tuple[str, str], rng: np.random.Generator,
                n_features: int, n_samples: int,
                train_fraction: float) -> PipelineSpec | None:
    """Draw hyperparameters uniformly from the declared ranges.

    Returns None when the draw is statically invalid (caller resamples
    without consuming budget); data-dependent failures surface at fit time.
    """
    pre, clf = pair
    pre_params = {}
    if pre == "variance_threshold":
        pre_params["threshold"] = float(rng.uniform(*VT_TAU))
    elif pre == "pca":
        pre_params["n_components"] = int(rng.integers(1, n_features + 1))
    if clf in ("random_forest", "extra_trees"):
        depth_options = [None] + list(range(FOREST_MAX_DEPTH[0],
                                            FOREST_MAX_DEPTH[1] + 1))
        clf_params = {
            "n_trees": int(rng.integers(FOREST_N_TREES[0],
                                        FOREST_N_TREES[1] + 1)),
            "max_depth": depth_options[rng.integers(0, len(depth_options))],
            "min_samples_split": int(rng.integers(
                FOREST_MIN_SAMPLES_SPLIT[0], FOREST_MIN_SAMPLES_SPLIT[1] + 1)),
            "max_features": FOREST_MAX_FEATURES[
                rng.integers(0, len(FOREST_MAX_FEATURES))],
        }
    else:
        clf_params = {
            "n_neighbors": int(rng.integers(KNN_K[0], KNN_K[1] + 1)),
            "vote": KNN_VOTES[rng.integers(0, len(KNN_VOTES))],
        }
        if clf_params["n_neighbors"] > int(train_fraction * n_samples):
            return None  # cannot have that many neighbors in any train fold
    return PipelineSpec(pre, clf, pre_params, clf_params)


def phase2_random_search(X, y, pair: tuple[str, str], incumbent_mean: float,
                         incumbent_spec: PipelineSpec, config: SearchConfig,
                         evaluate=None) -> tuple[PipelineSpec, float,
                                                 list[LedgerEntry], bool]:
    """Random-search the winning pair's hyperparameters.

    Each budget step evaluates one sampled configuration (statically
    invalid draws are resampled free of charge, capped at RESAMPLE_CAP).
    Only valid evaluations count toward patience.
    """
    if evaluate is None:
        evaluate = make_evaluator(X, y, config)
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(1,)))
    entries: list[LedgerEntry] = []
    best_spec, best_mean = incumbent_spec, incumbent_mean
    no_improve = 0
    stopped_early = False
    for step in range(1, config.max_hpo_steps + 1):
        spec = None
        for _ in range(RESAMPLE_CAP):
            spec = sample_spec(pair, rng, X.shape[1], X.shape[0],
                               config.train_fraction)
            if spec is not None:
                break
        if spec is None:
            entries.append(LedgerEntry(
                phase=2, step=step, spec=PipelineSpec(pair[0], pair[1]),
                valid=False, error="no valid configuration sampled",
                split_accuracies=[], mean_accuracy=float("nan"),
                wall_time_s=0.0, incumbent_mean=best_mean))
            continue
        mean, splits, err, wall = _timed_eval(evaluate, spec)
        valid = err == ""
        if valid:
            if mean > best_mean:
                best_spec, best_mean = spec, mean
                no_improve = 0
            else:
                no_improve += 1
        entries.append(LedgerEntry(
            phase=2, step=step, spec=spec, valid=valid, error=err,
            split_accuracies=list(splits),
            mean_accuracy=float(mean) if valid else float("nan"),
            wall_time_s=wall, incumbent_mean=best_mean))
        if no_improve >= config.early_stop_patience:
            stopped_early = True
            break
    return best_spec, best_mean, entries, stopped_early


def finalize(X, y, spec: PipelineSpec, seed: int) -> Pipeline:
    """Refit the winning spec on the full provided samples."""
    return Pipeline(spec, random_state=fit_seed(seed, 2)).fit(X, y)


def run_search(X, y, config: SearchConfig = SearchConfig(), evaluate=None,
               threads: int = 1) -> SearchResult:
    """Full greedy search: enumeration, random search, and the result."""
    pair, entries = phase1_enumerate(X, y, config, evaluate, threads)
    incumbent = next(e for e in entries
                     if (e.spec.preprocessor, e.spec.classifier) == pair
                     and e.valid)
    best_spec, best_mean, phase2_entries, stopped = phase2_random_search(
        X, y, pair, incumbent.mean_accuracy, incumbent.spec, config, evaluate)
    return SearchResult(best_spec=best_spec, best_mean=best_mean,
                        phase1_pair=pair, ledger=entries + phase2_entries,
                        stopped_early=stopped)


def ledger_frame(ledger: list[LedgerEntry]) -> pd.DataFrame:
    """Flatten ledger entries for search_ledger.csv."""
    rows = []
    for e in ledger:
        rows.append({
            "phase": e.phase,
            "step": e.step,
            "preprocessor": e.spec.preprocessor,
            "preprocessor_params": repr(e.spec.preprocessor_params),
            "classifier": e.spec.classifier,
            "classifier_params": repr(e.spec.classifier_params),
            "valid": e.valid,
            "error": e.error,
            "split_accuracies": ";".join(f"{a:.6f}" for a in
                                         e.split_accuracies),
            "mean_accuracy": e.mean_accuracy,
            "incumbent_mean": e.incumbent_mean,
            "wall_time_s": e.wall_time_s,
        })
    return pd.DataFrame(rows)
