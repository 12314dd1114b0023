"""Command-line workflow with deterministic, file-based handoffs.

Subcommands: synth, extract, label, automl, eval, finetune.  Outputs are
written atomically (temp file + rename) and every command echoes a JSON
manifest of inputs, configuration, seed and content digests to stdout.
Commands are pure functions of (input files, config, seed) up to the
timestamps inside manifests, so reruns produce byte-identical artifacts.

Sweeps over the (t_w, family, classes) grid follow the file naming
convention features_tw{t}.csv / labels_tw{t}_{family}{k}.csv /
pipeline_tw{t}_{family}{k}.json, driven either by single-setting flags or
by a YAML settings matrix ({tw: [...], family: [...], classes: [...]}).
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import pandas as pd
import yaml

from .automl import SearchConfig, finalize, ledger_frame, run_search
from .errors import GazetimeError
from .estimators.pipeline import load_pipeline, pipeline_to_json
from .features import DEFAULT_MIN_CONFIDENCE, extract_all, read_features_csv
from .io import load_dataset, read_questionnaire_csv, save_dataset
from .labels import LabelSpec, label_features, read_labels_csv, samples_from_frames
from .protocols import condition_split_eval, finetune_eval, holdout_eval
from .screening import ScreeningPolicy
from .splitting import split_analysis_test
from .synth import SynthConfig, generate, load_synth_config

CONDITION_KEYS = ("n_active", "planned_duration_s")


# ---------------------------------------------------------------- helpers

def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _replace_into(tmp: str, final: Path) -> None:
    os.replace(tmp, final)


def _atomic_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        _replace_into(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_frame(path: Path, frame) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    os.close(fd)
    try:
        frame.to_csv(tmp, index=False)
        _replace_into(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _manifest(command: str, inputs: dict, outputs: list[Path], config: dict,
              seed=None) -> None:
    doc = {
        "command": command,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": seed,
        "config": config,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    print(json.dumps(doc, sort_keys=True))


def _tw_tag(t_w: float) -> str:
    return f"{t_w:g}"


def features_filename(t_w: float) -> str:
    return f"features_tw{_tw_tag(t_w)}.csv"


def labels_filename(t_w: float, family: str, n_classes: int) -> str:
    return f"labels_tw{_tw_tag(t_w)}_{family}{n_classes}.csv"


def pipeline_filename(t_w: float, family: str, n_classes: int) -> str:
    return f"pipeline_tw{_tw_tag(t_w)}_{family}{n_classes}.json"


def ledger_filename(t_w: float, family: str, n_classes: int) -> str:
    return f"search_ledger_tw{_tw_tag(t_w)}_{family}{n_classes}.csv"


def _setting_tag(t_w: float, family: str, n_classes: int) -> str:
    return f"tw{_tw_tag(t_w)}_{family}{n_classes}"


def _parse_tw_list(text: str) -> list[float]:
    values = [float(part) for part in text.split(",") if part]
    if not values or any(v <= 0 for v in values):
        raise argparse.ArgumentTypeError("window sizes must be positive")
    return values


def _settings_grid(args) -> list[tuple[float, str, int]]:
    """Expand --settings or the single-setting flags into a grid."""
    if getattr(args, "settings", None):
        with open(args.settings, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
        tws = [float(v) for v in raw["tw"]]
        families = list(raw["family"])
        arities = [int(v) for v in raw["classes"]]
    else:
        tws = args.tw if isinstance(args.tw, list) else [args.tw]
        families = [args.family]
        arities = [args.classes]
    return [(t, fam, k) for t in tws for fam in families for k in arities]


def _load_samples(features_path: Path, labels_path: Path):
    features = read_features_csv(features_path)
    labels = read_labels_csv(labels_path)
    return samples_from_frames(features, labels)


def _analysis_test(samples, args):
    analysis_idx, test_idx = split_analysis_test(
        samples.y, args.test_fraction, args.seed,
        granularity=args.split_granularity,
        groups=samples.column("trial_id"))
    return samples.subset(analysis_idx), samples.subset(test_idx)


# ------------------------------------------------------------ subcommands

def cmd_synth(args) -> None:
    cfg = (load_synth_config(args.config) if args.config else SynthConfig())
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = generate(cfg)
    finals = [out_dir / name for name in
              ("gaze.csv", "fixations.csv", "trials.csv", "questionnaire.csv")]
    tmps = [str(p) + f".tmp{os.getpid()}" for p in finals]
    try:
        save_dataset(dataset, *tmps)
        for tmp, final in zip(tmps, finals):
            _replace_into(tmp, final)
    finally:
        for tmp in tmps:
            if os.path.exists(tmp):
                os.unlink(tmp)
    config = dataclasses.asdict(cfg)
    config["duration_cycle"] = list(cfg.duration_cycle)
    config["ipa_spike_rate"] = list(cfg.ipa_spike_rate)
    _manifest("synth", [Path(args.config)] if args.config else [], finals,
              config, seed=cfg.seed)


def cmd_extract(args) -> None:
    policy = ScreeningPolicy(min_mean_confidence=args.screen_confidence)
    dataset = load_dataset(args.gaze, args.fixations, args.trials,
                           args.questionnaire, policy)
    out_dir = Path(args.out_dir)
    outputs = []
    for t_w in args.tw:
        frame = extract_all(dataset, t_w, args.min_confidence,
                            threads=args.threads)
        path = out_dir / features_filename(t_w)
        _atomic_frame(path, frame)
        outputs.append(path)
    _manifest("extract",
              [Path(p) for p in (args.gaze, args.fixations, args.trials,
                                 args.questionnaire)],
              outputs,
              {"tw": args.tw, "min_confidence": args.min_confidence,
               "retained_trials": len(dataset.trials),
               "excluded_trials": len(dataset.screening_log),
               "threads": args.threads})


def cmd_label(args) -> None:
    questionnaire = read_questionnaire_csv(args.questionnaire)
    out_dir = Path(args.out_dir)
    data_dir = Path(args.data_dir) if args.data_dir else None
    outputs, inputs, distributions = [], [Path(args.questionnaire)], {}
    for t_w, family, n_classes in _settings_grid(args):
        features_path = (Path(args.features) if args.features
                         else data_dir / features_filename(t_w))
        inputs.append(features_path)
        samples = label_features(read_features_csv(features_path),
                                 questionnaire, LabelSpec(family, n_classes))
        path = out_dir / labels_filename(t_w, family, n_classes)
        _atomic_frame(path, samples.labels_frame())
        outputs.append(path)
        distributions[_setting_tag(t_w, family, n_classes)] = {
            "counts": samples.class_counts(),
            "majority_share": samples.majority_share,
        }
    _manifest("label", inputs, outputs, {"distributions": distributions})


def cmd_automl(args) -> None:
    out_dir = Path(args.out_dir)
    data_dir = Path(args.data_dir) if args.data_dir else None
    config = SearchConfig(max_hpo_steps=args.max_hpo_steps,
                          early_stop_patience=args.patience,
                          n_eval_splits=args.splits,
                          train_fraction=args.train_fraction,
                          seed=args.seed)
    inputs, outputs, summary = [], [], {}
    for t_w, family, n_classes in _settings_grid(args):
        features_path = (Path(args.features) if args.features
                         else data_dir / features_filename(t_w))
        labels_path = (Path(args.labels) if args.labels
                       else data_dir / labels_filename(t_w, family, n_classes))
        inputs.extend([features_path, labels_path])
        samples = _load_samples(features_path, labels_path)
        analysis, _ = _analysis_test(samples, args)
        result = run_search(analysis.X, analysis.y, config,
                            threads=args.threads)
        pipe = finalize(analysis.X, analysis.y, result.best_spec, args.seed)
        tag = _setting_tag(t_w, family, n_classes)
        pipe_path = out_dir / pipeline_filename(t_w, family, n_classes)
        ledger_path = out_dir / ledger_filename(t_w, family, n_classes)
        _atomic_text(pipe_path, pipeline_to_json(pipe))
        _atomic_frame(ledger_path, ledger_frame(result.ledger))
        outputs.extend([pipe_path, ledger_path])
        summary[tag] = {
            "best_preprocessor": result.best_spec.preprocessor,
            "best_classifier": result.best_spec.classifier,
            "best_mean_accuracy": result.best_mean,
            "evaluations": len(result.ledger),
            "stopped_early": result.stopped_early,
        }
    _manifest("automl", inputs, outputs,
              {"search": dataclasses.asdict(config),
               "test_fraction": args.test_fraction,
               "split_granularity": args.split_granularity,
               "summary": summary, "threads": args.threads},
              seed=args.seed)


def _report_row(report, tag: str) -> dict:
    row = report.to_dict()
    row.pop("accuracies")
    row["setting"] = tag
    return row


def cmd_eval(args) -> None:
    out_dir = Path(args.out_dir)
    data_dir = Path(args.data_dir) if args.data_dir else None
    nested = {"holdout": {}}
    for key in CONDITION_KEYS:
        nested[f"condition:{key}"] = {}
    flat_rows = []
    inputs, outputs = [], []
    condition_reports = {}  # (family, n_classes, key) -> {t_w: reports}
    for t_w, family, n_classes in _settings_grid(args):
        features_path = (Path(args.features) if args.features
                         else data_dir / features_filename(t_w))
        labels_path = (Path(args.labels) if args.labels
                       else data_dir / labels_filename(t_w, family, n_classes))
        pipe_path = (Path(args.pipeline) if args.pipeline
                     else data_dir / pipeline_filename(t_w, family, n_classes))
        inputs.extend([features_path, labels_path, pipe_path])
        samples = _load_samples(features_path, labels_path)
        spec = load_pipeline(pipe_path).spec
        analysis, test = _analysis_test(samples, args)
        tag = _setting_tag(t_w, family, n_classes)

        report = holdout_eval(spec, analysis, test, repetitions=args.reps,
                              seed=args.seed, threads=args.threads)
        nested["holdout"][tag] = report.to_dict()
        flat_rows.append(_report_row(report, tag))
        for key in CONDITION_KEYS:
            by_value = condition_split_eval(spec, samples, key,
                                            repetitions=args.reps,
                                            seed=args.seed,
                                            threads=args.threads)
            nested[f"condition:{key}"][tag] = {
                str(value): rep.to_dict() for value, rep in by_value.items()}
            flat_rows.extend(_report_row(rep, tag)
                             for rep in by_value.values())
            condition_reports.setdefault((family, n_classes, key), {})[t_w] = \
                by_value

    report_json = out_dir / "report.json"
    report_csv = out_dir / "report.csv"
    _atomic_text(report_json, json.dumps(nested, sort_keys=True, indent=2))
    _atomic_frame(report_csv, pd.DataFrame(flat_rows))
    outputs.extend([report_json, report_csv])
    if args.plots:
        from .plots import condition_accuracy_plot
        for (family, n_classes, key), by_tw in condition_reports.items():
            path = out_dir / f"plot_{family}{n_classes}_{key}.svg"
            fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".svg")
            os.close(fd)
            try:
                condition_accuracy_plot(by_tw, tmp, xlabel=key)
                _replace_into(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
            outputs.append(path)
    _manifest("eval", inputs, outputs,
              {"reps": args.reps, "test_fraction": args.test_fraction,
               "split_granularity": args.split_granularity,
               "threads": args.threads},
              seed=args.seed)


def cmd_finetune(args) -> None:
    out_dir = Path(args.out_dir)
    data_dir = Path(args.data_dir) if args.data_dir else None
    nested, flat_rows = {}, []
    inputs, outputs = [], []
    for t_w, family, n_classes in _settings_grid(args):
        features_path = (Path(args.features) if args.features
                         else data_dir / features_filename(t_w))
        labels_path = (Path(args.labels) if args.labels
                       else data_dir / labels_filename(t_w, family, n_classes))
        pipe_path = (Path(args.pipeline) if args.pipeline
                     else data_dir / pipeline_filename(t_w, family, n_classes))
        inputs.extend([features_path, labels_path, pipe_path])
        samples = _load_samples(features_path, labels_path)
        spec = load_pipeline(pipe_path).spec
        participants = (args.participants.split(",") if args.participants
                        else sorted(set(samples.column("participant_id"))))
        tag = _setting_tag(t_w, family, n_classes)
        nested[tag] = {}
        for pid in participants:
            report = finetune_eval(spec, samples, pid,
                                   setup_window=args.setup_window,
                                   repetitions=args.reps, seed=args.seed,
                                   threads=args.threads)
            nested[tag][pid] = report.to_dict()
            row = report.to_dict()
            row["setting"] = tag
            flat_rows.append(row)
    report_json = out_dir / "finetune_report.json"
    report_csv = out_dir / "finetune_report.csv"
    _atomic_text(report_json, json.dumps(nested, sort_keys=True, indent=2))
    _atomic_frame(report_csv, pd.DataFrame(flat_rows))
    outputs.extend([report_json, report_csv])
    _manifest("finetune", inputs, outputs,
              {"reps": args.reps, "setup_window": args.setup_window,
               "threads": args.threads},
              seed=args.seed)


# ---------------------------------------------------------------- parser

def _add_setting_flags(p: argparse.ArgumentParser, multi_tw: bool) -> None:
    if multi_tw:
        p.add_argument("--tw", type=_parse_tw_list, default=[2.0],
                       help="comma-separated window sizes in seconds")
    else:
        p.add_argument("--tw", type=float, default=2.0,
                       help="window size in seconds")
    p.add_argument("--family", choices=("duration", "ppot"),
                   default="duration")
    p.add_argument("--classes", type=int, choices=(2, 3), default=2)
    p.add_argument("--settings",
                   help="YAML matrix {tw: [...], family: [...], classes: [...]}"
                        " overriding the single-setting flags")


def _add_split_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--split-granularity", choices=("slice", "trial"),
                   default="slice")


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--features", help="single features.csv (overrides "
                                      "--data-dir naming convention)")
    p.add_argument("--labels", help="single labels.csv")
    p.add_argument("--data-dir", help="directory holding conventionally "
                                      "named features/labels/pipeline files")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazetime",
        description="Eye-tracking based subjective time-perception "
                    "classification workflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate synthetic recordings")
    p.add_argument("--config", help="YAML generator configuration")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="compute per-window features")
    p.add_argument("--gaze", required=True)
    p.add_argument("--fixations", required=True)
    p.add_argument("--trials", required=True)
    p.add_argument("--questionnaire", required=True)
    p.add_argument("--tw", type=_parse_tw_list, required=True,
                   help="comma-separated window sizes in seconds")
    p.add_argument("--min-confidence", type=float,
                   default=DEFAULT_MIN_CONFIDENCE,
                   help="per-sample confidence gate for pupil features")
    p.add_argument("--screen-confidence", type=float, default=0.6,
                   help="mean-confidence screening cutoff (trial exclusion)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("label", help="turn questionnaire answers into labels")
    p.add_argument("--questionnaire", required=True)
    p.add_argument("--features", help="single features.csv")
    p.add_argument("--data-dir", help="directory with features_tw*.csv")
    _add_setting_flags(p, multi_tw=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("automl", help="two-phase greedy pipeline search")
    _add_io_flags(p)
    _add_setting_flags(p, multi_tw=True)
    _add_split_flags(p)
    p.add_argument("--max-hpo-steps", type=int, default=1024)
    p.add_argument("--patience", type=int, default=100)
    p.add_argument("--splits", type=int, default=5)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_automl)

    p = sub.add_parser("eval", help="holdout and per-condition evaluation")
    _add_io_flags(p)
    p.add_argument("--pipeline", help="single fitted pipeline JSON")
    _add_setting_flags(p, multi_tw=True)
    _add_split_flags(p)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--plots", action="store_true",
                   help="emit accuracy-vs-condition SVG plots")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("finetune", help="per-user setup-phase comparison")
    _add_io_flags(p)
    p.add_argument("--pipeline", help="single fitted pipeline JSON")
    _add_setting_flags(p, multi_tw=True)
    p.add_argument("--participants",
                   help="comma-separated participant ids (default: all)")
    p.add_argument("--setup-window", type=float, default=30.0)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_finetune)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (GazetimeError, OSError) as exc:
        print(f"gazetime {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
