"""Synthetic gaze recordings with a planted, tunable class signal.

The generator stands in for the non-public human dataset: it emits the
exact four-file CSV layout (or an in-memory dataset) whose questionnaire
answers encode a planted class per trial, with the class signal injected
into pupil diameter levels and abrupt-change rates.  Per-user offsets
appear identically in baseline and experiment streams so baseline
subtraction can cancel them; an optional experiment-only per-user shift
supports the fine-tuning scenario.

Statistical realism is bounded: fixation/saccade alternation and pupil
noise are plausible but make no physiological claims.  The point is
oracle-verifiable pipeline testing.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .io import save_dataset_dir
from .records import Dataset, FixationTable, GazeStream, TrialRecord

ACTIVE_CYCLE = (1, 3, 5, 7, 9, 11, 13, 15)

# questionnaire answers per planted class, chosen to sit safely inside the
# label regions of both families
_EREL_BY_CLASS = {2: (0.5, 1.5), 3: (0.5, 0.9, 1.2)}
_LIKERT_BY_CLASS = {2: (2, 4), 3: (2, 3, 4)}


@dataclass(frozen=True)
class SynthConfig:
    n_participants: int = 4
    trials_per_participant: int = 6
    duration_cycle: tuple[int, ...] = (60, 180, 300)
    gaze_rate_hz: float = 120.0
    baseline_duration_s: float = 120.0
    fixation_rate_hz: float = 2.0
    fixation_duration_shape: float = 2.0
    fixation_duration_scale: float = 0.12
    pupil_base_mm: float = 3.5
    pupil_noise_sd_mm: float = 0.25
    px_per_mm: float = 10.0
    class_shift_mm: float = 0.0
    user_offset_sd_mm: float = 0.2
    user_experiment_shift_mm: dict = field(default_factory=dict)
    ipa_spike_rate: tuple[float, ...] = (0.0, 0.0, 0.0)
    ipa_baseline_spike_rate: float = 0.0
    ipa_spike_amplitude_mm: float = 1.0
    label_family: str = "duration"
    n_classes: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_participants < 1 or self.trials_per_participant < 1:
            raise ValueError("need at least one participant and trial")
        if any(d not in (60, 180, 300) for d in self.duration_cycle):
            raise ValueError("durations must come from {60, 180, 300}")
        for name in ("gaze_rate_hz", "baseline_duration_s", "fixation_rate_hz",
                     "fixation_duration_shape", "fixation_duration_scale",
                     "pupil_base_mm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_classes not in (2, 3):
            raise ValueError("n_classes must be 2 or 3")
        if self.label_family not in ("duration", "ppot"):
            raise ValueError("label_family must be 'duration' or 'ppot'")
        if len(self.ipa_spike_rate) < self.n_classes:
            raise ValueError("need one spike rate per class")


def load_synth_config(path) -> SynthConfig:
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    for key in ("duration_cycle", "ipa_spike_rate"):
        if key in raw and isinstance(raw[key], list):
            raw[key] = tuple(raw[key])
    return SynthConfig(**raw)


def save_synth_config(cfg: SynthConfig, path) -> None:
    raw = asdict(cfg)
    raw["duration_cycle"] = list(cfg.duration_cycle)
    raw["ipa_spike_rate"] = list(cfg.ipa_spike_rate)
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(raw, fh, sort_keys=True)


def _diameter_series(rng, n: int, level: float, noise_sd: float,
                     spike_rate: float, spike_amp: float,
                     rate: float) -> np.ndarray:
    """Gaussian noise around a level plus alternating persistent steps."""
    series = level + noise_sd * rng.standard_normal(n)
    n_spikes = int(rng.poisson(spike_rate * n / rate))
    if n_spikes:
        at = np.sort(rng.integers(1, n, size=n_spikes))
        signs = np.where(np.arange(n_spikes) % 2 == 0, 1.0, -1.0)
        steps = np.zeros(n)
        np.add.at(steps, at, spike_amp * signs)
        series = series + np.cumsum(steps)
    return series


def _gaze_stream(rng, cfg: SynthConfig, duration: float, level_mm: float,
                 spike_rate: float) -> GazeStream:
    n = int(round(duration * cfg.gaze_rate_hz))
    t = np.arange(n) / cfg.gaze_rate_hz
    x = np.clip(0.5 + 0.15 * rng.standard_normal(n), 0.0, 1.0)
    y = np.clip(0.5 + 0.15 * rng.standard_normal(n), 0.0, 1.0)
    scale = cfg.px_per_mm
    d2l = _diameter_series(rng, n, scale * level_mm, scale * cfg.pupil_noise_sd_mm,
                           spike_rate, scale * cfg.ipa_spike_amplitude_mm,
                           cfg.gaze_rate_hz)
    d2r = _diameter_series(rng, n, scale * level_mm, scale * cfg.pupil_noise_sd_mm,
                           spike_rate, scale * cfg.ipa_spike_amplitude_mm,
                           cfg.gaze_rate_hz)
    d3l = _diameter_series(rng, n, level_mm, cfg.pupil_noise_sd_mm, spike_rate,
                           cfg.ipa_spike_amplitude_mm, cfg.gaze_rate_hz)
    d3r = _diameter_series(rng, n, level_mm, cfg.pupil_noise_sd_mm, spike_rate,
                           cfg.ipa_spike_amplitude_mm, cfg.gaze_rate_hz)
    conf = rng.uniform(0.82, 1.0, n)
    return GazeStream(t, x, y, np.maximum(d2l, 0.0), np.maximum(d2r, 0.0),
                      np.maximum(d3l, 0.0), np.maximum(d3r, 0.0), conf)


def _fixation_stream(rng, cfg: SynthConfig, span: float) -> FixationTable:
    mean_dur = cfg.fixation_duration_shape * cfg.fixation_duration_scale
    mean_gap = max(1.0 / cfg.fixation_rate_hz - mean_dur, 0.02)
    rows_id, rows_start, rows_dur, rows_disp, rows_x, rows_y = \
        [], [], [], [], [], []
    t = float(rng.uniform(0.0, 0.2))
    fid = 1
    while True:
        dur = max(float(rng.gamma(cfg.fixation_duration_shape,
                                  cfg.fixation_duration_scale)), 0.02)
        if t + dur > span:
            break
        rows_id.append(fid)
        rows_start.append(t)
        rows_dur.append(dur)
        rows_disp.append(float(rng.gamma(4.0, 0.25)))
        rows_x.append(float(rng.uniform(0.1, 0.9)))
        rows_y.append(float(rng.uniform(0.1, 0.9)))
        fid += 1
        t += dur + max(float(rng.exponential(mean_gap)), 0.005)
    return FixationTable(rows_id, rows_start, rows_dur, rows_disp,
                         rows_x, rows_y)


def planted_class(cfg: SynthConfig, trial_index: int) -> int:
    return trial_index % cfg.n_classes


def generate(cfg: SynthConfig) -> Dataset:
    """Build the synthetic dataset in memory (already screened: no exclusions)."""
    trials = []
    for pi in range(cfg.n_participants):
        pid = f"p{pi + 1:02d}"
        rng_user = np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(pi,)))
        user_offset = float(rng_user.normal(0.0, cfg.user_offset_sd_mm))
        exp_shift = float(cfg.user_experiment_shift_mm.get(pid, 0.0))
        for ti in range(cfg.trials_per_participant):
            rng = np.random.default_rng(
                np.random.SeedSequence(entropy=cfg.seed, spawn_key=(pi, ti)))
            duration = float(cfg.duration_cycle[ti % len(cfg.duration_cycle)])
            cls = planted_class(cfg, ti)
            base_level = cfg.pupil_base_mm + user_offset
            exp_level = (base_level + cls * cfg.class_shift_mm + exp_shift)
            gaze = _gaze_stream(rng, cfg, duration, exp_level,
                                float(cfg.ipa_spike_rate[cls]))
            fixations = _fixation_stream(rng, cfg, duration)
            baseline_gaze = _gaze_stream(rng, cfg, cfg.baseline_duration_s,
                                         base_level,
                                         cfg.ipa_baseline_spike_rate)
            baseline_fixations = _fixation_stream(rng, cfg,
                                                  cfg.baseline_duration_s)
            e_rel = _EREL_BY_CLASS[cfg.n_classes][cls]
            likert = _LIKERT_BY_CLASS[cfg.n_classes][cls]
            trials.append(TrialRecord(
                participant_id=pid,
                trial_id=f"{pid}_t{ti + 1:02d}",
                planned_duration=duration,
                n_active=ACTIVE_CYCLE[ti % len(ACTIVE_CYCLE)],
                gaze=gaze,
                fixations=fixations,
                baseline_gaze=baseline_gaze,
                baseline_fixations=baseline_fixations,
                estimated_duration=e_rel * duration,
                ppot_likert=likert,
            ))
    return Dataset(trials=trials, screening_log=[])


def generate_csvs(cfg: SynthConfig, out_dir) -> dict[str, Path]:
    """Generate and write the four CSV files; byte-identical per seed."""
    return save_dataset_dir(generate(cfg), out_dir)
