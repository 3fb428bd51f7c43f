"""Online continual-learning loop and transfer scenarios.

The stream of one greenhouse is consumed in fixed-size batches. Each
update trains on the new batch joined with a replay draw from episodic
memory (drawn *before* the new batch is absorbed), then the test-set MSE
of the current phase is logged every few updates. A scenario chains
phases: one model and one memory persist across the greenhouse switches.
A baseline reruns a single phase with a fresh model and empty memory,
with its update counter offset so its curve overlays the scenario's.

Randomness discipline: one root seed is split into labeled streams
(init / replay / memory), so toggling replay or memory settings never
shifts another consumer's sequence.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import WindowedSample
from .memory import EpisodicMemory, MemoryConfig
from .model import (
    AdamState,
    ModelConfig,
    ModelParams,
    adam_step,
    backward,
    clip_gradients,
    init_adam,
    init_model,
    mse_loss,
    predict_batch,
)
from .rng import SeededRng


@dataclass
class Phase:
    """One greenhouse's training stream and its held-out test set."""

    label: str
    stream: list[WindowedSample]
    test_set: list[WindowedSample]

    def __post_init__(self):
        stream_ts = {s.end_timestamp for s in self.stream}
        overlap = stream_ts.intersection(s.end_timestamp for s in self.test_set)
        if overlap:
            raise ValueError(
                f"phase {self.label}: test set overlaps training stream "
                f"({len(overlap)} shared window timestamps)"
            )
        self._test_arrays: tuple[np.ndarray, np.ndarray] | None = None

    def test_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        if self._test_arrays is None:
            self._test_arrays = stack_samples(self.test_set)[:2]
        return self._test_arrays


@dataclass
class ScenarioConfig:
    phases: list[Phase]
    batch_size: int = 100
    replay_size: int = 100
    eval_every: int = 3
    test_size: int = 10000
    seed: int = 0

    def validate(self) -> None:
        if not self.phases:
            raise ValueError("ScenarioConfig: need at least one phase")
        if self.batch_size < 1:
            raise ValueError("ScenarioConfig.batch_size must be >= 1")
        if self.replay_size < 0:
            raise ValueError("ScenarioConfig.replay_size must be >= 0")
        if self.eval_every < 1:
            raise ValueError("ScenarioConfig.eval_every must be >= 1")


@dataclass
class EvalPoint:
    update_index: int
    eval_index: int
    phase: str
    mse_total: float
    mse_transpiration: float
    mse_photosynthesis: float


@dataclass
class RetentionPoint:
    """Test MSE on an *earlier* phase's test set, logged while training later."""

    update_index: int
    eval_index: int
    train_phase: str
    test_phase: str
    mse_total: float
    mse_transpiration: float
    mse_photosynthesis: float


@dataclass
class LearningCurve:
    points: list[EvalPoint] = field(default_factory=list)
    phase_starts: list[tuple[str, int]] = field(default_factory=list)

    @property
    def switch_updates(self) -> list[int]:
        """Update indices where the stream switched to a new phase."""
        return [start for _, start in self.phase_starts[1:]]


@dataclass
class TrainerState:
    params: ModelParams
    adam: AdamState
    memory: EpisodicMemory
    replay_rng: SeededRng
    memory_rng: SeededRng
    update_index: int = 0


@dataclass
class UpdateStats:
    loss: float
    new_count: int
    replay_count: int


@dataclass
class ScenarioResult:
    curve: LearningCurve
    retention: list[RetentionPoint]
    memory_rows: list[tuple[int, str, float]]   # (update_index, label, fraction)
    state: TrainerState


def stack_samples(samples: list[WindowedSample]) -> tuple[np.ndarray, np.ndarray, list]:
    """Stack samples into (inputs (B,T,D), targets (B,2), origins)."""
    inputs = np.stack([s.inputs for s in samples])
    targets = np.stack([s.targets for s in samples])
    origins = [(s.label, s.end_timestamp) for s in samples]
    return inputs, targets, origins


def train_update(
    state: TrainerState,
    new_batch: list[WindowedSample],
    model_cfg: ModelConfig,
    replay_size: int,
) -> UpdateStats:
    """One online update: train on new + replayed samples, then absorb
    the new batch into memory. Replay is drawn before absorption so a
    sample can never be replayed in the same update that introduces it."""
    if not new_batch:
        raise ValueError("train_update: empty batch")
    n_replay = min(replay_size, len(state.memory))
    replay = state.memory.draw_replay(n_replay, state.replay_rng)
    inputs, targets, origins = stack_samples(list(new_batch) + replay)
    loss, grads = backward(state.params, inputs, targets, origins)
    if model_cfg.grad_clip is not None:
        clip_gradients(grads, model_cfg.grad_clip)
    adam_step(state.params, grads, state.adam, model_cfg)
    state.memory.observe_batch(new_batch, state.memory_rng)
    return UpdateStats(loss=loss, new_count=len(new_batch), replay_count=len(replay))


def evaluate(params: ModelParams, test_set, chunk: int = 512) -> tuple[float, np.ndarray]:
    """Test-set MSE; accepts a Phase (cached arrays) or a sample list."""
    if isinstance(test_set, Phase):
        inputs, targets = test_set.test_arrays()
    else:
        if not test_set:
            raise ValueError("evaluate: empty test set")
        inputs, targets, _ = stack_samples(test_set)
    if inputs.shape[0] == 0:
        raise ValueError("evaluate: empty test set")
    predictions = predict_batch(params, inputs, chunk=chunk)
    return mse_loss(predictions, targets)


def run_phase(
    state: TrainerState,
    phase: Phase,
    scenario: ScenarioConfig,
    model_cfg: ModelConfig,
    curve: LearningCurve,
    retention_of: list[Phase] = (),
    retention_sink: list[RetentionPoint] | None = None,
    memory_sink: list[tuple[int, str, float]] | None = None,
) -> None:
    """Consume one phase's stream batch by batch, evaluating on the
    *current* phase's test set every ``eval_every`` updates (cadence is
    global: update counters carry across phases). The final partial
    batch is dropped so every update has the same size."""
    curve.phase_starts.append((phase.label, state.update_index))
    n_updates = len(phase.stream) // scenario.batch_size
    for k in range(n_updates):
        batch = phase.stream[k * scenario.batch_size : (k + 1) * scenario.batch_size]
        train_update(state, batch, model_cfg, scenario.replay_size)
        state.update_index += 1
        if memory_sink is not None:
            stats = state.memory.occupancy_stats()
            for label in sorted(stats.fractions):
                memory_sink.append((state.update_index, label, stats.fractions[label]))
        if state.update_index % scenario.eval_every == 0:
            eval_index = state.update_index // scenario.eval_every
            total, per_output = evaluate(state.params, phase)
            curve.points.append(
                EvalPoint(
                    update_index=state.update_index,
                    eval_index=eval_index,
                    phase=phase.label,
                    mse_total=total,
                    mse_transpiration=float(per_output[0]),
                    mse_photosynthesis=float(per_output[1]),
                )
            )
            if retention_sink is not None:
                for earlier in retention_of:
                    total_r, per_r = evaluate(state.params, earlier)
                    retention_sink.append(
                        RetentionPoint(
                            update_index=state.update_index,
                            eval_index=eval_index,
                            train_phase=phase.label,
                            test_phase=earlier.label,
                            mse_total=total_r,
                            mse_transpiration=float(per_r[0]),
                            mse_photosynthesis=float(per_r[1]),
                        )
                    )


def _fresh_state(scenario: ScenarioConfig, model_cfg: ModelConfig, memory_cfg: MemoryConfig) -> TrainerState:
    root = SeededRng(scenario.seed)
    return TrainerState(
        params=init_model(model_cfg, root.split("init")),
        adam=init_adam(model_cfg),
        memory=EpisodicMemory(memory_cfg),
        replay_rng=root.split("replay"),
        memory_rng=root.split("memory"),
    )


def run_scenario(
    scenario: ScenarioConfig,
    model_cfg: ModelConfig,
    memory_cfg: MemoryConfig,
    retention: bool = False,
    record_memory: bool = False,
) -> ScenarioResult:
    """Train one model across all phases in order, carrying the memory."""
    scenario.validate()
    model_cfg.validate()
    state = _fresh_state(scenario, model_cfg, memory_cfg)
    curve = LearningCurve()
    retention_points: list[RetentionPoint] = []
    memory_rows: list[tuple[int, str, float]] = []
    for idx, phase in enumerate(scenario.phases):
        run_phase(
            state,
            phase,
            scenario,
            model_cfg,
            curve,
            retention_of=scenario.phases[:idx] if retention else (),
            retention_sink=retention_points if retention else None,
            memory_sink=memory_rows if record_memory else None,
        )
    return ScenarioResult(curve, retention_points, memory_rows, state)


def phase_update_offset(scenario: ScenarioConfig, phase_label: str) -> int:
    """Global update index at which the named phase begins."""
    offset = 0
    for phase in scenario.phases:
        if phase.label == phase_label:
            return offset
        offset += len(phase.stream) // scenario.batch_size
    raise ValueError(f"unknown phase label {phase_label!r}")


def run_baseline(
    scenario: ScenarioConfig,
    model_cfg: ModelConfig,
    memory_cfg: MemoryConfig,
    phase_label: str,
) -> ScenarioResult:
    """Fresh model + empty memory trained on a single named phase, with
    update indices offset so the curve overlays the scenario's."""
    scenario.validate()
    model_cfg.validate()
    phase = next((p for p in scenario.phases if p.label == phase_label), None)
    if phase is None:
        raise ValueError(f"unknown phase label {phase_label!r}")
    if len(phase.stream) < scenario.batch_size:
        raise ValueError(
            f"phase {phase_label!r} stream ({len(phase.stream)} samples) is "
            f"shorter than one batch ({scenario.batch_size})"
        )
    state = _fresh_state(scenario, model_cfg, memory_cfg)
    state.update_index = phase_update_offset(scenario, phase_label)
    curve = LearningCurve()
    run_phase(state, phase, scenario, model_cfg, curve)
    return ScenarioResult(curve, [], [], state)


# ---------------------------------------------------------------------------
# curve CSV formats

CURVE_COLUMNS = (
    "update_index",
    "eval_index",
    "phase",
    "mse_total",
    "mse_transpiration",
    "mse_photosynthesis",
)
BOUNDARY_COLUMNS = ("phase", "start_update")
RETENTION_COLUMNS = (
    "update_index",
    "eval_index",
    "train_phase",
    "test_phase",
    "mse_total",
    "mse_transpiration",
    "mse_photosynthesis",
)
MEMORY_COLUMNS = ("update_index", "label", "fraction")


def write_curve_csv(path: str | Path, curve: LearningCurve) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CURVE_COLUMNS)
        for p in curve.points:
            writer.writerow(
                [
                    p.update_index,
                    p.eval_index,
                    p.phase,
                    repr(p.mse_total),
                    repr(p.mse_transpiration),
                    repr(p.mse_photosynthesis),
                ]
            )


def read_curve_csv(path: str | Path) -> list[EvalPoint]:
    points = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CURVE_COLUMNS:
            raise ValueError(f"{path}: expected curve columns {','.join(CURVE_COLUMNS)}")
        for row in reader:
            points.append(
                EvalPoint(
                    update_index=int(row["update_index"]),
                    eval_index=int(row["eval_index"]),
                    phase=row["phase"],
                    mse_total=float(row["mse_total"]),
                    mse_transpiration=float(row["mse_transpiration"]),
                    mse_photosynthesis=float(row["mse_photosynthesis"]),
                )
            )
    return points


def boundaries_path_for(curve_path: str | Path) -> Path:
    curve_path = Path(curve_path)
    return curve_path.with_name(curve_path.stem + "_boundaries.csv")


def write_boundaries_csv(path: str | Path, curve: LearningCurve) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BOUNDARY_COLUMNS)
        for label, start in curve.phase_starts:
            writer.writerow([label, start])


def read_boundaries_csv(path: str | Path) -> list[tuple[str, int]]:
    starts = []
    with Path(path).open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != BOUNDARY_COLUMNS:
            raise ValueError(f"{path}: expected boundary columns {','.join(BOUNDARY_COLUMNS)}")
        for row in reader:
            starts.append((row["phase"], int(row["start_update"])))
    return starts


def write_retention_csv(path: str | Path, points: list[RetentionPoint]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RETENTION_COLUMNS)
        for p in points:
            writer.writerow(
                [
                    p.update_index,
                    p.eval_index,
                    p.train_phase,
                    p.test_phase,
                    repr(p.mse_total),
                    repr(p.mse_transpiration),
                    repr(p.mse_photosynthesis),
                ]
            )


def write_memory_csv(path: str | Path, rows: list[tuple[int, str, float]]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MEMORY_COLUMNS)
        for update_index, label, fraction in rows:
            writer.writerow([update_index, label, repr(fraction)])


# ---------------------------------------------------------------------------
# transferred-vs-fresh comparison

@dataclass
class CompareRow:
    phase: str
    boundary_update: int
    transferred_mse: float
    fresh_mse: float
    ratio: float
    transfer_benefit: bool


def compare_transfer(
    run_points: list[EvalPoint],
    run_starts: list[tuple[str, int]],
    baselines: list[tuple[str, list[EvalPoint]]],
) -> list[CompareRow]:
    """Per baseline phase: first post-switch eval of the transferred model
    against the fresh model's first eval, at the same update index."""
    start_by_label = dict(run_starts)
    rows = []
    for label, base_points in baselines:
        if label not in start_by_label:
            raise ValueError(f"phase {label!r} not present in the run's boundaries")
        if not base_points:
            raise ValueError(f"baseline curve for {label!r} has no evaluation points")
        run_first = next((p for p in run_points if p.phase == label), None)
        if run_first is None:
            raise ValueError(f"run curve has no evaluation points in phase {label!r}")
        base_first = base_points[0]
        if base_first.update_index != run_first.update_index:
            raise ValueError(
                f"eval cadence mismatch for {label!r}: run evaluates at update "
                f"{run_first.update_index}, baseline at {base_first.update_index}"
            )
        fresh = base_first.mse_total
        transferred = run_first.mse_total
        ratio = transferred / fresh if fresh > 0 else float("inf")
        rows.append(
            CompareRow(
                phase=label,
                boundary_update=start_by_label[label],
                transferred_mse=transferred,
                fresh_mse=fresh,
                ratio=ratio,
                transfer_benefit=transferred < fresh,
            )
        )
    return rows


COMPARE_COLUMNS = (
    "phase",
    "boundary_update",
    "transferred_mse",
    "fresh_mse",
    "ratio",
    "transfer_benefit",
)


def write_compare_csv(path: str | Path, rows: list[CompareRow]) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARE_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.phase,
                    r.boundary_update,
                    repr(r.transferred_mse),
                    repr(r.fresh_mse),
                    repr(r.ratio),
                    "pass" if r.transfer_benefit else "fail",
                ]
            )
