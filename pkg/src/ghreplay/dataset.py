"""Windowing and fixed-range normalization of climate series.

A sample is a sliding window over the series: the model input is the
window's normalized feature rows and the target is the (transpiration,
photosynthesis) pair at the window's *final* timestep, which keeps the
prediction task causal. Normalization bounds are fixed physical ranges
rather than data statistics, so the mapping is identical across
greenhouses and across time; out-of-range values are clamped to [0, 1]
and every clamp is counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .climate import ClimateRecord

INPUT_FIELDS = ("t_air", "rh", "radiation", "co2", "t_leaf")
TARGET_FIELDS = ("transpiration", "photosynthesis")

# (min, max) physical bounds per feature
DEFAULT_INPUT_BOUNDS = (
    (0.0, 50.0),     # t_air
    (0.0, 100.0),    # rh
    (0.0, 1200.0),   # radiation
    (0.0, 2000.0),   # co2
    (0.0, 50.0),     # t_leaf
)
DEFAULT_TARGET_BOUNDS = (
    (0.0, 5.0),      # transpiration
    (0.0, 50.0),     # photosynthesis
)


@dataclass
class WindowedSample:
    """One training/test unit: a normalized window plus its target pair."""

    inputs: np.ndarray       # (window_len, 5), values in [0, 1]
    targets: np.ndarray      # (2,), values in [0, 1]
    label: str               # originating greenhouse
    end_timestamp: int       # timestamp of the window's final record


@dataclass
class Normalizer:
    """Affine [0, 1] mapping with fixed per-feature bounds and clamp counting."""

    input_low: np.ndarray
    input_high: np.ndarray
    target_low: np.ndarray
    target_high: np.ndarray
    clamp_count: int = 0

    def __post_init__(self):
        for low, high in (
            (self.input_low, self.input_high),
            (self.target_low, self.target_high),
        ):
            if not (high > low).all():
                raise ValueError("Normalizer: every feature needs max > min")

    def _normalize(self, values: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
        out = (np.asarray(values, dtype=np.float64) - low) / (high - low)
        clamped = int((out < 0.0).sum() + (out > 1.0).sum())
        if clamped:
            self.clamp_count += clamped
            out = np.clip(out, 0.0, 1.0)
        return out

    def normalize_inputs(self, values: np.ndarray) -> np.ndarray:
        return self._normalize(values, self.input_low, self.input_high)

    def normalize_targets(self, values: np.ndarray) -> np.ndarray:
        return self._normalize(values, self.target_low, self.target_high)

    def denormalize_inputs(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=np.float64) * (self.input_high - self.input_low) + self.input_low

    def denormalize_targets(self, values: np.ndarray) -> np.ndarray:
        return np.asarray(values, dtype=np.float64) * (self.target_high - self.target_low) + self.target_low


def default_normalizer() -> Normalizer:
    input_bounds = np.array(DEFAULT_INPUT_BOUNDS, dtype=np.float64)
    target_bounds = np.array(DEFAULT_TARGET_BOUNDS, dtype=np.float64)
    return Normalizer(
        input_low=input_bounds[:, 0],
        input_high=input_bounds[:, 1],
        target_low=target_bounds[:, 0],
        target_high=target_bounds[:, 1],
    )


def records_to_arrays(records: list[ClimateRecord]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split records into (inputs (N,5), targets (N,2), timestamps (N,))."""
    n = len(records)
    inputs = np.empty((n, len(INPUT_FIELDS)), dtype=np.float64)
    targets = np.empty((n, len(TARGET_FIELDS)), dtype=np.float64)
    timestamps = np.empty(n, dtype=np.int64)
    for i, r in enumerate(records):
        inputs[i] = (r.t_air, r.rh, r.radiation, r.co2, r.t_leaf)
        targets[i] = (r.transpiration, r.photosynthesis)
        timestamps[i] = r.timestamp
    return inputs, targets, timestamps


def window_count(n_records: int, window_len: int, stride: int) -> int:
    """floor((N - L)/stride) + 1 for N >= L, else 0."""
    if window_len < 1 or stride < 1:
        raise ValueError(f"window_count: need window_len, stride >= 1, got {window_len}, {stride}")
    if n_records < window_len:
        return 0
    return (n_records - window_len) // stride + 1


@dataclass
class RawWindow:
    """A window of raw (physical-unit) features before normalization."""

    features: np.ndarray     # (window_len, 5) view into the series
    target: np.ndarray       # (2,) raw target pair at the final record
    end_timestamp: int


def extract_windows(
    records: list[ClimateRecord], window_len: int, stride: int
) -> list[RawWindow]:
    """Contiguous raw windows; the target comes from each window's last record."""
    count = window_count(len(records), window_len, stride)
    if count == 0:
        return []
    inputs, targets, timestamps = records_to_arrays(records)
    inputs.flags.writeable = False
    targets.flags.writeable = False
    windows = []
    for w in range(count):
        start = w * stride
        end = start + window_len
        windows.append(
            RawWindow(
                features=inputs[start:end],
                target=targets[end - 1],
                end_timestamp=int(timestamps[end - 1]),
            )
        )
    return windows


def build_samples(
    records: list[ClimateRecord],
    label: str,
    window_len: int,
    stride: int,
    normalizer: Normalizer,
) -> list[WindowedSample]:
    """Normalized window samples in temporal order (zero-copy views)."""
    count = window_count(len(records), window_len, stride)
    if count == 0:
        return []
    inputs, targets, timestamps = records_to_arrays(records)
    norm_inputs = normalizer.normalize_inputs(inputs)
    norm_targets = normalizer.normalize_targets(targets)
    norm_inputs.flags.writeable = False
    norm_targets.flags.writeable = False
    samples = []
    for w in range(count):
        start = w * stride
        end = start + window_len
        samples.append(
            WindowedSample(
                inputs=norm_inputs[start:end],
                targets=norm_targets[end - 1],
                label=label,
                end_timestamp=int(timestamps[end - 1]),
            )
        )
    return samples
