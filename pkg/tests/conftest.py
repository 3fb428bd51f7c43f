import numpy as np
import pytest

from ghreplay.climate import PRESETS, generate_series
from ghreplay.dataset import WindowedSample, build_samples, default_normalizer
from ghreplay.rng import SeededRng
from ghreplay.trainer import Phase


def make_sample(label="GH-X", end_timestamp=0, window_len=4, input_dim=5, fill=0.5):
    return WindowedSample(
        inputs=np.full((window_len, input_dim), fill),
        targets=np.array([fill, fill]),
        label=label,
        end_timestamp=end_timestamp,
    )


def build_phase(name, days, seed, window_len=50, stride=2, test_size=1000):
    """Phase built the same way the experiment layer does, without CSV I/O."""
    rng = SeededRng(seed).split(f"generator/{name}")
    records = generate_series(PRESETS[name], days, rng)
    samples = build_samples(records, name, window_len, stride, default_normalizer())
    test_rng = SeededRng(seed).split(f"test-sampling/{name}")
    test_idx = set(test_rng.sample_indices(len(samples), test_size))
    return Phase(
        label=name,
        stream=[s for i, s in enumerate(samples) if i not in test_idx],
        test_set=[samples[i] for i in sorted(test_idx)],
    )


@pytest.fixture(scope="session")
def tiny_phases():
    """Two small phases (different greenhouses) for fast trainer tests."""
    return (
        build_phase("GH-A", days=4, seed=11, window_len=10, stride=2, test_size=100),
        build_phase("GH-C", days=4, seed=11, window_len=10, stride=2, test_size=100),
    )
