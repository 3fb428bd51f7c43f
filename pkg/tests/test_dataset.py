import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ghreplay.climate import PRESETS, generate_series
from ghreplay.dataset import (
    DEFAULT_INPUT_BOUNDS,
    DEFAULT_TARGET_BOUNDS,
    Normalizer,
    build_samples,
    default_normalizer,
    extract_windows,
    window_count,
)
from ghreplay.rng import SeededRng


def test_default_bounds_match_configuration():
    assert DEFAULT_INPUT_BOUNDS == (
        (0.0, 50.0),
        (0.0, 100.0),
        (0.0, 1200.0),
        (0.0, 2000.0),
        (0.0, 50.0),
    )
    assert DEFAULT_TARGET_BOUNDS == ((0.0, 5.0), (0.0, 50.0))


def test_normalize_endpoints_and_midpoint():
    n = default_normalizer()
    lows = n.normalize_inputs(n.input_low[None, :])
    highs = n.normalize_inputs(n.input_high[None, :])
    mids = n.normalize_inputs(((n.input_low + n.input_high) / 2.0)[None, :])
    assert np.array_equal(lows, np.zeros((1, 5)))
    assert np.array_equal(highs, np.ones((1, 5)))
    assert np.allclose(mids, 0.5)
    assert n.clamp_count == 0


@settings(max_examples=200, deadline=None)
@given(
    frac=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    feature=st.integers(min_value=0, max_value=4),
)
def test_normalize_roundtrip_in_range(frac, feature):
    n = default_normalizer()
    value = n.input_low[feature] + frac * (n.input_high[feature] - n.input_low[feature])
    row = ((n.input_low + n.input_high) / 2.0).copy()
    row[feature] = value
    back = n.denormalize_inputs(n.normalize_inputs(row[None, :]))
    assert abs(back[0, feature] - value) < 1e-12
    assert n.clamp_count == 0


def test_roundtrip_thousand_random_values():
    n = default_normalizer()
    rng = SeededRng(21)
    values = np.array(
        [
            [n.input_low[j] + rng.random() * (n.input_high[j] - n.input_low[j]) for j in range(5)]
            for _ in range(1000)
        ]
    )
    back = n.denormalize_inputs(n.normalize_inputs(values))
    assert np.max(np.abs(back - values)) < 1e-12
    assert n.clamp_count == 0


def test_clamping_is_counted():
    n = default_normalizer()
    out = n.normalize_inputs(np.array([[-5.0, 120.0, 600.0, 500.0, 10.0]]))
    assert n.clamp_count == 2
    assert out[0, 0] == 0.0 and out[0, 1] == 1.0
    n.normalize_targets(np.array([[10.0, 10.0]]))
    assert n.clamp_count == 3


def test_no_clamping_on_generated_data():
    n = default_normalizer()
    for name in PRESETS:
        records = generate_series(PRESETS[name], days=2, rng=SeededRng(4))
        build_samples(records, name, 20, 2, n)
    assert n.clamp_count == 0


def test_normalizer_rejects_degenerate_bounds():
    with pytest.raises(ValueError, match="max > min"):
        Normalizer(
            input_low=np.zeros(5),
            input_high=np.zeros(5),
            target_low=np.zeros(2),
            target_high=np.ones(2),
        )


def test_window_count_examples():
    assert window_count(250, 250, 2) == 1
    assert window_count(254, 250, 2) == 3
    assert window_count(249, 250, 2) == 0


def test_window_count_closed_form_random_triples():
    rng = SeededRng(22)
    for _ in range(50):
        n = rng.randbelow(2000) + 1
        window_len = rng.randbelow(300) + 1
        stride = rng.randbelow(10) + 1
        expected = (n - window_len) // stride + 1 if n >= window_len else 0
        assert window_count(n, window_len, stride) == expected


def test_extract_windows_counts_match_formula():
    records = generate_series(PRESETS["GH-A"], days=1, rng=SeededRng(5))
    rng = SeededRng(23)
    for _ in range(10):
        window_len = rng.randbelow(100) + 1
        stride = rng.randbelow(8) + 1
        windows = extract_windows(records, window_len, stride)
        assert len(windows) == window_count(len(records), window_len, stride)


def test_extract_windows_contiguous_targets_from_final_record():
    records = generate_series(PRESETS["GH-A"], days=1, rng=SeededRng(6))
    windows = extract_windows(records, window_len=12, stride=3)
    for w_idx, window in enumerate(windows):
        start = w_idx * 3
        final = records[start + 11]
        assert window.end_timestamp == final.timestamp
        assert window.features.shape == (12, 5)
        assert window.target[0] == final.transpiration
        assert window.target[1] == final.photosynthesis
        assert window.features[0, 0] == records[start].t_air


def test_extract_windows_too_short_series():
    records = generate_series(PRESETS["GH-A"], days=1, rng=SeededRng(7))
    assert extract_windows(records[:5], window_len=6, stride=1) == []


def test_build_samples_normalized_and_labeled():
    records = generate_series(PRESETS["GH-B"], days=1, rng=SeededRng(8))
    samples = build_samples(records, "GH-B", 25, 2, default_normalizer())
    assert len(samples) == window_count(len(records), 25, 2)
    for s in samples[:10]:
        assert s.label == "GH-B"
        assert s.inputs.shape == (25, 5)
        assert s.targets.shape == (2,)
        assert (s.inputs >= 0.0).all() and (s.inputs <= 1.0).all()
        assert (s.targets >= 0.0).all() and (s.targets <= 1.0).all()
    ends = [s.end_timestamp for s in samples]
    assert ends == sorted(ends)


def test_build_samples_views_are_readonly():
    records = generate_series(PRESETS["GH-A"], days=1, rng=SeededRng(9))
    samples = build_samples(records, "GH-A", 10, 2, default_normalizer())
    with pytest.raises(ValueError):
        samples[0].inputs[0, 0] = 2.0
