import json

import pytest

from ghreplay.cli import main
from ghreplay.trainer import read_boundaries_csv, read_curve_csv


def write_tiny_spec(tmp_path, **extra):
    doc = {
        "seed": 3,
        "out_dir": str(tmp_path / "out"),
        "days_per_phase": 2,
        "greenhouses": [{"name": "GH-A"}, {"name": "GH-C"}],
        "data": {"window_len": 10, "stride": 2, "start_timestamp": 0},
        "model": {"hidden_dim": 4, "dense_dim": 4, "learning_rate": 0.01},
        "memory": {"capacity": 50, "substitution_probability": 0.1, "strategy": "per-batch"},
        "scenario": {"batch_size": 20, "replay_size": 20, "eval_every": 3, "test_size": 30},
    }
    doc.update(extra)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    return path, doc


def test_generate_writes_expected_rows(tmp_path, capsys):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    out = tmp_path / "out"
    for name in ("GH-A", "GH-C"):
        lines = (out / f"{name}.csv").read_text().splitlines()
        assert len(lines) == 2 * 288 + 1  # days * records/day + header
    assert "manifest.json" in capsys.readouterr().out


def test_generate_rerun_is_byte_identical(tmp_path):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    first = (tmp_path / "out" / "GH-A.csv").read_bytes()
    assert main(["generate", "--spec", str(spec_path)]) == 0
    assert (tmp_path / "out" / "GH-A.csv").read_bytes() == first


def test_generate_invalid_params_exit_2_before_writing(tmp_path, capsys):
    spec_path, doc = write_tiny_spec(
        tmp_path, greenhouses=[{"name": "odd", "params": {"day_length_h": 25}}]
    )
    assert main(["generate", "--spec", str(spec_path)]) == 2
    assert "day_length_h" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_run_produces_artifacts(tmp_path):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    assert main(["run", "--spec", str(spec_path), "--retention", "--dump-memory"]) == 0
    out = tmp_path / "out"
    points = read_curve_csv(out / "curve.csv")
    starts = read_boundaries_csv(out / "curve_boundaries.csv")
    assert points and starts[0] == ("GH-A", 0)
    assert len(starts) == 2
    assert (out / "checkpoint.npz").exists()
    retention_lines = (out / "retention.csv").read_text().splitlines()
    assert retention_lines[0] == "update_index,eval_index,train_phase,test_phase,mse_total,mse_transpiration,mse_photosynthesis"
    memory_lines = (out / "memory.csv").read_text().splitlines()
    assert memory_lines[0] == "update_index,label,fraction"
    assert len(memory_lines) > 1


def test_run_missing_dataset_exit_2_names_path(tmp_path, capsys):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["run", "--spec", str(spec_path)]) == 2
    err = capsys.readouterr().err
    assert "GH-A.csv" in err and "error:" in err


def test_run_replay_size_zero_flag(tmp_path):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    assert main(["run", "--spec", str(spec_path), "--replay-size", "0"]) == 0
    assert (tmp_path / "out" / "curve.csv").exists()


def test_baseline_unknown_phase_exit_2(tmp_path, capsys):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    assert main(["baseline", "--spec", str(spec_path), "--phase", "GH-Z"]) == 2
    assert "GH-Z" in capsys.readouterr().err


def test_baseline_and_compare_pipeline(tmp_path, capsys):
    spec_path, doc = write_tiny_spec(tmp_path)
    out = tmp_path / "out"
    assert main(["generate", "--spec", str(spec_path)]) == 0
    assert main(["run", "--spec", str(spec_path)]) == 0
    assert main(["baseline", "--spec", str(spec_path), "--phase", "GH-C"]) == 0
    base_starts = read_boundaries_csv(out / "baseline_GH-C_boundaries.csv")
    run_starts = read_boundaries_csv(out / "curve_boundaries.csv")
    assert base_starts == [("GH-C", dict(run_starts)["GH-C"])]
    capsys.readouterr()
    assert main(
        [
            "compare",
            str(out / "curve.csv"),
            str(out / "baseline_GH-C.csv"),
            "--out",
            str(out / "compare.csv"),
        ]
    ) == 0
    printed = capsys.readouterr().out
    assert "GH-C" in printed and ("pass" in printed or "fail" in printed)
    compare_lines = (out / "compare.csv").read_text().splitlines()
    assert compare_lines[0] == "phase,boundary_update,transferred_mse,fresh_mse,ratio,transfer_benefit"
    assert compare_lines[1].startswith("GH-C,")


def test_seed_flag_overrides_spec(tmp_path):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    assert main(["run", "--spec", str(spec_path)]) == 0
    first = (tmp_path / "out" / "curve.csv").read_text()
    # same seed again: identical; different seed: different data split and init
    assert main(["run", "--spec", str(spec_path)]) == 0
    assert (tmp_path / "out" / "curve.csv").read_text() == first
    assert main(["generate", "--spec", str(spec_path), "--seed", "99"]) == 0
    assert main(["run", "--spec", str(spec_path), "--seed", "99"]) == 0
    assert (tmp_path / "out" / "curve.csv").read_text() != first


def test_run_does_not_mutate_input_datasets(tmp_path):
    spec_path, doc = write_tiny_spec(tmp_path)
    assert main(["generate", "--spec", str(spec_path)]) == 0
    before = (tmp_path / "out" / "GH-A.csv").read_bytes()
    assert main(["run", "--spec", str(spec_path)]) == 0
    assert (tmp_path / "out" / "GH-A.csv").read_bytes() == before


def test_compare_malformed_curve_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("nope,columns\n1,2\n")
    (tmp_path / "bad_boundaries.csv").write_text("phase,start_update\nGH-A,0\n")
    assert main(["compare", str(bad), str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


def test_unknown_spec_key_exit_2(tmp_path, capsys):
    spec_path, doc = write_tiny_spec(tmp_path, mystery=1)
    assert main(["generate", "--spec", str(spec_path)]) == 2
    assert "mystery" in capsys.readouterr().err


def test_help_lists_flags(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["run", "--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for flag in ("--spec", "--seed", "--out", "--preset", "--replay-size",
                 "--memory-strategy", "--retention", "--dump-memory"):
        assert flag in text
