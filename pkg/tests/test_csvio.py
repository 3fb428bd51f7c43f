import pytest

from ghreplay.climate import PRESETS, generate_series
from ghreplay.csvio import COLUMNS, read_records, write_records
from ghreplay.rng import SeededRng


def test_write_read_roundtrip_at_nine_digits(tmp_path):
    records = generate_series(PRESETS["GH-A"], days=1, rng=SeededRng(1))
    path = tmp_path / "gh.csv"
    write_records(path, records)
    back = read_records(path)
    assert len(back) == len(records)
    for orig, got in zip(records, back):
        assert got.timestamp == orig.timestamp
        for name in COLUMNS[1:]:
            a, b = getattr(orig, name), getattr(got, name)
            assert b == pytest.approx(a, rel=5e-9, abs=1e-12)


def test_second_write_is_a_byte_fixed_point(tmp_path):
    records = generate_series(PRESETS["GH-B"], days=1, rng=SeededRng(2))
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    write_records(first, records)
    write_records(second, read_records(first))
    assert first.read_bytes() == second.read_bytes()


def test_header_only_file(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(",".join(COLUMNS) + "\n", encoding="utf-8")
    assert read_records(path) == []


def test_missing_column_is_reported(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,t_air,rh\n", encoding="utf-8")
    with pytest.raises(ValueError, match="missing column"):
        read_records(path)


def test_non_numeric_cell_names_line(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        ",".join(COLUMNS) + "\n"
        "0,20,80,0,650,20,0.01,0\n"
        "300,oops,80,0,650,20,0.01,0\n",
        encoding="utf-8",
    )
    with pytest.raises(ValueError, match=r"bad\.csv:3: non-numeric value 'oops' in column t_air"):
        read_records(path)


def test_shuffled_timestamps_name_first_offending_line(tmp_path):
    records = generate_series(PRESETS["GH-A"], days=1, rng=SeededRng(3))[:10]
    records[4], records[5] = records[5], records[4]
    path = tmp_path / "shuffled.csv"
    write_records(path, records)
    # rows start at line 2; the swap makes line 6 the first bad one
    with pytest.raises(ValueError, match=r"shuffled\.csv:6: timestamp"):
        read_records(path)


def test_range_violations_are_reported(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        ",".join(COLUMNS) + "\n"
        "0,20,80,-5,650,20,0.01,0\n",
        encoding="utf-8",
    )
    with pytest.raises(ValueError, match=r"bad\.csv:2: radiation"):
        read_records(path)


def test_empty_file_is_an_error(tmp_path):
    path = tmp_path / "none.csv"
    path.write_text("", encoding="utf-8")
    with pytest.raises(ValueError, match="empty file"):
        read_records(path)
