import io
import json
import logging

import numpy as np
import pytest

import mlp
from config import DEFAULTS, load_config_file, parse_hidden, resolve
from data_handlers import (
    header_lines,
    load_model,
    read_truth,
    save_model,
    write_segments,
    write_sensor_track,
    write_track,
    write_truth,
)
from data_handlers.utils import file_digest
from errors import ConfigError, InputFileError, ModelFormatError
from mlp import NormalizationParams
from scanner import ScanTrack, Segment, TrackPoint
from seqio import WindowSpec
from sensors import sensor_vector
from simgen import InsertionRecord


def _rows(text: str) -> list[list[str]]:
    return [line.split("\t") for line in text.splitlines() if not line.startswith("#")]


def test_model_file_round_trip(tmp_path):
    model = mlp.init([8, 5, 1], seed=1)
    model.normalization = NormalizationParams(np.linspace(0, 1, 8), np.linspace(0.1, 0.8, 8))
    model.window = WindowSpec(300, 30)
    path = save_model(model, tmp_path / "m.model", header=["lateralscan test"])
    assert path.read_text().startswith("# lateralscan test\nformat_version 1\n")
    assert load_model(path).model_id == model.model_id


def test_load_model_errors(tmp_path):
    with pytest.raises(InputFileError):
        load_model(tmp_path / "missing.model")
    bad = tmp_path / "bad.model"
    bad.write_text("format_version 1\nend\n")
    with pytest.raises(ModelFormatError):
        load_model(bad)


def test_track_columns():
    points = [TrackPoint(0, 0, 300, 0.25, 0), TrackPoint(1, 30, 330, None, None)]
    out = io.StringIO()
    write_track(ScanTrack(points, WindowSpec(300, 30)), out, header=["x"])
    assert out.getvalue().startswith("# x\n")
    assert _rows(out.getvalue()) == [
        ["index", "start", "end", "raw", "label"],
        ["0", "0", "300", "0.250000", "0"],
        ["1", "30", "330", "NA", "NA"],
    ]


def test_segment_columns():
    out = io.StringIO()
    write_segments([Segment(60, 420, 3, 0.9, 2, 4)], out)
    assert _rows(out.getvalue()) == [["start_nt", "end_nt", "n_windows", "mean_raw"], ["60", "420", "3", "0.900000"]]


def test_sensor_track_full_precision():
    vector = sensor_vector("ACGTTGCAAC")
    out = io.StringIO()
    write_sensor_track([(0, vector), (5, None)], out)
    header, row, na_row = _rows(out.getvalue())
    assert header == ["start", "gc", "cpg", "d_yr", "d_ws", "d_mk", "f_h", "f_i", "f_v"]
    assert tuple(float(v) for v in row[1:]) == tuple(vector)
    assert na_row == ["5"] + ["NA"] * 8


def test_truth_round_trip(tmp_path):
    record = InsertionRecord("acc", "don", 500_000, 30_000)
    path = tmp_path / "t.truth.tsv"
    with open(path, "w") as f:
        write_truth(record, f, header=["lateralscan"])
    assert read_truth(path) == record


def test_read_truth_rejects_other_files(tmp_path):
    path = tmp_path / "t.tsv"
    path.write_text("a\tb\n1\t2\n")
    with pytest.raises(ConfigError):
        read_truth(path)


def test_header_lines_have_digests(tmp_path):
    path = tmp_path / "in.fasta"
    path.write_text(">s\nACGT\n")
    lines = header_lines("sensors", {"b": 1, "a": [2]}, {"input": path})
    assert lines[1] == "command: sensors"
    assert lines[2] == 'config: {"a":[2],"b":1}'
    assert lines[3] == f"input input: in.fasta sha256={file_digest(path)}"
    assert header_lines("sensors", {"b": 1, "a": [2]}, {"input": path}) == lines


def test_resolve_defaults():
    config = resolve("train", {"donor": "d.fa", "acceptor": "a.fa"})
    assert config["fragments"] == 10000
    assert config["window"] == 300
    assert config["hidden"] == [5]
    assert config["donor"] == "d.fa"


def test_resolve_precedence(tmp_path, caplog):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"train": {"epochs": 20, "lr": 0.3, "colour": "red"}, "scan": {"smooth_k": 3}}))
    with caplog.at_level(logging.WARNING, logger="config"):
        config = resolve("train", {"lr": 0.05, "epochs": None}, path)
    assert config["epochs"] == 20
    assert config["lr"] == 0.05
    assert "colour" in caplog.text
    assert resolve("scan", {}, path)["smooth_k"] == 3


def test_resolve_flat_config(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text('{"step": 100}')
    assert resolve("sensors", {}, path)["step"] == 100


def test_resolve_overlap():
    assert resolve("sensors", {"window": 300, "overlap": 270})["step"] == 30
    with pytest.raises(ConfigError):
        resolve("sensors", {"overlap": 270, "step": 30})
    with pytest.raises(ConfigError):
        resolve("sensors", {"overlap": 300})


def test_resolve_generate_needs_one_source():
    with pytest.raises(ConfigError):
        resolve("generate", {})
    assert resolve("generate", {"gc": 0.4})["gc"] == 0.4


def test_bad_config_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{nope")
    with pytest.raises(ConfigError):
        load_config_file(path, "train")


@pytest.mark.parametrize("value, expected", [("5", [5]), ("10,5", [10, 5]), (7, [7]), ([3, 2], [3, 2])])
def test_parse_hidden(value, expected):
    assert parse_hidden(value) == expected


def test_every_command_has_defaults():
    assert set(DEFAULTS) == {"train", "scan", "simulate", "sensors", "generate"}


def test_resolve_shared_record():
    config = resolve("train", {"record": "chr1", "acceptor_record": "chr2"})
    assert (config["donor_record"], config["acceptor_record"]) == ("chr1", "chr2")
    assert resolve("simulate", {"record": "x"})["acceptor_record"] == "x"
    assert resolve("train", {})["donor_record"] is None
