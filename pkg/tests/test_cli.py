import pytest

from main import main
from seqio import NucleotideSequence, read_fasta
from sensors import sensor_vector

TRAIN_FLAGS = ["--fragments", "100", "--epochs", "15", "--seed", "3", "--quiet"]


@pytest.fixture
def genomes(tmp_path):
    donor, acceptor = tmp_path / "donor.fasta", tmp_path / "acceptor.fasta"
    assert main(["generate", "--gc", "0.3", "--length", "30000", "--seed", "1", "--id", "don", "--out", str(donor), "-q"]) == 0
    assert main(["generate", "--gc", "0.7", "--length", "30000", "--seed", "2", "--id", "acc", "--out", str(acceptor), "-q"]) == 0
    return donor, acceptor


def test_generate_writes_fasta(genomes):
    donor, _ = genomes
    (record,) = read_fasta(donor)
    assert record.id == "don"
    assert record.length == 30000


def test_train_then_scan(tmp_path, genomes):
    donor, acceptor = genomes
    prefix = tmp_path / "run"
    assert main(["train", str(donor), str(acceptor), "--hidden", "5", "--window", "300", "--out", str(prefix), *TRAIN_FLAGS]) == 0

    summary = (tmp_path / "run.summary.txt").read_text()
    assert "architecture: 8-5-1" in summary
    assert "n_train: 200" in summary
    report = (tmp_path / "run.report.tsv").read_text().splitlines()
    assert report[0].startswith("# lateralscan ")
    body = [line for line in report if not line.startswith("#")]
    assert body[0] == "epoch\tmean_loss"
    assert len(body) == 16

    model_text = (tmp_path / "run.model").read_text()
    assert "window_length 300" in model_text and "window_step 30" in model_text

    scan_prefix = tmp_path / "acc"
    assert main(["scan", str(tmp_path / "run.model"), str(acceptor), "--out", str(scan_prefix), "-q"]) == 0
    track = [line.split("\t") for line in (tmp_path / "acc.track.tsv").read_text().splitlines() if not line.startswith("#")]
    assert track[0] == ["index", "start", "end", "raw", "label"]
    labels = [row[4] for row in track[1:]]
    assert len(labels) == (30000 - 300) // 30 + 1
    assert labels.count("0") / len(labels) >= 0.95
    segments = (tmp_path / "acc.segments.tsv").read_text().splitlines()
    assert [line for line in segments if not line.startswith("#")] == ["start_nt\tend_nt\tn_windows\tmean_raw"]


def test_runs_are_byte_identical(tmp_path, genomes):
    donor, acceptor = genomes
    prefix, scan_prefix = tmp_path / "run", tmp_path / "scan"
    outputs = ["run.model", "run.report.tsv", "run.summary.txt", "scan.track.tsv", "scan.segments.tsv"]

    def run_once():
        assert main(["train", str(donor), str(acceptor), "--out", str(prefix), *TRAIN_FLAGS]) == 0
        assert main(["scan", str(tmp_path / "run.model"), str(donor), "--out", str(scan_prefix), "-q"]) == 0
        return [(tmp_path / name).read_bytes() for name in outputs]

    assert run_once() == run_once()


def test_config_file_and_echo(tmp_path, genomes):
    donor, acceptor = genomes
    config = tmp_path / "run.json"
    config.write_text('{"train": {"fragments": 40, "epochs": 3, "hidden": "4,3"}}')
    assert main(["train", str(donor), str(acceptor), "--config", str(config), "--out", str(tmp_path / "c"), "-q"]) == 0
    summary = (tmp_path / "c.summary.txt").read_text()
    assert "architecture: 8-4-3-1" in summary
    assert '"fragments":40' in summary
    assert "epochs_run: 3" in summary


def test_missing_input_is_an_input_error(tmp_path, capsys):
    code = main(["train", str(tmp_path / "nope.fasta"), str(tmp_path / "nope2.fasta"), "-q"])
    assert code == 2
    assert "error [input]" in capsys.readouterr().err


def test_bad_flag_is_an_input_error(capsys):
    assert main(["scan"]) == 2


def test_sampling_failure_is_a_runtime_error(tmp_path, fasta_file, capsys):
    donor = fasta_file("n.fasta", [NucleotideSequence("n", "N" * 1000)])
    acceptor = fasta_file("a.fasta", [NucleotideSequence("a", "ACGT" * 250)])
    code = main(["train", str(donor), str(acceptor), "--fragments", "2", "--out", str(tmp_path / "x"), "-q"])
    assert code == 1
    assert "error [sampling]" in capsys.readouterr().err


def test_sensors_command(tmp_path, fasta_file):
    residues = "ACGTTGCAAG" * 30 + "N" + "ACGT" * 10
    path = fasta_file("one.fasta", [NucleotideSequence("one", residues)])
    out = tmp_path / "sensors.tsv"
    assert main(["sensors", str(path), "--window", "300", "--step", "30", "--out", str(out), "-q"]) == 0
    rows = [line.split("\t") for line in out.read_text().splitlines() if not line.startswith("#")]
    assert rows[0][0] == "start"
    assert rows[1][0] == "0"
    assert tuple(float(v) for v in rows[1][1:]) == tuple(sensor_vector(residues[:300]))
    assert rows[2] == ["30"] + ["NA"] * 8


def test_simulate_command(tmp_path, genomes):
    donor, acceptor = genomes
    prefix = tmp_path / "chimera"
    argv = ["simulate", str(donor), str(acceptor), "--insert-length", "3000", "--seed", "4", "--out", str(prefix), "-q"]
    assert main(argv) == 0
    truth = [line for line in (tmp_path / "chimera.truth.tsv").read_text().splitlines() if not line.startswith("#")]
    assert truth[1].split("\t") == ["acc", "don", "15000", "3000"]
    (chimera,) = read_fasta(tmp_path / "chimera.fasta")
    assert chimera.length == 33000
    first = (tmp_path / "chimera.fasta").read_bytes()
    assert main(argv) == 0
    assert (tmp_path / "chimera.fasta").read_bytes() == first


def test_shared_record_id_selects_both_inputs(tmp_path, fasta_file):
    decoy = NucleotideSequence("decoy", "A" * 500)
    donor = fasta_file("d.fasta", [decoy, NucleotideSequence("main", "AT" * 2000)])
    acceptor = fasta_file("a.fasta", [decoy, NucleotideSequence("main", "GC" * 5000)])
    prefix = tmp_path / "shared"
    argv = ["simulate", str(donor), str(acceptor), "--record", "main", "--insert-length", "1000", "--out", str(prefix), "-q"]
    assert main(argv) == 0
    truth = [line for line in (tmp_path / "shared.truth.tsv").read_text().splitlines() if not line.startswith("#")]
    assert truth[1].split("\t") == ["main", "main", "5000", "1000"]
    (chimera,) = read_fasta(tmp_path / "shared.fasta")
    assert chimera.length == 11000


def test_zero_step_is_an_input_error(tmp_path, genomes, capsys):
    donor, acceptor = genomes
    prefix = tmp_path / "run"
    assert main(["train", str(donor), str(acceptor), "--out", str(prefix), *TRAIN_FLAGS]) == 0
    code = main(["scan", str(tmp_path / "run.model"), str(acceptor), "--step", "0", "--out", str(tmp_path / "s"), "-q"])
    assert code == 2
    assert "error [input]" in capsys.readouterr().err
