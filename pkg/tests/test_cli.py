from __future__ import annotations

import json

import pytest

from prefattach import cli
from prefattach.manifest import RunManifest


NODES = "id,date\nA,1990-01-01\nB,1990-06-01\nC,1991-01-01\nD,1992-03-04\n"
EDGES = "citing_id,cited_id\nB,A\nC,A\nC,B\nC,B\nD,D\nD,C\nD,X\n"


@pytest.fixture
def corpus(tmp_path):
    nodes = tmp_path / "nodes.csv"
    edges = tmp_path / "edges.csv"
    nodes.write_text(NODES)
    edges.write_text(EDGES)
    return nodes, edges


@pytest.fixture(scope="module")
def simulated(tmp_path_factory):
    out = tmp_path_factory.mktemp("simulated")
    argv = ["simulate", "--steps", "3000", "--m", "3", "--seed", "11", "--output-dir", str(out)]
    assert cli.main(argv) == cli.EXIT_OK
    sequence = str(out / "sequence.jsonl")
    assert cli.main(["measure", "--sequence", sequence, "--output-dir", str(out)]) == cli.EXIT_OK
    return out


def test_ingest(corpus, tmp_path) -> None:
    nodes, edges = corpus
    out = tmp_path / "out"
    argv = ["ingest", "--nodes", str(nodes), "--edges", str(edges), "--output-dir", str(out)]
    assert cli.main([*argv, "--emit-canonical", str(out / "canonical")]) == cli.EXIT_OK
    stats = json.loads((out / "stats.json").read_text())
    assert stats["n_citations"] == 4
    assert stats["n_dangling_removed"] == 1
    assert (out / "canonical" / "edges.csv").read_text().startswith("citing_id,cited_id\n")
    manifest = RunManifest.read(out / "ingest.manifest.json")
    assert manifest.command == "ingest"
    assert [digest.path for digest in manifest.inputs] == [nodes.as_posix(), edges.as_posix()]
    assert len(manifest.outputs) == 4


def test_missing_input(tmp_path, capsys) -> None:
    argv = ["ingest", "--nodes", str(tmp_path / "nope.csv"), "--edges", str(tmp_path / "e.csv")]
    assert cli.main(argv) == cli.EXIT_USAGE
    assert "No such file" in capsys.readouterr().err


@pytest.mark.parametrize("missing", ["--nodes", "--edges"])
def test_ingest_needs_both_corpus_files(corpus, tmp_path, capsys, missing: str) -> None:
    nodes, edges = corpus
    argv = ["ingest", "--nodes", str(nodes), "--edges", str(edges), "--output-dir", str(tmp_path)]
    position = argv.index(missing)
    del argv[position : position + 2]
    with pytest.raises(SystemExit) as excinfo:
        cli.main(argv)
    assert excinfo.value.code == cli.EXIT_USAGE
    assert missing in capsys.readouterr().err


def test_date_window_needs_both_ends(corpus, tmp_path) -> None:
    nodes, edges = corpus
    argv = ["ingest", "--nodes", str(nodes), "--edges", str(edges), "--from", "1990"]
    assert cli.main([*argv, "--output-dir", str(tmp_path)]) == cli.EXIT_USAGE


def test_simulate(simulated) -> None:
    summary = json.loads((simulated / "simulation.json").read_text())
    assert summary["config"]["T"] == 3000
    assert summary["config"]["rng_seed"] == 11
    assert "price_compliant" in summary["compliance"]
    manifest = RunManifest.read(simulated / "simulate.manifest.json")
    assert manifest.seeds == {"seed": 11}


def test_simulate_invalid_configuration(tmp_path) -> None:
    assert cli.main(["simulate", "--steps", "0", "--output-dir", str(tmp_path)]) == cli.EXIT_USAGE


def test_simulate_records_the_entropy_seed(tmp_path) -> None:
    assert cli.main(["simulate", "--steps", "50", "--output-dir", str(tmp_path)]) == cli.EXIT_OK
    manifest = RunManifest.read(tmp_path / "simulate.manifest.json")
    assert manifest.argv[0] == "--seed"
    assert int(manifest.argv[1]) == manifest.seeds["seed"]
    assert cli.main(["--replay", str(tmp_path / "simulate.manifest.json")]) == cli.EXIT_OK


def test_simulate_from_config(tmp_path) -> None:
    config = tmp_path / "model.json"
    config.write_text('{"attachment": "log_linear", "parameter": 0.8, "T": 200, "rng_seed": 5}')
    argv = ["simulate", "--config", str(config), "--output-dir", str(tmp_path)]
    assert cli.main(argv) == cli.EXIT_OK
    summary = json.loads((tmp_path / "simulation.json").read_text())
    assert summary["config"]["rng_seed"] == 5
    assert summary["config"]["parameter"] == 0.8


def test_measure(simulated) -> None:
    header, *rows = (simulated / "rate_binned.csv").read_text().splitlines()
    assert header == "k,a_hat_binned,support"
    assert rows
    assert (simulated / "rate.json").is_file()


def test_jeong_needs_a_bi_epochal_sequence(simulated, tmp_path, capsys) -> None:
    argv = ["measure", "--sequence", str(simulated / "sequence.jsonl"), "--estimator", "jeong"]
    assert cli.main([*argv, "--output-dir", str(tmp_path)]) == cli.EXIT_USAGE
    assert "bi-epochal" in capsys.readouterr().err


def test_measure_bi_epochal_corpus(corpus, tmp_path) -> None:
    nodes, edges = corpus
    argv = ["measure", "--nodes", str(nodes), "--edges", str(edges), "--output-dir", str(tmp_path)]
    argv += ["--resolution", "biepochal", "--t1", "1990:1990", "--t2", "1991:1992"]
    assert cli.main([*argv, "--estimator", "jeong"]) == cli.EXIT_OK
    assert (tmp_path / "rate.csv").read_text().startswith("k,a_hat,support\n")


def test_fitattach_and_score(simulated, tmp_path) -> None:
    binned = str(simulated / "rate_binned.csv")
    assert cli.main(["fitattach", "--rate", binned, "--output-dir", str(tmp_path)]) == 0
    comparison = json.loads((tmp_path / "af_comparison.json").read_text())
    assert {row["family"] for row in comparison["ranking"]} == {"log_linear", "nonlinear"}
    fit = json.loads((tmp_path / "fit_af_log_linear.json").read_text())
    assert 0.5 < fit["parameters"]["alpha"] < 1.5

    assert cli.main(["score", "--rate", binned, "--output-dir", str(tmp_path)]) == 0
    score = json.loads((tmp_path / "score.json").read_text())
    assert score["score"] > 0


def test_fitdist(simulated, tmp_path) -> None:
    argv = ["fitdist", "--sequence", str(simulated / "sequence.jsonl"), "--bootstrap", "0"]
    argv += ["--family", "power_law,lognormal", "--output-dir", str(tmp_path)]
    assert cli.main([*argv, "--lcurve", "0.15,0.40,0.16"]) == cli.EXIT_OK
    assert json.loads((tmp_path / "fit_power_law.json").read_text())["k_min"] == 1
    assert (tmp_path / "comparison.json").is_file()
    assert (tmp_path / "overlay.csv").read_text().startswith("k,c_k,c_power_law,c_lognormal,l_k")


@pytest.mark.parametrize("kmin", ["0", "many"])
def test_fitdist_rejects_kmin(simulated, kmin: str) -> None:
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["fitdist", "--sequence", str(simulated / "sequence.jsonl"), "--kmin", kmin])
    assert excinfo.value.code == cli.EXIT_USAGE


def test_report(simulated, tmp_path) -> None:
    argv = ["report", "--sequence", str(simulated / "sequence.jsonl")]
    argv += ["--output-dir", str(tmp_path)]
    assert cli.main([*argv, "--resolutions", "maximal,coarse:100"]) == cli.EXIT_OK
    rows = json.loads((tmp_path / "report.json").read_text())["rows"]
    assert [row["resolution"] for row in rows] == ["maximal", "coarse:100"]
    assert rows[0]["T"] == 3000
    assert rows[1]["T"] == 30
    assert all(row["winner"] in ("krapivsky", "redner") for row in rows)
    assert (tmp_path / "report.csv").read_text().startswith("resolution,T,n_bins,")


def test_report_min_exposure(simulated, tmp_path) -> None:
    argv = ["report", "--sequence", str(simulated / "sequence.jsonl")]
    argv += ["--output-dir", str(tmp_path), "--min-exposure", "1"]
    assert cli.main(argv) == cli.EXIT_OK
    manifest = RunManifest.read(tmp_path / "report.manifest.json")
    assert manifest.configuration["min_exposure"] == 1.0


def test_report_of_a_stored_sequence_needs_maximal(simulated, tmp_path) -> None:
    argv = ["report", "--sequence", str(simulated / "sequence.jsonl")]
    argv += ["--output-dir", str(tmp_path)]
    assert cli.main([*argv, "--resolutions", "yearly"]) == cli.EXIT_USAGE


def test_replay_detects_changed_outputs(simulated, tmp_path) -> None:
    binned = str(simulated / "rate_binned.csv")
    assert cli.main(["score", "--rate", binned, "--output-dir", str(tmp_path)]) == 0
    manifest = tmp_path / "score.manifest.json"
    assert cli.main(["--replay", str(manifest)]) == cli.EXIT_OK

    recorded = json.loads(manifest.read_text())
    recorded["outputs"][0]["sha256"] = "0" * 64
    manifest.write_text(json.dumps(recorded))
    assert cli.main(["--replay", str(manifest)]) == cli.EXIT_FAILURE


def test_global_options_after_the_command(tmp_path) -> None:
    argv = ["simulate", "--steps", "20", "--seed", "3", "--output-dir", str(tmp_path / "a")]
    assert cli.main(argv) == cli.EXIT_OK
    argv = ["--seed", "3", "--output-dir", str(tmp_path / "b"), "simulate", "--steps", "20"]
    assert cli.main(argv) == cli.EXIT_OK
    first = (tmp_path / "a" / "sequence.jsonl").read_bytes()
    assert first == (tmp_path / "b" / "sequence.jsonl").read_bytes()


def test_no_command() -> None:
    with pytest.raises(SystemExit) as excinfo:
        cli.main([])
    assert excinfo.value.code == cli.EXIT_USAGE
