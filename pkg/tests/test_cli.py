"""End-to-end tests for the `gca-sim` command line."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from gcasim.cli import main, slug
from gcasim.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE
from gcasim.network import save_network
from gcasim.network.synth import grid


def _run(out: Path, *argv: str) -> int:
    return main(["--output-dir", str(out), "--threads", "1", *argv])


def test_synth_dist_cluster_pipeline(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    corpus_dir = tmp_path / "corpus"
    code = _run(
        corpus_dir, "synth", "--per-family", "3", "--min-nodes", "60", "--max-nodes", "120"
    )
    assert code == EXIT_OK
    assert len(list((corpus_dir / "synth").glob("*.json"))) == 9
    assert (corpus_dir / "synth.config.json").exists()

    dist_dir = tmp_path / "dist"
    code = _run(dist_dir, "dist", str(corpus_dir / "synth"), "--method", "degreejsd")
    assert code == EXIT_OK
    payload = json.loads((dist_dir / "dist.json").read_text(encoding="utf-8"))
    assert payload["method"] == "degreejsd"
    assert len(payload["names"]) == 9

    cluster_dir = tmp_path / "cluster"
    assert _run(cluster_dir, "cluster", str(dist_dir / "dist.json")) == EXIT_OK
    result = json.loads((cluster_dir / "cluster.json").read_text(encoding="utf-8"))
    assert 2 <= result["k"] <= 8
    assert len(result["labels"]) == 9
    assert capsys.readouterr().out.startswith(f"k={result['k']}")


def test_features_and_correlate(tmp_path: Path) -> None:
    source = save_network(grid(4, 5, name="block"), tmp_path / "block.json")
    out = tmp_path / "out"
    assert _run(out, "features", str(source), "-T", "2") == EXIT_OK
    stem = slug("block")
    trace_rows = (out / f"{stem}.trace.csv").read_text(encoding="utf-8").splitlines()
    assert len([row for row in trace_rows if not row.startswith("#")]) == 21
    assert (out / f"{stem}.features.csv").exists()
    assert (out / f"{stem}.quantiles.csv").exists()

    assert _run(out, "correlate", str(source), "-T", "2") == EXIT_OK
    assert (out / "correlations.csv").exists()


def test_configuration_error_exits_with_usage_code(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    first = save_network(grid(2, 2, name="a"), tmp_path / "a.json")
    second = save_network(grid(2, 3, name="b"), tmp_path / "b.json")
    code = _run(tmp_path / "out", "ingest", str(first), str(second), "--name", "both")
    assert code == EXIT_USAGE
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ConfigurationError"


def test_malformed_matrix_exits_with_data_code(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    matrix = tmp_path / "dist.csv"
    matrix.write_text("name,a,b\na,0,x\nb,1,0\n", encoding="utf-8")
    assert _run(tmp_path / "out", "cluster", str(matrix)) == EXIT_DATA
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "ParseError"
    assert error["line"] == 2


def test_dist_is_deterministic(tmp_path: Path) -> None:
    corpus = tmp_path / "corpus"
    for rows, cols in ((4, 4), (3, 6), (5, 5)):
        save_network(grid(rows, cols, name=f"g{rows}x{cols}"), corpus / f"g{rows}x{cols}.json")
    outputs = []
    for run in ("first", "second"):
        out = tmp_path / run
        assert _run(out, "dist", str(corpus), "-T", "3", "--bins", "16") == EXIT_OK
        outputs.append((out / "dist.csv").read_bytes())
    assert outputs[0] == outputs[1]
    lines = [
        line.split(",")
        for line in outputs[0].decode("utf-8").splitlines()
        if not line.startswith("#")
    ]
    assert len(lines) == 4
    assert all(float(lines[i][i]) == 0.0 for i in range(1, 4))


def test_missing_input_exits_with_data_code(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    missing = tmp_path / "nope.json"
    assert _run(tmp_path / "out", "cluster", str(missing)) == EXIT_DATA
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "DataError"
    assert error["path"] == str(missing)


def test_unreadable_directory_as_matrix_exits_with_data_code(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    directory = tmp_path / "matrix.csv"
    directory.mkdir()
    assert _run(tmp_path / "out", "cluster", str(directory)) == EXIT_DATA
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "DataError"


@pytest.mark.parametrize(
    "argv",
    [
        ["cluster", "dist.json", "--no-such-flag"],
        ["cluster"],
        ["frobnicate"],
        ["dist", "corpus", "--method", "bogus"],
    ],
)
def test_usage_errors_are_reported_as_json(
    tmp_path: Path, capsys: pytest.CaptureFixture[str], argv: list[str]
) -> None:
    with pytest.raises(SystemExit) as excinfo:
        _run(tmp_path / "out", *argv)
    assert excinfo.value.code == EXIT_USAGE
    error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert error["error"] == "UsageError"
    assert error["message"].startswith("gca-sim")


def _artifacts(out: Path, exclude: str) -> dict[str, bytes]:
    return {
        str(path.relative_to(out)): path.read_bytes()
        for path in sorted(out.rglob("*"))
        if path.is_file() and path.name != exclude
    }


def test_cluster_is_deterministic(tmp_path: Path) -> None:
    corpus = tmp_path / "corpus"
    for rows, cols in ((4, 4), (4, 5), (8, 8), (8, 9), (3, 12), (2, 20)):
        save_network(grid(rows, cols, name=f"g{rows}x{cols}"), corpus / f"g{rows}x{cols}.json")
    assert _run(tmp_path / "dist", "dist", str(corpus), "-T", "3") == EXIT_OK
    matrix = str(tmp_path / "dist" / "dist.json")
    runs = []
    for run in ("first", "second"):
        assert _run(tmp_path / run, "cluster", matrix) == EXIT_OK
        runs.append(_artifacts(tmp_path / run, exclude="cluster.config.json"))
    assert set(runs[0]) == {"cluster.json", "labels.csv"}
    assert runs[0] == runs[1]


def test_train_is_deterministic(tmp_path: Path) -> None:
    argv = ["train", "--budget", "2", "--epochs-per-group", "1", "--per-family", "1"]
    argv += ["--train-groups", "1", "--validation-groups", "1", "--seed", "3"]
    argv += ["--min-nodes", "30", "--max-nodes", "45"]
    runs = []
    for run in ("first", "second"):
        assert _run(tmp_path / run, *argv) == EXIT_OK
        runs.append(_artifacts(tmp_path / run, exclude="train.config.json"))
    assert {"train/candidates.csv", "train/summary.json", "train/best_rule.json"} <= set(runs[0])
    assert runs[0] == runs[1]
