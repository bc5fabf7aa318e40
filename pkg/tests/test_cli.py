import numpy as np
import pytest

from src.cli import main
from src.formats.dataset import read_dataset
from src.formats.tables import read_csv
from src.formats.tables import read_matrix
from src.formats.tables import read_yaml

MEMORY = ["--run-log", ":memory:"]
SMALL_GRAPH = ["--n", "12", "--r", "2", "--T", "6", "--seed", "7"]
SMALL_MODEL = ["--k-eig", "2", "--k-clusters", "2", "--kmeans-restarts", "3", "--max-iters", "30"]


def run(*args) -> int:
    return main([*map(str, args), *MEMORY])


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("data")
    assert run("generate", "--out", out, *SMALL_GRAPH) == 0
    return out


def snapshot_files(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


class TestGenerate:
    def test_writes_snapshots_meta_and_config(self, dataset):
        assert len(list(dataset.glob("A_*.tsv"))) == 6
        meta = read_yaml(dataset / "meta")
        assert meta["n"] == 12
        assert meta["rng"] == "numpy.random.PCG64"
        assert meta["seed"] == 7
        features = read_yaml(dataset / "config.yaml")["features"]
        assert meta["q"] == 1 + features["k_clusters"] + features["k_eig"]
        assert read_yaml(dataset / "config.yaml")["generator"]["n"] == 12

    def test_rerun_from_resolved_config_is_byte_identical(self, dataset, tmp_path):
        assert run("generate", "--out", tmp_path, "--config", dataset / "config.yaml") == 0
        assert snapshot_files(tmp_path) == snapshot_files(dataset)

    def test_single_snapshot(self, tmp_path):
        assert run("generate", "--out", tmp_path, "--n", "5", "--r", "2", "--T", "1") == 0
        assert read_dataset(tmp_path).G.T == 1


class TestFit:
    @pytest.fixture(scope="class")
    def fitted(self, dataset, tmp_path_factory):
        out = tmp_path_factory.mktemp("fit")
        assert run("fit", "--data", dataset, "--out", out, *SMALL_MODEL) == 0
        return out

    def test_outputs(self, fitted):
        for name in ("W.tsv", "S.tsv", "model.yaml", "trace.csv", "report.csv", "config.yaml"):
            assert (fitted / name).is_file()
        model = read_yaml(fitted / "model.yaml")
        assert read_matrix(fitted / "W.tsv").shape == (12, model["d"] * model["q"])
        assert read_matrix(fitted / "S.tsv").shape == (12, 12)

    def test_trace_objective_is_nonincreasing(self, fitted):
        rows = [row for row in read_csv(fitted / "trace.csv") if row["accepted"] == 1]
        totals = [row["total"] for row in rows]
        assert all(b <= a for a, b in zip(totals, totals[1:]))
        assert rows[0]["validation_error"] is not None

    def test_report_scores_the_held_out_step(self, fitted):
        (row,) = read_csv(fitted / "report.csv")
        assert row["method"] == "hybrid"
        assert 0.0 <= row["graph_error"]
        assert row["feature_error"] is not None

    def test_rerun_is_byte_identical(self, fitted, dataset, tmp_path):
        config = fitted / "config.yaml"
        assert run("fit", "--data", dataset, "--out", tmp_path, "--config", config) == 0
        assert snapshot_files(tmp_path) == snapshot_files(fitted)

    def test_sweep_mode(self, dataset, tmp_path):
        code = run(
            "fit", "--data", dataset, "--out", tmp_path, *SMALL_MODEL,
            "--sweep", "--sweep-parameter", "nu", "--sweep-values", "0.5", "2", "--mu-cv", "0.1",
        )
        assert code == 0
        rows = read_csv(tmp_path / "sweep.csv")
        assert [row["nu"] for row in rows] == [0.5, 2.0]
        assert [row["tau"] for row in rows] == pytest.approx([0.05, 0.2])


class TestBaseline:
    def test_zero_shrinkage_writes_the_last_training_snapshot(self, dataset, tmp_path):
        code = run("baseline", "--data", dataset, "--out", tmp_path, *SMALL_MODEL, "--mu", "0")
        assert code == 0
        A_T = read_dataset(dataset).G[4]
        np.testing.assert_array_equal(read_matrix(tmp_path / "shrinkage_A.tsv"), A_T)
        methods = [row["method"] for row in read_csv(tmp_path / "report.csv")]
        assert methods == ["ridge", "shrinkage"]


class TestCv:
    def test_single_point_grid(self, dataset, tmp_path):
        code = run(
            "cv", "--data", dataset, "--out", tmp_path, *SMALL_MODEL,
            "--kappa-grid", "0.5", "--mu-grid", "0.2", "--nu-grid", "2", "--lambda-grid", "0.01",
        )
        assert code == 0
        selected = read_yaml(tmp_path / "selected.yaml")
        assert selected["kappa"] == 0.5
        assert selected["lambda"] == 0.01
        assert selected["tau"] == pytest.approx(0.4)
        assert (tmp_path / "cv_joint.csv").is_file()


class TestTable:
    def test_one_row_per_method(self, tmp_path):
        code = run(
            "table", "--out", tmp_path, *SMALL_GRAPH, *SMALL_MODEL,
            "--replications", "2", "--methods", "ridge", "shrinkage", "--max-workers", "1",
        )
        assert code == 0
        rows = read_csv(tmp_path / "table.csv")
        assert [row["method"] for row in rows] == ["ridge", "shrinkage"]
        assert len(read_csv(tmp_path / "records.csv")) == 4


class TestErrors:
    def test_missing_dataset(self, tmp_path, capsys):
        code = run("fit", "--data", tmp_path / "absent", "--out", tmp_path / "fit")
        assert code == 2
        line = capsys.readouterr().err.strip().splitlines()[-1]
        assert line.startswith("error=InvalidDatasetError code=2 message=")

    def test_invalid_value_is_named(self, tmp_path, capsys):
        code = run("generate", "--out", tmp_path, "--n", "0")
        assert code == 6
        assert "generator.n" in capsys.readouterr().err

    def test_unknown_method(self, dataset, tmp_path, capsys):
        code = run("baseline", "--data", dataset, "--out", tmp_path, "--methods", "oracle")
        assert code == 7
        assert "error=MethodNotFound" in capsys.readouterr().err

    def test_t_train_must_leave_a_held_out_step(self, dataset, tmp_path):
        assert run("fit", "--data", dataset, "--out", tmp_path, "--t-train", "6") == 6

    def test_zero_t_train_is_not_the_default(self, dataset, tmp_path, capsys):
        assert run("fit", "--data", dataset, "--out", tmp_path, "--t-train", "0") == 6
        assert "split.t_train=0" in capsys.readouterr().err

    def test_unopenable_run_log_gives_the_error_line(self, tmp_path, capsys):
        run_log = tmp_path / "absent" / "runs.duckdb"
        code = main(["generate", "--out", str(tmp_path / "data"), "--run-log", str(run_log)])
        assert code == 3
        line = capsys.readouterr().err.strip().splitlines()[-1]
        assert line.startswith("error=OutputPathError code=3 message=")
