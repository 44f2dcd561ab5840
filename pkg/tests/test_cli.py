import numpy as np
import pytest

from mrma.cli import main
from mrma.csvio import read_csv, write_csv

SINGLE_ARGS = [
    "simulate-single", "--preset", "sec6.1",
    "--epsilon", "1", "--trials", "2", "--test-size", "50",
    "--N0", "40", "--N1", "80", "--n0", "20", "--n1", "20", "--B", "4",
    "--seed", "7",
]


def run_single(tmp_path, extra=(), seed="7"):
    out = tmp_path / "results"
    args = [*SINGLE_ARGS, "--out", str(out)]
    args[args.index("--seed") + 1] = seed
    rc = main([*args, *extra])
    assert rc == 0
    return out


class TestSimulateSingle:
    def test_outputs_exist_with_headers(self, tmp_path):
        out = run_single(tmp_path)
        meta, header, rows = read_csv(out / "results.csv")
        assert header == ["epsilon", "trial", "method", "misclassification"]
        assert meta["seed"] == "7"
        assert "version" in meta and "command" in meta
        assert len(rows) == 2 * 7  # trials * methods
        meta, header, rows = read_csv(out / "summary.csv")
        assert header == ["epsilon", "method", "mean", "stderr", "trials"]
        assert (out / "diagnostics.csv").exists()

    def test_byte_identical_reruns(self, tmp_path):
        a = run_single(tmp_path / "a")
        b = run_single(tmp_path / "b")
        for name in ("results.csv", "summary.csv", "diagnostics.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_seed_changes_output(self, tmp_path):
        a = run_single(tmp_path / "a", seed="7")
        b = run_single(tmp_path / "b", seed="8")
        assert (a / "results.csv").read_bytes() != (b / "results.csv").read_bytes()

    def test_jobs_flag_keeps_bytes(self, tmp_path):
        a = run_single(tmp_path / "a")
        b = run_single(tmp_path / "b", extra=["--jobs", "2"])
        assert (a / "results.csv").read_bytes() == (b / "results.csv").read_bytes()

    def test_methods_filter(self, tmp_path):
        out = run_single(tmp_path, extra=["--methods", "weak,mrma"])
        _, _, rows = read_csv(out / "results.csv")
        assert {row[2] for row in rows} == {"weak", "mrma"}

    def test_infinite_epsilon_roundtrips(self, tmp_path):
        out = run_single(tmp_path, extra=["--epsilon", "inf", "--methods", "weak"])
        _, _, rows = read_csv(out / "results.csv")
        assert {row[0] for row in rows} == {"inf"}

    def test_env_var_overrides_out(self, tmp_path, monkeypatch):
        target = tmp_path / "env_out"
        monkeypatch.setenv("MRMA_OUT", str(target))
        run_single(tmp_path / "ignored")
        assert (target / "results.csv").exists()


class TestSimulateMulti:
    def test_small_run(self, tmp_path):
        out = tmp_path / "multi"
        rc = main([
            "simulate-multi", "--preset", "sec6.2-scaled",
            "--epsilon", "2", "--trials", "1",
            "--N0", "60", "--N1", "240", "--n0", "30", "--n1", "24", "--B", "4",
            "--test-size", "50", "--seed", "3", "--out", str(out),
        ])
        assert rc == 0
        meta, header, rows = read_csv(out / "multi_results.csv")
        assert header == ["epsilon", "trial", "server", "group", "method",
                          "misclassification"]
        assert len(rows) == 6 * 2  # six servers, local + multi
        _, header, rows = read_csv(out / "multi_diagnostics.csv")
        assert header == ["epsilon", "trial", "server", "peer", "r_tilde",
                          "reversed", "weight"]
        assert len(rows) == 36
        assert (out / "multi_classifiers.csv").exists()


class TestOracles:
    def test_heatmap(self, tmp_path):
        out = tmp_path / "o"
        rc = main(["oracle-heatmap", "--epsilon-z", "10,0.1",
                   "--z0-grid", "-2:2:1", "--z-grid", "-1:1:0.5",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        _, header, rows = read_csv(out / "heatmap.csv")
        assert header == ["z0", "z", "epsilon_z", "omega"]
        assert len(rows) == 2 * 5 * 5

    def test_tv(self, tmp_path):
        out = tmp_path / "o"
        rc = main(["oracle-tv", "--d", "1,2", "--epsilon-z", "1,10",
                   "--samples", "20000", "--bins", "16",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        _, header, rows = read_csv(out / "tv_curve.csv")
        assert header == ["d", "epsilon_z", "tv_estimate", "n_samples"]
        assert len(rows) == 4

    def test_tv_deterministic(self, tmp_path):
        args = ["oracle-tv", "--d", "1", "--epsilon-z", "1",
                "--samples", "20000", "--bins", "16", "--seed", "5"]
        assert main([*args, "--out", str(tmp_path / "a")]) == 0
        assert main([*args, "--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a" / "tv_curve.csv").read_bytes() == \
            (tmp_path / "b" / "tv_curve.csv").read_bytes()


class TestRealData:
    def make_dataset(self, tmp_path, n=300):
        rng = np.random.default_rng(0)
        X = rng.uniform(-2, 2, size=(n, 3))
        y = np.where(X[:, 0] + 0.5 * X[:, 1] >= 0, 1, -1)
        rows = [(*X[i], int(y[i])) for i in range(n)]
        return write_csv(tmp_path / "data.csv", ["x1", "x2", "x3", "y"], rows)

    def test_runs_and_writes_summary(self, tmp_path):
        csv = self.make_dataset(tmp_path)
        out = tmp_path / "rd"
        rc = main(["real-data", "--csv", str(csv), "--epsilon", "1",
                   "--trials", "2", "--test-size", "60",
                   "--N0", "60", "--N1", "160", "--n0", "30", "--n1", "40",
                   "--B", "4", "--r0", "0.7", "--seed", "2", "--out", str(out)])
        assert rc == 0
        meta, header, rows = read_csv(out / "summary.csv")
        assert meta["d"] == "3"
        assert len(rows) == 7

    def test_missing_file_errors(self, tmp_path, capsys):
        rc = main(["real-data", "--csv", str(tmp_path / "nope.csv"),
                   "--out", str(tmp_path / "o")])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_bad_dataset_errors(self, tmp_path, capsys):
        path = tmp_path / "bad.csv"
        path.write_text("x1,y\n1,7\n")
        rc = main(["real-data", "--csv", str(path), "--out", str(tmp_path / "o")])
        assert rc == 1
        assert "line 2" in capsys.readouterr().err


class TestParsing:
    def test_unknown_flag_exits_nonzero(self):
        with pytest.raises(SystemExit) as exc:
            main(["simulate-single", "--frobnicate"])
        assert exc.value.code != 0

    def test_unknown_preset_errors(self, tmp_path, capsys):
        rc = main(["simulate-single", "--preset", "sec9.9",
                   "--out", str(tmp_path)])
        assert rc == 1
        assert "error" in capsys.readouterr().err

    def test_version_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
