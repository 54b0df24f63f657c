"""End-to-end tests of the command-line interface through run()."""

from pathlib import Path

import pytest

from hadamard_cli import EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NUMERIC, EXIT_OK, resolve_seed, run
from services.config_file import load_config
from services.reporting import CSV_HEADER


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv("HADAMARD_SEED", raising=False)


def simulate_args(out_dir, *extra):
    return ["simulate", "--experiment", "spd-diagonal", "--epsilon", "0.05", "--n-max", "30",
            "--replications", "1", "--estimators", "inductive", "--output-dir", str(out_dir), *extra]


class TestSimulate:
    def test_writes_csv_and_echo(self, tmp_path, capsys):
        assert run(simulate_args(tmp_path, "--seed", "7")) == EXIT_OK
        csv_path = tmp_path / "spd_diagonal_eps0.05_seed7.csv"
        lines = csv_path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_HEADER)
        assert len(lines) > 1
        echo = load_config(str(tmp_path / "spd_diagonal_eps0.05_seed7.cfg"))
        assert echo.base_seed == 7
        assert echo.epsilon == 0.05
        assert "[OK]" in capsys.readouterr().out

    def test_env_seed_used_without_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HADAMARD_SEED", "11")
        assert run(simulate_args(tmp_path)) == EXIT_OK
        assert (tmp_path / "spd_diagonal_eps0.05_seed11.csv").exists()

    def test_flag_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HADAMARD_SEED", "11")
        assert run(simulate_args(tmp_path, "--seed", "3")) == EXIT_OK
        assert (tmp_path / "spd_diagonal_eps0.05_seed3.csv").exists()

    def test_file_seed_is_last_resort(self, tmp_path):
        cfg = tmp_path / "exp.cfg"
        cfg.write_text("experiment = open_book\nn_max = 20\nreplications = 1\nseed = 5\nestimators = inductive\n")
        out = tmp_path / "out"
        assert run(["simulate", "--config", str(cfg), "--output-dir", str(out)]) == EXIT_OK
        assert (out / "open_book_eps0_seed5.csv").exists()

    def test_seed_resolution_order(self, monkeypatch):
        assert resolve_seed(None, None) == 0
        assert resolve_seed(None, 4) == 4
        monkeypatch.setenv("HADAMARD_SEED", "9")
        assert resolve_seed(None, 4) == 9
        assert resolve_seed(2, 4) == 2

    def test_invalid_env_seed(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HADAMARD_SEED", "abc")
        assert run(simulate_args(tmp_path)) == EXIT_INVALID

    def test_missing_experiment(self, tmp_path, capsys):
        assert run(["simulate", "--output-dir", str(tmp_path)]) == EXIT_INVALID
        assert "experiment" in capsys.readouterr().err

    def test_epsilon_out_of_range(self, tmp_path):
        args = simulate_args(tmp_path)
        args[args.index("0.05")] = "1.5"
        assert run(args) == EXIT_INVALID

    def test_unreadable_config(self, tmp_path):
        assert run(["simulate", "--config", str(tmp_path / "missing.cfg")]) == EXIT_INVALID

    def test_unknown_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("experiment = open_book\ncolour = blue\n")
        assert run(["simulate", "--config", str(cfg), "--output-dir", str(tmp_path)]) == EXIT_INVALID
        assert "colour" in capsys.readouterr().err

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("not a directory")
        assert run(simulate_args(blocker, "--seed", "1")) == EXIT_NUMERIC

    def test_svg(self, tmp_path):
        assert run(simulate_args(tmp_path, "--seed", "1", "--emit-svg")) == EXIT_OK
        assert sorted(p.name for p in tmp_path.glob("*.svg")) == [
            "spd_diagonal_intrinsic_eps0.05.svg",
            "spd_diagonal_spectral_eps0.05.svg",
        ]


class TestMeans:
    def test_euclidean(self, tmp_path, capsys):
        points = tmp_path / "points.txt"
        points.write_text("# four scalars\n1\n2\n3\n4\n")
        assert run(["means", "--space", "euclidean", "--points", str(points)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "inductive: [2.5]" in out
        assert "hansen: [2.5]" in out
        assert "frechet (exact): [2.5]" in out

    def test_open_book(self, tmp_path, capsys):
        points = tmp_path / "book.txt"
        points.write_text("1 1 0\n2 1 0\n3 1 0\n")
        assert run(["means", "--space", "open-book", "--points", str(points),
                    "--estimators", "inductive,es_sahib"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "es_sahib" in out
        assert "frechet (exact)" in out

    def test_non_commuting_spd_has_no_oracle(self, tmp_path, capsys):
        points = tmp_path / "spd.txt"
        points.write_text("1 0 0 2\n2 1 1 2\n")
        assert run(["means", "--space", "spd", "--points", str(points), "--estimators", "inductive"]) == EXIT_OK
        assert "not available" in capsys.readouterr().out

    def test_bad_point_file(self, tmp_path):
        points = tmp_path / "spd.txt"
        points.write_text("1 2 3\n")
        assert run(["means", "--space", "spd", "--points", str(points)]) == EXIT_INVALID

    def test_es_sahib_capacity(self, tmp_path):
        points = tmp_path / "many.txt"
        points.write_text("\n".join(str(v) for v in range(12)))
        assert run(["means", "--space", "euclidean", "--points", str(points),
                    "--estimators", "es_sahib"]) == EXIT_INVALID


class TestCheckAndBound:
    def test_check_passes(self, capsys):
        assert run(["check", "--space", "open-book", "--cases", "100"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "open_book k=3 d=1" in out
        assert "[FAIL]" not in out

    def test_check_spd(self):
        assert run(["check", "--space", "spd", "--cases", "100", "--dim", "3"]) == EXIT_OK

    def test_check_negative_tolerance_fails(self, capsys):
        assert run(["check", "--space", "euclidean", "--cases", "10", "--tol", "-1"]) == EXIT_CHECK_FAILED
        assert "[FAIL]" in capsys.readouterr().out

    def test_bound(self, capsys):
        assert run(["bound", "--generator", "euclidean-hetero", "--reps", "200", "--grid", "10,100"]) == EXIT_OK
        assert "[OK]" in capsys.readouterr().out

    def test_bound_unknown_generator(self):
        assert run(["bound", "--generator", "cauchy", "--reps", "10", "--grid", "10"]) == EXIT_INVALID

    def test_bound_bad_grid(self):
        assert run(["bound", "--grid", "10,abc"]) == EXIT_INVALID

    def test_unknown_command(self):
        assert run(["plot"]) == EXIT_INVALID


GOLDEN_DIR = Path(__file__).resolve().parent / "data"


class TestGoldenCsv:
    """Inductive means on the clean open book are exact float arithmetic, so the CSV is pinned byte for byte."""

    ARGS = ["simulate", "--experiment", "open-book", "--epsilon", "0", "--n-max", "12",
            "--replications", "2", "--estimators", "inductive", "--trace-stride", "10"]

    @pytest.mark.parametrize("workers", ["1", "2"])
    def test_matches_golden_file(self, tmp_path, workers):
        assert run(self.ARGS + ["--workers", workers, "--output-dir", str(tmp_path)]) == EXIT_OK
        written = (tmp_path / "open_book_eps0_seed0.csv").read_bytes()
        assert written == (GOLDEN_DIR / "golden_open_book.csv").read_bytes()
