"""Command line behavior, exercised in process through main(argv)."""

import subprocess
import sys

import numpy as np
import pytest

from dsim.cli import main
from dsim.bounds_analysis import thm2_bound
from dsim.bitcodes import read_container
from dsim.distributions import geometric
from dsim.integer_codec import simulate as int_simulate
from dsim.rng import RandomSource


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEncodeDecode:
    def test_round_trip(self, tmp_path, capsys):
        blob = tmp_path / "g.dsim"
        code, out, err = run(["encode", "--scheme", "int", "--dist", "geometric:p=0.7",
                              "-n", "500", "--seed", "42", "-o", str(blob)], capsys)
        assert code == 0 and err == ""
        assert "n=500" in out and "payload_bits=" in out

        csv = tmp_path / "g.csv"
        code, out, err = run(["decode", str(blob), "--seed", "7", "-o", str(csv)], capsys)
        assert code == 0 and err == ""
        lines = csv.read_text().splitlines()
        assert lines[0] == "value" and len(lines) == 501
        values = np.array([int(v) for v in lines[1:]])

        data, multiset = int_simulate(geometric(0.7), 500, RandomSource.from_seed(42))
        assert blob.read_bytes() == data
        assert np.array_equal(np.sort(values), multiset)

    def test_byte_identical_reruns(self, tmp_path, capsys):
        outputs = []
        for tag in ("a", "b"):
            blob = tmp_path / f"{tag}.dsim"
            csv = tmp_path / f"{tag}.csv"
            run(["encode", "--scheme", "halfline", "--dist", "exp:lambda=1",
                 "-n", "300", "--seed", "11", "-o", str(blob)], capsys)
            run(["decode", str(blob), "--seed", "12", "-o", str(csv)], capsys)
            outputs.append((blob.read_bytes(), csv.read_bytes()))
        assert outputs[0] == outputs[1]

    def test_decode_real_values_use_full_precision(self, tmp_path, capsys):
        blob = tmp_path / "u.dsim"
        run(["encode", "--scheme", "unit", "--dist", "triangular",
             "-n", "50", "--seed", "3", "-o", str(blob)], capsys)
        code, out, _ = run(["decode", str(blob), "--seed", "4"], capsys)
        assert code == 0
        values = [float(v) for v in out.splitlines()[1:]]
        assert len(values) == 50 and all(0.0 <= v < 1.0 for v in values)
        # %.17g survives a parse round trip exactly
        assert out == "value\n" + "\n".join("%.17g" % v for v in values) + "\n"

    def test_decode_missing_file(self, capsys):
        code, _, err = run(["decode", "/no/such/file", "--seed", "1"], capsys)
        assert code == 1 and err.startswith("error: io:")

    def test_decode_corrupt_header(self, tmp_path, capsys):
        bad = tmp_path / "bad.dsim"
        bad.write_bytes(b"JUNKJUNKJUNKJUNKJUNKJUNK")
        code, _, err = run(["decode", str(bad), "--seed", "1"], capsys)
        assert code == 1 and err.startswith("error: container:")

    def test_decode_truncated_payload(self, tmp_path, capsys):
        blob = tmp_path / "t.dsim"
        run(["encode", "--scheme", "int", "--dist", "zipf:s=3",
             "-n", "100", "--seed", "5", "-o", str(blob)], capsys)
        blob.write_bytes(blob.read_bytes()[:25])
        code, _, err = run(["decode", str(blob), "--seed", "1"], capsys)
        assert code == 1 and err.startswith("error: container:")

    def test_bad_dist_spec(self, tmp_path, capsys):
        code, _, err = run(["encode", "--scheme", "int", "--dist", "nosuch:p=1",
                            "-n", "5", "--seed", "1", "-o", str(tmp_path / "x")], capsys)
        assert code == 1 and err.startswith("error:")


class TestBench:
    def test_csv_shape_and_slope_row(self, capsys):
        code, out, err = run(["bench", "--scheme", "int", "--dist", "geometric:p=0.7",
                              "--n-list", "100,1000", "--trials", "5", "--seed", "9"], capsys)
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == "scheme,dist,n,trials,mean_bits,stderr_bits,bound_bits"
        assert len(lines) == 4
        row = lines[1].split(",")
        assert row[:4] == ["int", "geometric:p=0.7", "100", "5"]
        assert float(row[6]) == pytest.approx(thm2_bound(1.5, np.log(10 / 3), 100), rel=1e-12)
        slope_row = lines[3].split(",")
        assert slope_row[2] == "slope"
        assert 0.0 < float(slope_row[4]) < 1.0

    def test_deterministic(self, capsys):
        argv = ["bench", "--scheme", "unit", "--dist", "triangular",
                "--n-list", "50,200", "--trials", "4", "--seed", "2"]
        first = run(argv, capsys)
        second = run(argv, capsys)
        assert first == second


class TestBound:
    def test_prints_value(self, capsys):
        code, out, err = run(["bound", "--theorem", "2", "--c", "1.5",
                              "--lambda", "1.2039728043259361", "-n", "10000"], capsys)
        assert code == 0 and err == ""
        assert float(out) == pytest.approx(9745.866477406436, rel=1e-12)

    def test_missing_flag(self, capsys):
        code, _, err = run(["bound", "--theorem", "4", "--c", "2", "--lambda", "2", "-n", "10"], capsys)
        assert code == 2 and "needs --f0" in err

    def test_bad_domain(self, capsys):
        code, _, err = run(["bound", "--theorem", "1", "--c", "2", "--lambda", "1", "-n", "10"], capsys)
        assert code == 1 and err.startswith("error:")


class TestExactLength:
    def test_csv(self, capsys):
        code, out, err = run(["exact-length", "--dist", "triangular", "--n-list", "10,100"], capsys)
        assert code == 0 and err == ""
        lines = out.splitlines()
        assert lines[0] == "dist,n,kmax,expected_bits"
        values = [float(line.split(",")[3]) for line in lines[1:]]
        assert len(values) == 2 and values[0] < values[1]

    def test_rejects_halfline_dist(self, capsys):
        code, _, err = run(["exact-length", "--dist", "exp:lambda=1", "--n-list", "10"], capsys)
        assert code == 1 and err.startswith("error:")


class TestVerify:
    def test_passing_run(self, capsys):
        code, out, _ = run(["verify", "--scheme", "int", "--dist", "geometric:p=0.7",
                            "-n", "2000", "--trials", "5", "--seed", "1"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 6
        assert all(line.startswith("trial ") for line in lines[:5])
        assert lines[5].startswith("passed 5/5")

    def test_failing_run_exits_nonzero(self, capsys, monkeypatch):
        import dsim.bounds_analysis as bounds_analysis

        original = bounds_analysis.verify_trial

        def always_fail(scheme, dist, n, rng, alpha=0.01):
            name, stat, _ = original(scheme, dist, n, rng, alpha)
            return name, stat, False

        monkeypatch.setattr(bounds_analysis, "verify_trial", always_fail)
        code, out, _ = run(["verify", "--scheme", "int", "--dist", "geometric:p=0.7",
                            "-n", "100", "--trials", "3", "--seed", "1"], capsys)
        assert code == 1 and "passed 0/3" in out


class TestConsoleScript:
    def test_module_entry_point(self, tmp_path):
        blob = tmp_path / "cli.dsim"
        proc = subprocess.run(
            [sys.executable, "-m", "dsim.cli", "encode", "--scheme", "int",
             "--dist", "geometric:p=0.5", "-n", "20", "--seed", "8", "-o", str(blob)],
            capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        header = read_container(blob.read_bytes())[0]
        assert header.n == 20
