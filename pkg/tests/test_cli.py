import json
import subprocess
import sys
from fractions import Fraction

import pytest

from poissonian import setcore as sc0
from poissonian.cli import run_capture


def ok(argv):
    code, out, err = run_capture(argv)
    assert code == 0, err
    return out


def csv_body(out):
    return [line for line in out.splitlines() if not line.startswith("#")]


class TestExamples:
    def test_energy_interval(self):
        rows = csv_body(ok(["energy", "--gallery", "interval", "--X", "100"]))
        assert rows[0] == "method,X,N,E,E_tilde"
        assert {r.split(",")[3] for r in rows[1:]} == {"666700"}

    def test_corr_squares(self):
        rows = csv_body(ok(["corr", "--gallery", "squares", "--X", "10000", "--alpha", "239/169", "--s", "1"]))
        assert rows == ["X,N,count,F,deviation", "10000,100,180,9/5,1/5"]

    def test_audit_all(self):
        out = ok(["audit-all", "--X", "1000", "--T", "8", "--seed", "7"])
        body = csv_body(out)
        assert body[0] == "id,module,status,detail"
        assert all(",PASS," in r for r in body[1:]) and len(body) > 20


class TestProvenance:
    def test_header_lines(self):
        out = ok(["scan", "--gallery", "squares", "--alpha", "1/3", "--X-grid", "100,1000", "--seed", "3"])
        lines = out.splitlines()
        assert lines[0] == "# tool=poissonian version=0.1.0 command=scan seed=3"
        assert lines[1].startswith("# flags ") and "--X-grid=100,1000" in lines[1]

    def test_lf_only(self, tmp_path):
        path = tmp_path / "o.csv"
        ok(["energy", "--gallery", "primes", "--X", "500", "--out", str(path)])
        data = path.read_bytes()
        assert b"\r" not in data and data.endswith(b"\n")

    def test_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = ["energy-scaling", "--C", "3", "--X-grid", "2^12..13", "--trials", "2", "--seed", "9"]
        ok(argv + ["--out", str(a)])
        ok(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_json(self):
        js = json.loads(ok(["divergence", "--alpha", "1/233", "--N-max", "20000"]))
        assert set(js) == {"provenance", "result"}
        demo = js["result"]["demo"]
        assert demo["passed"] and demo["N"] <= 20000


class TestSources:
    def test_random_sim_roundtrip(self, tmp_path):
        path = tmp_path / "set.txt"
        ok(["random-sim", "--C", "3", "--X", "5000", "--seed", "2", "--out", str(path)])
        A = sc0.read_set(path)
        out = ok(["energy", "--set-file", str(path), "--method", "fft"])
        E = int(csv_body(out)[1].split(",")[3])
        assert E == sc0.energy(A).E

    def test_random_source_matches_random_sim(self, tmp_path):
        path = tmp_path / "set.txt"
        ok(["random-sim", "--C", "1", "--X", "3000", "--seed", "5", "--out", str(path)])
        a = ok(["energy", "--set-file", str(path), "--method", "fft"])
        b = ok(["energy", "--random-C", "1", "--X", "3000", "--seed", "5", "--method", "fft"])
        assert csv_body(a) == csv_body(b)

    def test_cf(self):
        rows = csv_body(ok(["cf", "--alpha", "13/29"]))
        assert rows[-1] == "3,3,13/29"


class TestExitCodes:
    @pytest.mark.parametrize(
        "argv",
        [
            ["corr", "--gallery", "squares", "--X", "100"],
            ["energy"],
            ["energy", "--gallery", "squares", "--set-file", "x", "--X", "10"],
            ["nosuch"],
            ["scan", "--gallery", "squares", "--alpha", "1/3", "--X-grid", "ten"],
        ],
    )
    def test_bad_flags(self, argv):
        assert run_capture(argv)[0] == 1

    @pytest.mark.parametrize(
        "argv",
        [
            ["fstar", "--gallery", "squares", "--X", "1000", "--alpha", "0.3", "--T", "4"],
            ["audit-phi", "--X-grid", "1000", "--T-grid", "1"],
            ["corr", "--gallery", "squares", "--X", "1", "--alpha", "1/3"],
            ["audit-l1", "--gallery", "interval", "--X", "2", "--T", "2", "--s", "3"],
            ["random-sim", "--C", "-1", "--X", "100"],
            ["divergence", "--alpha", "1/3", "--s", "0", "--N-max", "100"],
        ],
    )
    def test_precondition(self, argv):
        code, _, err = run_capture(argv)
        assert code == 2 and "precondition" in err

    def test_guard(self):
        code, _, err = run_capture(["audit-avg-overlap", "--X-grid", "20000", "--T-values", "2"])
        assert code == 3 and "--force" in err


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "poissonian", "energy", "--gallery", "interval", "--X", "10", "--method", "fft"],
        capture_output=True, text=True, check=True,
    )
    assert csv_body(res.stdout)[1].split(",")[3] == str((2 * 1000 + 10) // 3)
