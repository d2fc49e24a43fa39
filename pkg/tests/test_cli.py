import csv
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from pappus.cli import RunConfig, invariants, main


def run(capsys, *argv):
    rc = main(list(argv))
    return rc, capsys.readouterr()


def test_verify_all(tmp_path, capsys):
    rc, out = run(capsys, "verify", "--out", str(tmp_path))
    assert rc == 0
    data = json.loads((tmp_path / "certificates.json").read_text())
    assert data["passed"] and len(data["certificates"]) >= 7
    assert "discrepancy" in out.out


def test_verify_only(tmp_path, capsys):
    rc, _ = run(capsys, "verify", "--only", "specialp", "--out", str(tmp_path))
    assert rc == 0
    data = json.loads((tmp_path / "certificates.json").read_text())
    assert [c["lemma"] for c in data["certificates"]] == ["specialp"]


def test_verify_unknown_id(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--only", "nosuch"])
    assert exc.value.code == 2


def _curve_rows(path):
    with open(path) as fh:
        return [(F(r["b"]), F(r["a_lo"]), F(r["a_hi"])) for r in csv.DictReader(fh)]


def test_curve_examples(tmp_path, capsys):
    rc, _ = run(capsys, "curve", "0", "0", "--grid", "4", "--out", str(tmp_path / "zero"))
    assert rc == 0
    assert all(lo == hi == 1 for _, lo, hi in _curve_rows(tmp_path / "zero" / "curve.csv"))

    rc, _ = run(capsys, "curve", "1/4", "1/2", "--grid", "4", "--out", str(tmp_path / "q"))
    rows = _curve_rows(tmp_path / "q" / "curve.csv")
    assert rc == 0 and len(rows) == 5 and all(1 <= lo <= hi <= 2 for _, lo, hi in rows)
    assert (tmp_path / "q" / "region.svg").read_text().startswith("<svg")

    rc, _ = run(capsys, "curve", "1/2", "1/4", "--grid", "4", "--out", str(tmp_path / "m"))
    mirror = _curve_rows(tmp_path / "m" / "curve.csv")
    assert rc == 0 and all(F(1, 2) <= lo <= hi <= 1 for _, lo, hi in mirror)


def test_curve_format_filter(tmp_path, capsys):
    rc, _ = run(capsys, "curve", "1/4", "1/2", "--grid", "2", "--format", "csv",
                "--out", str(tmp_path))
    assert rc == 0 and (tmp_path / "curve.csv").exists() and not (tmp_path / "region.svg").exists()


def test_curve_out_of_range(capsys):
    rc, out = run(capsys, "curve", "1", "0")
    assert rc == 2 and "ParamOutOfRange" in out.err


def test_orbit(tmp_path, capsys):
    rc, out = run(capsys, "orbit", "1", "2", "0", "0", "--depth", "3", "--out", str(tmp_path))
    assert rc == 0 and "strict nesting certificate: pass" in out.out
    data = json.loads((tmp_path / "orbit.json").read_text())
    assert data["nesting_certificate"] is True
    assert (tmp_path / "orbit.svg").exists() and (tmp_path / "orbit.csv").exists()


def test_orbit_pappus_case(tmp_path, capsys):
    rc, out = run(capsys, "orbit", "1", "1", "1/2", "1/3", "--depth", "3", "--out", str(tmp_path))
    assert rc == 0 and "closed nesting certificate: pass" in out.out


def test_orbit_errors(tmp_path, capsys):
    rc, out = run(capsys, "orbit", "6", "2", "0", "0", "--out", str(tmp_path))
    assert rc == 2 and "NotInTheta" in out.err
    with pytest.raises(SystemExit) as exc:
        main(["orbit", "1", "2", "0", "0", "--depth", "9"])
    assert exc.value.code == 2


def test_invariants(capsys):
    rc, out = run(capsys, "invariants", "1", "1", "1/2", "0")
    assert rc == 0 and "256/3" in out.out
    vals = invariants(1, 2, 0, 0)
    assert vals["tr_r1_r2"] == F(-121, 16)
    assert invariants(1, 1, F(1, 3), F(2, 7))["psi"] == 0
    assert invariants(1, 1, F(1, 3), F(2, 7))["polarity_exact"] is True


def test_invariants_json(tmp_path, capsys):
    rc, _ = run(capsys, "invariants", "3/2", "2", "1/3", "1/5", "--out", str(tmp_path))
    data = json.loads((tmp_path / "invariants.json").read_text())
    assert rc == 0 and data["in_theta"] is True
    assert data["psi"] != "0"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text(f'depth = 2\nformat = ["json"]\nout = "{tmp_path / "o"}"\n')
    rc, out = run(capsys, "orbit", "1", "2", "0", "0", "--config", str(cfg))
    assert rc == 0 and "depth 2" in out.out
    assert (tmp_path / "o" / "orbit.json").exists() and not (tmp_path / "o" / "orbit.svg").exists()
    rc, out = run(capsys, "orbit", "1", "2", "0", "0", "--config", str(cfg), "--depth", "1")
    assert "depth 1" in out.out


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(tol=0)
    with pytest.raises(ValueError):
        RunConfig(depth=99)
    with pytest.raises(ValueError):
        RunConfig(formats=("png",))


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pappus", "invariants", "1", "2", "0", "0"],
                          capture_output=True, text=True, check=True)
    assert "-121/16" in proc.stdout
