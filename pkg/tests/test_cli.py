import csv
import json
import math
import subprocess
import sys

import pytest

from bslspaces.cli import main
from bslspaces.fundamental import phi_small
from bslspaces.psi import PsiFunction


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_atomic(path, rows):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["id", "weight", "value"])
        wr.writerows(rows)
    return str(path)


def run_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_chi_example(capsys):
    code, d = run_json(capsys, "chi", "--function", "catalog:example51", "--n", "1000")
    assert code == 0
    assert abs(d["value"] - math.sqrt(0.5) * (2 + 1 / 1000)) <= 1e-12


def test_fundamental_profile_csv(tmp_path):
    out = tmp_path / "prof.csv"
    assert main(["fundamental", "--psi", "zeta:1,2,1,1", "--delta-range", "1e-8:1e8",
                 "--out", str(out)]) == 0
    rows = read_rows(out)
    assert list(rows[0]) == ["delta", "phi_numeric", "phi_closed", "rel_dev", "chi", "p_star"]
    assert len(rows) > 100
    assert max(float(r["rel_dev"]) for r in rows) <= 1e-4


def test_verify_duality_exit_zero(capsys):
    assert main(["verify", "--suite", "duality", "--seed", "7", "--count", "5"]) == 0
    assert "PASS" in capsys.readouterr().err


def test_norm_grand_from_files(tmp_path, capsys):
    space = write_atomic(tmp_path / "space.csv", [("a", 0.3, 0), ("b", 1.0, 0)])
    fn = write_atomic(tmp_path / "f.csv", [("a", 1.0, 1.0), ("b", 1.0, 0.0)])
    code, d = run_json(capsys, "norm", "grand", "--psi", "zeta:1,3,1,2", "--space", space,
                       "--function", fn)
    assert code == 0
    from bslspaces.fundamental import phi_grand_numeric
    assert d["value"] == pytest.approx(phi_grand_numeric(PsiFunction.zeta(1, 3, 1, 2), 0.3), rel=1e-9)


def test_norm_small_with_certificates(tmp_path, capsys):
    fn = write_atomic(tmp_path / "f.csv", [("a", 0.3, 1.0), ("b", 1.0, 0.0)])
    code, d = run_json(capsys, "norm", "small", "--psi", "zeta:1,3,1,2", "--function", fn,
                       "--grid", "32", "--mode", "both")
    assert code == 0
    chi = phi_small(PsiFunction.zeta(1, 3, 1, 2), 0.3)
    assert d["lower"] <= d["upper"] * (1 + 1e-9)
    assert d["upper"] == pytest.approx(chi, rel=1e-3)
    assert "certificate" in d


def test_indices(capsys):
    code, d = run_json(capsys, "indices", "--psi", "zeta:1.5,4,1,1", "--space", "small")
    assert code == 0
    assert d["small"]["gamma1"] == pytest.approx(1 / 3, rel=0.02)
    assert "grand" not in d


def test_catalog_list_and_check(capsys):
    code, d = run_json(capsys, "catalog", "--list")
    assert code == 0 and "f_ab" in json.dumps(d)
    code, d = run_json(capsys, "catalog", "--check", "f_ab")
    assert code == 0 and d["ok"]


def test_catalog_export_round_trip(tmp_path, capsys):
    out = tmp_path / "h.csv"
    assert main(["catalog", "--export", "h_m", "--out", str(out)]) == 0
    code, a = run_json(capsys, "norm", "grand", "--psi", "zeta:1,3,1,2", "--function", str(out))
    code2, b = run_json(capsys, "norm", "grand", "--psi", "zeta:1,3,1,2", "--function", "catalog:h_m")
    assert code == code2 == 0
    assert a["value"] == pytest.approx(b["value"], rel=1e-6)


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# profile\npsi = zeta:1,2,1,1\ndelta_range = 1e-2:1e2\nper_decade = 4\n")
    out = tmp_path / "p.csv"
    assert main(["fundamental", "--config", str(cfg), "--per-decade", "2", "--out", str(out)]) == 0
    assert len(read_rows(out)) == 9


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("BSLSPACES_OUTPUT_DIR", str(tmp_path))
    assert main(["fundamental", "--psi", "zeta:1,2,1,1", "--delta-range", "1e-1:1e1"]) == 0
    assert (tmp_path / "fundamental.csv").exists()


def test_outputs_are_bit_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    fn = write_atomic(tmp_path / "f.csv", [("a", 0.4, 1.0), ("b", 1.2, -0.5), ("c", 0.7, 0.25)])
    for p in paths:
        assert main(["norm", "small", "--psi", "zeta:1,3,1,2", "--function", fn, "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


@pytest.mark.parametrize("argv, needle", [
    (["chi", "--function", "catalog:nope"], "unknown catalog entry"),
    (["fundamental", "--psi", "zeta:1,2,1"], "four parameters"),
    (["fundamental", "--psi", "zeta:1,2,1,1", "--delta-range", "5:1"], "delta range"),
    (["norm", "grand", "--psi", "weird:1", "--function", "catalog:h_m"], "unknown psi family"),
    (["norm", "grand", "--psi", "zeta:1,3,1,2", "--function", "missing.csv"], "function file not found"),
    (["norm", "small", "--psi", "zeta:1,3,1,2", "--function", "catalog:h_m", "--grid", "4"], "at least 8"),
    (["fundamental", "--psi", "zeta:3,2,1,1"], "domain error"),
])
def test_input_errors_have_distinct_messages(argv, needle, capsys):
    assert main(argv) == 1
    assert needle in capsys.readouterr().err


def test_malformed_function_file(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,weight,value\na,notanumber,1\n")
    assert main(["norm", "grand", "--psi", "zeta:1,3,1,2", "--function", str(bad)]) == 1
    assert "malformed function file" in capsys.readouterr().err


def test_bad_config_key(tmp_path, capsys):
    cfg = tmp_path / "x.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["fundamental", "--config", str(cfg)]) == 1
    assert "unknown key" in capsys.readouterr().err


def test_verify_failure_exit_two(monkeypatch, capsys):
    from bslspaces import cli, verify

    def broken(**_):
        return verify.SuiteResult("closed-form", False, {}, ["closed form disagrees with numeric sup"])

    monkeypatch.setitem(cli.SUITES, "closed-form", broken)
    monkeypatch.setitem(verify.SUITES, "closed-form", broken)
    assert main(["verify", "--suite", "closed-form"]) == 2
    assert "FAIL" in capsys.readouterr().err


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "bslspaces.cli", "chi", "--function", "catalog:example51",
                        "--n", "2"], capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["value"] == pytest.approx(math.sqrt(0.5) * 2.5, abs=1e-12)
