import json

import pytest

from sgsov.cli import main
from sgsov.config import load_config
from sgsov.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out


N1 = ("--n-sites", "1", "--seed", "11")


def test_verify_ybe_passes(capsys):
    code, out = run(capsys, *N1, "--format", "json", "verify-ybe")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert all(r["passed"] for r in records if "passed" in r)
    assert all("tolerance" in r for r in records if "passed" in r)


def test_output_is_deterministic(capsys):
    _, out1 = run(capsys, *N1, "--format", "json", "averages")
    _, out2 = run(capsys, *N1, "--format", "json", "averages")
    assert out1 == out2


def test_even_sites_rejected(capsys):
    code, _ = run(capsys, "--n-sites", "2", "spectrum")
    assert code == 2


def test_unreachable_tolerance_fails(capsys):
    code, _ = run(capsys, *N1, "--tol.rll", "1e-20", "verify-ybe")
    assert code == 3


def test_degenerate_parameters_rejected(capsys):
    code, _ = run(capsys, "--n-sites", "3", "--tol.grid_separation", "1.0",
                  "averages")
    assert code == 4


def test_coupling_flags(capsys):
    code, out = run(capsys, "--n-sites", "1", "--kappa", "1.3", "--xi", "0.8",
                    "--format", "json", "verify-ybe")
    assert code == 0


def test_tol_flag_with_equals(capsys):
    code, _ = run(capsys, *N1, "--tol.rll=1e-20", "verify-ybe")
    assert code == 3
    code, _ = run(capsys, *N1, "--tol.rll=oops", "verify-ybe")
    assert code == 2


def test_config_file_roundtrip(tmp_path, capsys):
    cfg = {
        "N": 1, "p": 3, "p_prime": 2, "seed": 11,
        "lambda_grid": {"count": 4, "r_min": 0.5, "r_max": 2.0},
        "tolerances": {"rll": 1e-9},
        "output": {"format": "json"},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    code, out = run(capsys, "--config", str(path), "verify-ybe")
    assert code == 0
    rec = json.loads(out.splitlines()[0])
    assert rec["tolerance"] == 1e-9
    assert rec["pairs"] == 4


def test_flags_override_config(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"N": 3, "seed": 1, "tolerances": {"rll": 1e-9}}))
    cfg = load_config(str(path), {"N": 1, "tolerances": {"tq": 1e-7}})
    assert cfg.N == 1
    assert cfg.seed == 1
    assert cfg.tolerances == {"rll": 1e-9, "tq": 1e-7}


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"sites": 3}))
    with pytest.raises(ConfigError, match="unknown config keys"):
        load_config(str(path))
    path.write_text(json.dumps({"tolerances": {"bogus": 1.0}}))
    with pytest.raises(ConfigError, match="tolerance"):
        load_config(str(path))


def test_config_complex_couplings(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"N": 1, "kappa": [[1.0, 0.5]], "xi": ["0.8+0.1j"]}))
    cfg = load_config(str(path))
    assert cfg.kappa == (1.0 + 0.5j,)
    assert cfg.xi == (0.8 + 0.1j,)


def test_out_file_and_table_format(tmp_path, capsys):
    target = tmp_path / "report.txt"
    code, out = run(capsys, *N1, "--out", str(target), "verify-ybe")
    assert code == 0
    assert out == ""
    text = target.read_text()
    assert text.startswith("rll_residual")
    assert "tolerance=" in text


def test_missing_config_file(capsys):
    code, _ = run(capsys, "--config", "/nonexistent/cfg.json", "spectrum")
    assert code == 2


def test_suite_single_site(capsys):
    code, out = run(capsys, *N1, "--format", "json", "suite")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    summary = records[-1]
    assert summary["record"] == "suite_summary"
    assert summary["passed"] is True
    ids = [r["id"] for r in records if r["record"] == "criterion"]
    assert ids == [str(k) for k in range(1, 10)]
