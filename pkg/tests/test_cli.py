import csv
import math
import shutil
from pathlib import Path

import pytest

from pathghz.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_VALIDATION, main
from pathghz.errors import NumericalCheckError
from pathghz import scenarios

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def read(path):
    lines = Path(path).read_text().splitlines()
    assert lines[0].startswith("# config_digest=")
    return list(csv.DictReader(lines[1:]))


def run(tmp_path, scenario, config="ideal.yaml", *extra):
    out = tmp_path / scenario
    code = main(["--config", str(CONFIGS / config), "--scenario", scenario, "--out", str(out), *extra])
    return code, out


def test_ghz_ideal(tmp_path):
    code, out = run(tmp_path, "ghz")
    assert code == EXIT_OK
    (row,) = read(out / "ghz.csv")
    assert float(row["fidelity"]) == pytest.approx(1.0, abs=1e-10)
    assert float(row["theta_measured"]) == pytest.approx(math.pi / 2, abs=1e-10)


def test_rate_row(tmp_path):
    code, out = run(tmp_path, "rate")
    assert code == EXIT_OK
    (row,) = read(out / "rate.csv")
    assert float(row["rate_hz"]) == pytest.approx(625.0)


def test_bell_and_pair_table(tmp_path):
    code, out = run(tmp_path, "bell")
    assert code == EXIT_OK
    assert float(read(out / "bell.csv")[0]["fidelity_psi_minus"]) == pytest.approx(1.0)
    rows = read(out / "pair_table.csv")
    assert list(rows[0]) == ["k1_index", "k2_index", "p", "q", "re", "im"]
    assert len(rows) == 8


def test_schmidt(tmp_path):
    code, out = run(tmp_path, "schmidt", "correlated.yaml")
    assert code == EXIT_OK
    (row,) = read(out / "schmidt_summary.csv")
    assert 0 < float(row["purity"]) < 1
    assert len(read(out / "bwf.csv")) == 9


def test_oracle_check_five_random(tmp_path):
    code, out = run(tmp_path, "oracle-check", "correlated.yaml", "--seed", "42")
    assert code == EXIT_OK
    rows = read(out / "oracle_check.csv")
    assert len(rows) == 6 and all(r["passed"] == "1" for r in rows)


def test_oracle_failure_exit_code(tmp_path, monkeypatch):
    def failing(cfg, seed=None):
        raise NumericalCheckError("oracle-equivalence", "forced")

    monkeypatch.setitem(scenarios.RUNNERS, "oracle-check", failing)
    code, _ = run(tmp_path, "oracle-check")
    assert code == EXIT_NUMERICAL


def test_sweep_is_deterministic_and_ordered(tmp_path):
    code, out = run(tmp_path, "sweep", "sweep_lengths.yaml", "--seed", "3")
    assert code == EXIT_OK
    first = (out / "sweep.csv").read_bytes()
    code, out2 = run(tmp_path / "again", "sweep", "sweep_lengths.yaml", "--seed", "3", "--workers", "2")
    assert code == EXIT_OK
    assert (out2 / "sweep.csv").read_bytes() == first
    rows = read(out / "sweep.csv")
    assert [int(r["index"]) for r in rows] == list(range(10))
    for r in rows:
        assert abs(float(r["theta_measured"]) - float(r["theta_formula"])) < 1e-10


def test_rerun_overwrites_identically(tmp_path):
    _, out = run(tmp_path, "ghz")
    snap = {p.name: p.read_bytes() for p in out.iterdir()}
    run(tmp_path, "ghz")
    assert {p.name: p.read_bytes() for p in out.iterdir()} == snap


def test_random_sweep_without_seed_fails(tmp_path):
    code, _ = run(tmp_path, "sweep", "sweep_lengths.yaml")
    assert code == EXIT_VALIDATION


def test_sweep_without_section_fails(tmp_path):
    code, _ = run(tmp_path, "sweep")
    assert code == EXIT_VALIDATION


def test_bad_config_exit_code(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("beta: 0.1\nsource: {t: 2}\n")
    assert main(["--config", str(bad), "--scenario", "ghz", "--out", str(tmp_path)]) == EXIT_VALIDATION


def test_unknown_scenario_rejected_by_parser(tmp_path):
    with pytest.raises(SystemExit):
        main(["--config", str(CONFIGS / "ideal.yaml"), "--scenario", "nope"])


@pytest.mark.skipif(shutil.which("pathghz") is None, reason="console script not installed")
def test_console_script(tmp_path):
    import subprocess

    res = subprocess.run(
        ["pathghz", "--config", str(CONFIGS / "ideal.yaml"), "--scenario", "rate", "--out", str(tmp_path)],
        capture_output=True,
    )
    assert res.returncode == 0
