import io
import subprocess
import sys

import pytest

from stockfire import cli

from conftest import GOLDEN


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_table3_matches_goldens(tmp_path):
    code, out, _ = run("table3", "--out", str(tmp_path))
    assert code == 0
    assert "firm capacity" in out
    for name in ("table3.csv", "table3.json", "pathways.csv"):
        assert (tmp_path / name).read_bytes() == (GOLDEN / name).read_bytes()


def test_pathways(tmp_path):
    code, out, _ = run("pathways", "--out", str(tmp_path))
    assert code == 0
    assert out.count("\n") == 4
    assert (tmp_path / "pathways.csv").read_bytes() == (GOLDEN / "pathways.csv").read_bytes()


def test_rank_us_baseline_puts_landfill_first(tmp_path):
    code, out, _ = run("rank", "--regime", "us_baseline", "--out", str(tmp_path))
    assert code == 0
    first = [line.split() for line in out.splitlines() if line.strip().startswith("1 ")]
    assert first[0][1] == "LANDFILL_CAPTURE"


def test_rank_default_regimes(tmp_path):
    code, out, _ = run("rank", "--out", str(tmp_path))
    assert code == 0
    for name in cli.SHIPPED_REGIMES:
        assert f"[{name}]" in out
    rows = (tmp_path / "incentives.csv").read_text().splitlines()
    assert len(rows) == 1 + 3 * len(cli.SHIPPED_REGIMES)


def test_tipping_point_found_and_missing():
    code, out, _ = run("tipping-point", "--regime", "us_baseline", "--regime", "methane_credit_demo")
    assert code == 0
    assert "us_baseline: none in range" in out
    assert "methane_credit_demo: lambda* = 70.4" in out


def test_allocate():
    code, out, _ = run("allocate", "--regime", "china_delandfill")
    assert code == 0
    shares = {line.split()[0]: float(line.split()[1]) for line in out.splitlines()[1:]}
    assert sum(shares.values()) == pytest.approx(1.0)
    assert shares["REMEDIATION_WTE"] == 1.0


def test_allocate_with_caps(tmp_path):
    scn = tmp_path / "s.scenario"
    scn.write_text("allocation.cap_remediation = 0.3\nallocation.composting_cost = -100\n"
                   "allocation.cap_composting = 0.2\n")
    code, out, _ = run("allocate", "--regime", "china_delandfill", "--scenario", str(scn))
    assert code == 0
    shares = {line.split()[0]: float(line.split()[1]) for line in out.splitlines()[1:]}
    assert shares["COMPOSTING"] == pytest.approx(0.2)
    assert shares["REMEDIATION_WTE"] == pytest.approx(0.3)
    assert sum(shares.values()) == pytest.approx(1.0)


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["allocate"], ["corridor", "--trials", "0"],
    ["corridor", "--seed", "-1"], ["tipping-point", "--lambda-min", "5", "--lambda-max", "1"],
    ["tipping-point", "--tol", "0"],
])
def test_usage_errors_exit_1(argv):
    code, _, err = run(*argv)
    assert code == 1
    assert err


def test_bad_scenario_exits_2(tmp_path):
    scn = tmp_path / "bad.scenario"
    scn.write_text("capture_r = 1.5\n")
    code, _, err = run("table3", "--scenario", str(scn), "--out", str(tmp_path))
    assert code == 2
    assert "capture_r" in err and ":1:" in err


def test_missing_regime_exits_2():
    code, _, err = run("rank", "--regime", "/nonexistent/none.regime")
    assert code == 2


def test_bad_regime_exits_2(tmp_path):
    reg = tmp_path / "r.regime"
    reg.write_text("name = x\nmethane_price = -3\n")
    code, _, err = run("rank", "--regime", str(reg))
    assert code == 2
    assert "methane_price" in err


def test_out_env_variable(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env_out"))
    code, _, _ = run("pathways")
    assert code == 0
    assert (tmp_path / "env_out" / "pathways.csv").exists()


def _corridor_bytes(tmp_path, tag, *extra):
    out = tmp_path / tag
    code, _, _ = run("corridor", "--trials", "200", "--seed", "42", "--out", str(out), *extra)
    assert code == 0
    return (out / "resilience.json").read_bytes()


def test_corridor_reproducible_across_runs_and_threads(tmp_path):
    a = _corridor_bytes(tmp_path, "a")
    b = _corridor_bytes(tmp_path, "b")
    c = _corridor_bytes(tmp_path, "c", "--threads", "3")
    assert a == b == c


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "stockfire", "table3", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "table3.csv").read_bytes() == (GOLDEN / "table3.csv").read_bytes()
