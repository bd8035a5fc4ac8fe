import csv
import json
import math

import numpy as np
import pytest

from stockfire import corridor_sim as cs
from stockfire import scenario_io as sio
from stockfire.errors import ParseError
from stockfire.pathway_model import PathwayId

from conftest import GOLDEN


def test_reference_loads(reference):
    assert reference.chp.capacity_mw == 20
    assert reference.chp.capacity_factor == 0.856
    assert reference.dc.critical_mw == 15
    assert reference.waste.f_doc == pytest.approx(1 - math.exp(-5))


def test_empty_file_gives_reference(reference):
    assert sio.parse_scenario("") == reference


def test_every_default_in_schema_is_accepted():
    lines = [f"{k.name} = {str(k.default).lower() if k.kind == 'bool' else k.default}"
             for k in sio.SCHEMA if k.default is not None]
    assert sio.parse_scenario("\n".join(lines)) == sio.parse_scenario("")


def test_out_of_range_names_key_and_line():
    text = "chp.capacity_mw = 25\n\n# comment\ncapture_r = 1.5\n"
    with pytest.raises(ParseError) as exc:
        sio.parse_scenario(text, "bad.scenario")
    err = exc.value
    assert err.key == "capture_r" and err.line == 4
    assert "capture_r" in str(err) and "bad.scenario:4" in str(err)


@pytest.mark.parametrize("text, key, line", [
    ("chp.capcity_mw = 20", "chp.capcity_mw", 1),
    ("\noutages.duration_distribution = weibull", "outages.duration_distribution", 2),
    ("chp.islandable = yes", "chp.islandable", 1),
    ("decay.k = 0", "decay.k", 1),
    ("decay.horizon_years = 1.5", "decay.horizon_years", 1),
    ("gwp = 50", "gwp", 1),
    ("dc.bulk_mw = 10\ndc.critical_mw = 12", "dc.critical_mw", 2),
    ("chp.capacity_factor = nan", "chp.capacity_factor", 1),
])
def test_parse_errors(text, key, line):
    with pytest.raises(ParseError) as exc:
        sio.parse_scenario(text)
    assert (exc.value.key, exc.value.line) == (key, line)


def test_inconsistent_f_doc_rejected():
    from stockfire.errors import ConsistencyError
    scn = sio.parse_scenario("waste.f_doc = 0.5")
    with pytest.raises(ConsistencyError):
        sio.pathway_balances(scn)


def test_missing_file():
    with pytest.raises(ParseError):
        sio.load_scenario("/nonexistent/x.scenario")


def test_gwp20_switch(reference):
    scn = sio.parse_scenario("gwp = 20")
    assert scn.gwp.ch4_factor == 80
    assert sio.reproduce_table3(scn).baseline_ch4_tco2e_yr == pytest.approx(
        sio.reproduce_table3(reference).baseline_ch4_tco2e_yr * 80 / 28)


# --- site comparison table------------------------------------------------------------

def test_table3_bands(reference):
    t = sio.reproduce_table3(reference)
    assert 190_000 <= t.baseline_ch4_tco2e_yr <= 210_000
    assert 0.60 <= t.reduction_pct <= 0.70
    assert 65_000 <= t.project_ch4_tco2e_yr <= 75_000
    assert 20 <= t.land_ha <= 30
    assert t.firm_capacity_mw == 20
    assert 145 <= t.annual_generation_gwh <= 155
    assert 0.05 <= t.dc_share_pct <= 0.07
    assert t.project_ch4_tco2e_yr == pytest.approx(t.baseline_ch4_tco2e_yr * (1 - t.reduction_pct))


def test_baseline_gas_engines_stay_small(reference):
    assert sio.baseline_lfg_generation_gwh(reference) == pytest.approx(4 * 8.76 * 0.8)
    assert sio.baseline_lfg_generation_gwh(reference) < 30
    assert sio.baseline_lfg_generation_gwh(sio.parse_scenario("site.baseline_lfg_mw = 0")) == 0


def test_table3_without_excavation():
    t = sio.reproduce_table3(sio.parse_scenario(
        "remediation.excavated_fraction = 0\nremediation.residual_r = 0.3\nremediation.residual_ox = 0.1"))
    assert t.reduction_pct == 0
    assert t.project_ch4_tco2e_yr == t.baseline_ch4_tco2e_yr
    assert t.land_ha == 0


def test_backsolved_basis(reference):
    per_tonne = sio.pathway_balances(reference)[0].direct_tco2e
    assert round(200_000 / per_tonne, -1) == sio.REFERENCE_SITE_BASIS


def test_remediation_costs_per_tonne_of_site(reference):
    c = reference.costs.for_pathway(PathwayId.REMEDIATION_WTE, reference)
    assert c.land_recovered_ha_per_tonne == pytest.approx(25 / 30e6)
    assert not c.accepts_waste
    assert reference.costs.for_pathway(PathwayId.WTE_CURRENT, reference).accepts_waste


# --- reports -----------------------------------------------------------------

def _bundle(reference, regimes, resilience=None):
    incentives = [(r.name, p) for r in regimes.values() for p in sio.incentive_profiles(reference, r)]
    return sio.ReportBundle(table3=sio.reproduce_table3(reference),
                            pathways=sio.pathway_balances(reference),
                            incentives=incentives, resilience=resilience)


def _header(path):
    with path.open(newline="") as f:
        return next(csv.reader(f))


def test_report_headers(tmp_path, reference, regimes):
    written = sio.write_report(_bundle(reference, regimes), tmp_path)
    assert {p.name for p in written} == {"table3.json", "table3.csv", "pathways.csv", "incentives.csv"}
    assert not (tmp_path / "resilience.json").exists()
    assert _header(tmp_path / "pathways.csv") == list(sio.PATHWAY_COLUMNS)
    assert _header(tmp_path / "incentives.csv") == list(sio.INCENTIVE_COLUMNS)
    assert _header(tmp_path / "table3.csv") == list(sio.TABLE3_FIELDS)
    with (tmp_path / "incentives.csv").open() as f:
        rows = list(csv.DictReader(f))
    assert len(rows) == 3 * len(regimes)


def test_report_round_trip(tmp_path, reference, regimes):
    metrics = cs.monte_carlo(reference, 5, 1)
    bundle = _bundle(reference, regimes, metrics)
    sio.write_report(bundle, tmp_path)
    for reader in (sio.read_table3_csv, sio.read_table3_json):
        back = reader(tmp_path / f"table3.{reader.__name__.rsplit('_', 1)[1]}")
        for name in sio.TABLE3_FIELDS:
            assert getattr(back, name) == pytest.approx(getattr(bundle.table3, name), rel=1e-9)
    rows = sio.read_pathways_csv(tmp_path / "pathways.csv")
    for row, b in zip(rows, bundle.pathways):
        assert row["pathway_id"] == b.pathway_id.value
        assert row["net"] == pytest.approx(b.net_tco2e, rel=1e-9, abs=1e-12)
        assert row["direct"] == pytest.approx(b.direct_tco2e, rel=1e-9, abs=1e-12)
    res = sio.read_resilience_json(tmp_path / "resilience.json")
    for k, v in metrics.to_dict().items():
        assert getattr(res, k) == pytest.approx(v, rel=1e-9)


def test_report_into_file_path_fails(tmp_path, reference):
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    with pytest.raises(OSError):
        sio.write_report(sio.ReportBundle(pathways=sio.pathway_balances(reference)), blocker)


@pytest.mark.parametrize("name", ["table3.csv", "table3.json", "pathways.csv"])
def test_goldens_byte_exact(tmp_path, reference, name):
    sio.write_report(sio.ReportBundle(table3=sio.reproduce_table3(reference),
                                      pathways=sio.pathway_balances(reference)), tmp_path)
    assert (tmp_path / name).read_bytes() == (GOLDEN / name).read_bytes()


def test_json_is_plain(tmp_path, reference):
    sio.write_report(sio.ReportBundle(table3=sio.reproduce_table3(reference)), tmp_path)
    data = json.loads((tmp_path / "table3.json").read_text())
    assert set(data) == set(sio.TABLE3_FIELDS)


# --- trace file referenced from a scenario ---------------------------------

def test_scenario_with_trace(tmp_path):
    up = np.ones(cs.HOURS_PER_YEAR, bool)
    up[100:110] = False
    trace = cs.HourlyTrace(up, np.full(cs.HOURS_PER_YEAR, 250.0), np.full(cs.HOURS_PER_YEAR, 10.0))
    cs.write_trace_csv(trace, tmp_path / "load.csv")
    (tmp_path / "s.scenario").write_text("dc.trace_csv = load.csv\n")
    scn = sio.load_scenario(tmp_path / "s.scenario")
    np.testing.assert_array_equal(scn.hourly_trace.grid_up, up)
    m = cs.monte_carlo(scn, 2, 0)
    assert m.dc_energy_gwh == pytest.approx(250 * 8.76)
    assert m.outage_events == 2


def test_scenario_with_broken_trace(tmp_path):
    (tmp_path / "load.csv").write_text("hour,grid_up,bulk_mw,critical_mw\n0,1,10,5\n")
    (tmp_path / "s.scenario").write_text("dc.trace_csv = load.csv\n")
    with pytest.raises(ParseError):
        sio.load_scenario(tmp_path / "s.scenario")


def test_schema_table_lists_every_key():
    table = sio.schema_table()
    for k in sio.SCHEMA:
        assert f"`{k.name}`" in table
