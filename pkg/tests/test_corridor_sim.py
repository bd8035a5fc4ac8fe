import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stockfire import corridor_sim as cs
from stockfire.errors import DomainError, ParseError

from conftest import GOLDEN
from oracles import hand_dispatch_critical_losses

H = cs.HOURS_PER_YEAR


def _with(scenario, **parts):
    """Scenario copy with sub-configs updated, e.g. chp=dict(capacity_factor=0.9)."""
    return replace(scenario, **{k: replace(getattr(scenario, k), **v) for k, v in parts.items()})


def _outage(start, hours):
    up = np.ones(H, dtype=bool)
    up[start:start + hours] = False
    return up


def _flat(cf):
    return np.full(H, cf)


# --- analytic energy -------------------------------------------------------

def test_annual_energy_reference():
    assert cs.annual_chp_energy(cs.ChpUnit()) == pytest.approx(149.9712, abs=1e-9)


@pytest.mark.parametrize("cf, bulk, util, share", [
    (0.856, 300, 0.97, 149.9712 / 2549.16),
    (1.0, 300, 1.0, 175.2 / 2628.0),
])
def test_demand_share(cf, bulk, util, share):
    chp = cs.ChpUnit(capacity_factor=cf)
    dc = cs.DataCenterLoad(bulk_mw=bulk, utilization=util)
    assert cs.dc_demand_share(chp, dc) == pytest.approx(share, rel=1e-12)


def test_round_number_shares():
    # 150 GWh against 2550 and 2500 GWh of demand
    chp = cs.ChpUnit(capacity_mw=150_000 / 8760, capacity_factor=1.0)
    assert cs.annual_chp_energy(chp) == pytest.approx(150.0)
    dc = cs.DataCenterLoad(bulk_mw=2_550_000 / 8760, utilization=1.0)
    assert cs.dc_demand_share(chp, dc) == pytest.approx(150 / 2550)
    dc = cs.DataCenterLoad(bulk_mw=2_500_000 / 8760, utilization=1.0)
    assert cs.dc_demand_share(chp, dc) == pytest.approx(0.06)


def test_capacity_factor_bracket():
    low = cs.annual_chp_energy(cs.ChpUnit(capacity_factor=0.85))
    high = cs.annual_chp_energy(cs.ChpUnit(capacity_factor=0.90))
    assert low < 150 < high


def test_zero_demand_share_rejected():
    with pytest.raises(DomainError):
        cs.dc_demand_share(cs.ChpUnit(), cs.DataCenterLoad(bulk_mw=0.0, critical_mw=0.0))


@pytest.mark.parametrize("kwargs", [
    dict(capacity_mw=0), dict(capacity_factor=1.2), dict(island_transfer_success_prob=-0.1),
    dict(availability_mode="weekly"), dict(mean_repair_hours=0),
])
def test_chp_validation(kwargs):
    with pytest.raises(DomainError):
        cs.ChpUnit(**kwargs)


def test_load_validation():
    with pytest.raises(DomainError):
        cs.DataCenterLoad(bulk_mw=10, utilization=1.0, critical_mw=11)
    with pytest.raises(DomainError):
        cs.OutageProcess(duration_distribution="weibull")
    with pytest.raises(DomainError):
        cs.DieselUnit(capacity_mw=-1)


# --- single-year dispatch ---------------------------------------------------

def test_no_outage_year(reference):
    tr = cs.simulate_dispatch(reference, np.ones(H, bool), _flat(0.856))
    assert tr.ride_through_hours == []
    assert tr.critical_loss_hours == 0
    assert not tr.unserved_mw.any() and not tr.diesel_mw.any()
    assert tr.chp_mw.sum() == pytest.approx(20 * 0.856 * H)


def test_48h_outage_with_chp(reference):
    tr = cs.simulate_dispatch(reference, _outage(1000, 48), _flat(0.856))
    assert tr.critical_loss_hours == 0
    assert tr.ride_through_hours == [48]
    # 17.12 MW of CHP covers the 15 MW critical block with nothing left for diesel
    assert not tr.diesel_mw.any()
    window = slice(1000, 1048)
    assert np.allclose(tr.chp_island_critical_mw[window], 15.0)
    assert np.allclose(tr.chp_mw[window], 17.12)
    assert np.allclose(tr.unserved_mw[window], 291.0 - 17.12)


def test_48h_outage_diesel_only(reference):
    scn = cs.diesel_only(reference)
    tr = cs.simulate_dispatch(scn, _outage(1000, 48), _flat(0.856))
    expected = hand_dispatch_critical_losses(48, 17.12, 15.0, 15.0, 24.0, islanded=False)
    assert expected == 24
    assert tr.critical_loss_hours == expected
    assert tr.ride_through_hours == [24]
    assert tr.diesel_mw.sum() == pytest.approx(360.0)


@pytest.mark.parametrize("hours, chp_mw, crit, dmw, dh, islanded", [
    (30, 10.0, 15.0, 3.0, 20.0, True),
    (30, 10.0, 15.0, 3.0, 20.0, False),
    (72, 0.0, 15.0, 15.0, 24.0, True),
    (5, 15.0, 15.0, 0.0, 0.0, True),
    (40, 14.0, 15.0, 15.0, 2.0, True),
])
def test_dispatch_matches_hand_trace(reference, hours, chp_mw, crit, dmw, dh, islanded):
    scn = _with(reference, chp=dict(capacity_mw=20.0, islandable=islanded),
                diesel=dict(capacity_mw=dmw, fuel_hours_at_capacity=dh),
                dc=dict(critical_mw=crit))
    tr = cs.simulate_dispatch(scn, _outage(500, hours), _flat(chp_mw / 20.0))
    assert tr.critical_loss_hours == hand_dispatch_critical_losses(hours, chp_mw, crit, dmw, dh, islanded)


def test_failed_transfer_behaves_like_no_chp(reference):
    up = _outage(200, 30)
    failed = cs.simulate_dispatch(reference, up, _flat(0.856), transfer_ok=[False])
    none = cs.simulate_dispatch(cs.diesel_only(reference), up, _flat(0.856))
    assert failed.transfer_failures == 1
    np.testing.assert_array_equal(failed.unserved_critical_mw, none.unserved_critical_mw)
    np.testing.assert_array_equal(failed.diesel_mw, none.diesel_mw)


def test_diesel_without_black_start_needs_island(reference):
    scn = _with(reference, diesel=dict(black_start=False))
    up = _outage(10, 6)
    dark = cs.simulate_dispatch(cs.diesel_only(scn), up, _flat(0.0))
    assert dark.critical_loss_hours == 6 and not dark.diesel_mw.any()
    # islanded CHP with nothing available still gives diesel a reference to sync to
    lit = cs.simulate_dispatch(scn, up, _flat(0.0))
    assert lit.critical_loss_hours == 0


def test_tank_refills_between_events(reference):
    scn = cs.diesel_only(reference)
    up = _outage(100, 24) & _outage(1000, 24)
    tr = cs.simulate_dispatch(scn, up, _flat(0.856))
    assert tr.critical_loss_hours == 0
    assert tr.ride_through_hours == [24, 24]


def test_trace_length_mismatch(reference):
    with pytest.raises(DomainError, match="length"):
        cs.simulate_dispatch(reference, np.ones(H - 1, bool), _flat(0.856)[:-1])
    with pytest.raises(DomainError, match="length"):
        cs.simulate_dispatch(reference, np.ones(H, bool), _flat(0.856)[:-1])


def test_too_few_transfer_draws(reference):
    with pytest.raises(DomainError):
        cs.simulate_dispatch(reference, _outage(5, 5) & _outage(50, 5), _flat(0.9), transfer_ok=[True])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), cf=st.floats(0.0, 1.0),
       islandable=st.booleans(), black_start=st.booleans())
def test_energy_balance_every_hour(reference, seed, cf, islandable, black_start):
    scn = _with(reference, chp=dict(capacity_factor=cf, islandable=islandable),
                diesel=dict(black_start=black_start), outages=dict(mean_outages_per_year=6.0))
    d = cs.draw_trial(scn, seed, 0)
    tr = cs.simulate_dispatch(scn, d.grid_up, d.chp_availability, d.transfer_uniforms < 0.9)
    np.testing.assert_allclose(tr.served_mw + tr.unserved_mw, tr.demand_mw, atol=1e-9)
    assert (tr.unserved_mw >= -1e-12).all()
    assert (tr.unserved_critical_mw <= tr.unserved_mw + 1e-9).all()
    assert (tr.grid_mw[~d.grid_up] == 0).all()
    assert tr.diesel_mw.sum() <= scn.diesel.tank_mwh * len(tr.ride_through_hours) + 1e-9


def test_outage_events():
    up = np.ones(20, bool)
    up[[0, 1, 5, 19]] = False
    assert cs.outage_events(up) == [(0, 2), (5, 6), (19, 20)]
    assert cs.outage_events(np.ones(5, bool)) == []


# --- Monte Carlo ------------------------------------------------------------

def test_trials_must_be_positive(reference):
    with pytest.raises(DomainError):
        cs.monte_carlo(reference, 0, 1)
    with pytest.raises(DomainError):
        cs.aggregate([])


def test_single_trial_equals_direct_dispatch(reference):
    d = cs.draw_trial(reference, 7, 0)
    tr = cs.simulate_dispatch(reference, d.grid_up, d.chp_availability,
                              d.transfer_uniforms < reference.chp.island_transfer_success_prob)
    direct = cs.summarize(tr)
    assert cs.run_trials(reference, 1, 7) == [direct]
    m = cs.monte_carlo(reference, 1, 7)
    assert m.chp_energy_gwh == direct.chp_mwh / 1000
    assert m.critical_lolh == direct.critical_loss_hours


def test_zero_outage_rate(reference):
    scn = _with(reference, outages=dict(mean_outages_per_year=0.0))
    m = cs.monte_carlo(scn, 20, 3)
    assert m.outage_events == 0
    assert m.critical_lolh == m.unserved_bulk_gwh == m.diesel_energy_gwh == 0
    assert m.ride_through_max_h == 0
    assert m.chp_energy_gwh == pytest.approx(149.9712)


def test_fixed_durations(reference):
    scn = _with(reference, outages=dict(duration_distribution="fixed", mean_duration_hours=7.5,
                                        mean_outages_per_year=400.0))
    lengths = [stop - start for i in range(3)
               for start, stop in cs.outage_events(cs.draw_trial(scn, 11, i).grid_up)]
    # ceil(7.5) hours each; overlapping events merge, events at year end are cut
    assert 8 in lengths
    assert max(lengths) > 8  # at least one merged pair in 3 busy years


def test_trial_streams_are_independent_of_count(reference):
    a = cs.run_trials(reference, 5, 99)
    b = cs.run_trials(reference, 12, 99)
    assert a == b[:5]


def test_workers_do_not_change_results(reference):
    one = cs.monte_carlo(reference, 60, 2024, workers=1)
    four = cs.monte_carlo(reference, 60, 2024, workers=4)
    assert one == four


def test_aggregate_order_independent(reference):
    results = cs.run_trials(reference, 40, 5)
    a = cs.aggregate(results, 5)
    b = cs.aggregate(results[::-1], 5)
    assert a == b


def test_golden_resilience(reference):
    golden = json.loads((GOLDEN / "resilience_seed42_1000.json").read_text())
    m = cs.monte_carlo(reference, 1000, 42)
    from stockfire.scenario_io import _rounded
    assert {k: _rounded(v) for k, v in m.to_dict().items()} == golden


def test_stochastic_availability_matches_capacity_factor(reference):
    scn = _with(reference, chp=dict(availability_mode="stochastic"),
                outages=dict(mean_outages_per_year=0.0))
    m = cs.monte_carlo(scn, 200, 1)
    assert m.chp_energy_gwh == pytest.approx(149.9712, rel=0.03)
    d = cs.draw_trial(scn, 1, 0)
    assert set(np.unique(d.chp_availability)) <= {0.0, 1.0}


@pytest.mark.parametrize("cf, value", [(1.0, 1.0), (0.0, 0.0)])
def test_stochastic_extremes(reference, cf, value):
    scn = _with(reference, chp=dict(availability_mode="stochastic", capacity_factor=cf))
    assert (cs.draw_trial(scn, 0, 0).chp_availability == value).all()


@pytest.mark.parametrize("mode", ["deterministic", "stochastic"])
def test_chp_never_worse_than_diesel_only(reference, mode):
    scn = _with(reference, chp=dict(availability_mode=mode), outages=dict(mean_outages_per_year=4.0,
                                                                          mean_duration_hours=30.0))
    cmp = cs.ride_through_comparison(scn, trials=150, master_seed=8)
    for with_chp, without in cmp.critical_lolh_pairs():
        assert with_chp <= without
    for a, b in zip(cmp.with_chp_trials, cmp.diesel_only_trials):
        assert a.diesel_mwh <= b.diesel_mwh + 1e-9
        assert a.unserved_mwh <= b.unserved_mwh + 1e-9


def test_zero_transfer_probability_equals_diesel_only(reference):
    scn = _with(reference, chp=dict(island_transfer_success_prob=0.0))
    cmp = cs.ride_through_comparison(scn, trials=100, master_seed=4)
    for a, b in zip(cmp.with_chp_trials, cmp.diesel_only_trials):
        assert a.critical_loss_hours == b.critical_loss_hours
        assert a.diesel_mwh == b.diesel_mwh
        assert a.unserved_mwh == b.unserved_mwh
    assert cmp.with_chp.island_transfer_failures == cmp.with_chp.outage_events


# --- hourly trace files -------------------------------------------------------

def _trace():
    up = _outage(10, 5)
    bulk = np.linspace(200.0, 300.0, H)
    return cs.HourlyTrace(up, bulk, np.full(H, 12.5))


def test_trace_round_trip(tmp_path):
    t = _trace()
    p = tmp_path / "trace.csv"
    cs.write_trace_csv(t, p)
    back = cs.read_trace_csv(p)
    np.testing.assert_array_equal(back.grid_up, t.grid_up)
    np.testing.assert_allclose(back.bulk_mw, t.bulk_mw, rtol=1e-11)
    np.testing.assert_array_equal(back.critical_mw, t.critical_mw)


def _lines(tmp_path):
    p = tmp_path / "trace.csv"
    cs.write_trace_csv(_trace(), p)
    return p, p.read_text().splitlines()


@pytest.mark.parametrize("mutate, line", [
    (lambda ls: ["hour,up,bulk_mw,critical_mw"] + ls[1:], 1),
    (lambda ls: ls[:5] + ["4,1,250,x"] + ls[6:], 6),
    (lambda ls: ls[:5] + ["7,1,250,10"] + ls[6:], 6),
    (lambda ls: ls[:5] + ["4,2,250,10"] + ls[6:], 6),
    (lambda ls: ls[:5] + ["4,1,250,300"] + ls[6:], 6),
    (lambda ls: ls[:5] + ["4,1,250"] + ls[6:], 6),
    (lambda ls: ls[:-1], None),
])
def test_trace_errors(tmp_path, mutate, line):
    p, ls = _lines(tmp_path)
    p.write_text("\n".join(mutate(ls)) + "\n")
    with pytest.raises(ParseError) as exc:
        cs.read_trace_csv(p)
    assert exc.value.line == line


def test_trace_overrides_outage_draws(reference):
    scn = replace(reference, hourly_trace=_trace())
    d = cs.draw_trial(scn, 0, 0)
    np.testing.assert_array_equal(d.grid_up, _trace().grid_up)
    assert len(d.transfer_uniforms) == 1
    m = cs.monte_carlo(scn, 3, 0)
    assert m.outage_events == 3
    assert m.dc_energy_gwh == pytest.approx(_trace().bulk_mw.sum() / 1000)
