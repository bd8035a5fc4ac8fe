"""Hourly Monte Carlo of a landfill-fed CHP microgrid next to a data center.

Grid outages arrive as a Poisson process.  When the grid drops, an
islandable CHP unit tries to transfer to island operation (one Bernoulli
draw per outage event stands in for the sub-second control handover); if
it succeeds it carries critical load first and its surplus feeds the rest
of the campus.  Diesel backup covers whatever critical load remains until
its tank runs dry.  Non-critical load is only served by CHP surplus while
islanded (partial curtailment).

Trial ``i`` draws everything from ``SeedSequence(master_seed,
spawn_key=(i,))``, so results do not depend on how trials are scheduled.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .errors import DomainError, ParseError

HOURS_PER_YEAR = 8760
TRACE_HEADER = ("hour", "grid_up", "bulk_mw", "critical_mw")
_EPS = 1e-9


@dataclass(frozen=True)
class ChpUnit:
    capacity_mw: float = 20.0
    capacity_factor: float = 0.856
    islandable: bool = True
    black_start: bool = True
    island_transfer_success_prob: float = 0.98
    # "deterministic": capacity derated by CF every hour;
    # "stochastic": two-state forced outages with availability CF on average
    availability_mode: str = "deterministic"
    mean_repair_hours: float = 48.0

    def __post_init__(self):
        if not self.capacity_mw > 0:
            raise DomainError("capacity_mw must be > 0")
        for name in ("capacity_factor", "island_transfer_success_prob"):
            x = getattr(self, name)
            if not 0.0 <= x <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {x!r}")
        if self.availability_mode not in ("deterministic", "stochastic"):
            raise DomainError(f"unknown availability_mode {self.availability_mode!r}")
        if not self.mean_repair_hours > 0:
            raise DomainError("mean_repair_hours must be > 0")


@dataclass(frozen=True)
class DataCenterLoad:
    bulk_mw: float = 300.0
    utilization: float = 0.97
    critical_mw: float = 15.0

    def __post_init__(self):
        if self.bulk_mw < 0:
            raise DomainError("bulk_mw must be >= 0")
        if not 0.0 <= self.utilization <= 1.0:
            raise DomainError("utilization must lie in [0, 1]")
        if not 0.0 <= self.critical_mw <= self.bulk_mw * self.utilization + 1e-12:
            raise DomainError("critical_mw must lie in [0, bulk_mw * utilization]")

    @property
    def average_mw(self):
        return self.bulk_mw * self.utilization

    def annual_energy_gwh(self):
        return self.average_mw * HOURS_PER_YEAR / 1000.0


@dataclass(frozen=True)
class OutageProcess:
    mean_outages_per_year: float = 2.0
    mean_duration_hours: float = 12.0
    duration_distribution: str = "exponential"

    def __post_init__(self):
        if self.mean_outages_per_year < 0:
            raise DomainError("mean_outages_per_year must be >= 0")
        if not self.mean_duration_hours > 0:
            raise DomainError("mean_duration_hours must be > 0")
        if self.duration_distribution not in ("fixed", "exponential"):
            raise DomainError(f"unknown duration_distribution {self.duration_distribution!r}")


@dataclass(frozen=True)
class DieselUnit:
    capacity_mw: float = 15.0
    fuel_hours_at_capacity: float = 24.0
    black_start: bool = True

    def __post_init__(self):
        if self.capacity_mw < 0 or self.fuel_hours_at_capacity < 0:
            raise DomainError("diesel capacity and fuel hours must be >= 0")

    @property
    def tank_mwh(self):
        return self.capacity_mw * self.fuel_hours_at_capacity


@dataclass(frozen=True)
class HourlyTrace:
    """Hourly override of load and (optionally) grid availability."""

    grid_up: np.ndarray
    bulk_mw: np.ndarray
    critical_mw: np.ndarray

    def __post_init__(self):
        n = len(self.grid_up)
        if not (len(self.bulk_mw) == len(self.critical_mw) == n):
            raise DomainError("trace columns must have equal length")
        if np.any(self.critical_mw > self.bulk_mw + 1e-12) or np.any(self.critical_mw < 0):
            raise DomainError("critical_mw must lie in [0, bulk_mw] every hour")


def read_trace_csv(path) -> HourlyTrace:
    """Read ``hour,grid_up,bulk_mw,critical_mw`` with 8760 rows, hours 0..8759."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
            raise ParseError(f"header must be {','.join(TRACE_HEADER)}", path=path, line=1)
        grid, bulk, crit = [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 4:
                raise ParseError("expected 4 columns", path=path, line=lineno)
            try:
                hour = int(row[0])
                up = int(row[1])
                b, c = float(row[2]), float(row[3])
            except ValueError:
                raise ParseError("non-numeric field", path=path, line=lineno) from None
            if hour != lineno - 2:
                raise ParseError(f"expected hour {lineno - 2}, got {hour}", path=path, line=lineno)
            if up not in (0, 1):
                raise ParseError("grid_up must be 0 or 1", path=path, line=lineno, key="grid_up")
            if not (0 <= c <= b) or not (math.isfinite(b) and math.isfinite(c)):
                raise ParseError("need 0 <= critical_mw <= bulk_mw", path=path, line=lineno)
            grid.append(bool(up))
            bulk.append(b)
            crit.append(c)
    if len(grid) != HOURS_PER_YEAR:
        raise ParseError(f"expected {HOURS_PER_YEAR} rows, got {len(grid)}", path=path)
    return HourlyTrace(np.array(grid), np.array(bulk), np.array(crit))


def write_trace_csv(trace: HourlyTrace, path):
    from .keyvalue import format_number

    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for h in range(len(trace.grid_up)):
            w.writerow([h, int(bool(trace.grid_up[h])),
                        format_number(trace.bulk_mw[h]), format_number(trace.critical_mw[h])])


def annual_chp_energy(chp: ChpUnit) -> float:
    """GWh per year at the unit's capacity factor."""
    return chp.capacity_mw * HOURS_PER_YEAR * chp.capacity_factor / 1000.0


def dc_demand_share(chp: ChpUnit, dc: DataCenterLoad) -> float:
    demand = dc.annual_energy_gwh()
    if demand <= 0:
        raise DomainError("data-center annual energy must be > 0")
    return annual_chp_energy(chp) / demand


def _load_arrays(scenario):
    trace = getattr(scenario, "hourly_trace", None)
    if trace is not None:
        return np.asarray(trace.bulk_mw, float), np.asarray(trace.critical_mw, float)
    bulk = np.full(HOURS_PER_YEAR, scenario.dc.average_mw)
    crit = np.full(HOURS_PER_YEAR, scenario.dc.critical_mw)
    return bulk, crit


def outage_events(grid_up) -> List[tuple]:
    """Maximal runs of grid-down hours as ``(start, stop)`` half-open ranges."""
    down = ~np.asarray(grid_up, dtype=bool)
    if not down.any():
        return []
    edges = np.diff(np.concatenate(([0], down.astype(np.int8), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1)
    return list(zip(starts.tolist(), stops.tolist()))


@dataclass
class DispatchTrace:
    demand_mw: np.ndarray
    critical_mw: np.ndarray
    grid_mw: np.ndarray
    chp_mw: np.ndarray
    diesel_mw: np.ndarray
    unserved_mw: np.ndarray
    unserved_critical_mw: np.ndarray
    chp_island_critical_mw: np.ndarray
    ride_through_hours: List[int] = field(default_factory=list)
    transfer_failures: int = 0

    @property
    def served_mw(self):
        return self.grid_mw + self.chp_mw + self.diesel_mw

    @property
    def critical_loss_hours(self):
        return int(np.count_nonzero(self.unserved_critical_mw > _EPS))


def simulate_dispatch(scenario, outage_trace, chp_trace, transfer_ok: Optional[Sequence[bool]] = None) -> DispatchTrace:
    """Dispatch one year hour by hour.

    ``outage_trace`` holds grid availability (True = grid up) and
    ``chp_trace`` the CHP's available fraction of nameplate per hour.
    ``transfer_ok[i]`` is the outcome of the island transfer at the i-th
    outage event; None means every transfer succeeds.
    """
    grid_up = np.asarray(outage_trace, dtype=bool)
    avail = np.asarray(chp_trace, dtype=float)
    bulk, crit = _load_arrays(scenario)
    n = len(grid_up)
    if len(avail) != n or len(bulk) != n:
        raise DomainError(
            f"trace length mismatch: grid {n}, chp {len(avail)}, load {len(bulk)}"
        )
    chp, diesel = scenario.chp, scenario.diesel
    chp_avail_mw = chp.capacity_mw * avail

    # grid-connected hours: CHP runs behind the meter, grid covers the rest
    chp_mw = np.where(grid_up, np.minimum(chp_avail_mw, bulk), 0.0)
    grid_mw = np.where(grid_up, bulk - chp_mw, 0.0)
    diesel_mw = np.zeros(n)
    unserved = np.zeros(n)
    unserved_crit = np.zeros(n)
    island_crit = np.zeros(n)

    events = outage_events(grid_up)
    if transfer_ok is not None and len(transfer_ok) < len(events):
        raise DomainError(f"{len(events)} outage events but only {len(transfer_ok)} transfer draws")
    ride_through = []
    failures = 0
    for i, (start, stop) in enumerate(events):
        islanded = False
        if chp.islandable and (chp_avail_mw[start] > 0 or chp.black_start):
            ok = True if transfer_ok is None else bool(transfer_ok[i])
            islanded = ok
            failures += not ok
        diesel_on = diesel.black_start or islanded
        fuel = diesel.tank_mwh
        first_loss = None
        for h in range(start, stop):
            c = crit[h]
            chp_out = chp_avail_mw[h] if islanded else 0.0
            to_crit = min(chp_out, c)
            short = c - to_crit
            d = min(diesel.capacity_mw, short, fuel) if diesel_on else 0.0
            fuel -= d
            lost_crit = short - d
            surplus = min(chp_out - to_crit, bulk[h] - c)
            chp_mw[h] = to_crit + surplus
            diesel_mw[h] = d
            island_crit[h] = to_crit
            unserved_crit[h] = lost_crit
            unserved[h] = bulk[h] - (to_crit + surplus + d)
            if first_loss is None and lost_crit > _EPS:
                first_loss = h
        ride_through.append((first_loss if first_loss is not None else stop) - start)

    return DispatchTrace(
        demand_mw=bulk, critical_mw=crit, grid_mw=grid_mw, chp_mw=chp_mw,
        diesel_mw=diesel_mw, unserved_mw=unserved, unserved_critical_mw=unserved_crit,
        chp_island_critical_mw=island_crit, ride_through_hours=ride_through,
        transfer_failures=failures,
    )


@dataclass(frozen=True)
class TrialDraws:
    grid_up: np.ndarray
    chp_availability: np.ndarray
    transfer_uniforms: np.ndarray


def trial_rng(master_seed, trial_index):
    """Generator for one trial: ``SeedSequence(master_seed, spawn_key=(trial_index,))``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.PCG64(ss))


def _draw_grid(rng, outages: OutageProcess):
    up = np.ones(HOURS_PER_YEAR, dtype=bool)
    n = int(rng.poisson(outages.mean_outages_per_year))
    starts = np.floor(rng.uniform(0.0, HOURS_PER_YEAR, size=n)).astype(np.int64)
    if outages.duration_distribution == "fixed":
        durations = np.full(n, max(1, math.ceil(outages.mean_duration_hours)), dtype=np.int64)
    else:
        durations = np.maximum(1, np.ceil(rng.exponential(outages.mean_duration_hours, size=n))).astype(np.int64)
    for s, d in zip(starts, durations):
        up[s:min(s + d, HOURS_PER_YEAR)] = False
    return up, n


def _draw_chp(rng, chp: ChpUnit):
    if chp.availability_mode == "deterministic":
        return np.full(HOURS_PER_YEAR, chp.capacity_factor)
    cf = chp.capacity_factor
    if cf >= 1.0:
        return np.ones(HOURS_PER_YEAR)
    if cf <= 0.0:
        return np.zeros(HOURS_PER_YEAR)
    mttr = chp.mean_repair_hours
    mttf = mttr * cf / (1.0 - cf)
    avail = np.empty(HOURS_PER_YEAR)
    t = 0
    state = rng.random() < cf
    while t < HOURS_PER_YEAR:
        d = max(1, int(math.ceil(rng.exponential(mttf if state else mttr))))
        avail[t:t + d] = 1.0 if state else 0.0
        t += d
        state = not state
    return avail


def draw_trial(scenario, master_seed, trial_index) -> TrialDraws:
    """All random inputs of one trial, drawn in a fixed order.

    The draws depend only on the outage process, the CHP availability model
    and the hourly trace, so configurations that differ elsewhere (islanding,
    transfer probability, diesel) see common random numbers.
    """
    rng = trial_rng(master_seed, trial_index)
    trace = getattr(scenario, "hourly_trace", None)
    if trace is not None:
        grid_up = np.asarray(trace.grid_up, dtype=bool)
        n_draws = len(outage_events(grid_up))
    else:
        grid_up, n_draws = _draw_grid(rng, scenario.outages)
    transfer_u = rng.random(n_draws)
    chp_avail = _draw_chp(rng, scenario.chp)
    return TrialDraws(grid_up, chp_avail, transfer_u)


@dataclass(frozen=True)
class TrialResult:
    chp_mwh: float
    dc_mwh: float
    unserved_mwh: float
    critical_loss_hours: int
    island_critical_mwh: float
    diesel_mwh: float
    ride_through_hours: tuple
    transfer_failures: int
    outage_events: int


def run_trial(scenario, master_seed, trial_index) -> TrialResult:
    draws = draw_trial(scenario, master_seed, trial_index)
    transfer_ok = draws.transfer_uniforms < scenario.chp.island_transfer_success_prob
    tr = simulate_dispatch(scenario, draws.grid_up, draws.chp_availability, transfer_ok)
    return summarize(tr)


def summarize(tr: DispatchTrace) -> TrialResult:
    return TrialResult(
        chp_mwh=math.fsum(tr.chp_mw),
        dc_mwh=math.fsum(tr.demand_mw),
        unserved_mwh=math.fsum(tr.unserved_mw),
        critical_loss_hours=tr.critical_loss_hours,
        island_critical_mwh=math.fsum(tr.chp_island_critical_mw),
        diesel_mwh=math.fsum(tr.diesel_mw),
        ride_through_hours=tuple(tr.ride_through_hours),
        transfer_failures=tr.transfer_failures,
        outage_events=len(tr.ride_through_hours),
    )


def run_trials(scenario, trials, master_seed, workers=1) -> List[TrialResult]:
    """Per-trial results in trial-index order, whatever the worker count."""
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials!r}")
    idx = range(int(trials))
    if workers is None or workers <= 1:
        return [run_trial(scenario, master_seed, i) for i in idx]
    with ThreadPoolExecutor(max_workers=int(workers)) as pool:
        return list(pool.map(lambda i: run_trial(scenario, master_seed, i), idx))


@dataclass(frozen=True)
class ResilienceMetrics:
    trials: int
    master_seed: int
    chp_energy_gwh: float
    dc_energy_gwh: float
    chp_share: float
    unserved_bulk_gwh: float
    critical_lolh: float
    ride_through_mean_h: float
    ride_through_p95_h: float
    ride_through_max_h: float
    diesel_energy_displaced_gwh: float
    diesel_energy_gwh: float
    island_transfer_failures: int
    outage_events: int

    def to_dict(self):
        return asdict(self)


def aggregate(results: Sequence[TrialResult], master_seed=0) -> ResilienceMetrics:
    """Expected annual metrics over trials.

    Sums use ``math.fsum`` (exactly rounded), so the result does not depend
    on the order in which trials finished.
    """
    n = len(results)
    if n == 0:
        raise DomainError("no trials to aggregate")

    def mean(attr):
        return math.fsum(getattr(r, attr) for r in results) / n

    chp = mean("chp_mwh") / 1000.0
    dc = mean("dc_mwh") / 1000.0
    rides = np.array([h for r in results for h in r.ride_through_hours], dtype=float)
    if rides.size:
        ride_mean = math.fsum(rides) / rides.size
        ride_p95 = float(np.percentile(rides, 95))
        ride_max = float(rides.max())
    else:
        ride_mean = ride_p95 = ride_max = 0.0
    return ResilienceMetrics(
        trials=n,
        master_seed=int(master_seed),
        chp_energy_gwh=chp,
        dc_energy_gwh=dc,
        chp_share=chp / dc if dc > 0 else 0.0,
        unserved_bulk_gwh=mean("unserved_mwh") / 1000.0,
        critical_lolh=mean("critical_loss_hours"),
        ride_through_mean_h=ride_mean,
        ride_through_p95_h=ride_p95,
        ride_through_max_h=ride_max,
        diesel_energy_displaced_gwh=mean("island_critical_mwh") / 1000.0,
        diesel_energy_gwh=mean("diesel_mwh") / 1000.0,
        island_transfer_failures=sum(r.transfer_failures for r in results),
        outage_events=sum(r.outage_events for r in results),
    )


def monte_carlo(scenario, trials, master_seed, workers=1) -> ResilienceMetrics:
    return aggregate(run_trials(scenario, trials, master_seed, workers), master_seed)


def diesel_only(scenario):
    """Same scenario with the CHP unable to island."""
    from dataclasses import replace

    return replace(scenario, chp=replace(scenario.chp, islandable=False))


@dataclass(frozen=True)
class RideThroughComparison:
    with_chp: ResilienceMetrics
    diesel_only: ResilienceMetrics
    with_chp_trials: tuple
    diesel_only_trials: tuple

    def critical_lolh_pairs(self):
        return [(a.critical_loss_hours, b.critical_loss_hours)
                for a, b in zip(self.with_chp_trials, self.diesel_only_trials)]


def ride_through_comparison(scenario, trials=1000, master_seed=42, workers=1) -> RideThroughComparison:
    """Run the scenario with and without CHP islanding on common random numbers."""
    a = run_trials(scenario, trials, master_seed, workers)
    b = run_trials(diesel_only(scenario), trials, master_seed, workers)
    return RideThroughComparison(aggregate(a, master_seed), aggregate(b, master_seed), tuple(a), tuple(b))
