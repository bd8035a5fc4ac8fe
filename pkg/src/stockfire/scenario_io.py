"""Scenario files, typed scenario assembly, reports and the site comparison table.

Scenario files use the same ``key = value`` syntax as regime files, with
dotted section prefixes.  Every key is optional; :data:`SCHEMA` lists the
defaults, which reproduce the shipped reference corridor.
``scripts/print_schema.py`` prints the schema as a Markdown table.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import corridor_sim as cs
from . import gas_model as gm
from . import keyvalue as kv
from . import pathway_model as pm
from .errors import DomainError, ParseError
from .regime_engine import AccountingRegime, IncentiveProfile, PathwayCosts, private_cost

DATA_DIR = Path(__file__).resolve().parent / "data"
REFERENCE_SCENARIO = DATA_DIR / "reference_corridor.scenario"

# Site basis back-solved so the reference landfill hits 200,000 tCO2e/yr; see
# scripts/backsolve_site_basis.py.
REFERENCE_SITE_BASIS = 114150.0


@dataclass(frozen=True)
class Key:
    name: str
    kind: str  # float | int | bool | str | choice
    default: object
    lo: Optional[float] = None
    hi: Optional[float] = None
    lo_open: bool = False
    unit: str = ""
    doc: str = ""
    choices: Tuple[str, ...] = ()


def _k(name, kind, default, lo=None, hi=None, unit="", doc="", lo_open=False, choices=()):
    return Key(name, kind, default, lo, hi, lo_open, unit, doc, choices)


SCHEMA: Tuple[Key, ...] = (
    _k("gwp", "choice", "100", unit="years", doc="CH4 GWP horizon for balances and the site table", choices=("100", "20")),
    _k("waste.doc", "float", 0.15, 0, 1, "t C/t", "degradable organic carbon"),
    _k("waste.f_doc", "float", None, 0, 1, "-", "decomposing share of DOC; default 1-exp(-k T)"),
    _k("waste.mcf", "float", 1.0, 0, 1, "-", "methane correction factor"),
    _k("waste.f_ch4", "float", 0.5, 0, 1, "-", "CH4 fraction of landfill gas"),
    _k("waste.fossil_carbon", "float", 0.14, 0, 1, "t C/t", "fossil carbon content"),
    _k("waste.stoich_factor", "float", gm.STOICH_IPCC, 1.0, gm.STOICH_IPCC, "t CH4/t C", "16/12, or 1 for the bare product"),
    _k("capture_r", "float", 0.3, 0, 1, "-", "baseline gas capture efficiency"),
    _k("capture_ox", "float", 0.1, 0, 1, "-", "baseline cover oxidation"),
    _k("capture_utilization_fraction", "float", 0.7, 0, 1, "-", "captured gas sent to engines"),
    _k("capture_lfg_elec_yield", "float", 5.0, 0, None, "MWh/t CH4", "engine electrical yield"),
    _k("decay.k", "float", 0.05, 0, None, "1/yr", "first-order decay constant", lo_open=True),
    _k("decay.horizon_years", "int", 100, 1, None, "yr", "decay horizon"),
    _k("remediation.excavated_fraction", "float", 0.5, 0, 1, "-", "share of site mass excavated"),
    _k("remediation.doc_removal_fraction", "float", 0.62, 0, 1, "-", "DOC screened out of excavated mass"),
    _k("remediation.residual_r", "float", 0.6, 0, 1, "-", "capture efficiency after the campaign"),
    _k("remediation.residual_ox", "float", 0.2, 0, 1, "-", "oxidation after the campaign (biocovers)"),
    _k("remediation.residual_utilization_fraction", "float", 0.7, 0, 1, "-", ""),
    _k("remediation.residual_lfg_elec_yield", "float", 5.0, 0, None, "MWh/t CH4", ""),
    _k("remediation.rdf_yield", "float", 0.15, 0, None, "t RDF/t excavated", ""),
    _k("remediation.rdf_fossil_carbon", "float", 0.25, 0, 1, "t C/t RDF", ""),
    _k("remediation.excavation_overhead_tco2e", "float", 0.01, 0, None, "tCO2e/t excavated", "equipment and transport"),
    _k("remediation.discount_rate", "float", 0.03, 0, 0.2, "1/yr", "discounting of future methane"),
    _k("wte.net_elec_yield", "float", 0.45, 0, None, "MWh/t", ""),
    _k("wte.heat_credit_mwh", "float", 0.1, 0, None, "MWh_th/t", ""),
    _k("wte.heat_credit_factor", "float", pm.DEFAULT_HEAT_FACTOR, 0, None, "-", "displaced-boiler factor"),
    _k("wte.n2o_tco2e", "float", 0.02, 0, None, "tCO2e/t", ""),
    _k("wte.aux_fuel_tco2e", "float", 0.03, 0, None, "tCO2e/t", "auxiliary and upstream fuel"),
    _k("grid.marginal_emission_factor", "float", 0.4, 0, None, "tCO2e/MWh", ""),
    _k("chp.capacity_mw", "float", 20.0, 0, None, "MW", "", lo_open=True),
    _k("chp.capacity_factor", "float", 0.856, 0, 1, "-", ""),
    _k("chp.islandable", "bool", True),
    _k("chp.black_start", "bool", True),
    _k("chp.island_transfer_success_prob", "float", 0.98, 0, 1, "-", "per outage event"),
    _k("chp.availability_mode", "choice", "deterministic", choices=("deterministic", "stochastic")),
    _k("chp.mean_repair_hours", "float", 48.0, 0, None, "h", "stochastic mode only", lo_open=True),
    _k("dc.bulk_mw", "float", 300.0, 0, None, "MW", "nameplate"),
    _k("dc.utilization", "float", 0.97, 0, 1, "-", ""),
    _k("dc.critical_mw", "float", 15.0, 0, None, "MW", "cooling and orchestration"),
    _k("dc.trace_csv", "str", None, doc="hourly load/outage CSV, relative to the scenario file"),
    _k("diesel.capacity_mw", "float", 15.0, 0, None, "MW", ""),
    _k("diesel.fuel_hours_at_capacity", "float", 24.0, 0, None, "h", "tank endurance"),
    _k("diesel.black_start", "bool", True),
    _k("outages.mean_outages_per_year", "float", 2.0, 0, None, "1/yr", "Poisson rate"),
    _k("outages.mean_duration_hours", "float", 12.0, 0, None, "h", "", lo_open=True),
    _k("outages.duration_distribution", "choice", "exponential", choices=("fixed", "exponential")),
    _k("site.annual_mass_basis", "float", REFERENCE_SITE_BASIS, 0, None, "t/yr", "gas-generating mass scaling", lo_open=True),
    _k("site.mass_t", "float", 30e6, 0, None, "t", "waste in place", lo_open=True),
    _k("site.land_recovered_ha", "float", 25.0, 0, None, "ha", ""),
    _k("site.campaign_months", "float", 24.0, 0, None, "months", "", lo_open=True),
    _k("site.baseline_lfg_mw", "float", 4.0, 0, None, "MW", "existing gas-engine unit on the capped site"),
    _k("site.baseline_lfg_capacity_factor", "float", 0.8, 0, 1, "-", ""),
    _k("costs.landfill_capex_opex", "float", 20.0, 0, None, "$/t", ""),
    _k("costs.wte_capex_opex", "float", 70.0, 0, None, "$/t", ""),
    _k("costs.remediation_capex_opex", "float", 45.0, 0, None, "$/t site", ""),
    _k("costs.baseline_compliance", "float", 3.0, 0, None, "$/t site", "monitor-and-maintain cost"),
    _k("allocation.cap_landfill", "float", 1.0, 0, 1, "-", ""),
    _k("allocation.cap_wte", "float", 1.0, 0, 1, "-", ""),
    _k("allocation.cap_remediation", "float", 1.0, 0, 1, "-", ""),
    _k("allocation.composting_cost", "float", None, None, None, "$/t", "exogenous pathway, off when unset"),
    _k("allocation.cap_composting", "float", 1.0, 0, 1, "-", ""),
)
_SCHEMA_BY_NAME = {k.name: k for k in SCHEMA}


@dataclass(frozen=True)
class ScenarioCosts:
    landfill_capex_opex: float = 20.0
    wte_capex_opex: float = 70.0
    remediation_capex_opex: float = 45.0
    baseline_compliance: float = 3.0

    def for_pathway(self, pathway_id, scenario) -> PathwayCosts:
        pid = pm.PathwayId(pathway_id)
        if pid is pm.PathwayId.LANDFILL_CAPTURE:
            return PathwayCosts(pid, self.landfill_capex_opex)
        if pid is pm.PathwayId.WTE_CURRENT:
            return PathwayCosts(pid, self.wte_capex_opex)
        land = scenario.land_recovered_ha / scenario.site_mass_t if scenario.remediation.excavated_fraction > 0 else 0.0
        return PathwayCosts(pid, self.remediation_capex_opex, land)


@dataclass(frozen=True)
class AllocationSettings:
    caps: Dict[str, float] = field(default_factory=lambda: {p.value: 1.0 for p in pm.PathwayId})
    composting_cost: Optional[float] = None
    cap_composting: float = 1.0

    def exogenous(self):
        return {} if self.composting_cost is None else {"COMPOSTING": self.composting_cost}

    def all_caps(self):
        caps = dict(self.caps)
        if self.composting_cost is not None:
            caps["COMPOSTING"] = self.cap_composting
        return caps


@dataclass(frozen=True)
class CorridorScenario:
    waste: gm.WasteStream
    baseline_policy: gm.CapturePolicy
    decay: gm.DecayParams
    remediation: pm.RemediationParams
    wte_plant: pm.WtePlantParams
    grid: pm.GridModel
    chp: cs.ChpUnit
    dc: cs.DataCenterLoad
    diesel: cs.DieselUnit
    outages: cs.OutageProcess
    site_annual_mass_basis: float
    land_recovered_ha: float
    campaign_months: float
    gwp: gm.GwpHorizon = gm.GWP100
    site_mass_t: float = 30e6
    baseline_lfg_mw: float = 4.0
    baseline_lfg_capacity_factor: float = 0.8
    costs: ScenarioCosts = ScenarioCosts()
    allocation: AllocationSettings = AllocationSettings()
    hourly_trace: Optional[cs.HourlyTrace] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.site_annual_mass_basis > 0:
            raise DomainError("site_annual_mass_basis must be > 0")


def _convert(key: Key, entry, path):
    if key.kind == "float":
        x = kv.as_float(entry, path)
    elif key.kind == "int":
        x = kv.as_int(entry, path)
    elif key.kind == "bool":
        return kv.as_bool(entry, path)
    elif key.kind == "choice":
        if entry.value not in key.choices:
            raise ParseError(f"expected one of {'|'.join(key.choices)}, got {entry.value!r}",
                             path=path, line=entry.line, key=key.name)
        return entry.value
    else:
        return entry.value
    too_low = key.lo is not None and (x <= key.lo if key.lo_open else x < key.lo)
    too_high = key.hi is not None and x > key.hi + 1e-12
    if too_low or too_high:
        lo = "(" if key.lo_open else "["
        raise ParseError(
            f"value {x!r} outside {lo}{key.lo if key.lo is not None else '-inf'}, "
            f"{key.hi if key.hi is not None else 'inf'}]",
            path=path, line=entry.line, key=key.name,
        )
    return x


def parse_scenario(text: str, path=None) -> CorridorScenario:
    entries = kv.parse_entries(text, path)
    values = {}
    for name, entry in entries.items():
        key = _SCHEMA_BY_NAME.get(name)
        if key is None:
            raise ParseError("unknown key", path=path, line=entry.line, key=name)
        values[name] = _convert(key, entry, path)

    def get(name):
        return values.get(name, _SCHEMA_BY_NAME[name].default)

    def line_of(name):
        e = entries.get(name)
        return e.line if e else None

    def build(keys, factory):
        try:
            return factory()
        except DomainError as exc:
            named = [k for k in keys if k in entries] or list(keys)
            last = max(named, key=lambda k: line_of(k) or 0)
            raise ParseError(str(exc), path=path, line=line_of(last), key=last) from None

    decay = build(("decay.k", "decay.horizon_years"),
                  lambda: gm.DecayParams(get("decay.k"), get("decay.horizon_years")))
    f_doc = get("waste.f_doc")
    if f_doc is None:
        f_doc = decay.decomposed_fraction()
    waste = build(("waste.doc", "waste.fossil_carbon"), lambda: gm.WasteStream(
        doc=get("waste.doc"), f_doc=f_doc, mcf=get("waste.mcf"), f_ch4=get("waste.f_ch4"),
        fossil_carbon=get("waste.fossil_carbon"), stoich_factor=get("waste.stoich_factor"),
    ))
    baseline_policy = gm.CapturePolicy(get("capture_r"), get("capture_ox"),
                                       get("capture_utilization_fraction"), get("capture_lfg_elec_yield"))
    residual = gm.CapturePolicy(get("remediation.residual_r"), get("remediation.residual_ox"),
                                get("remediation.residual_utilization_fraction"),
                                get("remediation.residual_lfg_elec_yield"))
    rem = pm.RemediationParams(
        excavated_fraction=get("remediation.excavated_fraction"),
        doc_removal_fraction=get("remediation.doc_removal_fraction"),
        residual_policy=residual,
        rdf_yield=get("remediation.rdf_yield"),
        rdf_fossil_carbon=get("remediation.rdf_fossil_carbon"),
        excavation_overhead_tco2e=get("remediation.excavation_overhead_tco2e"),
        discount_rate=get("remediation.discount_rate"),
    )
    plant = pm.WtePlantParams(get("wte.net_elec_yield"), get("wte.heat_credit_mwh"), get("wte.n2o_tco2e"),
                              get("wte.aux_fuel_tco2e"), get("wte.heat_credit_factor"))
    chp = cs.ChpUnit(get("chp.capacity_mw"), get("chp.capacity_factor"), get("chp.islandable"),
                     get("chp.black_start"), get("chp.island_transfer_success_prob"),
                     get("chp.availability_mode"), get("chp.mean_repair_hours"))
    dc = build(("dc.bulk_mw", "dc.utilization", "dc.critical_mw"),
               lambda: cs.DataCenterLoad(get("dc.bulk_mw"), get("dc.utilization"), get("dc.critical_mw")))
    diesel = cs.DieselUnit(get("diesel.capacity_mw"), get("diesel.fuel_hours_at_capacity"), get("diesel.black_start"))
    outages = cs.OutageProcess(get("outages.mean_outages_per_year"), get("outages.mean_duration_hours"),
                               get("outages.duration_distribution"))
    trace = None
    if get("dc.trace_csv") is not None:
        trace_path = Path(get("dc.trace_csv"))
        if path is not None and not trace_path.is_absolute():
            trace_path = Path(path).parent / trace_path
        trace = cs.read_trace_csv(trace_path)
    allocation = AllocationSettings(
        caps={pm.PathwayId.LANDFILL_CAPTURE.value: get("allocation.cap_landfill"),
              pm.PathwayId.WTE_CURRENT.value: get("allocation.cap_wte"),
              pm.PathwayId.REMEDIATION_WTE.value: get("allocation.cap_remediation")},
        composting_cost=get("allocation.composting_cost"),
        cap_composting=get("allocation.cap_composting"),
    )
    return CorridorScenario(
        waste=waste, baseline_policy=baseline_policy, decay=decay, remediation=rem,
        wte_plant=plant, grid=pm.GridModel(get("grid.marginal_emission_factor")),
        chp=chp, dc=dc, diesel=diesel, outages=outages,
        site_annual_mass_basis=get("site.annual_mass_basis"),
        land_recovered_ha=get("site.land_recovered_ha"),
        campaign_months=get("site.campaign_months"),
        gwp=gm.GwpHorizon.from_years(int(get("gwp"))),
        site_mass_t=get("site.mass_t"),
        baseline_lfg_mw=get("site.baseline_lfg_mw"),
        baseline_lfg_capacity_factor=get("site.baseline_lfg_capacity_factor"),
        costs=ScenarioCosts(get("costs.landfill_capex_opex"), get("costs.wte_capex_opex"),
                            get("costs.remediation_capex_opex"), get("costs.baseline_compliance")),
        allocation=allocation,
        hourly_trace=trace,
    )


def load_scenario(path) -> CorridorScenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ParseError("scenario file not found", path=path) from None
    return parse_scenario(text, path)


def reference_scenario() -> CorridorScenario:
    return load_scenario(REFERENCE_SCENARIO)


# --- evaluation -----------------------------------------------------------

def pathway_balances(scenario, gwp=None) -> List[pm.PathwayBalance]:
    """The three pathway balances of a scenario, in fixed pathway order."""
    gwp = gwp or scenario.gwp
    landfill = pm.landfill_pathway(scenario.waste, scenario.baseline_policy, scenario.grid, gwp)
    wte = pm.wte_pathway(scenario.waste, scenario.wte_plant, scenario.grid)
    rem = pm.remediation_pathway(scenario.waste, scenario.baseline_policy, scenario.remediation,
                                 scenario.wte_plant, scenario.grid, scenario.decay, gwp)
    return [landfill, wte, rem]


def incentive_profiles(scenario, regime: AccountingRegime) -> List[IncentiveProfile]:
    """Private costs of the three pathways, with balances under the regime's GWP."""
    return [private_cost(b, scenario.costs.for_pathway(b.pathway_id, scenario), regime)
            for b in pathway_balances(scenario, regime.gwp)]


@dataclass(frozen=True)
class Table3Report:
    """Site-level comparison of the capped baseline and the remediation project.

    ``reduction_pct`` and ``dc_share_pct`` are fractions (0.65 means 65 %).
    """

    baseline_ch4_tco2e_yr: float
    project_ch4_tco2e_yr: float
    reduction_pct: float
    land_ha: float
    firm_capacity_mw: float
    annual_generation_gwh: float
    dc_share_pct: float


TABLE3_FIELDS = tuple(f.name for f in fields(Table3Report))


def reproduce_table3(scenario) -> Table3Report:
    landfill = pm.landfill_pathway(scenario.waste, scenario.baseline_policy, scenario.grid, scenario.gwp)
    baseline = landfill.direct_tco2e * scenario.site_annual_mass_basis
    site = pm.remediation_site_methane(scenario.waste, scenario.baseline_policy,
                                       scenario.remediation, scenario.decay)
    reduction = site.reduction
    project = baseline * (1.0 - reduction)
    active = scenario.remediation.excavated_fraction > 0
    return Table3Report(
        baseline_ch4_tco2e_yr=baseline,
        project_ch4_tco2e_yr=project,
        reduction_pct=1.0 - project / baseline if baseline > 0 else 0.0,
        land_ha=scenario.land_recovered_ha if active else 0.0,
        firm_capacity_mw=scenario.chp.capacity_mw,
        annual_generation_gwh=cs.annual_chp_energy(scenario.chp),
        dc_share_pct=cs.dc_demand_share(scenario.chp, scenario.dc),
    )


def baseline_lfg_generation_gwh(scenario) -> float:
    """Annual output of the capped site's existing gas-engine unit."""
    return scenario.baseline_lfg_mw * cs.HOURS_PER_YEAR * scenario.baseline_lfg_capacity_factor / 1000.0


# --- reports --------------------------------------------------------------

PATHWAY_COLUMNS = ("pathway_id", "direct", "energy_credit", "methane_credit", "net")
INCENTIVE_COLUMNS = ("regime", "pathway_id", "private_cost", "carbon_cost", "energy_revenue",
                     "tipping_revenue", "land_revenue", "capex_opex")


@dataclass
class ReportBundle:
    table3: Optional[Table3Report] = None
    pathways: Sequence[pm.PathwayBalance] = ()
    incentives: Sequence[Tuple[str, IncentiveProfile]] = ()
    resilience: Optional[cs.ResilienceMetrics] = None


def _rounded(x):
    if isinstance(x, bool) or isinstance(x, int):
        return x
    return float(kv.format_number(x))


def _dump_json(data, path):
    text = json.dumps({k: _rounded(v) for k, v in data.items()}, indent=2)
    path.write_text(text + "\n", encoding="utf-8")


def _write_csv(path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([v if isinstance(v, str) else kv.format_number(v) for v in row])


def _pid(p):
    return p.value if isinstance(p, pm.PathwayId) else str(p)


def write_report(results: ReportBundle, out_dir) -> List[Path]:
    """Write whichever parts of ``results`` are present; returns the paths written."""
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if results.table3 is not None:
            t3 = asdict(results.table3)
            p = out / "table3.json"
            _dump_json(t3, p)
            written.append(p)
            p = out / "table3.csv"
            _write_csv(p, TABLE3_FIELDS, [[t3[k] for k in TABLE3_FIELDS]])
            written.append(p)
        p = out / "pathways.csv"
        _write_csv(p, PATHWAY_COLUMNS, [
            [b.pathway_id.value, b.direct_tco2e, b.energy_credit_tco2e, b.methane_credit_tco2e, b.net_tco2e]
            for b in results.pathways
        ])
        written.append(p)
        p = out / "incentives.csv"
        _write_csv(p, INCENTIVE_COLUMNS, [
            [name, _pid(ip.pathway_id), ip.private_cost, ip.carbon_cost, ip.energy_revenue,
             ip.tipping_revenue, ip.land_revenue, ip.capex_opex]
            for name, ip in results.incentives
        ])
        written.append(p)
        if results.resilience is not None:
            p = out / "resilience.json"
            _dump_json(results.resilience.to_dict(), p)
            written.append(p)
    except OSError as exc:
        raise OSError(f"cannot write report to {out}: {exc}") from exc
    return written


def read_table3_csv(path) -> Table3Report:
    with Path(path).open(newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    if len(rows) != 1:
        raise ParseError(f"expected one data row, got {len(rows)}", path=path)
    return Table3Report(**{k: float(rows[0][k]) for k in TABLE3_FIELDS})


def read_table3_json(path) -> Table3Report:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return Table3Report(**{k: float(data[k]) for k in TABLE3_FIELDS})


def read_pathways_csv(path) -> List[dict]:
    with Path(path).open(newline="", encoding="utf-8") as f:
        return [{k: (v if k == "pathway_id" else float(v)) for k, v in row.items()}
                for row in csv.DictReader(f)]


def read_resilience_json(path) -> cs.ResilienceMetrics:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return cs.ResilienceMetrics(**data)


def schema_table() -> str:
    lines = ["key | type | default | unit | notes", "--- | --- | --- | --- | ---"]
    for k in SCHEMA:
        default = "(derived)" if k.default is None and k.name == "waste.f_doc" else (
            "(unset)" if k.default is None else kv.format_number(k.default) if k.kind != "choice" else k.default)
        kind = k.kind if k.kind != "choice" else " or ".join(k.choices)
        lines.append(f"`{k.name}` | {kind} | {default} | {k.unit} | {k.doc}")
    return "\n".join(lines)
