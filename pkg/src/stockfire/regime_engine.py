"""Accounting regimes: what each policy filter monetizes, ignores or penalizes.

A regime turns a physical :class:`PathwayBalance` into a private cost per
tonne.  Components whose visibility flag is off contribute nothing, which
is how the same physics can produce different pathway rankings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

from . import keyvalue as kv
from .errors import DomainError, ParseError
from .gas_model import GWP100, GwpHorizon
from .pathway_model import PathwayBalance, PathwayId

DEFAULT_LAMBDA_RANGE = (0.0, 500.0)

_FLAGS = (
    "count_residual_methane",
    "count_biogenic_co2",
    "count_energy_credit",
    "count_methane_credit",
    "count_land_credit",
)
_PRICES = ("methane_price", "energy_credit_price", "tipping_fee", "land_value")
REGIME_KEYS = ("name",) + _PRICES + ("gwp",) + _FLAGS


@dataclass(frozen=True)
class AccountingRegime:
    name: str
    methane_price: float = 0.0  # $ per tCO2e, the methane shadow price
    energy_credit_price: float = 0.0  # $ per MWh exported
    tipping_fee: float = 0.0  # $ per t accepted
    land_value: float = 0.0  # $ per ha recovered
    gwp: GwpHorizon = GWP100
    count_residual_methane: bool = True
    count_biogenic_co2: bool = False
    count_energy_credit: bool = True
    count_methane_credit: bool = False
    count_land_credit: bool = False

    def __post_init__(self):
        if not self.name:
            raise DomainError("regime name must be non-empty")
        for key in _PRICES:
            if getattr(self, key) < 0:
                raise DomainError(f"{key} must be >= 0")

    def at_price(self, methane_price):
        return replace(self, methane_price=methane_price)


def parse_regime(text: str, path=None) -> AccountingRegime:
    entries = kv.parse_entries(text, path)
    for key, entry in entries.items():
        if key not in REGIME_KEYS:
            raise ParseError("unknown key", path=path, line=entry.line, key=key)
    if "name" not in entries:
        raise ParseError("missing required key 'name'", path=path, key="name")
    values = {"name": entries["name"].value}
    for key in _PRICES:
        if key in entries:
            x = kv.as_float(entries[key], path)
            if x < 0:
                raise ParseError(f"must be >= 0, got {x!r}", path=path,
                                 line=entries[key].line, key=key)
            values[key] = x
    if "gwp" in entries:
        entry = entries["gwp"]
        if entry.value not in ("100", "20"):
            raise ParseError(f"expected 100 or 20, got {entry.value!r}",
                             path=path, line=entry.line, key="gwp")
        values["gwp"] = GwpHorizon.from_years(int(entry.value))
    for key in _FLAGS:
        if key in entries:
            values[key] = kv.as_bool(entries[key], path)
    return AccountingRegime(**values)


def load_regime(path) -> AccountingRegime:
    path = Path(path)
    return parse_regime(path.read_text(encoding="utf-8"), path)


def format_regime(regime: AccountingRegime) -> str:
    lines = [f"name = {regime.name}"]
    lines += [f"{k} = {kv.format_number(getattr(regime, k))}" for k in _PRICES]
    lines.append(f"gwp = {regime.gwp.years}")
    lines += [f"{k} = {kv.format_number(getattr(regime, k))}" for k in _FLAGS]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PathwayCosts:
    """Cost-side inputs of one pathway, per tonne managed.

    ``accepts_waste`` decides whether the regime's tipping fee is earned;
    it defaults to true for the two current-waste pathways and false for
    legacy-site remediation.
    """

    pathway_id: PathwayId
    capex_opex_per_tonne: float = 0.0
    land_recovered_ha_per_tonne: float = 0.0
    accepts_waste: Optional[bool] = None

    def __post_init__(self):
        object.__setattr__(self, "pathway_id", PathwayId(self.pathway_id))
        if self.capex_opex_per_tonne < 0:
            raise DomainError("capex_opex_per_tonne must be >= 0")
        if self.land_recovered_ha_per_tonne < 0:
            raise DomainError("land_recovered_ha_per_tonne must be >= 0")
        if self.accepts_waste is None:
            object.__setattr__(self, "accepts_waste",
                               self.pathway_id is not PathwayId.REMEDIATION_WTE)


@dataclass(frozen=True)
class IncentiveProfile:
    pathway_id: Union[PathwayId, str]
    private_cost: float
    carbon_cost: float
    energy_revenue: float
    tipping_revenue: float
    land_revenue: float
    capex_opex: float


def private_cost(balance: PathwayBalance, costs: PathwayCosts, regime: AccountingRegime) -> IncentiveProfile:
    if balance.pathway_id != costs.pathway_id:
        raise DomainError(
            f"pathway mismatch: balance {balance.pathway_id.value} vs costs {costs.pathway_id.value}"
        )
    visible_direct = balance.direct_other_tco2e
    if regime.count_residual_methane:
        visible_direct += balance.direct_ch4_tco2e
    if regime.count_biogenic_co2:
        visible_direct += balance.biogenic_co2_t
    visible_credit = balance.methane_credit_tco2e if regime.count_methane_credit else 0.0
    carbon = regime.methane_price * (visible_direct - visible_credit)
    energy = balance.exported_mwh * regime.energy_credit_price if regime.count_energy_credit else 0.0
    tipping = regime.tipping_fee if costs.accepts_waste else 0.0
    land = regime.land_value * costs.land_recovered_ha_per_tonne if regime.count_land_credit else 0.0
    capex = costs.capex_opex_per_tonne
    return IncentiveProfile(
        pathway_id=balance.pathway_id,
        private_cost=capex + carbon - energy - tipping - land,
        carbon_cost=carbon,
        energy_revenue=energy,
        tipping_revenue=tipping,
        land_revenue=land,
        capex_opex=capex,
    )


def _tie_key(pathway_id):
    """Fixed tie-break: the three built-in pathways in declaration order, then others by name."""
    try:
        return (0, PathwayId(pathway_id).order, "")
    except ValueError:
        return (1, 0, str(pathway_id))


def _pid(pathway_id):
    return pathway_id.value if isinstance(pathway_id, PathwayId) else str(pathway_id)


def rank_pathways(profiles: Sequence[IncentiveProfile]) -> List[Union[PathwayId, str]]:
    """Pathway ids in ascending private cost, ties in the fixed pathway order."""
    if len(profiles) < 2:
        raise DomainError("ranking needs at least two profiles")
    ids = [_pid(p.pathway_id) for p in profiles]
    if len(set(ids)) != len(ids):
        raise DomainError(f"duplicate pathway ids in {ids}")
    ordered = sorted(profiles, key=lambda p: (p.private_cost, _tie_key(p.pathway_id)))
    return [p.pathway_id for p in ordered]


@dataclass(frozen=True)
class TippingComparison:
    """Remediation vs. the monitor-and-maintain baseline on one legacy site."""

    remediation: PathwayBalance
    remediation_costs: PathwayCosts
    baseline: PathwayBalance
    baseline_costs: PathwayCosts

    def cost_gap(self, regime, methane_price=None):
        """private cost of remediation minus that of the baseline ($/t)."""
        if methane_price is not None:
            regime = regime.at_price(methane_price)
        rem = private_cost(self.remediation, self.remediation_costs, regime)
        base = private_cost(self.baseline, self.baseline_costs, regime)
        return rem.private_cost - base.private_cost


def bisect_tipping_point(gap, lambda_range=DEFAULT_LAMBDA_RANGE, tol=0.01) -> Optional[float]:
    """Root of ``gap(lambda)`` on ``lambda_range`` by bisection, or None.

    ``gap`` is affine in lambda for every regime, so a sign change at the
    ends brackets exactly one root (or the gap is identically zero, in which
    case the lower end is returned).
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    lo, hi = map(float, lambda_range)
    if not lo < hi:
        raise DomainError(f"lambda range must satisfy low < high, got {lambda_range!r}")
    g_lo, g_hi = gap(lo), gap(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if (g_lo > 0) == (g_hi > 0):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tipping_point_lambda(scenario, regime_template, lambda_range=DEFAULT_LAMBDA_RANGE, tol=0.01):
    """Methane price at which remediation costs the same as monitor-and-maintain.

    Balances are computed under the template's GWP horizon.  Returns None
    ("none in range") when the regime does not price the methane credit or
    when the cost gap keeps one sign across ``lambda_range``.
    """
    if not tol > 0:
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if not regime_template.count_methane_credit:
        return None
    comp = tipping_comparison(scenario, regime_template.gwp)
    return bisect_tipping_point(lambda lam: comp.cost_gap(regime_template, lam), lambda_range, tol)


def favorable_length(scenario, regime_template, lambda_range=DEFAULT_LAMBDA_RANGE, tol=0.01):
    """Length of the part of ``lambda_range`` where remediation is strictly cheaper."""
    lo, hi = map(float, lambda_range)
    comp = tipping_comparison(scenario, regime_template.gwp)
    g_lo = comp.cost_gap(regime_template, lo)
    g_hi = comp.cost_gap(regime_template, hi)
    if g_lo < 0 and g_hi < 0:
        return hi - lo
    if g_lo >= 0 and g_hi >= 0:
        return 0.0
    root = bisect_tipping_point(lambda lam: comp.cost_gap(regime_template, lam), lambda_range, tol)
    return hi - root if g_hi < 0 else root - lo


def tipping_comparison(scenario, gwp) -> TippingComparison:
    from .pathway_model import landfill_pathway, remediation_pathway

    rem = remediation_pathway(
        scenario.waste, scenario.baseline_policy, scenario.remediation,
        scenario.wte_plant, scenario.grid, scenario.decay, gwp,
    )
    base = landfill_pathway(scenario.waste, scenario.baseline_policy, scenario.grid, gwp)
    c = scenario.costs
    return TippingComparison(
        remediation=rem,
        remediation_costs=c.for_pathway(PathwayId.REMEDIATION_WTE, scenario),
        baseline=base,
        baseline_costs=PathwayCosts(PathwayId.LANDFILL_CAPTURE, c.baseline_compliance, 0.0, accepts_waste=False),
    )


def optimal_allocation(
    profiles: Iterable[IncentiveProfile],
    caps: Mapping,
    exogenous: Optional[Mapping[str, float]] = None,
) -> Dict[Union[PathwayId, str], float]:
    """Cheapest split of one tonne across pathways under share caps.

    Minimises ``sum x_p * cost_p`` subject to ``sum x_p = 1`` and
    ``0 <= x_p <= cap_p``.  Filling the cheapest pathways first up to their
    caps is optimal for this single-constraint LP.  ``exogenous`` adds
    pathways (e.g. composting) with a user-supplied cost per tonne; a pathway
    without an entry in ``caps`` is uncapped.
    """
    costs = {}
    for p in profiles:
        costs[p.pathway_id] = p.private_cost
    for name, cost in (exogenous or {}).items():
        if name in costs or _pid(name) in {_pid(k) for k in costs}:
            raise DomainError(f"duplicate pathway id {name!r}")
        costs[name] = float(cost)
    cap_of = {}
    lookup = {_pid(k): v for k, v in caps.items()}
    for pid in costs:
        cap = float(lookup.get(_pid(pid), 1.0))
        if not 0.0 <= cap <= 1.0:
            raise DomainError(f"cap for {_pid(pid)} must lie in [0, 1], got {cap!r}")
        cap_of[pid] = cap
    unknown = set(lookup) - {_pid(k) for k in costs}
    if unknown:
        raise DomainError(f"caps given for unknown pathways {sorted(unknown)}")
    if math.fsum(cap_of.values()) < 1.0 - 1e-12:
        raise DomainError("infeasible caps: they sum to less than 1")

    remaining = 1.0
    alloc = {pid: 0.0 for pid in costs}
    for pid in sorted(costs, key=lambda k: (costs[k], _tie_key(k))):
        take = min(cap_of[pid], remaining)
        alloc[pid] = take
        remaining -= take
        if remaining <= 1e-15:
            break
    return alloc
