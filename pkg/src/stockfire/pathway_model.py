"""Per-tonne GHG balances for the three waste pathways.

Every balance decomposes as ``net = direct - energy_credit - methane_credit``
(all tCO2e per tonne).  Biogenic CO2 is carried as a memo item and never
enters ``net``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np

from . import gas_model as gm
from .errors import DomainError

C_TO_CO2 = 44.0 / 12.0
DEFAULT_HEAT_FACTOR = 0.8


class PathwayId(str, Enum):
    LANDFILL_CAPTURE = "LANDFILL_CAPTURE"
    WTE_CURRENT = "WTE_CURRENT"
    REMEDIATION_WTE = "REMEDIATION_WTE"

    @property
    def order(self):
        return _PATHWAY_ORDER[self]


_PATHWAY_ORDER = {p: i for i, p in enumerate(PathwayId)}


@dataclass(frozen=True)
class PathwayBalance:
    pathway_id: PathwayId
    direct_tco2e: float
    energy_credit_tco2e: float
    methane_credit_tco2e: float
    net_tco2e: float
    exported_mwh: float
    biogenic_co2_t: float = 0.0
    # direct_tco2e split into escaping methane and everything else; both
    # are kept so a regime can drop one without subtracting it back out
    direct_ch4_tco2e: float = 0.0
    direct_other_tco2e: Optional[float] = None

    def __post_init__(self):
        if self.direct_other_tco2e is None:
            object.__setattr__(self, "direct_other_tco2e", self.direct_tco2e - self.direct_ch4_tco2e)
        if not math.isclose(self.direct_tco2e, self.direct_ch4_tco2e + self.direct_other_tco2e,
                            rel_tol=1e-12, abs_tol=1e-15):
            raise DomainError("direct_tco2e must equal direct_ch4_tco2e + direct_other_tco2e")
        if self.energy_credit_tco2e < 0:
            raise DomainError("energy_credit_tco2e must be >= 0")
        if self.exported_mwh < 0:
            raise DomainError("exported_mwh must be >= 0")
        expected = self.direct_tco2e - self.energy_credit_tco2e - self.methane_credit_tco2e
        if not math.isclose(self.net_tco2e, expected, rel_tol=1e-12, abs_tol=1e-15):
            raise DomainError("net_tco2e must equal direct - energy_credit - methane_credit")

    @classmethod
    def build(cls, pathway_id, direct, energy_credit, methane_credit, exported_mwh,
              biogenic=0.0, direct_ch4=0.0):
        return cls(
            pathway_id=PathwayId(pathway_id),
            direct_tco2e=direct,
            energy_credit_tco2e=energy_credit,
            methane_credit_tco2e=methane_credit,
            net_tco2e=direct - energy_credit - methane_credit,
            exported_mwh=exported_mwh,
            biogenic_co2_t=biogenic,
            direct_ch4_tco2e=direct_ch4,
        )

    @classmethod
    def from_components(cls, pathway_id, direct_other, direct_ch4, energy_credit, methane_credit,
                        exported_mwh, biogenic=0.0):
        direct = direct_other + direct_ch4
        return cls(
            pathway_id=PathwayId(pathway_id),
            direct_tco2e=direct,
            energy_credit_tco2e=energy_credit,
            methane_credit_tco2e=methane_credit,
            net_tco2e=direct - energy_credit - methane_credit,
            exported_mwh=exported_mwh,
            biogenic_co2_t=biogenic,
            direct_ch4_tco2e=direct_ch4,
            direct_other_tco2e=direct_other,
        )

    def with_biogenic(self, biogenic):
        return replace(self, biogenic_co2_t=biogenic)


@dataclass(frozen=True)
class GridModel:
    marginal_emission_factor: float = 0.4  # tCO2e per MWh displaced

    def __post_init__(self):
        if self.marginal_emission_factor < 0:
            raise DomainError("marginal_emission_factor must be >= 0")


@dataclass(frozen=True)
class WtePlantParams:
    net_elec_yield: float = 0.45  # MWh_e per t
    heat_credit_mwh: float = 0.0  # MWh_th per t
    n2o_tco2e: float = 0.0
    aux_fuel_tco2e: float = 0.0
    heat_credit_factor: float = DEFAULT_HEAT_FACTOR  # displaced-boiler factor

    def __post_init__(self):
        for name in ("net_elec_yield", "heat_credit_mwh", "n2o_tco2e",
                     "aux_fuel_tco2e", "heat_credit_factor"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be >= 0")


@dataclass(frozen=True)
class RemediationParams:
    """Excavation campaign applied to a legacy site.

    The excavated share of the site has ``doc_removal_fraction`` of its DOC
    screened out (to RDF or inert cover).  After the campaign the whole
    remaining mass sits under ``residual_policy`` (new wells, biocovers).
    """

    excavated_fraction: float = 0.0
    doc_removal_fraction: float = 0.0
    residual_policy: gm.CapturePolicy = gm.CapturePolicy()
    rdf_yield: float = 0.0  # t RDF per t excavated
    rdf_fossil_carbon: float = 0.0  # t C per t RDF
    excavation_overhead_tco2e: float = 0.0  # per t excavated
    discount_rate: float = 0.03

    def __post_init__(self):
        gm._check_fraction("excavated_fraction", self.excavated_fraction)
        gm._check_fraction("doc_removal_fraction", self.doc_removal_fraction)
        if self.rdf_yield < 0 or self.rdf_fossil_carbon < 0:
            raise DomainError("rdf_yield and rdf_fossil_carbon must be >= 0")
        if self.excavation_overhead_tco2e < 0:
            raise DomainError("excavation_overhead_tco2e must be >= 0")
        if not 0.0 <= self.discount_rate <= 0.2:
            raise DomainError("discount_rate must lie in [0, 0.2]")


def avoided_grid_emissions(exported: float, grid: GridModel) -> float:
    if exported < 0:
        raise DomainError(f"exported energy must be >= 0, got {exported!r}")
    return exported * grid.marginal_emission_factor


def discount_factors(n_years, rate):
    """``1 / (1 + rate)**t`` for t = 1..n_years."""
    if rate < 0:
        raise DomainError(f"discount rate must be >= 0, got {rate!r}")
    t = np.arange(1, n_years + 1, dtype=float)
    return (1.0 + rate) ** -t


def discounted_methane_benefit(baseline_series, project_series, rate, gwp) -> float:
    """Discounted CO2e value of the methane a project avoids.

    ``sum_t (baseline_t - project_t) * gwp / (1 + rate)**t`` with year t
    starting at 1.  Negative if the project emits more than the baseline.
    """
    baseline = np.asarray(baseline_series, dtype=float)
    project = np.asarray(project_series, dtype=float)
    if baseline.shape != project.shape or baseline.ndim != 1:
        raise DomainError(
            f"series length mismatch: {baseline.shape} vs {project.shape}"
        )
    terms = (baseline - project) * gwp.ch4_factor * discount_factors(len(baseline), rate)
    return math.fsum(terms)


def _heat_credit(heat_mwh, plant, grid):
    return heat_mwh * plant.heat_credit_factor * grid.marginal_emission_factor


def landfill_pathway(waste, policy, grid, gwp) -> PathwayBalance:
    generated = gm.methane_generation_aggregate(waste)
    escaped = gm.net_methane(generated, policy)
    direct = gm.to_co2e(escaped, gwp)
    exported = gm.captured_methane(generated, policy) * policy.utilization_fraction * policy.lfg_elec_yield
    energy = avoided_grid_emissions(exported, grid)
    # decomposed carbon leaves as CO2 except the CH4 that escapes unoxidised
    decomposed_c = waste.f_doc * waste.doc * waste.mcf
    escaped_c = decomposed_c * waste.f_ch4 * (1.0 - policy.r) * (1.0 - policy.ox)
    biogenic = (decomposed_c - escaped_c) * C_TO_CO2
    return PathwayBalance.build(
        PathwayId.LANDFILL_CAPTURE, direct, energy, 0.0, exported,
        biogenic=biogenic, direct_ch4=direct,
    )


def wte_pathway(waste, plant, grid, avoided_landfill: Optional[PathwayBalance] = None) -> PathwayBalance:
    """Incineration of current MSW with power and heat export.

    Passing ``avoided_landfill`` switches on counterfactual crediting: the
    landfill's direct emissions are booked as this pathway's methane credit.
    """
    fossil = waste.fossil_carbon * C_TO_CO2
    direct = fossil + plant.n2o_tco2e + plant.aux_fuel_tco2e
    exported = plant.net_elec_yield
    energy = avoided_grid_emissions(exported, grid) + _heat_credit(plant.heat_credit_mwh, plant, grid)
    methane_credit = avoided_landfill.direct_tco2e if avoided_landfill is not None else 0.0
    return PathwayBalance.build(
        PathwayId.WTE_CURRENT, direct, energy, methane_credit, exported,
        biogenic=waste.doc * C_TO_CO2,
    )


@dataclass(frozen=True)
class SiteMethane:
    """Year-by-year escaping CH4 (t per t site waste) with and without the project."""

    baseline: np.ndarray
    project: np.ndarray
    baseline_captured: np.ndarray
    project_captured: np.ndarray

    @property
    def reduction(self):
        """Undiscounted long-run reduction of escaping methane, as a fraction."""
        base = math.fsum(self.baseline)
        if base == 0:
            return 0.0
        return 1.0 - math.fsum(self.project) / base


def remediation_site_methane(site_waste, baseline_policy, rem, decay) -> SiteMethane:
    untouched = gm.methane_timeseries(site_waste, decay)
    screened = gm.methane_timeseries(
        replace(site_waste, doc=site_waste.doc * (1.0 - rem.doc_removal_fraction)), decay
    )
    e = rem.excavated_fraction
    project_gen = e * screened + (1.0 - e) * untouched
    res = rem.residual_policy
    return SiteMethane(
        baseline=untouched * (1.0 - baseline_policy.r) * (1.0 - baseline_policy.ox),
        project=project_gen * (1.0 - res.r) * (1.0 - res.ox),
        baseline_captured=untouched * baseline_policy.r,
        project_captured=project_gen * res.r,
    )


def remediation_pathway(site_waste, baseline_policy, rem, plant, grid, decay, gwp) -> PathwayBalance:
    """Balance per tonne of legacy site waste for an excavation campaign.

    Relative to leaving the site under ``baseline_policy``: direct emissions
    are excavation overhead plus fossil CO2 from burning recovered RDF; the
    energy credit covers RDF power/heat and any extra landfill-gas power; the
    methane credit is the discounted avoided methane.  Forgone baseline LFG
    power (when less gas is left to capture) is not charged against the
    project, which keeps the energy credit non-negative.
    """
    site = remediation_site_methane(site_waste, baseline_policy, rem, decay)
    e = rem.excavated_fraction
    rdf_t = e * rem.rdf_yield
    direct = e * rem.excavation_overhead_tco2e + rdf_t * rem.rdf_fossil_carbon * C_TO_CO2

    disc = discount_factors(len(site.baseline), rem.discount_rate)
    res = rem.residual_policy
    lfg_mwh = math.fsum(
        (site.project_captured * res.utilization_fraction * res.lfg_elec_yield
         - site.baseline_captured * baseline_policy.utilization_fraction * baseline_policy.lfg_elec_yield)
        * disc
    )
    lfg_mwh = max(lfg_mwh, 0.0)
    rdf_mwh = rdf_t * plant.net_elec_yield
    exported = rdf_mwh + lfg_mwh
    energy = avoided_grid_emissions(exported, grid) + _heat_credit(rdf_t * plant.heat_credit_mwh, plant, grid)

    methane_credit = discounted_methane_benefit(site.baseline, site.project, rem.discount_rate, gwp)
    removed_c = e * site_waste.doc * rem.doc_removal_fraction
    return PathwayBalance.build(
        PathwayId.REMEDIATION_WTE, direct, energy, methane_credit, exported,
        biogenic=removed_c * C_TO_CO2,
    )
