"""Landfill methane, waste-to-energy and remediation balances under carbon
accounting regimes, with an hourly Monte Carlo of a remediation-fed CHP
microgrid serving a data-center corridor."""

from .errors import ConsistencyError, DomainError, ParseError, StockfireError
from .gas_model import (GWP20, GWP100, CapturePolicy, DecayParams, GwpHorizon, WasteStream,
                        methane_generation_aggregate, methane_timeseries, net_methane, to_co2e)
from .pathway_model import (GridModel, PathwayBalance, PathwayId, RemediationParams, WtePlantParams,
                            avoided_grid_emissions, discounted_methane_benefit, landfill_pathway,
                            remediation_pathway, wte_pathway)
from .regime_engine import (AccountingRegime, IncentiveProfile, PathwayCosts, load_regime,
                            optimal_allocation, parse_regime, private_cost, rank_pathways,
                            tipping_point_lambda)
from .corridor_sim import (ChpUnit, DataCenterLoad, DieselUnit, OutageProcess, ResilienceMetrics,
                           annual_chp_energy, dc_demand_share, monte_carlo, ride_through_comparison,
                           simulate_dispatch)
from .scenario_io import CorridorScenario, Table3Report, load_scenario, reproduce_table3, write_report

__version__ = "0.1.0"
