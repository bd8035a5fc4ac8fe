"""Landfill methane generation, capture/oxidation and CO2-equivalence.

All masses are intensities per tonne of waste in place.  Site totals are
formed downstream by multiplying with a managed mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError

STOICH_IPCC = 16.0 / 12.0
STOICH_LITERAL = 1.0

GWP100_CH4 = 28.0
GWP20_CH4 = 80.0

# relative tolerance on f_doc == 1 - exp(-k*T)
FOD_CONSISTENCY_RTOL = 1e-6


def _check_fraction(name, value):
    if not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class WasteStream:
    """Composition of one tonne of waste.

    ``doc`` and ``fossil_carbon`` are mass fractions (t C per t waste).
    ``stoich_factor`` converts decomposed carbon mass to CH4 mass; 16/12
    is the usual mass accounting, 1.0 reproduces the bare product of the
    four factors.
    """

    doc: float = 0.15
    f_doc: float = 0.5
    mcf: float = 1.0
    f_ch4: float = 0.5
    fossil_carbon: float = 0.0
    stoich_factor: float = STOICH_IPCC

    def __post_init__(self):
        for name in ("f_doc", "mcf", "f_ch4"):
            _check_fraction(name, getattr(self, name))
        if self.doc < 0:
            raise DomainError(f"doc must be >= 0, got {self.doc!r}")
        if self.fossil_carbon < 0:
            raise DomainError(f"fossil_carbon must be >= 0, got {self.fossil_carbon!r}")
        if self.doc + self.fossil_carbon > 1.0:
            raise DomainError("doc + fossil_carbon must not exceed 1")
        if not STOICH_LITERAL <= self.stoich_factor <= STOICH_IPCC + 1e-12:
            raise DomainError(
                f"stoich_factor must lie in [1, 16/12], got {self.stoich_factor!r}"
            )


@dataclass(frozen=True)
class CapturePolicy:
    r: float = 0.0
    ox: float = 0.0
    utilization_fraction: float = 0.0
    lfg_elec_yield: float = 0.0  # MWh per t CH4 combusted

    def __post_init__(self):
        for name in ("r", "ox", "utilization_fraction"):
            _check_fraction(name, getattr(self, name))
        if self.lfg_elec_yield < 0:
            raise DomainError("lfg_elec_yield must be >= 0")


@dataclass(frozen=True)
class GwpHorizon:
    label: str = "GWP100"
    ch4_factor: float = GWP100_CH4

    def __post_init__(self):
        if self.label not in ("GWP100", "GWP20"):
            raise DomainError(f"unknown GWP horizon {self.label!r}")
        if not 28.0 <= self.ch4_factor <= 84.0:
            raise DomainError(f"ch4_factor must lie in [28, 84], got {self.ch4_factor!r}")

    @classmethod
    def from_years(cls, years):
        """``GwpHorizon.from_years(100)`` or ``from_years(20)``."""
        years = int(years)
        if years == 100:
            return GWP100
        if years == 20:
            return GWP20
        raise DomainError(f"GWP horizon must be 100 or 20, got {years}")

    @property
    def years(self):
        return 100 if self.label == "GWP100" else 20


GWP100 = GwpHorizon("GWP100", GWP100_CH4)
GWP20 = GwpHorizon("GWP20", GWP20_CH4)


@dataclass(frozen=True)
class DecayParams:
    k: float = 0.05
    horizon_years: int = 100

    def __post_init__(self):
        if not self.k > 0:
            raise DomainError(f"decay constant k must be > 0, got {self.k!r}")
        if int(self.horizon_years) != self.horizon_years or self.horizon_years < 1:
            raise DomainError(f"horizon_years must be an integer >= 1, got {self.horizon_years!r}")

    def decomposed_fraction(self):
        """Share of DOC decomposed within the horizon, ``1 - exp(-k T)``."""
        return -math.expm1(-self.k * self.horizon_years)


def methane_generation_aggregate(waste: WasteStream) -> float:
    """Tonnes CH4 generated per tonne of waste over the whole horizon."""
    return waste.f_doc * waste.doc * waste.mcf * waste.f_ch4 * waste.stoich_factor


def check_decay_consistency(waste: WasteStream, decay: DecayParams):
    expected = decay.decomposed_fraction()
    if abs(waste.f_doc - expected) > FOD_CONSISTENCY_RTOL * expected:
        raise ConsistencyError(
            f"f_doc={waste.f_doc!r} is inconsistent with k={decay.k!r}, "
            f"T={decay.horizon_years}: expected 1-exp(-kT)={expected!r}"
        )


def methane_timeseries(waste: WasteStream, decay: DecayParams) -> np.ndarray:
    """Yearly CH4 generation (t per t waste) under first-order decay.

    Entry ``t`` (1-based year) is proportional to ``exp(-k(t-1)) - exp(-kt)``
    and the series is normalised so that it sums to
    :func:`methane_generation_aggregate`.  Raises ConsistencyError when
    ``waste.f_doc`` does not match the decay parameters.
    """
    check_decay_consistency(waste, decay)
    total = methane_generation_aggregate(waste)
    t = np.arange(decay.horizon_years, dtype=float)
    # exp(-k(t-1)) - exp(-kt) = exp(-k(t-1)) * (1 - exp(-k)); the constant
    # factor cancels in the normalisation
    weights = np.exp(-decay.k * t)
    weights /= math.fsum(weights)
    return total * weights


def net_methane(generated: float, policy: CapturePolicy) -> float:
    """Methane escaping to the atmosphere after capture and cover oxidation."""
    if generated < 0:
        raise DomainError(f"generated methane must be >= 0, got {generated!r}")
    return generated * (1.0 - policy.r) * (1.0 - policy.ox)


def captured_methane(generated: float, policy: CapturePolicy) -> float:
    if generated < 0:
        raise DomainError(f"generated methane must be >= 0, got {generated!r}")
    return generated * policy.r


def to_co2e(ch4_mass: float, gwp: GwpHorizon) -> float:
    if ch4_mass < 0:
        raise DomainError(f"CH4 mass must be >= 0, got {ch4_mass!r}")
    return ch4_mass * gwp.ch4_factor
