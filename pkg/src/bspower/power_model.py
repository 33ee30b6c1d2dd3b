"""Linear base-station supply power model.

Maps radiated transmit power to the mains supply power drawn by the base
station.  While transmitting, consumption is affine in transmit power with a
stand-by offset ``p0`` and slope ``m``; with the radio fully off the station
drops to the (lower) sleep level ``ps``.  Four named parameter sets describe
hardware generations from a 2010 macro site down to an idealized fully
load-proportional design.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

__all__ = [
    "PowerModelParams",
    "PowerOutOfRange",
    "UnknownPreset",
    "DEFAULT_PMAX_DBM",
    "dbm_to_watts",
    "watts_to_dbm",
    "preset",
    "preset_names",
    "supply_power",
    "without_sleep",
]

# Relative slack accepted on the transmit-power cap before raising.
PMAX_RTOL = 1e-9

DEFAULT_PMAX_DBM = 46.0


class PowerOutOfRange(ValueError):
    """Transmit power is negative or exceeds the model's cap."""


class UnknownPreset(ValueError):
    """No power model preset is registered under the requested name."""


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    from math import log10

    if p_watts <= 0.0:
        raise ValueError("dBm undefined for non-positive power")
    return 10.0 * log10(p_watts) + 30.0


@dataclass(frozen=True)
class PowerModelParams:
    """Supply-power model of one single-antenna, single-sector transmitter.

    Attributes
    ----------
    name : str
        Identifier, e.g. a preset name.
    p0_watts : float
        Stand-by supply power drawn whenever the transmitter is active,
        independent of load.
    slope : float
        Load dependence factor: watts of supply power per watt of transmit
        power.
    ps_watts : float
        Supply power in sleep mode (radio chain off).
    pmax_watts : float
        Maximum transmit power.
    """

    name: str
    p0_watts: float
    slope: float
    ps_watts: float
    pmax_watts: float = dbm_to_watts(DEFAULT_PMAX_DBM)

    def __post_init__(self):
        if not (self.p0_watts >= self.ps_watts >= 0.0):
            raise ValueError(
                f"need p0 >= ps >= 0, got p0={self.p0_watts}, ps={self.ps_watts}"
            )
        if self.slope <= 0.0:
            raise ValueError(f"slope must be positive, got {self.slope}")
        if self.pmax_watts <= 0.0:
            raise ValueError(f"pmax must be positive, got {self.pmax_watts}")


# name -> (p0 W, slope, ps W); transmit cap defaults to 46 dBm for all sets.
_PRESETS = {
    "sota2010": (119.0, 2.4, 63.0),
    "market2014": (67.0, 1.25, 25.0),
    "improved_dtx": (170.0, 3.4, 25.0),
    "future": (1.0, 2.9, 1.0),
}


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)


def preset(name: str, pmax_dbm: float = DEFAULT_PMAX_DBM) -> PowerModelParams:
    """Return one of the built-in power model parameter sets.

    Known names: ``sota2010``, ``market2014``, ``improved_dtx``, ``future``.
    """
    try:
        p0, m, ps = _PRESETS[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown power model {name!r}; choose from {', '.join(_PRESETS)}"
        ) from None
    return PowerModelParams(
        name=name, p0_watts=p0, slope=m, ps_watts=ps, pmax_watts=dbm_to_watts(pmax_dbm)
    )


def supply_power(ptx_watts: float, pm: PowerModelParams) -> float:
    """Instantaneous supply power for a given transmit power.

    Exactly zero transmit power means the sleep state at ``ps_watts``; any
    positive transmit power pays the stand-by offset plus the load term.
    The jump at zero is a genuine discontinuity of the hardware model, so
    only an exact 0.0 selects the sleep branch.
    """
    if ptx_watts < 0.0 or ptx_watts > pm.pmax_watts * (1.0 + PMAX_RTOL):
        raise PowerOutOfRange(
            f"transmit power {ptx_watts} W outside [0, {pm.pmax_watts}] W"
        )
    if ptx_watts == 0.0:
        return pm.ps_watts
    return pm.p0_watts + pm.slope * ptx_watts


def without_sleep(pm: PowerModelParams) -> PowerModelParams:
    """Variant of ``pm`` whose sleep state saves nothing (ps := p0).

    Pinning the sleep level to the stand-by level removes any incentive to
    idle the transmitter, which is how the power-control-only scheme is
    obtained from the joint solver.
    """
    return replace(pm, ps_watts=pm.p0_watts)
