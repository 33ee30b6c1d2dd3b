"""Random user drops and channel gains for a single macro cell.

Users land uniformly on a disk around the base station (radial density
proportional to distance, truncated below a minimum separation).  Gains
combine the urban-macro non-line-of-sight pathloss at the carrier frequency
with i.i.d. lognormal shadowing.

Randomness is handled through explicit ``numpy`` generators.  ``substream``
derives an independent, reproducible child stream from a 64-bit master seed
and an integer path such as ``(iteration, user)``, which keeps Monte Carlo
results identical regardless of how iterations are partitioned into workers.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log10

import numpy as np

__all__ = [
    "ChannelConfig",
    "DistanceOutOfModelRange",
    "substream",
    "drop_users",
    "pathloss_db",
    "channel_gain",
]

# Validity range of the pathloss fit, in meters.
PATHLOSS_MIN_M = 10.0
PATHLOSS_MAX_M = 5000.0


class DistanceOutOfModelRange(ValueError):
    """Distance outside the pathloss model's fitted range."""


@dataclass(frozen=True)
class ChannelConfig:
    """Cell geometry and propagation parameters.

    The defaults describe a 250 m urban macro cell at 2 GHz with 8 dB
    lognormal shadowing.  Antenna heights, street width and building height
    are the pathloss model's standard evaluation values; the 35 m minimum
    user distance keeps gains bounded and is a common macro-cell evaluation
    floor.
    """

    cell_radius_m: float = 250.0
    carrier_ghz: float = 2.0
    shadowing_sigma_db: float = 8.0
    min_distance_m: float = 35.0
    bs_height_m: float = 25.0
    ut_height_m: float = 1.5
    street_width_m: float = 20.0
    building_height_m: float = 20.0

    def __post_init__(self):
        if not (0.0 < self.min_distance_m < self.cell_radius_m):
            raise ValueError(
                f"need 0 < min_distance < cell_radius, got "
                f"{self.min_distance_m} / {self.cell_radius_m}"
            )
        if self.shadowing_sigma_db < 0.0:
            raise ValueError("shadowing sigma must be >= 0")
        if self.carrier_ghz <= 0.0:
            raise ValueError("carrier frequency must be positive")


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent generator for one cell of the sampling plan.

    ``substream(seed, iteration, user)`` always yields the same stream for
    the same arguments, no matter which other streams were drawn before.
    """
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(path))
    return np.random.default_rng(ss)


def drop_users(n: int, cfg: ChannelConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` user distances from the uniform-disk radial law.

    Inverse-CDF sampling of the density f(d) proportional to d on
    [min_distance, cell_radius]: d = sqrt(dmin^2 + u * (R^2 - dmin^2)).
    """
    u = rng.random(n)
    r2 = cfg.cell_radius_m**2
    d2 = cfg.min_distance_m**2
    return np.sqrt(d2 + u * (r2 - d2))


def pathloss_db(d_m: float, cfg: ChannelConfig) -> float:
    """Urban-macro NLOS pathloss in dB at distance ``d_m``.

    Hexagonal-layout NLOS fit with street width W, building height h, base
    station height h_BS, user terminal height h_UT (meters) and carrier
    f_c in GHz; valid for 10 m <= d <= 5 km.
    """
    if not (PATHLOSS_MIN_M <= d_m <= PATHLOSS_MAX_M):
        raise DistanceOutOfModelRange(
            f"distance {d_m} m outside [{PATHLOSS_MIN_M}, {PATHLOSS_MAX_M}] m"
        )
    w = cfg.street_width_m
    h = cfg.building_height_m
    hbs = cfg.bs_height_m
    hut = cfg.ut_height_m
    return (
        161.04
        - 7.1 * log10(w)
        + 7.5 * log10(h)
        - (24.37 - 3.7 * (h / hbs) ** 2) * log10(hbs)
        + (43.42 - 3.1 * log10(hbs)) * (log10(d_m) - 3.0)
        + 20.0 * log10(cfg.carrier_ghz)
        - (3.2 * log10(11.75 * hut) ** 2 - 4.97)
    )


def channel_gain(d_m: float, cfg: ChannelConfig, rng: np.random.Generator) -> float:
    """Linear channel power gain at distance ``d_m`` with shadowing.

    G = 10**(-(PL(d) + X)/10) with X ~ Normal(0, sigma^2) in dB.  One normal
    variate is consumed from ``rng`` even when sigma is zero, so draw
    positions in a stream stay aligned across configurations.
    """
    shadow_db = rng.normal(0.0, 1.0) * cfg.shadowing_sigma_db
    return 10.0 ** (-(pathloss_db(d_m, cfg) + shadow_db) / 10.0)
