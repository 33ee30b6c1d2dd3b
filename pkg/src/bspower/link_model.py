"""Per-link downlink physics.

A link is one user's downlink characterized by a linear channel power gain,
its transmission bandwidth, thermal noise power and a target average rate
over the scheduling frame.  Rates follow the Shannon bound, so the transmit
power needed to hit a target scales exponentially with the per-slot spectral
efficiency.  The module also provides the time-share cost function used by
the allocator together with its analytic first and second derivatives.

All operations are pure; ``numpy`` scalar ufuncs are used for the
transcendentals so results agree bit-for-bit with the vectorized solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .power_model import PowerModelParams

__all__ = [
    "BOLTZMANN_J_PER_K",
    "Link",
    "noise_power",
    "rate",
    "required_power",
    "min_mu",
    "link_cost",
    "cost_derivative1",
    "cost_derivative2",
]

BOLTZMANN_J_PER_K = 1.380649e-23

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class Link:
    """One user's downlink.

    Attributes
    ----------
    gain : float
        Linear channel power gain (pathloss and shadowing combined),
        0 < gain <= 1.
    bandwidth_hz : float
        Bandwidth used while this link transmits.  Under TDMA every link
        occupies the full system band during its slot.
    noise_watts : float
        Thermal noise power over ``bandwidth_hz``.
    rate_target_bps : float
        Required average rate over the whole frame.  A target of zero means
        the link is absent and never scheduled.
    """

    gain: float
    bandwidth_hz: float
    noise_watts: float
    rate_target_bps: float

    def __post_init__(self):
        if self.gain <= 0.0:
            raise ValueError(f"gain must be positive, got {self.gain}")
        if self.bandwidth_hz <= 0.0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth_hz}")
        if self.noise_watts <= 0.0:
            raise ValueError(f"noise power must be positive, got {self.noise_watts}")
        if self.rate_target_bps < 0.0:
            raise ValueError(f"rate target must be >= 0, got {self.rate_target_bps}")


def noise_power(bandwidth_hz: float, temperature_k: float) -> float:
    """Thermal noise power k*T*B in watts."""
    return bandwidth_hz * BOLTZMANN_J_PER_K * temperature_k


def rate(ptx_watts: float, link: Link) -> float:
    """Instantaneous Shannon rate in bit/s at the given transmit power."""
    snr = link.gain * ptx_watts / link.noise_watts
    return link.bandwidth_hz * float(np.log2(1.0 + snr))


def required_power(rate_target_bps: float, mu: float, link: Link) -> float:
    """Transmit power meeting an average rate target with time share ``mu``.

    Compressing the target into a share ``mu`` of the frame raises the
    in-slot rate to ``target/mu``, hence the exponential:

        P = (N/G) * (2**(target / (W * mu)) - 1)

    A zero target costs exactly zero power.
    """
    if rate_target_bps == 0.0:
        return 0.0
    x = rate_target_bps / (link.bandwidth_hz * mu)
    return link.noise_watts / link.gain * float(np.exp2(x) - 1.0)


def min_mu(link: Link, pmax_watts: float) -> float:
    """Smallest time share able to meet the link's target at the power cap.

    May exceed 1, in which case the link cannot be served even with the
    whole frame at full power.
    """
    if link.rate_target_bps == 0.0:
        return 0.0
    rate_at_pmax = link.bandwidth_hz * float(
        np.log2(1.0 + link.gain * pmax_watts / link.noise_watts)
    )
    return link.rate_target_bps / rate_at_pmax


def link_cost(mu: float, link: Link, pm: PowerModelParams) -> float:
    """Supply energy per frame (in W) this link adds when given share ``mu``.

    mu * (p0 + m * required_power(target, mu)); valid for
    min_mu <= mu <= 1 and a positive rate target.
    """
    return mu * (
        pm.p0_watts + pm.slope * required_power(link.rate_target_bps, mu, link)
    )


def cost_derivative1(mu: float, link: Link) -> float:
    """d/dmu of mu * required_power(mu), the load part of the link cost.

    Always <= 0: stretching a transmission over more of the frame never
    increases the energy spent on transmit power.
    """
    x = link.rate_target_bps / (link.bandwidth_hz * mu)
    return (
        link.noise_watts
        / link.gain
        * float(-1.0 + np.exp2(x) * (1.0 - x * _LN2))
    )


def cost_derivative2(mu: float, link: Link) -> float:
    """Second derivative of mu * required_power(mu); >= 0 (convexity)."""
    x = link.rate_target_bps / (link.bandwidth_hz * mu)
    r_over_w = link.rate_target_bps / link.bandwidth_hz
    return (
        link.noise_watts
        / link.gain
        * r_over_w**2
        * _LN2**2
        * float(np.exp2(x))
        / mu**3
    )
