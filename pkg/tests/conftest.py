import numpy as np
from hypothesis import HealthCheck, settings

from bspower.link_model import Link, noise_power

settings.register_profile(
    "ci",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

SYSTEM_BANDWIDTH_HZ = 1e7
NOISE_WATTS = noise_power(SYSTEM_BANDWIDTH_HZ, 290.0)


def make_link(gain, rate_bps, bandwidth_hz=SYSTEM_BANDWIDTH_HZ, noise_watts=NOISE_WATTS):
    return Link(
        gain=gain,
        bandwidth_hz=bandwidth_hz,
        noise_watts=noise_watts,
        rate_target_bps=rate_bps,
    )


def random_links(rng, n, rate_lo=1e5, rate_hi=8e6, gain_lo=1e-13, gain_hi=1e-7):
    """Links with log-uniform gains; rates low enough to stay feasible."""
    gains = 10.0 ** rng.uniform(np.log10(gain_lo), np.log10(gain_hi), n)
    rates = rng.uniform(rate_lo, rate_hi, n)
    return [make_link(g, r) for g, r in zip(gains, rates)]
