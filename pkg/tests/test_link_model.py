import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bspower.link_model import (
    Link,
    cost_derivative1,
    cost_derivative2,
    link_cost,
    min_mu,
    noise_power,
    rate,
    required_power,
)
from bspower.power_model import PowerModelParams, preset

from conftest import NOISE_WATTS, SYSTEM_BANDWIDTH_HZ, make_link

PMAX = preset("market2014").pmax_watts


def test_noise_power_values():
    # k * T * B at 290 K
    assert noise_power(1e7, 290.0) == pytest.approx(4.0038821e-14, rel=1e-12)
    assert noise_power(0.0, 290.0) == 0.0
    assert noise_power(1.0, 290.0) == pytest.approx(4.0038821e-21, rel=1e-12)
    dbm = 10.0 * math.log10(noise_power(1e7, 290.0) * 1e3)
    assert dbm == pytest.approx(-103.975, abs=1e-3)


def test_rate_reference_points():
    link = make_link(gain=1e-10, rate_bps=1e6)
    assert rate(0.0, link) == 0.0
    unit_snr_power = link.noise_watts / link.gain
    assert rate(unit_snr_power, link) == pytest.approx(link.bandwidth_hz, rel=1e-12)
    assert rate(3.0 * unit_snr_power, link) == pytest.approx(
        2.0 * link.bandwidth_hz, rel=1e-12
    )


def test_required_power_reference_points():
    link = make_link(gain=2e-11, rate_bps=0.0)
    assert required_power(0.0, 0.37, link) == 0.0
    # exponent exactly one: target = mu * W
    link = make_link(gain=2e-11, rate_bps=5e6)
    assert required_power(0.5 * link.bandwidth_hz, 0.5, link) == pytest.approx(
        link.noise_watts / link.gain, rel=1e-12
    )


@given(
    gain=st.floats(min_value=1e-13, max_value=1e-7),
    x=st.floats(min_value=1e-3, max_value=50.0),
    mu=st.floats(min_value=1e-3, max_value=1.0),
)
def test_required_power_inverts_rate(gain, x, mu):
    # x is the in-slot spectral load target/(W*mu); callers keep it bounded
    target = x * SYSTEM_BANDWIDTH_HZ * mu
    link = make_link(gain=gain, rate_bps=target)
    ptx = required_power(target, mu, link)
    assert mu * rate(ptx, link) == pytest.approx(target, rel=1e-9)


def test_min_mu_reference_points():
    # gain chosen so the SNR at the cap is exactly 3: full-power rate is 2W
    gain = 3.0 * NOISE_WATTS / PMAX
    link = make_link(gain=gain, rate_bps=0.5 * SYSTEM_BANDWIDTH_HZ)
    assert min_mu(link, PMAX) == pytest.approx(0.25, rel=1e-12)
    assert min_mu(make_link(gain=gain, rate_bps=0.0), PMAX) == 0.0
    full = make_link(gain=gain, rate_bps=2.0 * SYSTEM_BANDWIDTH_HZ)
    assert min_mu(full, PMAX) == pytest.approx(1.0, rel=1e-12)
    # targets past the full-frame full-power rate report shares above one
    assert min_mu(make_link(gain=gain, rate_bps=3e7), PMAX) > 1.0


def test_link_cost_reference_points():
    pm = preset("market2014")
    # exponent one at mu=1: cost = p0 + m * N/G
    link = make_link(gain=5e-12, rate_bps=SYSTEM_BANDWIDTH_HZ)
    expected = pm.p0_watts + pm.slope * link.noise_watts / link.gain
    assert link_cost(1.0, link, pm) == pytest.approx(expected, rel=1e-12)
    # at the minimum share the cap power is attained
    gain = 3.0 * NOISE_WATTS / PMAX
    link = make_link(gain=gain, rate_bps=0.5 * SYSTEM_BANDWIDTH_HZ)
    mu = min_mu(link, pm.pmax_watts)
    assert link_cost(mu, link, pm) == pytest.approx(
        mu * (pm.p0_watts + pm.slope * pm.pmax_watts), rel=1e-9
    )


# high-precision (50-digit) evaluations of mu*(p0 + m*(N/G)*(2**(R/(W*mu))-1))
# with N = 4.0038821e-14 W, W = 10 MHz
LINK_COST_ORACLE = [
    # (mu, gain, rate_bps, p0, m, expected)
    (0.37, 3.1e-12, 2.5e6, 67.0, 1.25, 24.793568258756254),
    (0.82, 8.0e-11, 7.0e6, 119.0, 2.4, 97.5807949352091),
    (0.05, 5.0e-13, 1.0e5, 170.0, 3.4, 8.5020242603183651),
]


@pytest.mark.parametrize("mu,gain,target,p0,m,expected", LINK_COST_ORACLE)
def test_link_cost_against_precision_oracle(mu, gain, target, p0, m, expected):
    pm = PowerModelParams(name="oracle", p0_watts=p0, slope=m, ps_watts=0.0)
    link = make_link(gain=gain, rate_bps=target)
    assert link_cost(mu, link, pm) == pytest.approx(expected, rel=1e-12)


def _fd_mu_times_power(link, mu, h):
    lo = (mu - h) * required_power(link.rate_target_bps, mu - h, link)
    hi = (mu + h) * required_power(link.rate_target_bps, mu + h, link)
    return (hi - lo) / (2.0 * h)


def test_derivatives_match_finite_differences():
    import numpy as np

    rng = np.random.default_rng(1234)
    for _ in range(200):
        gain = 10.0 ** rng.uniform(-13, -7)
        target = rng.uniform(1e5, 8e6)
        link = make_link(gain=gain, rate_bps=target)
        lo = max(min_mu(link, PMAX), 1e-3)
        mu = rng.uniform(lo, 1.0)
        h = 1e-6 * mu
        d1 = cost_derivative1(mu, link)
        assert d1 <= 0.0
        assert d1 == pytest.approx(_fd_mu_times_power(link, mu, h), rel=1e-5)
        d2 = cost_derivative2(mu, link)
        assert d2 >= 0.0
        fd2 = (cost_derivative1(mu + h, link) - cost_derivative1(mu - h, link)) / (
            2.0 * h
        )
        assert d2 == pytest.approx(fd2, rel=1e-4)


def test_first_derivative_vanishes_from_below_at_light_load():
    # spectral load R/W -> 0 at mu = 1: marginal tends to -0
    link = make_link(gain=1e-10, rate_bps=1e3)
    d1 = cost_derivative1(1.0, link)
    scale = link.noise_watts / link.gain
    assert -1e-6 * scale < d1 <= 0.0


def test_second_derivative_squashed_by_load_squared():
    # one bit per second over 10 MHz: the (R/W)^2 factor flattens everything
    link = make_link(gain=1e-10, rate_bps=1.0)
    scale = link.noise_watts / link.gain
    assert 0.0 <= cost_derivative2(0.5, link) < 1e-13 * scale


@given(
    gain=st.floats(min_value=1e-12, max_value=1e-8),
    target=st.floats(min_value=1e5, max_value=8e6),
    u=st.floats(min_value=0.0, max_value=1.0),
    v=st.floats(min_value=0.0, max_value=1.0),
    t=st.floats(min_value=0.01, max_value=0.99),
)
def test_link_cost_convex_in_share(gain, target, u, v, t):
    pm = preset("sota2010")
    link = make_link(gain=gain, rate_bps=target)
    lo = min_mu(link, pm.pmax_watts)
    mu_a = lo + u * (1.0 - lo)
    mu_b = lo + v * (1.0 - lo)
    mid = t * mu_a + (1.0 - t) * mu_b
    chord = t * link_cost(mu_a, link, pm) + (1.0 - t) * link_cost(mu_b, link, pm)
    assert link_cost(mid, link, pm) <= chord + 1e-9


@given(
    gain=st.floats(min_value=1e-12, max_value=1e-8),
    target=st.floats(min_value=1e5, max_value=8e6),
    u=st.floats(min_value=0.0, max_value=0.98),
)
def test_required_power_strictly_decreasing_in_share(gain, target, u):
    link = make_link(gain=gain, rate_bps=target)
    lo = min_mu(link, PMAX)
    mu = lo + u * (1.0 - lo)
    assert required_power(target, mu, link) > required_power(target, mu * 1.01, link)


def test_transmit_energy_never_grows_with_share():
    # without the sleep credit, d/dmu of mu * required_power stays <= 0
    import numpy as np

    rng = np.random.default_rng(99)
    for _ in range(100):
        link = make_link(
            gain=10.0 ** rng.uniform(-13, -8), rate_bps=rng.uniform(1e4, 9e6)
        )
        mu = rng.uniform(max(min_mu(link, PMAX), 1e-3), 1.0)
        fd = _fd_mu_times_power(link, mu, 1e-6 * mu)
        assert fd <= 1e-12 + 1e-9 * abs(fd)


def test_link_validation():
    with pytest.raises(ValueError):
        Link(gain=0.0, bandwidth_hz=1e7, noise_watts=1e-14, rate_target_bps=0.0)
    with pytest.raises(ValueError):
        Link(gain=1e-9, bandwidth_hz=0.0, noise_watts=1e-14, rate_target_bps=0.0)
    with pytest.raises(ValueError):
        Link(gain=1e-9, bandwidth_hz=1e7, noise_watts=0.0, rate_target_bps=0.0)
    with pytest.raises(ValueError):
        Link(gain=1e-9, bandwidth_hz=1e7, noise_watts=1e-14, rate_target_bps=-1.0)
