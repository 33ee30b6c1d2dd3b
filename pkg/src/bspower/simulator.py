"""Monte Carlo sweeps of frame allocations over random user drops.

For every (power model, per-user rate) point the engine draws user drops,
solves each requested allocation scheme on the same drop, and aggregates the
frame-average supply power into one record per scheme.  Channel gains depend
only on (seed, iteration, user), so every scheme, rate and power model sees
identical drops, and results are independent of how work is partitioned
across worker threads.

Drops whose combined minimum shares overflow the frame cannot meet their
targets under any scheme; such iterations are excluded from the means for
all schemes alike and surface in ``infeasible_fraction``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .allocator import (
    FEASIBILITY_SLACK,
    SchemeKind,
    fixed_power_objectives,
    min_share_sum,
    solve_shared_frame,
)
from .channel import ChannelConfig, channel_gain, drop_users, substream
from .link_model import noise_power
from .power_model import preset, preset_names, without_sleep

__all__ = [
    "Scenario",
    "SweepRecord",
    "ConfigError",
    "GridMismatch",
    "default_rate_grid",
    "gains_for_iteration",
    "draw_gains",
    "iteration_objectives",
    "run_iteration",
    "run_sweep",
    "crossover_rate",
    "savings_vs_reference",
]


class ConfigError(Exception):
    """Invalid or incomplete sweep configuration."""


class GridMismatch(Exception):
    """Record lists do not share one rate grid."""


def default_rate_grid() -> tuple[float, ...]:
    """Near-zero probe at 10 kbit/s plus 20 log-spaced points 0.1..10 Mbit/s."""
    return (1e4,) + tuple(float(r) for r in np.logspace(5.0, 7.0, 20))


def _all_schemes() -> tuple[SchemeKind, ...]:
    return tuple(SchemeKind)


@dataclass(frozen=True)
class Scenario:
    """One simulation campaign.

    ``rates_bps`` holds per-user targets; within a sweep point every user
    gets the same target.  ``seed`` is the 64-bit master seed from which all
    per-(iteration, user) substreams derive.
    """

    users: int = 10
    iterations: int = 10000
    seed: int = 1
    bandwidth_hz: float = 1e7
    temperature_k: float = 290.0
    pmax_dbm: float = 46.0
    power_models: tuple[str, ...] = preset_names()
    schemes: tuple[SchemeKind, ...] = field(default_factory=_all_schemes)
    rates_bps: tuple[float, ...] = field(default_factory=default_rate_grid)
    channel: ChannelConfig = field(default_factory=ChannelConfig)

    def __post_init__(self):
        if self.users < 1:
            raise ValueError(f"users must be >= 1, got {self.users}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.bandwidth_hz <= 0.0 or self.temperature_k <= 0.0:
            raise ValueError("bandwidth and temperature must be positive")
        if not math.isfinite(self.pmax_dbm):
            raise ValueError("pmax_dbm must be finite")
        for r in self.rates_bps:
            if not (math.isfinite(r) and r >= 0.0):
                raise ValueError(f"rate targets must be finite and >= 0, got {r}")


@dataclass(frozen=True)
class SweepRecord:
    """Aggregated statistics for one (power model, scheme, rate) point.

    All-infeasible points report NaN statistics with ``iterations_used`` 0.
    """

    power_model: str
    scheme: SchemeKind
    rate_bps: float
    mean_watts: float
    std_watts: float
    ci95_watts: float
    infeasible_fraction: float
    iterations_used: int


# ----------------------------------------------------------------------
# drop generation


def gains_for_iteration(scenario: Scenario, iteration: int) -> np.ndarray:
    """Channel gains of one drop, shape (users,).

    Each user owns the substream (seed, iteration, user), from which its
    distance and shadowing are drawn in that order.
    """
    cfg = scenario.channel
    out = np.empty(scenario.users)
    for user in range(scenario.users):
        rng = substream(scenario.seed, iteration, user)
        d = drop_users(1, cfg, rng)[0]
        out[user] = channel_gain(float(d), cfg, rng)
    return out


def draw_gains(scenario: Scenario) -> np.ndarray:
    """Gains for every iteration, shape (iterations, users)."""
    return np.vstack(
        [gains_for_iteration(scenario, t) for t in range(scenario.iterations)]
    )


# ----------------------------------------------------------------------
# solving one sweep point


def iteration_objectives(
    scenario: Scenario,
    power_model: str,
    rate_bps: float,
    gains: np.ndarray | None = None,
):
    """Per-iteration objectives of every requested scheme at one point.

    Returns ``(objectives, feasible)`` where ``feasible`` is a boolean mask
    over all iterations and ``objectives`` maps each scheme to an array over
    the feasible iterations only (aligned across schemes).
    """
    pm = preset(power_model, scenario.pmax_dbm)
    if gains is None:
        gains = draw_gains(scenario)
    noise = noise_power(scenario.bandwidth_hz, scenario.temperature_k)
    n_over_g = noise / gains
    share_min = min_share_sum(
        n_over_g, np.full_like(n_over_g, rate_bps), scenario.bandwidth_hz, pm.pmax_watts
    )
    feasible = share_min <= 1.0 + FEASIBILITY_SLACK
    nog = n_over_g[feasible]
    smin = share_min[feasible]
    n_feasible = nog.shape[0]

    objectives: dict[SchemeKind, np.ndarray] = {}
    for scheme in scenario.schemes:
        if n_feasible == 0:
            objectives[scheme] = np.empty(0)
        elif scheme is SchemeKind.PRAIS:
            res = solve_shared_frame(nog, rate_bps, scenario.bandwidth_hz, pm)
            objectives[scheme] = res["objective"]
        elif scheme is SchemeKind.PC_ONLY:
            res = solve_shared_frame(
                nog, rate_bps, scenario.bandwidth_hz, without_sleep(pm)
            )
            objectives[scheme] = res["objective"]
        elif scheme is SchemeKind.DTX_ONLY:
            objectives[scheme] = fixed_power_objectives(smin, pm)[0]
        elif scheme is SchemeKind.BANDWIDTH_ADAPTATION:
            objectives[scheme] = fixed_power_objectives(smin, pm)[1]
        else:
            objectives[scheme] = np.full(
                n_feasible, pm.p0_watts + pm.slope * pm.pmax_watts
            )
    return objectives, feasible


def run_iteration(
    scenario: Scenario, power_model: str, rate_bps: float, iteration_index: int
):
    """Objectives of all requested schemes on one drop, or None if the drop
    cannot meet its targets (in which case it counts as infeasible for every
    scheme, the reference included)."""
    gains = gains_for_iteration(scenario, iteration_index)[None, :]
    objectives, feasible = iteration_objectives(
        scenario, power_model, rate_bps, gains=gains
    )
    if not bool(feasible[0]):
        return None
    return {scheme: float(arr[0]) for scheme, arr in objectives.items()}


# ----------------------------------------------------------------------
# sweeping


def _point_records(scenario, gains, power_model, rate_bps):
    objectives, feasible = iteration_objectives(
        scenario, power_model, rate_bps, gains=gains
    )
    used = int(feasible.sum())
    infeasible_fraction = (scenario.iterations - used) / scenario.iterations
    records = []
    for scheme in scenario.schemes:
        values = objectives[scheme]
        if used == 0:
            mean = std = ci95 = float("nan")
        else:
            mean = float(values.mean())
            std = float(values.std(ddof=1)) if used > 1 else 0.0
            ci95 = 1.96 * std / math.sqrt(used)
        records.append(
            SweepRecord(
                power_model=power_model,
                scheme=scheme,
                rate_bps=float(rate_bps),
                mean_watts=mean,
                std_watts=std,
                ci95_watts=ci95,
                infeasible_fraction=infeasible_fraction,
                iterations_used=used,
            )
        )
    return records


def run_sweep(scenario: Scenario, workers: int = 1) -> list[SweepRecord]:
    """Full cross product of power models, rates and schemes.

    Iterations sharing a (power model, rate) point are solved as one
    vectorized batch; ``workers`` threads split the sweep points.  Results
    are byte-identical for any worker count because every point is computed
    from the same per-point arrays regardless of scheduling.
    """
    if not scenario.power_models:
        raise ConfigError("power_models is empty")
    if not scenario.schemes:
        raise ConfigError("schemes is empty")
    if not scenario.rates_bps:
        raise ConfigError("rates_bps is empty")
    gains = draw_gains(scenario)
    points = [
        (pm_name, rate)
        for pm_name in scenario.power_models
        for rate in scenario.rates_bps
    ]

    def work(point):
        pm_name, rate = point
        return _point_records(scenario, gains, pm_name, rate)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(work, points))
    else:
        chunks = [work(p) for p in points]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda r: (r.power_model, r.scheme.value, r.rate_bps))
    return records


# ----------------------------------------------------------------------
# curve analysis


def _curve(records, power_model, scheme):
    sel = [r for r in records if r.power_model == power_model and r.scheme == scheme]
    sel.sort(key=lambda r: r.rate_bps)
    return [r.rate_bps for r in sel], [r.mean_watts for r in sel]


def crossover_rate(records, power_model, scheme_a, scheme_b):
    """Rate at which the two schemes' mean curves intersect, or None.

    Linear interpolation at the first sign change of (mean_a - mean_b)
    along the rate axis.  Points with undefined means never produce a
    crossing.
    """
    rates_a, means_a = _curve(records, power_model, scheme_a)
    rates_b, means_b = _curve(records, power_model, scheme_b)
    if len(rates_a) < 2 or rates_a != rates_b:
        raise GridMismatch(
            f"schemes {scheme_a.value} and {scheme_b.value} not sampled on one "
            f"rate grid with >= 2 points under {power_model}"
        )
    diff = [a - b for a, b in zip(means_a, means_b)]
    for i in range(len(diff) - 1):
        d0, d1 = diff[i], diff[i + 1]
        if math.isnan(d0) or math.isnan(d1):
            continue
        if d0 * d1 < 0.0:
            r0, r1 = rates_a[i], rates_a[i + 1]
            return r0 + (r1 - r0) * (0.0 - d0) / (d1 - d0)
    return None


def savings_vs_reference(records, power_model, scheme, reference_scheme):
    """Fractional savings of ``scheme`` over ``reference_scheme`` per rate.

    Returns [(rate_bps, 1 - mean_scheme/mean_reference), ...] on the shared
    grid.  Reference means are bounded below by the sleep level of the
    model, hence strictly positive wherever defined.
    """
    rates_a, means_a = _curve(records, power_model, scheme)
    rates_b, means_b = _curve(records, power_model, reference_scheme)
    if not rates_a or rates_a != rates_b:
        raise GridMismatch(
            f"schemes {scheme.value} and {reference_scheme.value} not sampled on "
            f"one rate grid under {power_model}"
        )
    return [(r, 1.0 - a / b) for r, a, b in zip(rates_a, means_a, means_b)]
