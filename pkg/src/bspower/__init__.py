"""Minimum base-station supply power over a multi-user downlink.

Core pieces: a linear supply power model (``power_model``), per-link Shannon
physics (``link_model``), exact convex frame allocation plus reference
schemes (``allocator``), random urban-macro drops (``channel``), a
deterministic Monte Carlo sweep engine (``simulator``) and CSV/SVG output
with a CLI (``cli``, ``plotting``).
"""

from .allocator import (
    Allocation,
    InfeasibleRates,
    SchemeKind,
    brute_force_grid,
    max_power_reference,
    solve_bandwidth_adaptation,
    solve_dtx_only,
    solve_pc_only,
    solve_prais,
)
from .channel import ChannelConfig, DistanceOutOfModelRange, channel_gain, drop_users, pathloss_db, substream
from .link_model import (
    Link,
    cost_derivative1,
    cost_derivative2,
    link_cost,
    min_mu,
    noise_power,
    rate,
    required_power,
)
from .power_model import (
    PowerModelParams,
    PowerOutOfRange,
    UnknownPreset,
    dbm_to_watts,
    preset,
    preset_names,
    supply_power,
    watts_to_dbm,
)
from .simulator import (
    ConfigError,
    GridMismatch,
    Scenario,
    SweepRecord,
    crossover_rate,
    default_rate_grid,
    run_iteration,
    run_sweep,
    savings_vs_reference,
)

__version__ = "0.1.0"

__all__ = [
    "Allocation",
    "ChannelConfig",
    "ConfigError",
    "DistanceOutOfModelRange",
    "GridMismatch",
    "InfeasibleRates",
    "Link",
    "PowerModelParams",
    "PowerOutOfRange",
    "Scenario",
    "SchemeKind",
    "SweepRecord",
    "UnknownPreset",
    "brute_force_grid",
    "channel_gain",
    "cost_derivative1",
    "cost_derivative2",
    "crossover_rate",
    "dbm_to_watts",
    "default_rate_grid",
    "drop_users",
    "link_cost",
    "max_power_reference",
    "min_mu",
    "noise_power",
    "pathloss_db",
    "preset",
    "preset_names",
    "rate",
    "required_power",
    "run_iteration",
    "run_sweep",
    "savings_vs_reference",
    "solve_bandwidth_adaptation",
    "solve_dtx_only",
    "solve_pc_only",
    "solve_prais",
    "substream",
    "supply_power",
    "watts_to_dbm",
    "__version__",
]
