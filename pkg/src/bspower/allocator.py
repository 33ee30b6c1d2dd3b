"""Minimum-supply-power allocation of a shared TDMA frame.

Given a set of links with fixed rate targets and a supply power model, the
solvers here split one scheduling frame into per-link transmission shares
``mu_i``, a sleep share ``nu`` and per-link transmit powers so that the
average supply power over the frame is minimal:

    minimize  sum_i mu_i * (p0 + m * P_i(mu_i))  +  nu * ps
    subject   sum_i mu_i + nu = 1,  nu >= 0,  mu_i >= 0,  0 <= P_i <= pmax

where ``P_i(mu) = (N_i/G_i) * (2**(target_i/(W_i*mu)) - 1)`` is the transmit
power that meets link i's average rate target within share ``mu``.

The objective is separable and convex per link, so the exact optimum follows
from the stationarity structure: each link's share satisfies

    (p0 - ps) + m * d/dmu[mu * P_i(mu)]  =  -lambda

with a common nonnegative multiplier ``lambda`` that prices frame time.  The
load marginal is negative and nondecreasing in ``mu``, so an inner bisection
finds each link's share for a trial multiplier (clamped to the feasible
window), and an outer bisection drives the share sum to one whenever the
relaxed solution overfills the frame.  With ``lambda = 0`` feasible, the
remainder of the frame sleeps.

Comparison schemes derived from the same machinery:

* power control only: run the solver with the sleep level pinned to the
  stand-by level (sleeping saves nothing, so the frame never sleeps);
* sleep only: each link transmits at the power cap for its minimum share and
  the rest of the frame sleeps;
* bandwidth adaptation: same shares as sleep-only but idle time is charged
  at the stand-by level.  This equals the frequency-domain reading in which
  user i permanently occupies a band fraction ``b_i`` (equal to its minimum
  time share) at power ``b_i * pmax``: noise scales with the band fraction,
  so the in-band SNR and hence the rate per hertz are unchanged, and the
  frame-average supply power p0 + m * pmax * sum_i b_i is identical to the
  time-domain expression;
* maximum-power reference: full frame at the transmit power cap.

Everything is pure and operates on immutable inputs.  The solver core is
vectorized over a batch of independent problem instances; the single
instance entry points wrap a batch of one, so per-drop results never depend
on how instances are grouped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .power_model import PMAX_RTOL, PowerModelParams, without_sleep

__all__ = [
    "SchemeKind",
    "Allocation",
    "InfeasibleRates",
    "FEASIBILITY_SLACK",
    "min_share_sum",
    "solve_shared_frame",
    "fixed_power_objectives",
    "solve_prais",
    "solve_pc_only",
    "solve_dtx_only",
    "solve_bandwidth_adaptation",
    "max_power_reference",
    "brute_force_grid",
]

_LN2 = math.log(2.0)

# Inner bisection: relative tolerance on a link's time share.
MU_RTOL = 1e-12
# Outer bisection: absolute tolerance on the share sum.  The solver contract
# asks for 1e-9; running two decades tighter (still above the inner-bisection
# noise floor of ~1e-12) keeps reported objectives of different schemes
# comparable at the 1e-9 W level.
SUM_ATOL = 1e-11
# Slack on sum(min shares) <= 1 before declaring the instance infeasible.
FEASIBILITY_SLACK = 1e-12

MAX_OUTER_ITERATIONS = 200
_MAX_INNER_ITERATIONS = 200


class InfeasibleRates(Exception):
    """Rate targets unreachable even at full power with no sleep."""


class SchemeKind(str, Enum):
    """Allocation schemes compared by the simulator."""

    PRAIS = "prais"
    PC_ONLY = "pc_only"
    DTX_ONLY = "dtx_only"
    BANDWIDTH_ADAPTATION = "bandwidth_adaptation"
    MAX_POWER_REFERENCE = "max_power_reference"


@dataclass(frozen=True)
class Allocation:
    """Solver output for one frame.

    ``mu`` and ``ptx`` are per-link tuples; ``nu`` is the sleep share;
    ``objective_watts`` the frame-average supply power.  ``multiplier`` is
    the frame-time shadow price of the solver-based schemes (zero whenever
    the frame is not saturated).  ``converged`` is cleared only if the outer
    bisection hit its iteration cap, in which case the best feasible iterate
    is reported.
    """

    mu: tuple[float, ...]
    nu: float
    ptx: tuple[float, ...]
    objective_watts: float
    scheme: SchemeKind
    converged: bool = True
    multiplier: float = 0.0


# ----------------------------------------------------------------------
# batched core; shapes are (instances, links)


def _load_marginal(n_over_g, x):
    # d/dmu [mu * transmit-power(mu)] through x = target/(W*mu); always <= 0
    return n_over_g * (np.exp2(x) * (1.0 - x * _LN2) - 1.0)


def min_share_sum(n_over_g, rate_bps, bandwidth_hz, pmax_watts):
    """Per-instance sum of the minimum feasible shares, shape (B,).

    The canonical feasibility measure: an instance is solvable iff this sum
    is at most 1 + FEASIBILITY_SLACK.
    """
    n_over_g = np.asarray(n_over_g, dtype=float)
    coef = np.asarray(rate_bps, dtype=float) / bandwidth_hz
    mu_min = coef / np.log2(1.0 + pmax_watts / n_over_g)
    return mu_min.sum(axis=-1)


def solve_shared_frame(n_over_g, rate_bps, bandwidth_hz, pm: PowerModelParams):
    """Exact frame allocation for a batch of independent instances.

    Parameters
    ----------
    n_over_g : (B, N) array
        Noise-to-gain ratio per link.
    rate_bps : (B, N) array
        Average rate targets; zero marks an absent link.
    bandwidth_hz : scalar or broadcastable array
        Transmission bandwidth per link.
    pm : PowerModelParams
        Supply power model (use ``without_sleep(pm)`` for the
        power-control-only scheme).

    Returns
    -------
    dict with arrays ``mu`` (B, N), ``nu`` (B,), ``ptx`` (B, N),
    ``objective`` (B,), ``multiplier`` (B,) and ``converged`` (B,) bool.

    Callers must have verified feasibility via ``min_share_sum``.
    """
    n_over_g = np.asarray(n_over_g, dtype=float)
    rate_bps = np.broadcast_to(np.asarray(rate_bps, dtype=float), n_over_g.shape)
    nb = n_over_g.shape[0]
    p0, m, ps, pmax = pm.p0_watts, pm.slope, pm.ps_watts, pm.pmax_watts
    dp = p0 - ps

    active = rate_bps > 0.0
    coef = rate_bps / np.asarray(bandwidth_hz, dtype=float)
    mu_min = coef / np.log2(1.0 + pmax / n_over_g)
    # feasibility slack can leave a lone minimum share a hair above 1
    hi0 = np.maximum(mu_min, 1.0)
    x_lo = coef / np.where(mu_min > 0.0, mu_min, 1.0)
    marg_lo = _load_marginal(n_over_g, x_lo)
    marg_hi = _load_marginal(n_over_g, coef / hi0)

    def shares_at(lam_col):
        # per-link root of  dp + m * marginal(mu) = -lambda  on [mu_min, 1];
        # monotone marginal, so ends pin the share when the root falls outside
        rhs = -(lam_col + dp) / m
        pin_lo = marg_lo >= rhs
        pin_hi = marg_hi <= rhs
        lo = np.where(pin_hi & ~pin_lo, hi0, mu_min)
        hi = np.where(pin_lo, mu_min, hi0)
        lo = np.where(active, lo, 0.0)
        hi = np.where(active, hi, 0.0)
        done = (hi - lo) <= MU_RTOL * lo
        for _ in range(_MAX_INNER_ITERATIONS):
            if done.all():
                break
            mid = 0.5 * (lo + hi)
            x = coef / np.where(mid > 0.0, mid, 1.0)
            below = _load_marginal(n_over_g, x) < rhs
            step = ~done
            lo = np.where(step & below, mid, lo)
            hi = np.where(step & ~below, mid, hi)
            done = (hi - lo) <= MU_RTOL * lo
        return 0.5 * (lo + hi)

    relaxed = shares_at(np.zeros((nb, 1)))
    s0 = relaxed.sum(axis=1)
    saturated = s0 > 1.0

    lam = np.zeros(nb)
    converged = np.ones(nb, dtype=bool)
    if saturated.any():
        # steepest pinned marginal bounds the useful multiplier range
        lam_hi = np.where(active, -(dp + m * marg_lo), -np.inf).max(axis=1)
        lam_hi = np.maximum(lam_hi, 0.0)
        lo_l = np.zeros(nb)
        hi_l = lam_hi
        searching = saturated.copy()
        for _ in range(MAX_OUTER_ITERATIONS):
            if not searching.any():
                break
            mid_l = 0.5 * (lo_l + hi_l)
            probe = np.where(searching, mid_l, lam)
            s = shares_at(probe[:, None]).sum(axis=1)
            ok = searching & (np.abs(s - 1.0) <= SUM_ATOL)
            lam = np.where(ok, mid_l, lam)
            searching &= ~ok
            above = s > 1.0
            lo_l = np.where(searching & above, mid_l, lo_l)
            hi_l = np.where(searching & ~above, mid_l, hi_l)
        if searching.any():
            # iteration cap: keep the bracket end on the feasible side
            lam = np.where(searching, hi_l, lam)
            converged &= ~searching

    mu = shares_at(lam[:, None])
    s = mu.sum(axis=1)
    # saturated frames: project the SUM_ATOL-scale residual onto the simplex
    # so the reported point is exactly feasible.  The residual is split in
    # proportion to each link's slack above its minimum share, which keeps
    # cap-pinned links exactly pinned (their transmit power must not cross
    # the cap) and makes objectives comparable across schemes at 1e-9 W.
    adjust = saturated & converged
    slack = np.where(active, mu - mu_min, 0.0)
    slack_sum = slack.sum(axis=1)
    weighted = adjust & (slack_sum > 0.0)
    shift = np.where(
        weighted, (s - 1.0) / np.where(slack_sum > 0.0, slack_sum, 1.0), 0.0
    )
    mu = mu - slack * shift[:, None]
    # every link pinned at its minimum: fall back to a uniform projection
    scale = np.where(adjust & ~weighted, s, 1.0)
    mu = mu / scale[:, None]
    nu = np.where(saturated, 0.0, 1.0 - s)
    nu = np.where(saturated & ~converged, np.maximum(1.0 - s, 0.0), nu)

    x_fin = coef / np.where(mu > 0.0, mu, 1.0)
    ptx = np.where(active, n_over_g * (np.exp2(x_fin) - 1.0), 0.0)
    # root-finding slack may poke past the cap; clamp only inside tolerance
    ptx = np.where((ptx > pmax) & (ptx <= pmax * (1.0 + PMAX_RTOL)), pmax, ptx)
    objective = (mu * (p0 + m * ptx)).sum(axis=1) + nu * ps
    return {
        "mu": mu,
        "nu": nu,
        "ptx": ptx,
        "objective": objective,
        "multiplier": lam,
        "converged": converged,
    }


def fixed_power_objectives(share_sum, pm: PowerModelParams):
    """Objectives of the two cap-power schemes for given share sums.

    Returns ``(sleep_idle, standby_idle)``: serving every link at the power
    cap for its minimum share, with the remaining frame either asleep
    (sleep-only scheme) or idling at stand-by (bandwidth adaptation).
    Accepts scalars or arrays.
    """
    at_cap = share_sum * (pm.p0_watts + pm.slope * pm.pmax_watts)
    idle = np.maximum(1.0 - share_sum, 0.0)
    return at_cap + idle * pm.ps_watts, at_cap + idle * pm.p0_watts


# ----------------------------------------------------------------------
# single-instance entry points


def _pack(links):
    n_over_g = np.array([[lk.noise_watts / lk.gain for lk in links]])
    rates = np.array([[lk.rate_target_bps for lk in links]])
    bandwidth = np.array([[lk.bandwidth_hz for lk in links]])
    return n_over_g, rates, bandwidth


def _check_feasible(n_over_g, rates, bandwidth, pmax_watts) -> float:
    total = float(min_share_sum(n_over_g, rates, bandwidth, pmax_watts)[0])
    if total > 1.0 + FEASIBILITY_SLACK:
        raise InfeasibleRates(
            f"minimum shares sum to {total:.6g} > 1; targets unreachable at the power cap"
        )
    return total


def _allocation_from_batch(result, scheme: SchemeKind) -> Allocation:
    return Allocation(
        mu=tuple(float(v) for v in result["mu"][0]),
        nu=float(result["nu"][0]),
        ptx=tuple(float(v) for v in result["ptx"][0]),
        objective_watts=float(result["objective"][0]),
        scheme=scheme,
        converged=bool(result["converged"][0]),
        multiplier=float(result["multiplier"][0]),
    )


def solve_prais(links, pm: PowerModelParams) -> Allocation:
    """Jointly optimal time shares, transmit powers and sleep share.

    Global minimizer of the frame-average supply power; its objective is a
    lower bound for every other scheme on the same links.

    Raises
    ------
    InfeasibleRates
        If the targets cannot be met even with the whole frame at the
        transmit power cap.
    """
    n_over_g, rates, bandwidth = _pack(links)
    _check_feasible(n_over_g, rates, bandwidth, pm.pmax_watts)
    result = solve_shared_frame(n_over_g, rates, bandwidth, pm)
    return _allocation_from_batch(result, SchemeKind.PRAIS)


def solve_pc_only(links, pm: PowerModelParams) -> Allocation:
    """Power control without sleep: solve with the sleep level at stand-by.

    The objective is reported under that modified model, so idle time costs
    the full stand-by power.
    """
    n_over_g, rates, bandwidth = _pack(links)
    _check_feasible(n_over_g, rates, bandwidth, pm.pmax_watts)
    result = solve_shared_frame(n_over_g, rates, bandwidth, without_sleep(pm))
    return _allocation_from_batch(result, SchemeKind.PC_ONLY)


def solve_dtx_only(links, pm: PowerModelParams) -> Allocation:
    """Serve every link at the power cap, then sleep the rest of the frame."""
    n_over_g, rates, bandwidth = _pack(links)
    _check_feasible(n_over_g, rates, bandwidth, pm.pmax_watts)
    coef = rates / bandwidth
    mu_min = coef / np.log2(1.0 + pm.pmax_watts / n_over_g)
    ptx = np.where(rates > 0.0, pm.pmax_watts, 0.0)
    share_sum = float(mu_min.sum())
    objective, _ = fixed_power_objectives(share_sum, pm)
    return Allocation(
        mu=tuple(float(v) for v in mu_min[0]),
        nu=max(0.0, 1.0 - share_sum),
        ptx=tuple(float(v) for v in ptx[0]),
        objective_watts=float(objective),
        scheme=SchemeKind.DTX_ONLY,
    )


def solve_bandwidth_adaptation(links, pm: PowerModelParams) -> Allocation:
    """Cap-power shares with idle time charged at stand-by.

    Reference scheme: the transmitter never sleeps, so the frame fraction
    not spent serving links costs ``p0``.  See the module docstring for why
    the frequency-domain reading (permanent per-user band fractions at
    proportional power) gives the identical objective.
    """
    n_over_g, rates, bandwidth = _pack(links)
    _check_feasible(n_over_g, rates, bandwidth, pm.pmax_watts)
    coef = rates / bandwidth
    mu_min = coef / np.log2(1.0 + pm.pmax_watts / n_over_g)
    ptx = np.where(rates > 0.0, pm.pmax_watts, 0.0)
    share_sum = float(mu_min.sum())
    _, objective = fixed_power_objectives(share_sum, pm)
    return Allocation(
        mu=tuple(float(v) for v in mu_min[0]),
        nu=max(0.0, 1.0 - share_sum),
        ptx=tuple(float(v) for v in ptx[0]),
        objective_watts=float(objective),
        scheme=SchemeKind.BANDWIDTH_ADAPTATION,
    )


def max_power_reference(pm: PowerModelParams) -> Allocation:
    """Upper reference: the whole frame transmits at the power cap."""
    return Allocation(
        mu=(1.0,),
        nu=0.0,
        ptx=(pm.pmax_watts,),
        objective_watts=pm.p0_watts + pm.slope * pm.pmax_watts,
        scheme=SchemeKind.MAX_POWER_REFERENCE,
    )


# ----------------------------------------------------------------------
# enumeration oracle


def brute_force_grid(links, pm: PowerModelParams, step: float) -> Allocation:
    """Exhaustive search over share vectors on a simplex grid.

    Verification oracle for up to three links: enumerates every combination
    of per-link shares on a grid of spacing ``step`` (each link's window is
    [its minimum share, 1], with both window ends included as candidates),
    keeps combinations whose shares fit into the frame, and returns the best
    grid point under the exact objective.
    """
    if not 1 <= len(links) <= 3:
        raise ValueError("oracle supports 1 to 3 links")
    if not 1e-4 <= step <= 1e-2:
        raise ValueError("step must lie in [1e-4, 1e-2]")
    n_over_g, rates, bandwidth = _pack(links)
    _check_feasible(n_over_g, rates, bandwidth, pm.pmax_watts)
    p0, m, ps, pmax = pm.p0_watts, pm.slope, pm.ps_watts, pm.pmax_watts
    budget = 1.0 + FEASIBILITY_SLACK

    cands = []
    costs = []  # reduced cost: mu*(p0 + m*P(mu)) - mu*ps; frame sleep adds ps
    for lk in links:
        if lk.rate_target_bps == 0.0:
            cands.append(np.array([0.0]))
            costs.append(np.array([0.0]))
            continue
        nog = lk.noise_watts / lk.gain
        coef = lk.rate_target_bps / lk.bandwidth_hz
        mu_lo = coef / float(np.log2(1.0 + pmax / nog))
        grid = np.arange(math.ceil(mu_lo / step), math.floor(1.0 / step) + 1) * step
        c = np.unique(np.concatenate([[mu_lo], grid[grid >= mu_lo], [max(1.0, mu_lo)]]))
        ptx = nog * (np.exp2(coef / c) - 1.0)
        cands.append(c)
        costs.append(c * (p0 + m * ptx) - c * ps)

    if len(links) == 1:
        feasible = cands[0] <= budget
        j = int(np.argmin(np.where(feasible, costs[0], np.inf)))
        best_idx = (j,)
    elif len(links) == 2:
        best_val = np.inf
        best_idx = (0, 0)
        chunk = 4096
        for start in range(0, cands[0].size, chunk):
            c1 = cands[0][start : start + chunk, None]
            tot = costs[0][start : start + chunk, None] + costs[1][None, :]
            tot = np.where(c1 + cands[1][None, :] <= budget, tot, np.inf)
            k = int(np.argmin(tot))
            i, j = divmod(k, cands[1].size)
            if tot[i, j] < best_val:
                best_val = tot[i, j]
                best_idx = (start + i, j)
    else:
        plane = costs[1][:, None] + costs[2][None, :]
        plane_sum = cands[1][:, None] + cands[2][None, :]
        best_val = np.inf
        best_idx = (0, 0, 0)
        for i in range(cands[0].size):
            tot = np.where(plane_sum <= budget - cands[0][i], plane, np.inf)
            k = int(np.argmin(tot))
            j, l = divmod(k, cands[2].size)
            val = costs[0][i] + tot[j, l]
            if val < best_val:
                best_val = val
                best_idx = (i, j, l)

    mu = tuple(float(cands[i][j]) for i, j in zip(range(len(links)), best_idx))
    ptx = []
    for share, lk in zip(mu, links):
        if lk.rate_target_bps == 0.0:
            ptx.append(0.0)
            continue
        nog = lk.noise_watts / lk.gain
        p = nog * float(np.exp2(lk.rate_target_bps / (lk.bandwidth_hz * share)) - 1.0)
        if pmax < p <= pmax * (1.0 + PMAX_RTOL):
            p = pmax
        ptx.append(p)
    nu = max(0.0, 1.0 - sum(mu))
    objective = sum(s * (p0 + m * p) for s, p in zip(mu, ptx)) + nu * ps
    return Allocation(
        mu=mu,
        nu=nu,
        ptx=tuple(ptx),
        objective_watts=objective,
        scheme=SchemeKind.PRAIS,
    )
