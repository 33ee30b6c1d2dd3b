"""Command line front end: scenario files, flag overrides, CSV and charts.

Scenario files are flat ``key = value`` text (lists comma-separated, blank
lines and ``#`` comments ignored).  Flags override file values, defaults
fill the rest, and the effective scenario is echoed to stderr so every run
is self-documenting.

Exit codes: 0 success, 2 configuration error, 3 all iterations infeasible at
some sweep point (outputs are still written), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from .allocator import SchemeKind
from .channel import ChannelConfig
from .plotting import emit_plot
from .power_model import UnknownPreset, preset, preset_names
from .simulator import ConfigError, Scenario, SweepRecord, run_sweep

__all__ = ["CliConfig", "parse_config", "emit_csv", "format_records", "main", "entry"]

log = logging.getLogger("bspower")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

CSV_HEADER = (
    "power_model,scheme,rate_bps,mean_watts,std_watts,ci95_watts,"
    "infeasible_fraction,iterations_used"
)

_INT_KEYS = ("users", "iterations", "seed")
_FLOAT_KEYS = (
    "bandwidth_hz",
    "temperature_k",
    "pmax_dbm",
    "cell_radius_m",
    "carrier_ghz",
    "shadowing_sigma_db",
    "min_distance_m",
)
_LIST_KEYS = ("power_models", "schemes", "rates_mbps")
SCENARIO_KEYS = _INT_KEYS + _FLOAT_KEYS + _LIST_KEYS


@dataclass(frozen=True)
class CliConfig:
    """Run options that are not part of the scenario itself."""

    scenario_path: str | None
    output_csv_path: str
    output_plot_path: str | None
    sector_antenna_multiplier: float
    workers: int
    verbosity: int


class _Parser(argparse.ArgumentParser):
    # argparse normally exits the process; surface a ConfigError instead so
    # the caller owns the exit code
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    p = _Parser(
        prog="bspower",
        description=(
            "Monte Carlo sweep of minimum base-station supply power: joint "
            "time-share/transmit-power/sleep allocation against reference "
            "schemes, per power model and per-user rate."
        ),
    )
    p.add_argument("--scenario", metavar="FILE", help="scenario file (key = value)")
    p.add_argument("--output-csv", metavar="FILE", help="destination CSV (required)")
    p.add_argument(
        "--output-plot",
        metavar="FILE",
        help="SVG chart; with several power models the model name is "
        "appended to the file stem",
    )
    p.add_argument("--users", type=int)
    p.add_argument("--iterations", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--bandwidth-hz", type=float)
    p.add_argument("--temperature-k", type=float)
    p.add_argument("--pmax-dbm", type=float)
    p.add_argument(
        "--power-model",
        metavar="NAMES",
        help=f"comma list from: {', '.join(preset_names())}",
    )
    p.add_argument(
        "--schemes",
        metavar="NAMES",
        help=f"comma list from: {', '.join(s.value for s in SchemeKind)}",
    )
    p.add_argument("--rate-mbps", metavar="LIST", help="per-user targets in Mbit/s")
    p.add_argument("--cell-radius-m", type=float)
    p.add_argument("--carrier-ghz", type=float)
    p.add_argument("--shadowing-sigma-db", type=float)
    p.add_argument("--min-distance-m", type=float)
    p.add_argument(
        "--sector-antenna-multiplier",
        type=float,
        default=1.0,
        help="scale reported watts by this factor (e.g. 6 for a three-sector, "
        "two-antenna site); never affects the optimization",
    )
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def _parse_scenario_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"scenario line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in SCENARIO_KEYS:
            raise ConfigError(f"scenario line {lineno}: unknown key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "rates_mbps":
                values[key] = [float(v) for v in value.split(",")]
            else:
                values[key] = [v.strip() for v in value.split(",")]
        except ValueError as exc:
            raise ConfigError(f"scenario line {lineno}: {exc}") from None
    return values


def _merge_flag(values: dict, key: str, flag_value):
    if flag_value is not None:
        values[key] = flag_value


def parse_config(argv, scenario_text: str | None = None):
    """Resolve argv (plus an optional scenario file) into a runnable setup.

    File values are loaded first and flags override them.  ``scenario_text``
    substitutes for reading the file from disk.  Returns
    ``(Scenario, CliConfig)``; every problem raises ConfigError.
    """
    args = _build_parser().parse_args(argv)

    if args.scenario is not None and scenario_text is None:
        try:
            scenario_text = Path(args.scenario).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read scenario file: {exc}") from None
    values = _parse_scenario_text(scenario_text) if scenario_text else {}

    _merge_flag(values, "users", args.users)
    _merge_flag(values, "iterations", args.iterations)
    _merge_flag(values, "seed", args.seed)
    _merge_flag(values, "bandwidth_hz", args.bandwidth_hz)
    _merge_flag(values, "temperature_k", args.temperature_k)
    _merge_flag(values, "pmax_dbm", args.pmax_dbm)
    _merge_flag(values, "cell_radius_m", args.cell_radius_m)
    _merge_flag(values, "carrier_ghz", args.carrier_ghz)
    _merge_flag(values, "shadowing_sigma_db", args.shadowing_sigma_db)
    _merge_flag(values, "min_distance_m", args.min_distance_m)
    if args.power_model is not None:
        values["power_models"] = [v.strip() for v in args.power_model.split(",")]
    if args.schemes is not None:
        values["schemes"] = [v.strip() for v in args.schemes.split(",")]
    if args.rate_mbps is not None:
        try:
            values["rates_mbps"] = [float(v) for v in args.rate_mbps.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--rate-mbps: {exc}") from None

    if args.output_csv is None:
        raise ConfigError("no output path (--output-csv) given")
    if args.sector_antenna_multiplier <= 0.0:
        raise ConfigError("--sector-antenna-multiplier must be positive")
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")

    for name in values.get("power_models", []):
        try:
            preset(name)
        except UnknownPreset as exc:
            raise ConfigError(str(exc)) from None
    schemes = values.get("schemes")
    if schemes is not None:
        try:
            values["schemes"] = tuple(SchemeKind(s) for s in schemes)
        except ValueError as exc:
            raise ConfigError(f"unknown scheme: {exc}") from None

    channel_kwargs = {
        k: values.pop(k)
        for k in ("cell_radius_m", "carrier_ghz", "shadowing_sigma_db", "min_distance_m")
        if k in values
    }
    rates_mbps = values.pop("rates_mbps", None)
    scenario_kwargs = dict(values)
    if "power_models" in scenario_kwargs:
        scenario_kwargs["power_models"] = tuple(scenario_kwargs["power_models"])
    if rates_mbps is not None:
        scenario_kwargs["rates_bps"] = tuple(r * 1e6 for r in rates_mbps)
    try:
        channel = ChannelConfig(**channel_kwargs)
        scenario = Scenario(channel=channel, **scenario_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    cfg = CliConfig(
        scenario_path=args.scenario,
        output_csv_path=args.output_csv,
        output_plot_path=args.output_plot,
        sector_antenna_multiplier=args.sector_antenna_multiplier,
        workers=args.workers,
        verbosity=args.verbose,
    )
    return scenario, cfg


def _echo_scenario(scenario: Scenario, cfg: CliConfig, stream) -> None:
    # provenance dump, itself valid scenario-file syntax
    print("# effective scenario", file=stream)
    print(f"users = {scenario.users}", file=stream)
    print(f"iterations = {scenario.iterations}", file=stream)
    print(f"seed = {scenario.seed}", file=stream)
    print(f"bandwidth_hz = {scenario.bandwidth_hz:.10g}", file=stream)
    print(f"temperature_k = {scenario.temperature_k:.10g}", file=stream)
    print(f"pmax_dbm = {scenario.pmax_dbm:.10g}", file=stream)
    print(f"power_models = {','.join(scenario.power_models)}", file=stream)
    print(f"schemes = {','.join(s.value for s in scenario.schemes)}", file=stream)
    print(
        f"rates_mbps = {','.join(f'{r / 1e6:.10g}' for r in scenario.rates_bps)}",
        file=stream,
    )
    ch = scenario.channel
    print(f"cell_radius_m = {ch.cell_radius_m:.10g}", file=stream)
    print(f"carrier_ghz = {ch.carrier_ghz:.10g}", file=stream)
    print(f"shadowing_sigma_db = {ch.shadowing_sigma_db:.10g}", file=stream)
    print(f"min_distance_m = {ch.min_distance_m:.10g}", file=stream)
    print(
        f"# workers = {cfg.workers}, "
        f"sector_antenna_multiplier = {cfg.sector_antenna_multiplier:.10g}",
        file=stream,
    )


def format_records(records) -> str:
    """CSV text for sweep records: fixed header, 6 significant digits, LF."""
    rows = [CSV_HEADER]
    ordered = sorted(records, key=lambda r: (r.power_model, r.scheme.value, r.rate_bps))
    for r in ordered:
        rows.append(
            ",".join(
                (
                    r.power_model,
                    r.scheme.value,
                    f"{r.rate_bps:.6g}",
                    f"{r.mean_watts:.6g}",
                    f"{r.std_watts:.6g}",
                    f"{r.ci95_watts:.6g}",
                    f"{r.infeasible_fraction:.6g}",
                    str(r.iterations_used),
                )
            )
        )
    return "\n".join(rows) + "\n"


def emit_csv(records, path) -> None:
    """Write sweep records as CSV; raises on empty input or write failure."""
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="\n") as fh:
        fh.write(format_records(records))


def _scale_record(r: SweepRecord, k: float) -> SweepRecord:
    return replace(
        r,
        mean_watts=r.mean_watts * k,
        std_watts=r.std_watts * k,
        ci95_watts=r.ci95_watts * k,
    )


def _plot_path(base: str, model: str, n_models: int) -> str:
    if n_models == 1:
        return base
    p = Path(base)
    return str(p.with_name(f"{p.stem}_{model}{p.suffix or '.svg'}"))


def main(argv=None) -> int:
    try:
        scenario, cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except ConfigError as exc:
        print(f"bspower: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    level = logging.WARNING - 10 * min(cfg.verbosity, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(message)s")
    _echo_scenario(scenario, cfg, sys.stderr)

    try:
        records = run_sweep(scenario, workers=cfg.workers)
    except ConfigError as exc:
        print(f"bspower: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.info("computed %d records", len(records))

    if cfg.sector_antenna_multiplier != 1.0:
        reported = [_scale_record(r, cfg.sector_antenna_multiplier) for r in records]
    else:
        reported = records

    try:
        emit_csv(reported, cfg.output_csv_path)
        log.info("wrote %s", cfg.output_csv_path)
        if cfg.output_plot_path is not None:
            for model in scenario.power_models:
                path = _plot_path(
                    cfg.output_plot_path, model, len(scenario.power_models)
                )
                emit_plot(reported, model, path)
                log.info("wrote %s", path)
    except OSError as exc:
        print(f"bspower: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    starved = sorted(
        {(r.power_model, r.rate_bps) for r in records if r.iterations_used == 0}
    )
    if starved:
        for model, rate in starved:
            print(
                f"bspower: every iteration infeasible for {model} at "
                f"{rate / 1e6:.6g} Mbit/s",
                file=sys.stderr,
            )
        return EXIT_INFEASIBLE
    return EXIT_OK


def entry() -> None:
    sys.exit(main())
