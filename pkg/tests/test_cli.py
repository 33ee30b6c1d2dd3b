import math

import pytest

from bspower.allocator import SchemeKind
from bspower.cli import (
    CSV_HEADER,
    emit_csv,
    format_records,
    main,
    parse_config,
)
from bspower.plotting import EmptySelection, emit_plot
from bspower.simulator import ConfigError, Scenario, SweepRecord, run_sweep

S = SchemeKind

SCENARIO_TEXT = """\
# demo
users = 3
iterations = 8
seed = 11
power_models = market2014,future
schemes = prais,bandwidth_adaptation
rates_mbps = 0.01,2,10
cell_radius_m = 200
"""

BASE_ARGS = ["--output-csv", "out.csv"]


def test_file_values_then_flag_overrides():
    scenario, cfg = parse_config(
        ["--scenario", "demo.txt", "--iterations", "100", *BASE_ARGS],
        scenario_text="iterations = 10000\nusers = 5\n",
    )
    assert scenario.iterations == 100  # flag wins
    assert scenario.users == 5  # file wins over default
    assert scenario.bandwidth_hz == 1e7  # default fills the rest
    assert cfg.output_csv_path == "out.csv"


def test_scenario_file_parsing():
    scenario, _ = parse_config(BASE_ARGS, scenario_text=SCENARIO_TEXT)
    assert scenario.users == 3
    assert scenario.power_models == ("market2014", "future")
    assert scenario.schemes == (S.PRAIS, S.BANDWIDTH_ADAPTATION)
    assert scenario.rates_bps == (1e4, 2e6, 1e7)
    assert scenario.channel.cell_radius_m == 200.0
    assert scenario.channel.carrier_ghz == 2.0


def test_rate_flag_unit_conversion():
    scenario, _ = parse_config(["--rate-mbps", "1,5,10", *BASE_ARGS])
    assert scenario.rates_bps == (1e6, 5e6, 1e7)


def test_missing_output_path_rejected():
    with pytest.raises(ConfigError):
        parse_config([])


def test_unknown_scenario_key_rejected():
    with pytest.raises(ConfigError) as err:
        parse_config(BASE_ARGS, scenario_text="users = 3\nbogus_key = 1\n")
    assert "line 2" in str(err.value)
    assert "bogus_key" in str(err.value)


def test_malformed_scenario_line_rejected():
    with pytest.raises(ConfigError):
        parse_config(BASE_ARGS, scenario_text="users 3\n")
    with pytest.raises(ConfigError):
        parse_config(BASE_ARGS, scenario_text="users = three\n")


def test_unknown_names_rejected():
    with pytest.raises(ConfigError):
        parse_config(["--power-model", "sota1999", *BASE_ARGS])
    with pytest.raises(ConfigError):
        parse_config(["--schemes", "prais,teleportation", *BASE_ARGS])
    with pytest.raises(ConfigError):
        parse_config(["--workers", "0", *BASE_ARGS])
    with pytest.raises(ConfigError):
        parse_config(["--sector-antenna-multiplier", "0", *BASE_ARGS])
    with pytest.raises(ConfigError):
        parse_config(["--no-such-flag", *BASE_ARGS])


# ----------------------------------------------------------------------
# CSV


def _rec(model, scheme, rate, mean=12.345678901, used=10):
    return SweepRecord(
        power_model=model,
        scheme=scheme,
        rate_bps=rate,
        mean_watts=mean,
        std_watts=1.23456789,
        ci95_watts=0.0123456789,
        infeasible_fraction=0.1,
        iterations_used=used,
    )


def test_csv_header_and_shape(tmp_path):
    path = tmp_path / "one.csv"
    emit_csv([_rec("market2014", S.PRAIS, 1e6)], path)
    lines = path.read_text().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3 and lines[2] == ""  # header + row + trailing LF
    assert "\r" not in path.read_text()


def test_csv_six_significant_digits_round_trip():
    row = format_records([_rec("market2014", S.PRAIS, 1234567.0)]).split("\n")[1]
    fields = row.split(",")
    assert fields[0] == "market2014"
    assert fields[1] == "prais"
    assert fields[2] == "1.23457e+06"
    assert fields[3] == "12.3457"
    assert float(fields[3]) == pytest.approx(12.345678901, rel=1e-5)
    assert fields[7] == "10"


def test_csv_sorted_and_deterministic():
    records = [
        _rec("sota2010", S.PRAIS, 2e6),
        _rec("market2014", S.PC_ONLY, 1e6),
        _rec("market2014", S.PC_ONLY, 5e5),
        _rec("market2014", S.DTX_ONLY, 1e6),
    ]
    text = format_records(records)
    assert text == format_records(list(reversed(records)))
    body = text.strip().split("\n")[1:]
    keys = [
        (f[0], f[1], float(f[2])) for f in (line.split(",") for line in body)
    ]
    assert keys == sorted(keys)


def test_csv_rejects_empty():
    with pytest.raises(ValueError):
        emit_csv([], "nowhere.csv")


def test_csv_nan_for_starved_points(tmp_path):
    rec = SweepRecord(
        power_model="m",
        scheme=S.PRAIS,
        rate_bps=1e6,
        mean_watts=float("nan"),
        std_watts=float("nan"),
        ci95_watts=float("nan"),
        infeasible_fraction=1.0,
        iterations_used=0,
    )
    path = tmp_path / "nan.csv"
    emit_csv([rec], path)
    assert ",nan," in path.read_text()


# ----------------------------------------------------------------------
# plot


@pytest.fixture(scope="module")
def small_records():
    sc = Scenario(
        users=3,
        iterations=10,
        seed=4,
        power_models=("market2014",),
        rates_bps=(1e4, 2e6, 6e6, 1e7),
    )
    return run_sweep(sc)


def test_plot_one_polyline_per_scheme(tmp_path, small_records):
    path = tmp_path / "chart.svg"
    emit_plot(small_records, "market2014", path)
    svg = path.read_text()
    assert svg.count("<polyline") == 5
    for scheme in S:
        assert f">{scheme.value}</text>" in svg
    assert "sleep" in svg and "stand-by" in svg


def test_plot_single_scheme(tmp_path, small_records):
    only = [r for r in small_records if r.scheme == S.PRAIS]
    path = tmp_path / "single.svg"
    emit_plot(only, "market2014", path)
    assert path.read_text().count("<polyline") == 1


def test_plot_data_respects_dominance(small_records):
    # the drawn curves come straight from the records; verify on the data
    prais = {r.rate_bps: r.mean_watts for r in small_records if r.scheme == S.PRAIS}
    ba = {
        r.rate_bps: r.mean_watts
        for r in small_records
        if r.scheme == S.BANDWIDTH_ADAPTATION
    }
    assert set(prais) == set(ba)
    for rate, value in prais.items():
        assert value <= ba[rate] + 1e-9


def test_plot_empty_selection(small_records):
    with pytest.raises(EmptySelection):
        emit_plot(small_records, "sota2010", "unused.svg")


# ----------------------------------------------------------------------
# full command runs


def _write_scenario(tmp_path):
    path = tmp_path / "scenario.txt"
    path.write_text(SCENARIO_TEXT)
    return str(path)


def test_main_success_and_byte_identical(tmp_path, capsys):
    scen = _write_scenario(tmp_path)
    csv_a = tmp_path / "a.csv"
    csv_b = tmp_path / "b.csv"
    assert main(["--scenario", scen, "--output-csv", str(csv_a)]) == 0
    assert main(
        ["--scenario", scen, "--output-csv", str(csv_b), "--workers", "2"]
    ) == 0
    assert csv_a.read_bytes() == csv_b.read_bytes()
    err = capsys.readouterr().err
    assert "# effective scenario" in err
    assert "rates_mbps = 0.01,2,10" in err


def test_main_writes_plots_per_model(tmp_path):
    scen = _write_scenario(tmp_path)
    rc = main(
        [
            "--scenario",
            scen,
            "--output-csv",
            str(tmp_path / "o.csv"),
            "--output-plot",
            str(tmp_path / "o.svg"),
        ]
    )
    assert rc == 0
    assert (tmp_path / "o_market2014.svg").exists()
    assert (tmp_path / "o_future.svg").exists()


def test_main_sector_multiplier_scales_report(tmp_path):
    scen = _write_scenario(tmp_path)
    plain = tmp_path / "plain.csv"
    scaled = tmp_path / "scaled.csv"
    assert main(["--scenario", scen, "--output-csv", str(plain)]) == 0
    assert (
        main(
            [
                "--scenario",
                scen,
                "--output-csv",
                str(scaled),
                "--sector-antenna-multiplier",
                "6",
            ]
        )
        == 0
    )
    row_plain = plain.read_text().split("\n")[1].split(",")
    row_scaled = scaled.read_text().split("\n")[1].split(",")
    assert float(row_scaled[3]) == pytest.approx(6.0 * float(row_plain[3]), rel=1e-5)
    assert row_scaled[7] == row_plain[7]  # iteration counts untouched


def test_main_exit_codes(tmp_path, capsys):
    scen = _write_scenario(tmp_path)
    assert main([]) == 2
    assert main(["--scenario", scen, "--output-csv", str(tmp_path / "x.csv"),
                 "--rate-mbps", "100"]) == 3
    assert math.isnan(
        float((tmp_path / "x.csv").read_text().split("\n")[1].split(",")[3])
    )
    assert main(["--scenario", scen, "--output-csv",
                 str(tmp_path / "no-such-dir" / "x.csv")]) == 4
    capsys.readouterr()
