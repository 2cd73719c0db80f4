import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

import lockdown_opt as lo
from lockdown_opt import charts, output
from lockdown_opt.configfile import format_sections, parse_sections
from lockdown_opt.errors import ConfigFormatError


@pytest.fixture(scope="module")
def small_report(exp1):
    grid = lo.TimeGrid(horizon=10.0, step=0.5)
    return lo.run_uncontrolled(exp1, grid)


@pytest.fixture(scope="module")
def single_node_report(exp1):
    return lo.run_uncontrolled(exp1, lo.TimeGrid(horizon=0.0, step=0.1))


# --- CSV ---------------------------------------------------------------------


def test_csv_row_count(small_report, tmp_path):
    path = tmp_path / "run.csv"
    output.write_timeseries_csv(small_report, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + small_report.grid.n_nodes * 3


def test_csv_row_count_full_grid(exp1_uncontrolled, tmp_path):
    """Default-grid run: header plus (steps + 1) rows per group."""
    report, _ = exp1_uncontrolled
    path = tmp_path / "full.csv"
    output.write_timeseries_csv(report, path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + (3650 + 1) * 3


def test_csv_two_nodes_one_group(tmp_path, exp2):
    grid = lo.TimeGrid(horizon=0.5, step=0.5)
    report = lo.run_uncontrolled(exp2, grid)
    path = tmp_path / "tiny.csv"
    output.write_timeseries_csv(report, path)
    text = path.read_text(encoding="utf-8")
    assert "\r" not in text
    assert len(text.splitlines()) == 3  # header + 2 rows


def test_csv_round_trip_bit_exact(small_report, tmp_path):
    path = tmp_path / "run.csv"
    output.write_timeseries_csv(small_report, path)
    times, groups, trajectory, schedule = output.read_timeseries_csv(path)
    assert groups == small_report.group_names
    np.testing.assert_array_equal(times, small_report.grid.nodes())
    np.testing.assert_array_equal(trajectory, small_report.trajectory)
    np.testing.assert_array_equal(schedule, small_report.schedule)


def test_csv_header_mismatch_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n", encoding="utf-8")
    with pytest.raises(ValueError):
        output.read_timeseries_csv(path)


# --- JSON summary ------------------------------------------------------------


def test_summary_round_trip(small_report, tmp_path):
    path = tmp_path / "run.json"
    output.write_summary_json(small_report, path)
    view = output.load_summary(path)
    assert view.scenario == small_report.scenario
    assert view.calibration == small_report.calibration
    assert view.objective == small_report.objective
    assert view.peak_total_infectious == small_report.peak_total_infectious
    assert view.final_quarantined_persons == small_report.final_quarantined_persons
    assert view.final_quarantined_share == small_report.final_quarantined_share


def test_summary_feeds_compare(small_report, tmp_path):
    path = tmp_path / "run.json"
    output.write_summary_json(small_report, path)
    view = output.load_summary(path)
    result = lo.compare([small_report, view])
    assert result.pairs[0].objective_ratio == 1.0


def test_summary_includes_structure(exp1, tmp_path):
    config = lo.SolverConfig(grid=lo.TimeGrid(horizon=10.0, step=0.5))
    report = lo.run_controlled(exp1, config)
    path = tmp_path / "ctrl.json"
    output.write_summary_json(report, path)
    text = path.read_text(encoding="utf-8")
    assert '"t_full_end"' in text and '"t_zero_start"' in text


# --- SVG charts ----------------------------------------------------------------


def test_svg_is_valid_xml_and_deterministic(small_report, tmp_path, exp1):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    charts.write_chart_svg(small_report, a, exp1.cost, exp1.params)
    charts.write_chart_svg(small_report, b, exp1.cost, exp1.params)
    assert a.read_bytes() == b.read_bytes()
    root = ET.fromstring(a.read_text(encoding="utf-8"))
    assert root.tag.endswith("svg")
    assert root.get("viewBox") == "0 0 960 540"


def test_svg_single_node_axes_only(single_node_report, tmp_path, exp1):
    path = tmp_path / "empty.svg"
    charts.write_chart_svg(single_node_report, path, exp1.cost, exp1.params)
    text = path.read_text(encoding="utf-8")
    ET.fromstring(text)
    assert "<polyline" not in text
    assert "<line" in text


def _polyline_points(text, ident):
    match = re.search(rf'<polyline id="{ident}"[^>]* points="([^"]*)"', text)
    assert match, f"polyline {ident} not found"
    pairs = [p.split(",") for p in match.group(1).split()]
    return np.array([[float(x), float(y)] for x, y in pairs])


def test_svg_curve_ids_present(small_report, tmp_path, exp1):
    path = tmp_path / "run.svg"
    charts.write_chart_svg(small_report, path, exp1.cost, exp1.params)
    text = path.read_text(encoding="utf-8")
    for group in small_report.group_names:
        for comp in "SQAIRD":
            assert f'id="compartment-{comp}-{group}"' in text
        assert f'id="control-{group}"' in text
    assert 'id="cumulative-cost"' in text


def test_svg_control_curve_flat_zero_after_switch_off(exp1, tmp_path):
    """The rendered control polylines must sit on the axis after each
    group's extracted switch-off time."""
    config = lo.SolverConfig(grid=lo.TimeGrid(horizon=60.0, step=0.25))
    report = lo.run_controlled(exp1, config)
    path = tmp_path / "ctrl.svg"
    charts.write_chart_svg(report, path, exp1.cost, exp1.params)
    text = path.read_text(encoding="utf-8")
    times = report.grid.nodes()
    baseline = charts.HEIGHT - charts.MARGIN_BOTTOM
    for g, group in enumerate(report.group_names):
        points = _polyline_points(text, f"control-{group}")
        t_off = report.structure.t_zero_start[g]
        if t_off >= report.grid.horizon:
            continue
        tail = points[times > t_off + 1e-9]
        assert tail.size, f"no samples after switch-off for {group}"
        assert np.all(baseline - tail[:, 1] <= 1.0), f"control not flat for {group}"


def test_cumulative_cost_series_ends_at_objective(small_report, exp1):
    series = charts.cumulative_cost_series(small_report, exp1.cost, exp1.params)
    assert series[-1] == pytest.approx(small_report.objective, rel=1e-12)
    assert np.all(np.diff(series) >= -1e-9)


# --- config text format --------------------------------------------------------


def test_config_format_round_trip():
    sections = {
        "alpha": {"x": "1.5", "y.z": "-2.0"},
        "beta": {"name": "exp1"},
    }
    assert parse_sections(format_sections(sections)) == sections


def test_config_format_comments_and_blanks():
    text = "# comment\n\n[s]\n# another\nkey = 3\n"
    assert parse_sections(text) == {"s": {"key": "3"}}


def test_config_format_errors():
    with pytest.raises(ConfigFormatError):
        parse_sections("key = 1\n")  # before any section
    with pytest.raises(ConfigFormatError):
        parse_sections("[s]\nnot a pair\n")
    with pytest.raises(ConfigFormatError):
        parse_sections("[]\n")
    with pytest.raises(ConfigFormatError):
        parse_sections("[s]\n= 3\n")
