"""Static SVG charts for scenario reports, rendered without dependencies.

One 960x540 SVG per report with three panels: compartment fractions per
group, the lockdown schedule, and the cumulative cost (running cost
accrued by trapezoid plus death costs charged as they occur, so the curve
ends at the objective value).  Output is deterministic: fixed layout,
fixed palette, fixed decimal formatting, no timestamps.  Every curve is a
``<polyline>`` with a stable ``id`` so tests and downstream tooling can
read the path data back numerically.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .costs import running_cost_series
from .dynamics import Compartment
from .scenarios import ScenarioReport

__all__ = ["write_chart_svg", "cumulative_cost_series"]

WIDTH, HEIGHT = 960, 540
MARGIN_TOP, MARGIN_BOTTOM, MARGIN_SIDE = 40, 30, 45
PANEL_GAP = 30

COMPARTMENT_COLORS = {
    "S": "#1f77b4",
    "Q": "#ff7f0e",
    "A": "#9467bd",
    "I": "#d62728",
    "R": "#2ca02c",
    "D": "#7f7f7f",
}
GROUP_DASHES = ["none", "6,3", "2,2", "8,2,2,2", "4,4", "1,3"]


def cumulative_cost_series(report: ScenarioReport, cost, params) -> np.ndarray:
    """Cost accrued up to each node: trapezoidal running cost plus the
    death cost of everyone dead so far."""
    running = running_cost_series(report.trajectory, report.schedule, cost, params)
    accrued = np.zeros(len(running))
    if len(running) > 1:
        h = report.grid.step
        accrued[1:] = np.cumsum(0.5 * h * (running[1:] + running[:-1]))
    deaths = (
        cost.population * cost.death_cost * report.trajectory[:, Compartment.D, :]
    ).sum(axis=1)
    return accrued + deaths


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _polyline(xs, ys, color: str, ident: str, dash: str = "none") -> str:
    points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
    dash_attr = "" if dash == "none" else f' stroke-dasharray="{dash}"'
    return (
        f'<polyline id="{ident}" fill="none" stroke="{color}" '
        f'stroke-width="1.2"{dash_attr} points="{points}" />'
    )


class _Panel:
    """Maps data coordinates into one panel's pixel box."""

    def __init__(self, index: int, n_panels: int, title: str):
        panel_width = (WIDTH - 2 * MARGIN_SIDE - (n_panels - 1) * PANEL_GAP) / n_panels
        self.x0 = MARGIN_SIDE + index * (panel_width + PANEL_GAP)
        self.x1 = self.x0 + panel_width
        self.y0 = MARGIN_TOP
        self.y1 = HEIGHT - MARGIN_BOTTOM
        self.title = title
        self.t_max = 1.0
        self.v_max = 1.0

    def set_ranges(self, t_max: float, v_max: float):
        self.t_max = t_max if t_max > 0 else 1.0
        self.v_max = v_max if v_max > 0 else 1.0

    def px(self, t):
        return self.x0 + (np.asarray(t) / self.t_max) * (self.x1 - self.x0)

    def py(self, v):
        return self.y1 - (np.asarray(v) / self.v_max) * (self.y1 - self.y0)

    def frame(self) -> list[str]:
        return [
            f'<text x="{_fmt((self.x0 + self.x1) / 2)}" y="{MARGIN_TOP - 14}" '
            f'text-anchor="middle" font-size="13">{self.title}</text>',
            f'<line x1="{_fmt(self.x0)}" y1="{_fmt(self.y1)}" x2="{_fmt(self.x1)}" '
            f'y2="{_fmt(self.y1)}" stroke="#000" stroke-width="1" />',
            f'<line x1="{_fmt(self.x0)}" y1="{_fmt(self.y0)}" x2="{_fmt(self.x0)}" '
            f'y2="{_fmt(self.y1)}" stroke="#000" stroke-width="1" />',
            f'<text x="{_fmt(self.x0)}" y="{_fmt(self.y1 + 16)}" '
            f'text-anchor="middle" font-size="10">0</text>',
            f'<text x="{_fmt(self.x1)}" y="{_fmt(self.y1 + 16)}" '
            f'text-anchor="middle" font-size="10">{self.t_max:g}</text>',
            f'<text x="{_fmt(self.x0 - 4)}" y="{_fmt(self.y0 + 4)}" '
            f'text-anchor="end" font-size="10">{self.v_max:.3g}</text>',
        ]


def write_chart_svg(report: ScenarioReport, path, cost=None, params=None) -> None:
    """Render the report into a deterministic standalone SVG.

    ``cost`` and ``params`` enable the cumulative-cost panel; without them
    the panel shows only axes (as it does for single-node trajectories).
    """
    times = report.grid.nodes()
    drawable = len(times) >= 2
    horizon = float(times[-1]) if drawable else 1.0

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff" />',
        f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-size="15">'
        f"{report.calibration} / {report.scenario}</text>",
    ]

    compartments = _Panel(0, 3, "compartment fractions")
    compartments.set_ranges(
        horizon, float(report.trajectory.max()) if drawable else 1.0
    )
    parts.extend(compartments.frame())
    if drawable:
        for comp in Compartment:
            for g, group in enumerate(report.group_names):
                series = report.trajectory[:, comp, g]
                parts.append(
                    _polyline(
                        compartments.px(times),
                        compartments.py(series),
                        COMPARTMENT_COLORS[comp.name],
                        f"compartment-{comp.name}-{group}",
                        GROUP_DASHES[g % len(GROUP_DASHES)],
                    )
                )

    control = _Panel(1, 3, "lockdown schedule u")
    control.set_ranges(horizon, float(max(report.schedule.max(), 1e-9)))
    parts.extend(control.frame())
    if drawable:
        for g, group in enumerate(report.group_names):
            parts.append(
                _polyline(
                    control.px(times),
                    control.py(report.schedule[:, g]),
                    "#d62728",
                    f"control-{group}",
                    GROUP_DASHES[g % len(GROUP_DASHES)],
                )
            )

    cumulative = _Panel(2, 3, "cumulative cost")
    if drawable and cost is not None and params is not None:
        series = cumulative_cost_series(report, cost, params)
        cumulative.set_ranges(horizon, float(max(series.max(), 1e-9)))
        parts.extend(cumulative.frame())
        parts.append(
            _polyline(
                cumulative.px(times),
                cumulative.py(series),
                "#2ca02c",
                "cumulative-cost",
            )
        )
    else:
        cumulative.set_ranges(horizon, 1.0)
        parts.extend(cumulative.frame())

    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8", newline="\n")
