"""Deterministic synthetic multi-line chart generation.

Each generated corpus sample exhibits one structural pattern: crossings,
occlusions, crowding, an easy well-separated layout, or unconstrained
random walks.  Pattern contracts are post-checked on every sample; a
failing draw is regenerated from a derived sub-seed (bounded retries).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .core import AxisCalibration, Box, ChartSample, PointSeries, interpolate_at
from .errors import ContractViolation, GenerationError
from .rasterize import StrokeStyle, render_chart

__all__ = [
    "ChartSpec",
    "PATTERNS",
    "PROFILES",
    "generate_spec",
    "generate_series",
    "generate_sample",
    "plot_area_for",
    "axis_calibration_for",
]

PATTERNS = ("random", "crossing", "occlusion", "crowding", "easy")
PROFILES = ("easy", "easy-shared", "hard", "mixed")

MAX_RETRIES = 20

PALETTE: tuple[tuple[int, int, int], ...] = (
    (220, 40, 40),
    (40, 60, 220),
    (30, 160, 60),
    (240, 150, 30),
    (150, 60, 200),
    (20, 170, 170),
    (220, 60, 160),
    (150, 150, 30),
    (140, 90, 50),
    (60, 30, 140),
)


@dataclass(frozen=True)
class ChartSpec:
    """Fully deterministic recipe for one chart sample."""

    seed: int
    width: int = 400
    height: int = 300
    n_lines: int = 3
    pattern: str = "random"
    styles: tuple[StrokeStyle, ...] = ()
    grid: bool = False
    color_policy: str = "distinct"
    n_points: int = 8

    def __post_init__(self):
        if not 1 <= self.n_lines <= 10:
            raise ContractViolation("n_lines must be in 1..10")
        if self.pattern not in PATTERNS:
            raise ContractViolation(f"unknown pattern {self.pattern!r}")
        if self.color_policy not in ("distinct", "shared", "grayscale"):
            raise ContractViolation(f"unknown color policy {self.color_policy!r}")
        if not 4 <= self.n_points <= 50:
            raise ContractViolation("n_points must be in 4..50")
        if len(self.styles) != self.n_lines:
            raise ContractViolation("styles must list one StrokeStyle per line")


def plot_area_for(spec: ChartSpec) -> Box:
    """Plot box with a 10% margin on every side."""
    mx = round(spec.width * 0.10)
    my = round(spec.height * 0.10)
    return Box(mx, my, spec.width - 1 - mx, spec.height - 1 - my)


def axis_calibration_for(spec: ChartSpec) -> AxisCalibration:
    """Nominal data units: x spans 0..10 and y spans 0..1 across the plot box."""
    box = plot_area_for(spec)
    return AxisCalibration(
        x_refs=((box.x0, 0.0), (box.x1, 10.0)),
        y_refs=((box.y1, 0.0), (box.y0, 1.0)),
    )


def _colors_for(rng: np.random.Generator, n: int, policy: str):
    if policy == "grayscale":
        levels = np.linspace(40, 200, n).round().astype(int)
        return [(int(v), int(v), int(v)) for v in levels]
    order = rng.permutation(len(PALETTE))
    colors = [PALETTE[i] for i in order[:n]]
    if policy == "shared" and n >= 2:
        colors[1] = colors[0]  # defeat color-only segmentation on one pair
    return colors


def generate_spec(seed: int, difficulty_profile: str = "mixed") -> ChartSpec:
    """Derive a deterministic ChartSpec from (seed, profile)."""
    if difficulty_profile not in PROFILES:
        raise ContractViolation(f"unknown profile {difficulty_profile!r}")
    rng = np.random.default_rng([seed, zlib.crc32(difficulty_profile.encode())])
    if difficulty_profile == "easy":
        pattern = "easy"
        n_lines = int(rng.integers(1, 4))
        policy = "distinct"
        grid = bool(rng.integers(0, 2))
        dashed = False
    elif difficulty_profile == "easy-shared":
        pattern = "easy"
        n_lines = int(rng.integers(2, 4))
        policy = "shared"
        grid = bool(rng.integers(0, 2))
        dashed = False
    elif difficulty_profile == "hard":
        pattern = str(rng.choice(["crossing", "occlusion", "crowding"]))
        n_lines = int(rng.integers(2, 7))
        policy = str(rng.choice(["distinct", "shared", "grayscale"]))
        grid = bool(rng.integers(0, 2))
        dashed = bool(rng.random() < 0.2)
    else:  # mixed
        pattern = str(rng.choice(PATTERNS))
        n_lines = int(rng.integers(1, 5)) if pattern == "easy" else int(rng.integers(2, 6))
        if pattern == "easy":
            n_lines = min(n_lines, 3)
        policy = str(rng.choice(["distinct", "distinct", "grayscale"]))
        grid = bool(rng.integers(0, 2))
        dashed = False
    colors = _colors_for(rng, n_lines, policy)
    styles = tuple(
        StrokeStyle(
            thickness=3,
            dash_pattern=(6, 4) if (dashed and i == n_lines - 1) else None,
            color=colors[i],
        )
        for i in range(n_lines)
    )
    return ChartSpec(
        seed=seed,
        width=400,
        height=300,
        n_lines=n_lines,
        pattern=pattern,
        styles=styles,
        grid=grid,
        color_policy=policy,
        n_points=int(rng.integers(4, 13)),
    )


def _chaikin(xs: np.ndarray, ys: np.ndarray, rounds: int = 2):
    """Corner-cutting subdivision; keeps endpoints, preserves increasing x."""
    for _ in range(rounds):
        nx = [xs[0]]
        ny = [ys[0]]
        for i in range(len(xs) - 1):
            nx.append(0.75 * xs[i] + 0.25 * xs[i + 1])
            ny.append(0.75 * ys[i] + 0.25 * ys[i + 1])
            nx.append(0.25 * xs[i] + 0.75 * xs[i + 1])
            ny.append(0.25 * ys[i] + 0.75 * ys[i + 1])
        nx.append(xs[-1])
        ny.append(ys[-1])
        xs, ys = np.array(nx), np.array(ny)
    return xs, ys


def _max_thickness(spec: ChartSpec) -> int:
    return max(st.thickness for st in spec.styles)


def _series_bounds(spec: ChartSpec):
    box = plot_area_for(spec)
    pad = _max_thickness(spec) + 2
    x0 = float(np.ceil(box.x0 + pad))
    x1 = float(np.floor(box.x1 - pad))
    ylo = box.y0 + pad
    yhi = box.y1 - pad
    return box, x0, x1, ylo, yhi


def _smooth_walk(rng, xs, ylo, yhi, scale):
    steps = rng.normal(0.0, scale, len(xs))
    ys = np.cumsum(steps) + rng.uniform(ylo, yhi)
    return np.clip(ys, ylo, yhi)


def _draw_series(spec: ChartSpec, rng: np.random.Generator) -> list[PointSeries]:
    box, x0, x1, ylo, yhi = _series_bounds(spec)
    t = _max_thickness(spec)
    n = spec.n_lines
    xs = np.linspace(x0, x1, spec.n_points)
    span = yhi - ylo
    series: list[PointSeries] = []

    if spec.pattern == "easy":
        slot = span / n
        amp = min(slot * 0.25, (slot - 3 * t - 2) / 2)
        if amp <= 0:
            raise GenerationError(
                f"easy pattern infeasible: {n} lines do not fit the plot height"
            )
        for i in range(n):
            center = ylo + slot * (i + 0.5)
            ys = center + rng.uniform(-amp, amp, spec.n_points)
            sx, sy = _chaikin(xs, ys)
            series.append(PointSeries(np.column_stack([sx, sy])))
        return series

    if spec.pattern == "crowding":
        half = 0.015 * box.height
        center = rng.uniform(ylo + half, yhi - half)
        for _ in range(n):
            ys = center + rng.uniform(-half, half, spec.n_points)
            sx, sy = _chaikin(xs, ys)
            series.append(PointSeries(np.column_stack([sx, sy])))
        return series

    if spec.pattern == "crossing":
        lo = ylo + 0.1 * span
        hi = yhi - 0.1 * span
        noise = 0.05 * span
        ya = np.linspace(lo, hi, spec.n_points) + rng.uniform(-noise, noise, spec.n_points)
        yb = np.linspace(hi, lo, spec.n_points) + rng.uniform(-noise, noise, spec.n_points)
        for ys in (ya, yb):
            sx, sy = _chaikin(xs, np.clip(ys, ylo, yhi))
            series.append(PointSeries(np.column_stack([sx, sy])))
        for _ in range(n - 2):
            ys = _smooth_walk(rng, xs, ylo, yhi, 0.06 * span)
            sx, sy = _chaikin(xs, ys)
            series.append(PointSeries(np.column_stack([sx, sy])))
        return series

    if spec.pattern == "occlusion":
        ys = _smooth_walk(rng, xs, ylo + 0.15 * span, yhi - 0.15 * span, 0.04 * span)
        sx, sy = _chaikin(xs, ys)
        series.append(PointSeries(np.column_stack([sx, sy])))
        # second line hugs the first over a >= 25% x-window, drifts elsewhere
        w0 = rng.uniform(0.1, 0.6)
        w1 = w0 + 0.28
        rel = (sx - sx[0]) / (sx[-1] - sx[0])
        drift = 0.12 * span * np.where(
            rel < w0, (w0 - rel) / max(w0, 1e-9),
            np.where(rel > w1, (rel - w1) / max(1 - w1, 1e-9), 0.0),
        )
        sy2 = np.clip(sy + drift, ylo, yhi)
        series.append(PointSeries(np.column_stack([sx, sy2])))
        for _ in range(n - 2):
            wy = _smooth_walk(rng, xs, ylo, yhi, 0.06 * span)
            wx, wys = _chaikin(xs, wy)
            series.append(PointSeries(np.column_stack([wx, wys])))
        return series

    # random
    for _ in range(n):
        ys = _smooth_walk(rng, xs, ylo, yhi, 0.08 * span)
        sx, sy = _chaikin(xs, ys)
        series.append(PointSeries(np.column_stack([sx, sy])))
    return series


def _sampled_diffs(a: PointSeries, b: PointSeries) -> np.ndarray:
    x_lo = max(a.xs[0], b.xs[0])
    x_hi = min(a.xs[-1], b.xs[-1])
    if x_hi <= x_lo:
        return np.array([])
    grid = np.arange(np.ceil(x_lo), np.floor(x_hi) + 1.0)
    ya = np.interp(grid, a.xs, a.ys)
    yb = np.interp(grid, b.xs, b.ys)
    return ya - yb


def _longest_run(flags: np.ndarray) -> int:
    best = cur = 0
    for f in flags:
        cur = cur + 1 if f else 0
        best = max(best, cur)
    return best


def _contract_holds(spec: ChartSpec, series: list[PointSeries]) -> bool:
    t = _max_thickness(spec)
    box = plot_area_for(spec)
    n = len(series)
    if spec.pattern == "random" or n < 2:
        return True
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if spec.pattern == "crossing":
        for i, j in pairs:
            d = _sampled_diffs(series[i], series[j])
            if len(d) and d.min() < 0 < d.max():
                return True
        return False
    if spec.pattern == "occlusion":
        need = 0.1 * spec.width
        for i, j in pairs:
            d = _sampled_diffs(series[i], series[j])
            if len(d) and _longest_run(np.abs(d) < t) >= need:
                return True
        return False
    if spec.pattern == "crowding":
        return all(
            len(d) and np.mean(np.abs(d)) < 0.05 * box.height
            for d in (_sampled_diffs(series[i], series[j]) for i, j in pairs)
        )
    # easy
    return all(
        len(d) and np.min(np.abs(d)) > 3 * t
        for d in (_sampled_diffs(series[i], series[j]) for i, j in pairs)
    )


def generate_series(spec: ChartSpec) -> list[PointSeries]:
    """Generate the spec's point series; regenerates from derived sub-seeds
    until the pattern contract holds (bounded)."""
    for attempt in range(MAX_RETRIES):
        rng = np.random.default_rng([spec.seed, attempt, zlib.crc32(spec.pattern.encode())])
        series = _draw_series(spec, rng)
        if _contract_holds(spec, series):
            return series
    raise GenerationError(
        f"could not satisfy {spec.pattern!r} contract after {MAX_RETRIES} attempts "
        f"(seed {spec.seed})"
    )


def generate_sample(seed: int, difficulty_profile: str = "mixed") -> ChartSample:
    """Convenience: spec -> rendered ChartSample."""
    return render_chart(generate_spec(seed, difficulty_profile))
