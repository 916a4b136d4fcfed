"""Rasterization: Bresenham tracing, thick line masks, and chart drawing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import binary_dilation

from .core import Box, ChartSample, LineMask, PointSeries, RasterImage
from .errors import ChartlineError, ContractViolation

__all__ = [
    "StrokeStyle",
    "EmptyMaskError",
    "round_half_away",
    "bresenham_trace",
    "render_line_mask",
    "render_chart",
]

GRID_COLOR = (220, 220, 220)
AXIS_COLOR = (0, 0, 0)
BACKGROUND_COLOR = (255, 255, 255)


class EmptyMaskError(ChartlineError):
    """Rendering produced no foreground pixels (series entirely off-raster)."""


@dataclass(frozen=True)
class StrokeStyle:
    """How one line is drawn in the chart image.

    thickness must be odd so the stroke stays centered on the ideal line.
    dash_pattern is (on_px, off_px) along the traced chain; None means solid.
    """

    thickness: int = 3
    dash_pattern: tuple[int, int] | None = None
    color: tuple[int, int, int] = (0, 0, 0)

    def __post_init__(self):
        if self.thickness < 1 or self.thickness % 2 == 0:
            raise ContractViolation("stroke thickness must be odd and >= 1")
        if self.dash_pattern is not None:
            on, off = self.dash_pattern
            if on < 1 or off < 1:
                raise ContractViolation("dash pattern lengths must be >= 1")


def round_half_away(v: float) -> int:
    """Round to nearest integer, halves away from zero (platform independent)."""
    if v >= 0:
        return int(math.floor(v + 0.5))
    return int(math.ceil(v - 0.5))


def _bresenham_forward(x0: int, y0: int, x1: int, y1: int) -> list[tuple[int, int]]:
    """Classic error-accumulator Bresenham from (x0,y0) to (x1,y1) inclusive."""
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x1 >= x0 else -1
    sy = 1 if y1 >= y0 else -1
    pts: list[tuple[int, int]] = []
    if dx >= dy:
        err = (dx - 1) // 2 if dx > 0 else 0
        y = y0
        for x in range(x0, x1 + sx, sx):
            pts.append((x, y))
            err -= dy
            if err < 0:
                y += sy
                err += dx
    else:
        err = (dy - 1) // 2
        x = x0
        for y in range(y0, y1 + sy, sy):
            pts.append((x, y))
            err -= dx
            if err < 0:
                x += sx
                err += dy
    return pts


def bresenham_trace(p0: tuple[int, int], p1: tuple[int, int]) -> list[tuple[int, int]]:
    """8-connected pixel chain from p0 to p1 inclusive.

    The chain is always computed from the lexicographically smaller endpoint
    and then reordered to run p0 -> p1, so the traced pixel *set* does not
    depend on segment orientation.
    """
    if tuple(p1) < tuple(p0):
        pts = _bresenham_forward(p1[0], p1[1], p0[0], p0[1])
        pts.reverse()
        return pts
    return _bresenham_forward(p0[0], p0[1], p1[0], p1[1])


def _chain_pixels(s: PointSeries) -> list[tuple[int, int]]:
    """Concatenated Bresenham chains over consecutive rounded points,
    without duplicating segment joints."""
    rounded = [(round_half_away(x), round_half_away(y)) for x, y in s]
    chain: list[tuple[int, int]] = []
    for (x0, y0), (x1, y1) in zip(rounded, rounded[1:]):
        seg = bresenham_trace((x0, y0), (x1, y1))
        if chain:
            seg = seg[1:]
        chain.extend(seg)
    if not chain:  # single repeated point after rounding
        chain = [rounded[0]]
    return chain


def _paint_canvas(
    chain: list[tuple[int, int]],
    width: int,
    height: int,
    thickness: int,
    dash_pattern: tuple[int, int] | None = None,
) -> np.ndarray:
    canvas = np.zeros((height, width), dtype=bool)
    if dash_pattern is None:
        kept = chain
    else:
        on, off = dash_pattern
        period = on + off
        kept = [p for i, p in enumerate(chain) if i % period < on]
    for x, y in kept:
        if 0 <= x < width and 0 <= y < height:
            canvas[y, x] = True
    if thickness > 1 and canvas.any():
        canvas = binary_dilation(canvas, structure=np.ones((thickness, thickness)))
    return canvas


def render_line_mask(
    s: PointSeries, width: int, height: int, thickness: int = 3
) -> LineMask:
    """Rasterize a series into a boolean mask.

    Union of Bresenham chains between consecutive rounded points, dilated by
    a square structuring element of side `thickness` and clipped at borders.
    Ground-truth masks are always continuous (no dashes).
    """
    if len(s) < 2:
        raise ContractViolation("rendering needs a series of >= 2 points")
    if thickness < 1 or thickness % 2 == 0:
        raise ContractViolation("thickness must be odd and >= 1")
    canvas = _paint_canvas(_chain_pixels(s), width, height, thickness)
    if not canvas.any():
        raise EmptyMaskError("series lies entirely outside the raster")
    return LineMask(width, height, canvas)


def _draw_box_outline(px: np.ndarray, box: Box, color) -> None:
    x0, y0 = int(box.x0), int(box.y0)
    x1, y1 = int(box.x1), int(box.y1)
    px[y0, x0 : x1 + 1] = color
    px[y1, x0 : x1 + 1] = color
    px[y0 : y1 + 1, x0] = color
    px[y0 : y1 + 1, x1] = color


def _draw_grid(px: np.ndarray, box: Box, n_div: int = 5) -> None:
    x0, y0 = int(box.x0), int(box.y0)
    x1, y1 = int(box.x1), int(box.y1)
    for i in range(1, n_div):
        gx = x0 + round(i * (x1 - x0) / n_div)
        gy = y0 + round(i * (y1 - y0) / n_div)
        px[y0 + 1 : y1, gx] = GRID_COLOR
        px[gy, x0 + 1 : x1] = GRID_COLOR


def render_chart(spec) -> ChartSample:
    """Draw a complete synthetic chart from a ChartSpec.

    Lines are painted in series-index order, so later lines occlude earlier
    ones on shared pixels.  Dashes affect only the chart image, never the
    ground-truth masks.
    """
    from .synthgen import generate_series, plot_area_for, axis_calibration_for

    if spec.n_lines < 1:
        raise ContractViolation("chart spec must declare at least one line")
    series = generate_series(spec)
    box = plot_area_for(spec)
    px = np.empty((spec.height, spec.width, 3), dtype=np.uint8)
    px[:, :] = BACKGROUND_COLOR
    _draw_box_outline(px, box, AXIS_COLOR)
    if spec.grid:
        _draw_grid(px, box)
    for s, style in zip(series, spec.styles):
        stroke = _paint_canvas(
            _chain_pixels(s), spec.width, spec.height, style.thickness,
            style.dash_pattern,
        )
        px[stroke] = style.color
    image = RasterImage(spec.width, spec.height, px)
    metadata = {
        "seed": str(spec.seed),
        "pattern": spec.pattern,
        "n_lines": str(spec.n_lines),
        "color_policy": spec.color_policy,
    }
    return ChartSample(
        image=image,
        gt_series=series,
        plot_area=box,
        axis_calibration=axis_calibration_for(spec),
        metadata=metadata,
    )
