"""Mask -> data series extraction and duplicate-mask suppression."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AxisCalibration, LineMask, PointSeries, mask_iou
from .errors import CalibrationError, ContractViolation, RejectedMaskError

__all__ = [
    "ExtractionConfig",
    "x_range",
    "extract_series",
    "suppress_duplicates",
    "scale_to_data",
]


@dataclass(frozen=True)
class ExtractionConfig:
    delta_x: int = 1
    min_mask_pixels: int = 10  # ~3x default stroke thickness; filters speckle
    iou_suppression_threshold: float = 0.75
    # Columns whose foreground rows split into runs farther apart than this
    # (2x default thickness) are treated as two line branches.
    branch_gap: int = 6

    def __post_init__(self):
        if self.delta_x < 1:
            raise ContractViolation("delta_x must be >= 1")
        if not 0.0 < self.iou_suppression_threshold <= 1.0:
            raise ContractViolation("iou_suppression_threshold must be in (0, 1]")


def x_range(m: LineMask) -> tuple[int, int] | None:
    """Smallest and largest columns with foreground, or None if empty."""
    cols = np.flatnonzero(m.bits.any(axis=0))
    if len(cols) == 0:
        return None
    return int(cols[0]), int(cols[-1])


def _column_y(rows: np.ndarray, prev_y: float | None, branch_gap: int) -> float:
    """Aggregate one column's foreground rows into a single y.

    Normally the arithmetic mean; when the rows split into runs separated by
    more than branch_gap (mask self-crossing residue), use the run nearest
    the previous sample to avoid averaging across two branches.
    """
    gaps = np.flatnonzero(np.diff(rows) > 1)
    if len(gaps) == 0:
        return float(rows.mean())
    starts = np.concatenate(([0], gaps + 1))
    ends = np.concatenate((gaps + 1, [len(rows)]))
    runs = [rows[s:e] for s, e in zip(starts, ends)]
    max_sep = max(runs[i + 1][0] - runs[i][-1] for i in range(len(runs) - 1))
    if max_sep <= branch_gap:
        return float(rows.mean())
    means = [float(r.mean()) for r in runs]
    if prev_y is None:
        # no anchor yet: take the largest run (ties: topmost)
        sizes = [len(r) for r in runs]
        return means[int(np.argmax(sizes))]
    return min(means, key=lambda m: abs(m - prev_y))


def extract_series(m: LineMask, cfg: ExtractionConfig = ExtractionConfig()) -> PointSeries:
    """Sample a mask column-wise into an ordered series.

    Columns are sampled every delta_x from the mask's x-range (the end column
    is always included); empty sampled columns are filled by linear
    interpolation between the nearest sampled foreground columns.
    """
    if m.pixel_count < cfg.min_mask_pixels:
        raise RejectedMaskError(
            f"mask has {m.pixel_count} px, below minimum {cfg.min_mask_pixels}"
        )
    xr = x_range(m)
    assert xr is not None
    x_start, x_end = xr
    sample_xs = list(range(x_start, x_end + 1, cfg.delta_x))
    if sample_xs[-1] != x_end:
        sample_xs.append(x_end)

    known_x: list[int] = []
    known_y: list[float] = []
    empty_x: list[int] = []
    prev_y: float | None = None
    for x in sample_xs:
        rows = np.flatnonzero(m.bits[:, x])
        if len(rows) == 0:
            empty_x.append(x)
            continue
        y = _column_y(rows, prev_y, cfg.branch_gap)
        known_x.append(x)
        known_y.append(y)
        prev_y = y

    points = list(zip(known_x, known_y))
    if empty_x:
        filled = np.interp(empty_x, known_x, known_y)
        points.extend(zip(empty_x, filled.tolist()))
        points.sort()
    return PointSeries(points)


def suppress_duplicates(
    masks: list[LineMask], cfg: ExtractionConfig = ExtractionConfig()
) -> list[LineMask]:
    """Greedy IoU suppression of near-duplicate masks.

    Masks are visited in descending confidence order (ties: descending pixel
    count, then input order); a mask is dropped when its IoU with any already
    kept mask reaches the threshold.
    """
    for m in masks[1:]:
        if (m.width, m.height) != (masks[0].width, masks[0].height):
            raise ContractViolation("all masks must share dimensions")
    order = sorted(
        range(len(masks)),
        key=lambda i: (-masks[i].confidence, -masks[i].pixel_count, i),
    )
    kept: list[LineMask] = []
    for i in order:
        m = masks[i]
        if any(mask_iou(m, k) >= cfg.iou_suppression_threshold for k in kept):
            continue
        kept.append(m)
    return kept


def _affine(refs) -> tuple[float, float]:
    (p0, d0), (p1, d1) = refs
    if p0 == p1:
        raise CalibrationError("calibration reference pixels coincide")
    scale = (d1 - d0) / (p1 - p0)
    return scale, d0 - scale * p0


def scale_to_data(s: PointSeries, cal: AxisCalibration) -> list[tuple[float, float]]:
    """Map pixel coordinates to data units via the two-point axis references.

    The y map inherently flips orientation when the calibration says larger
    data values sit at smaller pixel y (the usual chart layout).
    """
    if cal is None:
        raise CalibrationError("no axis calibration available")
    ax, bx = _affine(cal.x_refs)
    ay, by = _affine(cal.y_refs)
    return [(ax * x + bx, ay * y + by) for x, y in s]
