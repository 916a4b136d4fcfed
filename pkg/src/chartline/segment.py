"""Classical color-clustering baseline segmenter.

Clusters non-background plot-area pixels by color (Chebyshev distance) and
emits one mask per cluster.  Lines that share a color are merged into a
single mask; this is the documented failure mode that motivates
instance-based predictors.
"""

from __future__ import annotations

import numpy as np

from .core import Box, LineMask, RasterImage

__all__ = ["estimate_background", "segment_by_color", "DEFAULT_COLOR_TOL"]

DEFAULT_COLOR_TOL = 12

# A color cluster is treated as grid/axis furniture when most of its pixels
# sit in isolated rows/columns that it covers almost end to end.
_GRIDLIKE_SPAN = 0.8
_GRIDLIKE_FRACTION = 0.9
_GRIDLIKE_MIN_COUNT = 0.3
_GRIDLIKE_NEIGHBOR = 0.2


def _plot_slice(img: RasterImage, plot_area: Box):
    x0, y0 = int(plot_area.x0), int(plot_area.y0)
    x1, y1 = int(plot_area.x1), int(plot_area.y1)
    return img.pixels[y0 : y1 + 1, x0 : x1 + 1], x0, y0


def estimate_background(img: RasterImage, plot_area: Box) -> tuple[int, int, int]:
    """Modal color of the plot area; ties break toward the lower RGB tuple."""
    region, _, _ = _plot_slice(img, plot_area)
    packed = (
        region[:, :, 0].astype(np.uint32) << 16
    ) | (region[:, :, 1].astype(np.uint32) << 8) | region[:, :, 2].astype(np.uint32)
    values, counts = np.unique(packed, return_counts=True)
    winners = values[counts == counts.max()]
    v = int(winners.min())
    return ((v >> 16) & 0xFF, (v >> 8) & 0xFF, v & 0xFF)


def _grid_lines(cluster: np.ndarray, axis: int) -> np.ndarray:
    """Boolean per-row (axis=1) or per-column (axis=0) flags for grid runs.

    A grid run spans nearly the full extent of the plot, keeps a substantial
    pixel count even when strokes occlude parts of it, and is isolated: its
    neighbors are almost empty (grid lines are 1 px wide; strokes are not).
    """
    counts = cluster.sum(axis=axis)
    span = cluster.shape[axis]
    n = len(counts)
    any_px = counts > 0
    first = np.argmax(cluster, axis=axis)
    last = span - 1 - np.argmax(cluster[::-1, :] if axis == 0 else cluster[:, ::-1], axis=axis)
    extent = np.where(any_px, last - first + 1, 0)
    before = np.concatenate(([0], counts[:-1]))
    after = np.concatenate((counts[1:], [0]))
    isolated = (before <= _GRIDLIKE_NEIGHBOR * counts) & (after <= _GRIDLIKE_NEIGHBOR * counts)
    return (
        (extent >= _GRIDLIKE_SPAN * span)
        & (counts >= _GRIDLIKE_MIN_COUNT * span)
        & isolated
    )


def _is_gridlike(cluster: np.ndarray) -> bool:
    """True when >90% of a cluster's pixels lie on grid-run rows/columns."""
    total = int(cluster.sum())
    if total == 0:
        return False
    grid_rows = _grid_lines(cluster, axis=1)
    grid_cols = _grid_lines(cluster, axis=0)
    covered = cluster & (grid_rows[:, None] | grid_cols[None, :])
    return int(covered.sum()) > _GRIDLIKE_FRACTION * total


def segment_by_color(
    img: RasterImage, plot_area: Box, tol: int = DEFAULT_COLOR_TOL
) -> list[LineMask]:
    """One mask per foreground color cluster, sorted by descending pixel count.

    Clustering is greedy: the most frequent unassigned color seeds a cluster
    that absorbs every color within Chebyshev distance `tol`.  Grid-like
    clusters (near-full-width/height runs) are dropped.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    region, x_off, y_off = _plot_slice(img, plot_area)
    bg = np.array(estimate_background(img, plot_area), dtype=np.int16)
    fg = np.abs(region.astype(np.int16) - bg).max(axis=2) > tol
    if not fg.any():
        return []

    colors = region[fg]
    uniq, inverse, counts = np.unique(
        colors.reshape(-1, 3), axis=0, return_inverse=True, return_counts=True
    )
    order = np.argsort(-counts, kind="stable")
    assigned = np.full(len(uniq), -1)
    cluster_id = 0
    for idx in order:
        if assigned[idx] >= 0:
            continue
        seed = uniq[idx].astype(np.int16)
        near = np.abs(uniq.astype(np.int16) - seed).max(axis=1) <= tol
        near &= assigned < 0
        assigned[near] = cluster_id
        cluster_id += 1

    fg_idx = np.flatnonzero(fg.ravel())
    h, w = fg.shape
    masks: list[LineMask] = []
    for cid in range(cluster_id):
        member = assigned[inverse] == cid
        local = np.zeros(h * w, dtype=bool)
        local[fg_idx[member]] = True
        local = local.reshape(h, w)
        if _is_gridlike(local):
            continue
        full = np.zeros((img.height, img.width), dtype=bool)
        full[y_off : y_off + h, x_off : x_off + w] = local
        masks.append(LineMask(img.width, img.height, full))
    masks.sort(key=lambda m: -m.pixel_count)
    return masks
