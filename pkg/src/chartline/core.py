"""Shared domain types and mask/series primitives.

Coordinate convention: (0, 0) is the top-left pixel, x grows rightward,
y grows downward.  A visually "higher" chart value therefore has a
*smaller* y.  All metric math happens in this pixel space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, FormatError

__all__ = [
    "RasterImage",
    "LineMask",
    "PointSeries",
    "Box",
    "AxisCalibration",
    "ChartSample",
    "RleMask",
    "mask_iou",
    "rle_encode",
    "rle_decode",
    "interpolate_at",
]


@dataclass(frozen=True)
class RasterImage:
    """An RGB pixel grid, row-major, uint8 channels."""

    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ContractViolation("image dimensions must be >= 1")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ContractViolation(
                f"pixel buffer shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )
        self.pixels.setflags(write=False)

    @classmethod
    def blank(cls, width: int, height: int, color=(255, 255, 255)) -> "RasterImage":
        px = np.empty((height, width, 3), dtype=np.uint8)
        px[:, :] = color
        return cls(width, height, px)

    def __eq__(self, other):
        return (
            isinstance(other, RasterImage)
            and self.width == other.width
            and self.height == other.height
            and np.array_equal(self.pixels, other.pixels)
        )


@dataclass
class LineMask:
    """One boolean instance mask.  Masks in a set may overlap freely."""

    width: int
    height: int
    bits: np.ndarray  # (height, width) bool
    confidence: float = 1.0

    def __post_init__(self):
        if self.bits.shape != (self.height, self.width):
            raise ContractViolation(
                f"mask bits shape {self.bits.shape} does not match "
                f"{self.height}x{self.width}"
            )
        if self.bits.dtype != np.bool_:
            self.bits = self.bits.astype(bool)
        if not 0.0 <= self.confidence <= 1.0:
            raise ContractViolation("confidence must lie in [0, 1]")

    @classmethod
    def empty(cls, width: int, height: int, confidence: float = 1.0) -> "LineMask":
        return cls(width, height, np.zeros((height, width), dtype=bool), confidence)

    @property
    def pixel_count(self) -> int:
        return int(self.bits.sum())

    def __eq__(self, other):
        return (
            isinstance(other, LineMask)
            and self.width == other.width
            and self.height == other.height
            and self.confidence == other.confidence
            and np.array_equal(self.bits, other.bits)
        )


class PointSeries:
    """An ordered (x, y) pixel-coordinate series, strictly increasing in x."""

    __slots__ = ("xs", "ys")

    def __init__(self, points):
        pts = np.asarray(list(points), dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ContractViolation("points must be a sequence of (x, y) pairs")
        xs = pts[:, 0]
        if len(xs) >= 2 and not np.all(np.diff(xs) > 0):
            raise ContractViolation("series x values must be strictly increasing")
        self.xs = xs
        self.ys = pts[:, 1]
        self.xs.setflags(write=False)
        self.ys.setflags(write=False)

    @classmethod
    def canonicalize(cls, points) -> "PointSeries":
        """Build a series from possibly unsorted points, averaging duplicate x."""
        pts = sorted((float(x), float(y)) for x, y in points)
        out: list[tuple[float, float]] = []
        i = 0
        while i < len(pts):
            j = i
            while j < len(pts) and pts[j][0] == pts[i][0]:
                j += 1
            ys = [p[1] for p in pts[i:j]]
            out.append((pts[i][0], sum(ys) / len(ys)))
            i = j
        return cls(out)

    def __len__(self) -> int:
        return len(self.xs)

    def __iter__(self):
        return iter(zip(self.xs.tolist(), self.ys.tolist()))

    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.xs.tolist(), self.ys.tolist()))

    def __eq__(self, other):
        return (
            isinstance(other, PointSeries)
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ys, other.ys)
        )

    def __repr__(self):
        return f"PointSeries({self.points()!r})"


@dataclass(frozen=True)
class Box:
    """Axis-aligned pixel box, inclusive of x0/y0, exclusive of x1/y1."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if self.x1 <= self.x0 or self.y1 <= self.y0:
            raise ContractViolation("box must have positive width and height")

    @property
    def width(self) -> float:
        return self.x1 - self.x0

    @property
    def height(self) -> float:
        return self.y1 - self.y0

    def contains(self, x: float, y: float, slack: float = 0.0) -> bool:
        return (
            self.x0 - slack <= x <= self.x1 + slack
            and self.y0 - slack <= y <= self.y1 + slack
        )


@dataclass(frozen=True)
class AxisCalibration:
    """Two pixel->data reference pairs per axis, defining affine axis maps."""

    x_refs: tuple[tuple[float, float], tuple[float, float]]
    y_refs: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        if self.x_refs[0][0] == self.x_refs[1][0]:
            raise ContractViolation("x calibration reference pixels must differ")
        if self.y_refs[0][0] == self.y_refs[1][0]:
            raise ContractViolation("y calibration reference pixels must differ")


@dataclass
class ChartSample:
    """One corpus record: image, ground-truth series, plot area, calibration."""

    image: RasterImage
    gt_series: list[PointSeries]
    plot_area: Box
    axis_calibration: AxisCalibration | None = None
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for i, s in enumerate(self.gt_series):
            for x, y in s:
                # 0.5 px slack matches rasterization rounding.
                if not self.plot_area.contains(x, y, slack=0.5):
                    raise ContractViolation(
                        f"series {i} point ({x}, {y}) lies outside the plot area"
                    )


@dataclass(frozen=True)
class RleMask:
    """Run-length encoded mask: alternating background/foreground run lengths,
    row-major, starting with background."""

    width: int
    height: int
    runs: tuple[int, ...]

    def __post_init__(self):
        if any(r < 0 for r in self.runs):
            raise FormatError("/runs", "run lengths must be non-negative")
        if sum(self.runs) != self.width * self.height:
            raise FormatError(
                "/runs",
                f"run sum {sum(self.runs)} != {self.width * self.height} pixels",
            )


def mask_iou(a: LineMask, b: LineMask) -> float:
    """Intersection-over-union of two masks; 0 when both are empty."""
    if (a.width, a.height) != (b.width, b.height):
        raise ContractViolation(
            f"mask dimensions differ: {a.width}x{a.height} vs {b.width}x{b.height}"
        )
    inter = int(np.logical_and(a.bits, b.bits).sum())
    union = int(np.logical_or(a.bits, b.bits).sum())
    if union == 0:
        return 0.0
    return inter / union


def rle_encode(m: LineMask) -> RleMask:
    """Encode a mask as alternating background/foreground runs.

    Canonical form: no zero-length runs except a possible leading zero when
    the first pixel is foreground.
    """
    flat = m.bits.ravel()
    runs: list[int] = []
    if flat.size == 0:
        return RleMask(m.width, m.height, ())
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    bounds = np.concatenate(([0], change, [flat.size]))
    lengths = np.diff(bounds).tolist()
    if flat[0]:
        runs.append(0)
    runs.extend(int(v) for v in lengths)
    return RleMask(m.width, m.height, tuple(runs))


def rle_decode(r: RleMask, confidence: float = 1.0) -> LineMask:
    """Decode runs back into a boolean mask (inverse of rle_encode)."""
    flat = np.zeros(r.width * r.height, dtype=bool)
    pos = 0
    fg = False
    for run in r.runs:
        if fg:
            flat[pos : pos + run] = True
        pos += run
        fg = not fg
    bits = flat.reshape(r.height, r.width)
    return LineMask(r.width, r.height, bits, confidence)


def interpolate_at(s: PointSeries, x: float) -> float | None:
    """Piecewise-linear y at x, or None outside the series' x-range."""
    if len(s) < 2:
        raise ContractViolation("interpolation needs a series of >= 2 points")
    if x < s.xs[0] or x > s.xs[-1]:
        return None
    return float(np.interp(x, s.xs, s.ys))
