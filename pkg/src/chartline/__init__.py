"""Line-chart data extraction toolkit: synthetic corpus generation,
ground-truth mask rendering, classical segmentation, series extraction,
and assignment-based scoring."""

from .core import (
    AxisCalibration,
    Box,
    ChartSample,
    LineMask,
    PointSeries,
    RasterImage,
    RleMask,
    interpolate_at,
    mask_iou,
    rle_decode,
    rle_encode,
)
from .evaluate import (
    MODE_6A,
    MODE_6B,
    ScoreReport,
    SimilarityMatrix,
    build_matrix,
    evaluate_chart,
    optimal_assignment,
    pairwise_similarity,
)
from .extract import ExtractionConfig, extract_series, suppress_duplicates, x_range
from .rasterize import StrokeStyle, bresenham_trace, render_chart, render_line_mask
from .segment import estimate_background, segment_by_color
from .synthgen import ChartSpec, generate_sample, generate_series, generate_spec

__version__ = "0.1.0"
