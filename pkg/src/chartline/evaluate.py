"""Assignment-based scoring of predicted vs ground-truth line series.

Two normalizations are supported: mode "6a" divides the optimal matching
total by the number of ground-truth lines (extraneous predictions are
ignored), while mode "6b" divides by max(n_gt, n_pred) so every unmatched
prediction contributes a zero column.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Box, PointSeries, interpolate_at
from .errors import ContractViolation

__all__ = [
    "MODE_6A",
    "MODE_6B",
    "SimilarityMatrix",
    "ScoreReport",
    "pairwise_similarity",
    "build_matrix",
    "optimal_assignment",
    "evaluate_chart",
    "aggregate_scores",
]

MODE_6A = "6a"
MODE_6B = "6b"
_MODES = (MODE_6A, MODE_6B)
_TIE_EPS = 1e-12


@dataclass
class SimilarityMatrix:
    values: np.ndarray  # (n_pred, k) in [0, 1]
    n_pred: int
    n_gt: int
    k: int
    mode: str

    def __post_init__(self):
        if self.values.shape != (self.n_pred, self.k):
            raise ContractViolation("similarity matrix shape mismatch")


@dataclass
class ScoreReport:
    mode: str
    score: float
    # (pred_index, gt_index or None) per prediction
    assignment: list[tuple[int, int | None]] = field(default_factory=list)
    per_pair_similarity: list[float] = field(default_factory=list)


def _predict_y(pred: PointSeries, x: float) -> float | None:
    if len(pred) >= 2:
        return interpolate_at(pred, x)
    return pred.ys[0] if pred.xs[0] == x else None


def pairwise_similarity(
    pred: PointSeries,
    gt: PointSeries,
    norm_span: float,
    penalize_uncovered: bool = True,
) -> float:
    """1 - mean per-point error over GT points, errors clamped at 1.

    The prediction is linearly interpolated at each GT x.  GT points outside
    the prediction's x-range count as error 1 when penalize_uncovered is set,
    and are skipped otherwise (if every point is skipped the similarity is 0).
    """
    if norm_span <= 0:
        raise ContractViolation("norm_span must be > 0")
    if len(gt) < 1:
        raise ContractViolation("ground-truth series must have >= 1 point")
    errors: list[float] = []
    for x, y in gt:
        y_hat = _predict_y(pred, x)
        if y_hat is None:
            if penalize_uncovered:
                errors.append(1.0)
            continue
        errors.append(min(1.0, abs(y_hat - y) / norm_span))
    if not errors:
        return 0.0
    return 1.0 - sum(errors) / len(errors)


def build_matrix(
    preds: list[PointSeries],
    gts: list[PointSeries],
    mode: str,
    norm_span: float,
    penalize_uncovered: bool = True,
) -> SimilarityMatrix:
    """Pairwise similarity matrix with mode-dependent column padding."""
    if mode not in _MODES:
        raise ContractViolation(f"unknown mode {mode!r}")
    n_pred, n_gt = len(preds), len(gts)
    k = n_gt if mode == MODE_6A else max(n_gt, n_pred)
    values = np.zeros((n_pred, k))
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            values[i, j] = pairwise_similarity(p, g, norm_span, penalize_uncovered)
    return SimilarityMatrix(values, n_pred, n_gt, k, mode)


def _best_total(values: np.ndarray) -> float:
    if values.size == 0:
        return 0.0
    rows, cols = linear_sum_assignment(values, maximize=True)
    return float(values[rows, cols].sum())


def optimal_assignment(s: SimilarityMatrix) -> ScoreReport:
    """Maximum-total one-to-one assignment, normalized by K.

    Ties between equal-total assignments break toward the lexicographically
    smallest pred->column mapping (unmatched sorts last).
    """
    if s.k == 0:
        # nothing to recall: vacuously perfect
        return ScoreReport(s.mode, 1.0)
    if s.n_pred == 0:
        return ScoreReport(s.mode, 0.0)
    opt = _best_total(s.values)

    # fix rows one by one, preferring the smallest column that preserves
    # optimality, to make the reported assignment deterministic
    free_cols = list(range(s.k))
    free_rows = list(range(s.n_pred))
    chosen: dict[int, int | None] = {}
    for i in range(s.n_pred):
        free_rows.remove(i)
        fixed_value = sum(
            s.values[r, c] for r, c in chosen.items() if c is not None
        )
        pick: int | None = None
        for j in [*free_cols, None]:
            rest_cols = [c for c in free_cols if c != j]
            rest = s.values[np.ix_(free_rows, rest_cols)] if free_rows and rest_cols else np.empty((0, 0))
            this = s.values[i, j] if j is not None else 0.0
            if fixed_value + this + _best_total(rest) >= opt - _TIE_EPS:
                pick = j
                break
        chosen[i] = pick
        if pick is not None:
            free_cols.remove(pick)

    assignment: list[tuple[int, int | None]] = []
    per_pair: list[float] = []
    for i in range(s.n_pred):
        j = chosen[i]
        matched_gt = j if (j is not None and j < s.n_gt) else None
        assignment.append((i, matched_gt))
        per_pair.append(float(s.values[i, j]) if j is not None else 0.0)
    return ScoreReport(s.mode, opt / s.k, assignment, per_pair)


def evaluate_chart(
    pred_series: list[PointSeries],
    gt_series: list[PointSeries],
    plot_area: Box | None,
    mode: str,
    norm_span: float | None = None,
    penalize_uncovered: bool = True,
) -> ScoreReport:
    """Score one chart: similarity matrix + optimal assignment.

    The error normalization span is the plot-area height; callers without a
    plot area must pass norm_span explicitly (typically the image height).
    """
    if plot_area is not None:
        norm_span = plot_area.height
    if norm_span is None or norm_span <= 0:
        raise ContractViolation("a positive norm_span or plot_area is required")
    matrix = build_matrix(pred_series, gt_series, mode, norm_span, penalize_uncovered)
    return optimal_assignment(matrix)


def aggregate_scores(scores: list[float]) -> dict:
    """Mean/median summary on the 0-100 scale used for reporting."""
    if not scores:
        return {"count": 0, "mean": None, "median": None}
    return {
        "count": len(scores),
        "mean": 100.0 * statistics.fmean(scores),
        "median": 100.0 * statistics.median(scores),
    }
