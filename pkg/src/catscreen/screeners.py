"""The four marginal screening statistics.

Each screener maps a paired (design, response) to a :class:`ScreenResult`
whose descending score ranking drives model selection.  The trend
statistic is the workhorse: the absolute plug-in correlation between a
scored categorical feature and the response, which for ordinal scores
reads as evidence of a linear trend.  The other three (chi-square,
distance correlation, marginal logistic slope) are the standard
competitors and share the same result shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import kernels
from .data import (
    CategoricalDesign,
    CellTable,
    Method,
    ResponseVector,
    ScreenResult,
    design_cell_counts,
    validate_pair,
)
from .errors import DegenerateResponseError, DimensionError, ValidationError


@dataclass(frozen=True)
class ScreenerConfig:
    """Knobs for the marginal logistic screener; the rest are closed form."""

    mmle_max_iter: int = 25
    mmle_tol: float = 1e-8
    mmle_coef_cap: float = 10.0

    def __post_init__(self):
        if self.mmle_max_iter < 1:
            raise ValidationError("mmle_max_iter must be >= 1")
        if self.mmle_tol <= 0 or self.mmle_coef_cap <= 0:
            raise ValidationError("mmle tolerances must be positive")


DEFAULT_CONFIG = ScreenerConfig()


def _as_numeric(design) -> np.ndarray:
    if isinstance(design, CategoricalDesign):
        return design.scored_matrix()
    x = np.asarray(design, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"design matrix must be 2-d, got shape {x.shape}")
    return x


def _check_response(x: np.ndarray, y: ResponseVector) -> np.ndarray:
    if x.shape[0] != y.n:
        raise DimensionError(
            f"design has {x.shape[0]} observations but response has {y.n}")
    return y.values


def cat_sis(design, y: ResponseVector) -> ScreenResult:
    """Trend-statistic screening: |plug-in correlation| per feature.

    scores[j] = |tau_j| / (sd_j * sd_y) where tau_j is the 1/n-denominator
    sample covariance of the scored feature with the response and both
    standard deviations use the 1/n denominator as well.  Zero-variance
    features score 0 and are flagged; a constant response aborts the run.
    Accepts a plain numeric matrix for continuous data, where the same
    formula is the absolute Pearson correlation.
    """
    x = _as_numeric(design)
    yv = _check_response(x, y)
    y_sd = float(np.std(yv))
    if y_sd == 0.0:
        raise DegenerateResponseError("constant response: screening is meaningless")
    n = x.shape[0]
    xc = x - x.mean(axis=0)
    tau = (xc.T @ (yv - yv.mean())) / n
    x_sd = np.sqrt(np.mean(xc * xc, axis=0))
    degen = x_sd == 0.0
    scores = np.zeros(x.shape[1])
    np.divide(np.abs(tau), x_sd * y_sd, out=scores, where=~degen)
    np.clip(scores, 0.0, 1.0, out=scores)
    return ScreenResult.from_scores(Method.CAT_SIS, scores, degen)


def cat_sis_numerator_cellform(cells: CellTable) -> float:
    """The trend-statistic numerator from a cell table.

    Evaluates sum over (k, m) of (v_k - vbar)(m - ybar) p_km, which equals
    the observation-form covariance (1/n) sum_i (x_i - xbar)(y_i - ybar)
    exactly; tests pin the two forms against each other.
    """
    v = cells.scores
    m = np.array([0.0, 1.0])
    return float(((v - cells.x_mean)[:, None] * (m - cells.y_mean)[None, :] * cells.p_km).sum())


def hlw_sis(design: CategoricalDesign, y: ResponseVector) -> ScreenResult:
    """Chi-square screening: mean-squared contingency per feature.

    scores[j] = sum over cells of (p_km - p_k p_m)^2 / (p_k p_m), i.e. the
    Pearson chi-square statistic divided by n.  Ignores level scores.
    """
    if not isinstance(design, CategoricalDesign):
        raise ValidationError("chi-square screening requires a categorical design")
    if not y.is_binary:
        raise ValidationError("chi-square screening requires a binary response")
    validate_pair(design, y)
    if float(np.std(y.values)) == 0.0:
        raise DegenerateResponseError("constant response: screening is meaningless")
    counts = design_cell_counts(design, y)
    n = design.n
    p_km = counts / n
    p_k = p_km.sum(axis=2)
    p_m = p_km[0].sum(axis=0)
    expected = p_k[:, :, None] * p_m[None, None, :]
    dev = p_km - expected
    contrib = np.zeros_like(dev)
    np.divide(dev * dev, expected, out=contrib, where=expected > 0)
    scores = contrib.sum(axis=(1, 2))
    # single-populated-level features carry no association signal
    degen = (counts.sum(axis=2) > 0).sum(axis=1) <= 1
    scores[degen] = 0.0
    return ScreenResult.from_scores(Method.HLW_SIS, scores, degen)


def dc_sis(design, y: ResponseVector) -> ScreenResult:
    """Distance-correlation screening.

    scores[j] is the squared empirical distance correlation,
    V2(x_j, y) / sqrt(V2(x_j) V2(y)), from double-centered Euclidean
    distance matrices of the scored feature column and the response.
    For a categorical design with binary response the statistic collapses
    onto the contingency table, which the backend exploits; the numeric
    path is the O(n^2) evaluation.  Zero distance variance on either side
    gives score 0 with a degenerate flag.
    """
    x = _as_numeric(design)
    yv = _check_response(x, y)
    if x.shape[0] < 4:
        raise ValidationError("distance correlation needs at least 4 observations")
    if isinstance(design, CategoricalDesign) and y.is_binary:
        counts = design_cell_counts(design, y)
        scores, degen = kernels.dcov_categorical(
            counts, design.level_scores, design.level_counts)
    else:
        scores, degen = kernels.dcov_numeric(
            np.ascontiguousarray(x.T), np.ascontiguousarray(yv))
    np.clip(scores, 0.0, 1.0, out=scores)
    return ScreenResult.from_scores(Method.DC_SIS, scores, degen)


def mmle(design: CategoricalDesign, y: ResponseVector,
         cfg: ScreenerConfig = DEFAULT_CONFIG) -> ScreenResult:
    """Marginal logistic slope screening.

    scores[j] = |slope| of the intercept-plus-feature logistic fit,
    maximized by Newton iteration on the collapsed level cells (which has
    the same iterates as the observation-level fit).  Features with no
    variance score 0.  Separated or non-converged fits keep the final
    finite iterate and are flagged when it exceeds ``cfg.mmle_coef_cap``;
    clamping them to a common value would turn every separated feature
    into an index-ordered tie, which no real optimizer produces.
    """
    if not isinstance(design, CategoricalDesign):
        raise ValidationError("marginal logistic screening requires a categorical design")
    if not y.is_binary:
        raise ValidationError("marginal logistic screening requires a binary response")
    validate_pair(design, y)
    if float(np.std(y.values)) == 0.0:
        raise DegenerateResponseError("constant response: screening is meaningless")
    counts = design_cell_counts(design, y)
    scores, status = kernels.mmle_fit_cells(
        counts, design.level_scores, design.level_counts,
        cfg.mmle_max_iter, cfg.mmle_tol, cfg.mmle_coef_cap)
    return ScreenResult.from_scores(Method.MMLE, scores, status != 0)


_SCREENERS = {
    Method.CAT_SIS: cat_sis,
    Method.HLW_SIS: hlw_sis,
    Method.DC_SIS: dc_sis,
    Method.MMLE: mmle,
}


def screen(design, y: ResponseVector, method: Method,
           cfg: ScreenerConfig = DEFAULT_CONFIG) -> ScreenResult:
    """Dispatch to one of the four screeners by method tag."""
    if method is Method.MMLE:
        return mmle(design, y, cfg)
    return _SCREENERS[method](design, y)
