"""Turning a screening result into a selected model.

Three rules: a fixed-size prefix of the ranking, a hard score cutoff, and
the adjacent-ratio size estimate.  The ratio rule looks for the largest
drop between consecutive sorted scores; scores below a floor are dropped
first, because a near-zero tail can produce a huge ratio at a feature with
no real signal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import ScreenResult, TrueModel
from .errors import NoSelectableFeaturesError, ValidationError


@dataclass(frozen=True)
class TopD:
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValidationError("top-d rule needs d >= 1")


@dataclass(frozen=True)
class Cutoff:
    c: float

    def __post_init__(self):
        if self.c <= 0:
            raise ValidationError("cutoff must be positive")


@dataclass(frozen=True)
class RatioArgmax:
    floor: float = 1e-5

    def __post_init__(self):
        if self.floor < 0:
            raise ValidationError("floor must be non-negative")


SelectionRule = TopD | Cutoff | RatioArgmax


def ratio_argmax_size(sorted_scores: np.ndarray, floor: float) -> int:
    """Size estimate from the ratio of adjacent descending scores.

    Scores below ``floor`` are dropped; among the retained consecutive
    pairs, the position of the largest ratio (earliest position on ties)
    is the estimated size.  Zero denominators are skipped.  A single
    retained score estimates size 1.
    """
    kept = sorted_scores[sorted_scores >= floor] if floor > 0 else sorted_scores
    m = kept.size
    if m == 0:
        raise NoSelectableFeaturesError(
            f"no screening score reaches the floor {floor!r}")
    if m == 1:
        return 1
    best_j = 0
    best_ratio = -np.inf
    for j in range(m - 1):
        if kept[j + 1] == 0.0:
            continue
        r = kept[j] / kept[j + 1]
        if r > best_ratio:
            best_ratio = r
            best_j = j + 1
    if not np.isfinite(best_ratio):
        # every retained pair had a zero denominator: keep the nonzero head
        return int(np.count_nonzero(kept))
    return best_j


def select(result: ScreenResult, rule: SelectionRule) -> TrueModel:
    """Apply a selection rule to a screening result."""
    if isinstance(rule, TopD):
        if rule.d > result.p:
            raise ValidationError(f"top-d size {rule.d} exceeds p={result.p}")
        return TrueModel.of(result.ranking[: rule.d])
    if isinstance(rule, Cutoff):
        chosen = np.nonzero(result.scores > rule.c)[0]
        if chosen.size == 0:
            raise NoSelectableFeaturesError(
                f"no screening score exceeds the cutoff {rule.c!r}")
        return TrueModel.of(chosen)
    if isinstance(rule, RatioArgmax):
        ordered = result.scores[result.ranking]
        d_hat = ratio_argmax_size(ordered, rule.floor)
        return TrueModel.of(result.ranking[:d_hat])
    raise ValidationError(f"unknown selection rule {rule!r}")


def minimum_model_size(result: ScreenResult, truth: TrueModel) -> int:
    """Smallest ranking prefix containing every causative feature."""
    if max(truth.indices) >= result.p:
        raise ValidationError("true model index out of range for this result")
    pos = result.positions()
    return int(max(pos[list(truth.indices)])) + 1
