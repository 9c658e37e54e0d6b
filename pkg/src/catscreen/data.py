"""Core immutable data types shared by every module.

Categorical designs store dense 0-based level indices per feature plus a
per-feature table of numeric level scores.  Screeners that use the scores
(the trend statistic, distance correlation, the marginal logistic slope)
and screeners that ignore them (the chi-square statistic) share this one
representation.  Feature indices are 0-based throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .backends import kernels
from .errors import DimensionError, ValidationError


class Method(Enum):
    """The four marginal screeners."""

    CAT_SIS = "cat-sis"
    HLW_SIS = "hlw-sis"
    DC_SIS = "dc-sis"
    MMLE = "mmle"

    @property
    def display(self) -> str:
        return self.value.upper()

    @classmethod
    def parse(cls, text: str) -> "Method":
        key = text.strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise ValidationError(f"unknown method {text!r}; expected one of "
                              f"{[m.value for m in cls]}")


class ResponseKind(Enum):
    BINARY = "binary"
    CONTINUOUS = "continuous"


def _frozen_array(a, dtype):
    arr = np.ascontiguousarray(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CategoricalDesign:
    """An n-by-p matrix of categorical features with numeric level scores.

    Attributes
    ----------
    levels : (n, p) int64 array of 0-based level indices.
    level_scores : (p, kmax) float64 array; row j holds the scores of
        feature j in its first ``level_counts[j]`` entries (rest is padding).
    level_counts : (p,) int64 array of level cardinalities K_j.
    feature_names : optional tuple of column names for I/O round trips.
    """

    levels: np.ndarray
    level_scores: np.ndarray
    level_counts: np.ndarray
    feature_names: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return self.levels.shape[0]

    @property
    def p(self) -> int:
        return self.levels.shape[1]

    @property
    def kmax(self) -> int:
        return self.level_scores.shape[1]

    @classmethod
    def from_levels(
        cls,
        levels,
        level_scores: Sequence[Sequence[float]] | None = None,
        feature_names: Sequence[str] | None = None,
        ordinal: bool = False,
    ) -> "CategoricalDesign":
        """Build a design from a level-index matrix.

        When ``level_scores`` is omitted, feature j gets the identity scores
        0, 1, ..., K_j - 1 with K_j inferred as ``max(level) + 1``.  With
        ``ordinal=True`` every score vector must be strictly increasing.
        """
        lv = np.asarray(levels)
        if lv.ndim != 2:
            raise DimensionError(f"levels must be 2-d, got shape {lv.shape}")
        if lv.size == 0:
            raise ValidationError("empty design: no observations or no features")
        if not np.issubdtype(lv.dtype, np.integer):
            if not np.all(lv == np.floor(lv)):
                raise ValidationError("level indices must be integers")
        lv = lv.astype(np.int64)
        if lv.min() < 0:
            raise ValidationError("level indices must be non-negative")
        p = lv.shape[1]
        if level_scores is None:
            counts = lv.max(axis=0) + 1
            kmax = int(counts.max())
            scores = np.broadcast_to(np.arange(kmax, dtype=np.float64), (p, kmax)).copy()
        else:
            if len(level_scores) != p:
                raise DimensionError(
                    f"level_scores has {len(level_scores)} rows for {p} features")
            counts = np.array([len(s) for s in level_scores], dtype=np.int64)
            observed = lv.max(axis=0) + 1
            bad = np.nonzero(observed > counts)[0]
            if bad.size:
                j = int(bad[0])
                raise ValidationError(
                    f"feature {j}: observed level {int(lv[:, j].max())} but only "
                    f"{int(counts[j])} scores supplied")
            kmax = int(counts.max())
            scores = np.zeros((p, kmax), dtype=np.float64)
            for j, s in enumerate(level_scores):
                row = np.asarray(s, dtype=np.float64)
                if not np.all(np.isfinite(row)):
                    raise ValidationError(f"feature {j}: non-finite level score")
                scores[j, : row.size] = row
        if ordinal:
            for j in range(p):
                kj = int(counts[j])
                if kj > 1 and not np.all(np.diff(scores[j, :kj]) > 0):
                    raise ValidationError(
                        f"feature {j}: ordinal design requires strictly "
                        f"increasing level scores")
        names = tuple(feature_names) if feature_names is not None else None
        if names is not None and len(names) != p:
            raise DimensionError(f"{len(names)} feature names for {p} features")
        return cls(
            levels=_frozen_array(lv, np.int64),
            level_scores=_frozen_array(scores, np.float64),
            level_counts=_frozen_array(counts, np.int64),
            feature_names=names,
        )

    def scored_matrix(self) -> np.ndarray:
        """Map level indices to their numeric scores, as an (n, p) float64."""
        j = np.arange(self.p)[None, :]
        return self.level_scores[j, self.levels]

    def names(self) -> tuple[str, ...]:
        if self.feature_names is not None:
            return self.feature_names
        return tuple(f"x{j + 1}" for j in range(self.p))


@dataclass(frozen=True)
class ResponseVector:
    """A binary 0/1 or continuous response paired with a design."""

    kind: ResponseKind
    values: np.ndarray

    @classmethod
    def binary(cls, values) -> "ResponseVector":
        arr = np.asarray(values)
        if arr.ndim != 1:
            raise DimensionError("response must be 1-d")
        if not np.isin(arr, (0, 1)).all():
            raise ValidationError("binary response must contain only 0 and 1")
        return cls(ResponseKind.BINARY, _frozen_array(arr, np.float64))

    @classmethod
    def continuous(cls, values) -> "ResponseVector":
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1:
            raise DimensionError("response must be 1-d")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("continuous response must be finite")
        return cls(ResponseKind.CONTINUOUS, _frozen_array(arr, np.float64))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def is_binary(self) -> bool:
        return self.kind is ResponseKind.BINARY


@dataclass(frozen=True)
class ScreenResult:
    """Per-feature screening scores with their descending ranking.

    ``ranking[t]`` is the feature index holding rank t (rank 0 is the top
    score); ties break by ascending feature index, so reruns on identical
    input reproduce the ranking bit for bit.  ``degenerate[j]`` marks
    features whose score was forced to 0 by a zero-variance guard.
    """

    method: Method
    scores: np.ndarray
    ranking: np.ndarray
    degenerate: np.ndarray

    @classmethod
    def from_scores(cls, method: Method, scores, degenerate=None) -> "ScreenResult":
        sc = np.asarray(scores, dtype=np.float64)
        if sc.ndim != 1:
            raise DimensionError("scores must be 1-d")
        if not np.all(np.isfinite(sc)) or sc.min() < 0:
            raise ValidationError("scores must be finite and non-negative")
        if degenerate is None:
            degenerate = np.zeros(sc.size, dtype=bool)
        deg = np.asarray(degenerate, dtype=bool)
        if deg.shape != sc.shape:
            raise DimensionError("degenerate flags must match score length")
        ranking = np.argsort(-sc, kind="stable").astype(np.int64)
        return cls(
            method=method,
            scores=_frozen_array(sc, np.float64),
            ranking=_frozen_array(ranking, np.int64),
            degenerate=_frozen_array(deg, bool),
        )

    @property
    def p(self) -> int:
        return self.scores.shape[0]

    def positions(self) -> np.ndarray:
        """Inverse of ``ranking``: positions[j] = rank of feature j."""
        pos = np.empty(self.p, dtype=np.int64)
        pos[self.ranking] = np.arange(self.p)
        return pos

    def top(self, d: int) -> np.ndarray:
        return self.ranking[:d].copy()


@dataclass(frozen=True)
class TrueModel:
    """The causative feature index set (0-based)."""

    indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) == 0:
            raise ValidationError("true model must be non-empty")
        if any(i < 0 for i in self.indices):
            raise ValidationError("feature indices must be non-negative")
        if len(set(self.indices)) != len(self.indices):
            raise ValidationError("duplicate feature index in true model")

    @classmethod
    def of(cls, indices: Iterable[int]) -> "TrueModel":
        return cls(tuple(int(i) for i in indices))

    @property
    def size(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class CellTable:
    """Empirical cell probabilities of one feature against a binary response.

    ``p_km[k, m]`` estimates P(X = level k, Y = m); marginals and the
    score-weighted feature mean plus the 1/n-denominator standard
    deviations come along because every screener needs them.
    """

    p_km: np.ndarray
    p_k: np.ndarray
    p_m: np.ndarray
    scores: np.ndarray
    x_mean: float
    y_mean: float
    x_sd: float
    y_sd: float
    n: int


def validate_pair(design: CategoricalDesign, y: ResponseVector) -> None:
    if design.n != y.n:
        raise DimensionError(
            f"design has {design.n} observations but response has {y.n}")


def empirical_cells(design: CategoricalDesign, y: ResponseVector, j: int) -> CellTable:
    """Cell proportions, marginals and biased moments for feature ``j``.

    The standard deviations use the 1/n denominator, matching the plug-in
    estimators the trend statistic is built from.
    """
    validate_pair(design, y)
    if not y.is_binary:
        raise ValidationError("cell tables require a binary response")
    if not 0 <= j < design.p:
        raise ValidationError(f"feature index {j} out of range for p={design.p}")
    kj = int(design.level_counts[j])
    yv = y.values.astype(np.int64)
    counts = np.bincount(design.levels[:, j] * 2 + yv, minlength=kj * 2)
    counts = counts.reshape(kj, 2).astype(np.float64)
    n = design.n
    p_km = counts / n
    p_k = p_km.sum(axis=1)
    p_m = p_km.sum(axis=0)
    v = design.level_scores[j, :kj]
    x_mean = float(v @ p_k)
    x_sd = float(np.sqrt(max((v - x_mean) ** 2 @ p_k, 0.0)))
    y_mean = float(p_m[1])
    y_sd = float(np.sqrt(max(p_m[0] * p_m[1], 0.0)))
    return CellTable(
        p_km=_frozen_array(p_km, np.float64),
        p_k=_frozen_array(p_k, np.float64),
        p_m=_frozen_array(p_m, np.float64),
        scores=_frozen_array(v, np.float64),
        x_mean=x_mean,
        y_mean=y_mean,
        x_sd=x_sd,
        y_sd=y_sd,
        n=n,
    )


def design_cell_counts(design: CategoricalDesign, y: ResponseVector) -> np.ndarray:
    """All-feature contingency counts, (p, kmax, 2), via the active backend."""
    validate_pair(design, y)
    return kernels.cell_counts(design.levels, y.values.astype(np.int64), design.kmax)
