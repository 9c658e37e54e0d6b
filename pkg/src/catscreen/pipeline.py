"""Two-stage iterative screening with penalized-logistic post-screening.

Stage one keeps the strongest marginal trend-statistic features; stage two
fits an unpenalized logistic model on those, screens the remaining
features by their correlation with the working residuals, and fills the
set up to about n / log(n) features.  The stage-one size is tuned by the
mean squared prediction error of a logistic fit on the combined set over
random 75/25 splits (splits shared across candidate sizes).  The combined
ranking is then truncated to d = [n^{4/5} / log(n^{4/5})] features (square
brackets are nearest-integer) and handed to the penalized post-screening
fits (lasso, adaptive lasso, elastic net).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import CategoricalDesign, ResponseVector
from .errors import ConfigError, DimensionError, ValidationError
from .penalized import (
    PenalizedFit,
    PenaltySpec,
    _sigmoid,
    adaptive_lasso,
    cv_select,
    elastic_net_grid,
)
from .screeners import cat_sis

POST_METHODS = ("lasso", "adaptive", "enet")


def nearest_int(x: float) -> int:
    """Round half up; the bracket convention the size formulas use."""
    return int(math.floor(x + 0.5))


def stage_budget(n: int) -> int:
    """Total screened-set size [n / log n]."""
    return nearest_int(n / math.log(n))


def final_model_size(n: int) -> int:
    """Post-screening truncation size [n^{4/5} / log(n^{4/5})]."""
    m = n ** 0.8
    return nearest_int(m / math.log(m))


@dataclass(frozen=True)
class PipelineSpec:
    """Tuning and post-screening knobs for one pipeline run."""

    p1_min: int = 5
    p1_max: int | None = None  # defaults to the full stage budget
    tuning_reps: int = 200
    train_fraction: float = 0.75
    post_methods: tuple[str, ...] = POST_METHODS
    seed: int = 0
    coarse_stride: int = 8
    exhaustive: bool = False
    folds: int = 10
    enet_alpha_grid: tuple[float, ...] | None = None
    positive_only: bool = True

    def __post_init__(self):
        if self.p1_min < 1:
            raise ConfigError("p1_min must be at least 1")
        if not 0.0 < self.train_fraction < 1.0:
            raise ConfigError("train_fraction must be in (0, 1)")
        if self.tuning_reps < 1:
            raise ConfigError("tuning_reps must be at least 1")
        if self.coarse_stride < 1:
            raise ConfigError("coarse_stride must be at least 1")
        unknown = set(self.post_methods) - set(POST_METHODS)
        if unknown:
            raise ConfigError(f"unknown post methods {sorted(unknown)}")


def logistic_irls(x: np.ndarray, y: np.ndarray, ridge: float = 0.0,
                  max_iter: int = 50, tol: float = 1e-10):
    """Newton/IRLS logistic fit with intercept.

    Returns (intercept, coefficients, converged).  ``ridge`` adds a small
    quadratic penalty on the coefficients (not the intercept) to stabilize
    near-separated fits.  Steps are halved when the penalized likelihood
    would decrease or go non-finite.
    """
    n, k = x.shape
    xa = np.hstack([np.ones((n, 1)), x])
    b = np.zeros(k + 1)
    b[0] = _init_intercept(y)
    pen_mask = np.ones(k + 1)
    pen_mask[0] = 0.0
    def objective(bv):
        eta = xa @ bv
        softplus = np.where(eta > 0, eta + np.log1p(np.exp(-np.abs(eta))),
                            np.log1p(np.exp(-np.abs(eta))))
        return float(np.sum(y * eta - softplus) - 0.5 * ridge * np.sum((pen_mask * bv) ** 2))
    obj = objective(b)
    converged = False
    for _ in range(max_iter):
        eta = xa @ b
        mu = _sigmoid(eta)
        w = np.maximum(mu * (1.0 - mu), 1e-10)
        g = xa.T @ (y - mu) - ridge * pen_mask * b
        h = xa.T @ (xa * w[:, None]) + ridge * np.diag(pen_mask)
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            return float(b[0]), b[1:].copy(), False
        scale = 1.0
        for _ in range(20):
            cand = b + scale * step
            cand_obj = objective(cand)
            if np.isfinite(cand_obj) and cand_obj >= obj - 1e-12:
                break
            scale *= 0.5
        else:
            return float(b[0]), b[1:].copy(), False
        b = b + scale * step
        obj = objective(b)
        if float(np.max(np.abs(scale * step))) < tol:
            converged = True
            break
    return float(b[0]), b[1:].copy(), converged


def _init_intercept(y):
    ybar = min(max(float(np.mean(y)), 1e-12), 1.0 - 1e-12)
    return float(np.log(ybar / (1.0 - ybar)))


def _fit_with_fallback(x, y, ridge_fallback: float = 1e-4):
    """Plain IRLS first; ridge-stabilized refit when it does not converge."""
    b0, coef, ok = logistic_irls(x, y)
    if ok:
        return b0, coef, False
    n = x.shape[0]
    b0, coef, _ = logistic_irls(x, y, ridge=ridge_fallback * n)
    return b0, coef, True


def residual_scores(xs: np.ndarray, resid: np.ndarray) -> np.ndarray:
    """|plug-in correlation| of every column with the working residuals."""
    n = xs.shape[0]
    rc = resid - resid.mean()
    r_sd = float(np.sqrt(np.mean(rc * rc)))
    if r_sd == 0.0:
        return np.zeros(xs.shape[1])
    xc = xs - xs.mean(axis=0)
    tau = (xc.T @ rc) / n
    x_sd = np.sqrt(np.mean(xc * xc, axis=0))
    out = np.zeros(xs.shape[1])
    np.divide(np.abs(tau), x_sd * r_sd, out=out, where=x_sd > 0)
    return out


@dataclass(frozen=True)
class TwoStageRank:
    """Combined stage-one and stage-two feature set with iterative scores."""

    stage1: np.ndarray
    stage2: np.ndarray
    scores: np.ndarray  # aligned with concat(stage1, stage2)
    ridge_fallback: bool

    @property
    def indices(self) -> np.ndarray:
        return np.concatenate([self.stage1, self.stage2])


def two_stage_rank(design: CategoricalDesign, y: ResponseVector, p1: int,
                   total: int, marginal=None) -> TwoStageRank:
    """Stage-one top-p1 marginal features plus stage-two residual screening
    filling the set to ``total`` features."""
    if not 1 <= p1 <= total:
        raise ConfigError(f"p1 must be in [1, {total}]")
    if design.p < total:
        raise DimensionError(f"need p >= {total} features, have {design.p}")
    if marginal is None:
        marginal = cat_sis(design, y)
    xs = design.scored_matrix()
    stage1 = marginal.ranking[:p1].copy()
    p2 = total - p1
    if p2 == 0:
        return TwoStageRank(stage1, np.array([], dtype=np.int64),
                            marginal.scores[stage1].copy(), False)
    b0, coef, flagged = _fit_with_fallback(xs[:, stage1], y.values)
    fitted = _sigmoid(b0 + xs[:, stage1] @ coef)
    resid = y.values - fitted
    rest = marginal.ranking[p1:].copy()
    rs = residual_scores(xs[:, rest], resid)
    order = np.argsort(-rs, kind="stable")[:p2]
    stage2 = rest[order]
    scores = np.concatenate([marginal.scores[stage1], rs[order]])
    return TwoStageRank(stage1, stage2, scores, flagged)


@dataclass(frozen=True)
class IterativeScreenResult:
    chosen_p1: int
    p2: int
    total: int
    ranked: TwoStageRank
    candidate_p1: np.ndarray
    candidate_mspe: np.ndarray
    ridge_fallbacks: int

    @property
    def positive_scores(self) -> int:
        return int(np.count_nonzero(self.ranked.scores > 0.0))


def _tuning_splits(n: int, reps: int, train_fraction: float, seed: int):
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(11,)))
    n_train = max(1, int(round(n * train_fraction)))
    if n_train >= n:
        n_train = n - 1
    splits = []
    for _ in range(reps):
        perm = rng.permutation(n)
        splits.append((perm[:n_train], perm[n_train:]))
    return splits


def _mspe_for_set(xs, y, idx, splits):
    """Mean (y - phat)^2 on held-out blocks over the shared splits."""
    total = 0.0
    fallbacks = 0
    for train, test in splits:
        ytr = y[train]
        if ytr.min() == ytr.max():
            fitted = np.full(test.size, float(ytr.mean()))
            fallbacks += 1
        else:
            b0, coef, flagged = _fit_with_fallback(xs[np.ix_(train, idx)], ytr)
            fallbacks += int(flagged)
            fitted = _sigmoid(b0 + xs[np.ix_(test, idx)] @ coef)
        total += float(np.mean((y[test] - fitted) ** 2))
    return total / len(splits), fallbacks


def iterative_screen(design: CategoricalDesign, y: ResponseVector,
                     spec: PipelineSpec) -> IterativeScreenResult:
    """Choose the stage-one size by predictive tuning and build the combined
    ranked set of ``stage_budget(n)`` features."""
    if not y.is_binary:
        raise ValidationError("the pipeline requires a binary response")
    n = design.n
    total = stage_budget(n)
    if design.p < total:
        raise DimensionError(f"need p >= {total} features, have {design.p}")
    p1_max = total if spec.p1_max is None else min(spec.p1_max, total)
    p1_min = spec.p1_min
    if p1_min > p1_max:
        raise ConfigError(f"empty p1 range [{p1_min}, {p1_max}]")
    marginal = cat_sis(design, y)
    xs = design.scored_matrix()
    splits = _tuning_splits(n, spec.tuning_reps, spec.train_fraction, spec.seed)

    cache: dict[int, TwoStageRank] = {}

    def ranked_for(p1: int) -> TwoStageRank:
        if p1 not in cache:
            cache[p1] = two_stage_rank(design, y, p1, total, marginal=marginal)
        return cache[p1]

    fallbacks = 0

    def mspe_of(p1: int) -> float:
        nonlocal fallbacks
        r = ranked_for(p1)
        fallbacks += int(r.ridge_fallback)
        val, fb = _mspe_for_set(xs, y.values, r.indices, splits)
        fallbacks += fb
        return val

    if spec.exhaustive or spec.coarse_stride == 1:
        candidates = list(range(p1_min, p1_max + 1))
    else:
        candidates = list(range(p1_min, p1_max + 1, spec.coarse_stride))
        if candidates[-1] != p1_max:
            candidates.append(p1_max)
    evaluated: dict[int, float] = {c: mspe_of(c) for c in candidates}
    best = min(evaluated, key=lambda c: (evaluated[c], c))
    if not spec.exhaustive and spec.coarse_stride > 1:
        lo = max(p1_min, best - spec.coarse_stride + 1)
        hi = min(p1_max, best + spec.coarse_stride - 1)
        for c in range(lo, hi + 1):
            if c not in evaluated:
                evaluated[c] = mspe_of(c)
        best = min(evaluated, key=lambda c: (evaluated[c], c))
    cand = np.array(sorted(evaluated), dtype=np.int64)
    return IterativeScreenResult(
        chosen_p1=int(best),
        p2=total - int(best),
        total=total,
        ranked=ranked_for(best),
        candidate_p1=cand,
        candidate_mspe=np.array([evaluated[c] for c in cand]),
        ridge_fallbacks=fallbacks,
    )


@dataclass(frozen=True)
class PipelineReport:
    chosen_p1: int
    p2: int
    total: int
    final_d: int
    selected: np.ndarray
    fits: dict[str, PenalizedFit]
    screen_result: IterativeScreenResult

    def summary_rows(self):
        labels = {"lasso": "Lasso", "adaptive": "Adaptive Lasso", "enet": "Elastic Net"}
        rows = []
        for name, fit in self.fits.items():
            label = labels[name]
            if name == "enet":
                label += f" (alpha = {fit.chosen_alpha:.2f})"
            m = fit.metrics
            rows.append((label, m.model_size, m.pseudo_r2, m.aic, m.misclassification))
        return rows

    def summary_table(self) -> str:
        lines = [
            "| Post Screening Method | Model size | McFadden's pseudo-R2 | AIC | Misclass. rate |",
            "|---|---|---|---|---|",
        ]
        for label, size, r2, aic, mis in self.summary_rows():
            lines.append(f"| {label} | {size} | {r2:.4f} | {aic:.2f} | {100 * mis:.2f}% |")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "chosen_p1": self.chosen_p1,
            "p2": self.p2,
            "total": self.total,
            "final_d": self.final_d,
            "selected": self.selected.tolist(),
            "positive_scores": self.screen_result.positive_scores,
            "candidate_p1": self.screen_result.candidate_p1.tolist(),
            "candidate_mspe": self.screen_result.candidate_mspe.tolist(),
            "fits": {
                name: {
                    "intercept": fit.intercept,
                    "coefficients": fit.coefficients.tolist(),
                    "chosen_lambda": fit.chosen_lambda,
                    "chosen_alpha": fit.chosen_alpha,
                    "model_size": fit.metrics.model_size,
                    "pseudo_r2": fit.metrics.pseudo_r2,
                    "aic": fit.metrics.aic,
                    "misclassification": fit.metrics.misclassification,
                }
                for name, fit in self.fits.items()
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)


def run_pipeline(design: CategoricalDesign, y: ResponseVector,
                 spec: PipelineSpec) -> PipelineReport:
    """Iterative screen, truncate to the final model size, post-screen."""
    screened = iterative_screen(design, y, spec)
    d = final_model_size(design.n)
    order = np.argsort(-screened.ranked.scores, kind="stable")
    idx = screened.ranked.indices[order]
    scores = screened.ranked.scores[order]
    if spec.positive_only:
        idx = idx[scores > 0.0]
    selected = idx[:d]
    xs = design.scored_matrix()[:, selected]
    yv = y.values
    fits: dict[str, PenalizedFit] = {}
    for mi, name in enumerate(spec.post_methods):
        method_seed = (spec.seed << 3) + mi + 1
        if name == "lasso":
            fits[name] = cv_select(xs, yv, PenaltySpec(alpha=1.0),
                                   folds=spec.folds, seed=method_seed)
        elif name == "adaptive":
            fits[name] = adaptive_lasso(xs, yv, folds=spec.folds, seed=method_seed)
        elif name == "enet":
            grid = spec.enet_alpha_grid
            fits[name] = elastic_net_grid(
                xs, yv, alpha_grid=None if grid is None else np.asarray(grid),
                folds=spec.folds, seed=method_seed)
    return PipelineReport(
        chosen_p1=screened.chosen_p1,
        p2=screened.p2,
        total=screened.total,
        final_d=d,
        selected=selected.astype(np.int64),
        fits=fits,
        screen_result=screened,
    )
