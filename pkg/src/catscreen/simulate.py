"""Seedable generators for the four benchmark simulation designs.

Design 1: three-level features whose conditional distribution given the
binary response is Binomial(2, pi) with per-feature success probabilities,
an additive-genotype analogue.  Design 2: causative features cut from a
normal shifted by the response.  Design 3: uniform three-level features
driving the response through a logistic link.  Design 4: continuous AR(1)
Gaussian features with a linear continuous response.

Streams come from a counter-based Philox generator keyed by
(seed, stream); within one dataset, draws happen in a fixed documented
order (response first, then causative block, then noise block), so a
given (spec, seed) always reproduces the same bytes no matter how many
replicates run in parallel around it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .data import CategoricalDesign, ResponseVector, TrueModel
from .errors import ConfigError

# success probabilities of the causative block of design 1, rows are y = 0, 1
SIM1_PI = np.array([
    [0.3, 0.4, 0.6, 0.7, 0.2, 0.4, 0.3, 0.8, 0.4, 0.2],
    [0.6, 0.1, 0.1, 0.4, 0.8, 0.7, 0.9, 0.2, 0.7, 0.6],
])

# (lower, upper) discretization cutoffs of the causative block of design 2
SIM2_CUTOFFS = np.array([
    [0.0, 0.0, 0.2, 0.0, -0.213, 0.25, 0.0, 0.1, -0.2, 0.213],
    [0.75, 1.0, 0.8, 0.9, 1.213, 1.0, 1.0, 1.0, 1.2, 0.787],
])

# linear-predictor contribution per level (rows are x = 0, 1, 2) of design 3
SIM3_THETA = np.array([
    [0.0, -5.0, 2.0, -6.0, 1.0],
    [3.0, -3.0, 4.0, -4.0, 3.0],
    [5.0, -1.0, 6.0, -2.0, 5.0],
])

# regression coefficients of the causative block of design 4
SIM4_BETA = np.array([5.0, -5.0, 5.5, -6.0, 6.0, 4.0, 4.5, -5.5, 5.0, -4.0])

SIM4_AR_RHO = 0.2

_PY_RANGE = (0.05, 0.95)


@dataclass(frozen=True)
class SimulationSpec:
    """Full parameterization of one simulated dataset."""

    design_id: int
    n: int = 200
    p: int = 5000
    seed: int = 0
    sim1_pi: np.ndarray = field(default_factory=lambda: SIM1_PI.copy())
    sim2_cutoffs: np.ndarray = field(default_factory=lambda: SIM2_CUTOFFS.copy())
    sim3_theta: np.ndarray = field(default_factory=lambda: SIM3_THETA.copy())
    sim4_beta: np.ndarray = field(default_factory=lambda: SIM4_BETA.copy())
    sim4_ar_rho: float = SIM4_AR_RHO
    fixed_py: float | None = None  # pin P(Y=1) instead of drawing it (probe mode)

    def __post_init__(self):
        if self.design_id not in (1, 2, 3, 4):
            raise ConfigError(f"design_id must be 1..4, got {self.design_id}")
        if self.n < 2:
            raise ConfigError("need at least 2 observations")
        if np.any(self.sim2_cutoffs[0] > self.sim2_cutoffs[1]):
            raise ConfigError("lower cutoff exceeds upper cutoff")
        if self.fixed_py is not None and not 0.0 < self.fixed_py < 1.0:
            raise ConfigError("fixed_py must be in (0, 1)")

    def with_seed(self, seed: int) -> "SimulationSpec":
        return replace(self, seed=seed)

    @property
    def truth(self) -> TrueModel:
        k = 5 if self.design_id == 3 else 10
        return TrueModel.of(range(k))


def sim_default(design_id: int, **kwargs) -> SimulationSpec:
    """The per-design default sizes (n=200; p=5000, design 4 uses p=1000)."""
    p = 1000 if design_id == 4 else 5000
    kwargs.setdefault("n", 200)
    kwargs.setdefault("p", p)
    return SimulationSpec(design_id=design_id, **kwargs)


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator for a derived stream: key = (seed, stream)."""
    key = (np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(stream & 0xFFFFFFFFFFFFFFFF))
    return np.random.Generator(np.random.Philox(key=key))


def _binary_response(rng: np.random.Generator, spec: SimulationSpec) -> np.ndarray:
    if spec.fixed_py is not None:
        p_y = spec.fixed_py
    else:
        p_y = rng.uniform(*_PY_RANGE)
    return (rng.random(spec.n) < p_y).astype(np.int64)


def _binomial_noise(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """Noise block: each column Binomial(2, p_j), p_j fresh per column."""
    if m == 0:
        return np.zeros((n, 0), dtype=np.int64)
    p_j = rng.uniform(_PY_RANGE[0], _PY_RANGE[1], size=m)
    return rng.binomial(2, np.broadcast_to(p_j, (n, m))).astype(np.int64)


def _three_level_design(levels: np.ndarray) -> CategoricalDesign:
    p = levels.shape[1]
    scores = np.broadcast_to(np.arange(3, dtype=np.float64), (p, 3)).copy()
    counts = np.full(p, 3, dtype=np.int64)
    return CategoricalDesign(
        levels=np.ascontiguousarray(levels, dtype=np.int64),
        level_scores=scores,
        level_counts=counts,
    )


def gen_sim1(spec: SimulationSpec):
    """Binomial-genotype design: X_j | Y=m ~ Binomial(2, pi[m, j])."""
    if spec.design_id != 1:
        raise ConfigError("spec is not for design 1")
    q = spec.sim1_pi.shape[1]
    if spec.p < q:
        raise ConfigError(f"need p >= {q} for design 1")
    rng = rng_for(spec.seed)
    yv = _binary_response(rng, spec)
    pi = spec.sim1_pi[yv, :]  # (n, q)
    causative = rng.binomial(2, pi).astype(np.int64)
    noise = _binomial_noise(rng, spec.n, spec.p - q)
    levels = np.concatenate([causative, noise], axis=1)
    return _three_level_design(levels), ResponseVector.binary(yv), TrueModel.of(range(q))


def discretize_three_level(z, lo, hi) -> np.ndarray:
    """Cut a continuous draw into levels {0, 1, 2}; both boundaries belong
    to the middle level (lo <= z <= hi maps to 1)."""
    z = np.asarray(z, dtype=np.float64)
    return np.where(z < lo, 0, np.where(z <= hi, 1, 2)).astype(np.int64)


def gen_sim2(spec: SimulationSpec):
    """Discretized-normal design: X_j cuts N(Y, 1) at per-feature cutoffs."""
    if spec.design_id != 2:
        raise ConfigError("spec is not for design 2")
    q = spec.sim2_cutoffs.shape[1]
    if spec.p < q:
        raise ConfigError(f"need p >= {q} for design 2")
    rng = rng_for(spec.seed)
    yv = _binary_response(rng, spec)
    z = yv[:, None] + rng.standard_normal((spec.n, q))
    lo = spec.sim2_cutoffs[0][None, :]
    hi = spec.sim2_cutoffs[1][None, :]
    causative = discretize_three_level(z, lo, hi)
    noise = _binomial_noise(rng, spec.n, spec.p - q)
    levels = np.concatenate([causative, noise], axis=1)
    return _three_level_design(levels), ResponseVector.binary(yv), TrueModel.of(range(q))


def gen_sim3(spec: SimulationSpec):
    """Logistic design: uniform three-level features, five causative."""
    if spec.design_id != 3:
        raise ConfigError("spec is not for design 3")
    q = spec.sim3_theta.shape[1]
    if spec.p < q:
        raise ConfigError(f"need p >= {q} for design 3")
    rng = rng_for(spec.seed)
    levels = rng.integers(0, 3, size=(spec.n, spec.p)).astype(np.int64)
    lin = spec.sim3_theta[levels[:, :q], np.arange(q)[None, :]].sum(axis=1)
    prob = 1.0 / (1.0 + np.exp(-lin))
    yv = (rng.random(spec.n) < prob).astype(np.int64)
    return _three_level_design(levels), ResponseVector.binary(yv), TrueModel.of(range(q))


def gen_sim4(spec: SimulationSpec):
    """AR(1) Gaussian design with a linear continuous response.

    The recursion x_j = rho x_{j-1} + sqrt(1 - rho^2) eps_j reproduces the
    covariance rho^|j1 - j2| exactly, in O(np) instead of a dense
    factorization.
    """
    if spec.design_id != 4:
        raise ConfigError("spec is not for design 4")
    q = spec.sim4_beta.shape[0]
    if spec.p < q:
        raise ConfigError(f"need p >= {q} for design 4")
    rng = rng_for(spec.seed)
    eps = rng.standard_normal((spec.n, spec.p))
    x = np.empty_like(eps)
    rho = spec.sim4_ar_rho
    scale = np.sqrt(1.0 - rho * rho)
    x[:, 0] = eps[:, 0]
    for j in range(1, spec.p):
        x[:, j] = rho * x[:, j - 1] + scale * eps[:, j]
    yv = x[:, :q] @ spec.sim4_beta
    return x, ResponseVector.continuous(yv), TrueModel.of(range(q))


_GENERATORS = {1: gen_sim1, 2: gen_sim2, 3: gen_sim3, 4: gen_sim4}


def generate(spec: SimulationSpec):
    """Run the generator matching ``spec.design_id``."""
    return _GENERATORS[spec.design_id](spec)


def binomial_cell_probs(pi: float) -> np.ndarray:
    """(P(X=0), P(X=1), P(X=2)) for X ~ Binomial(2, pi)."""
    return np.array([(1 - pi) ** 2, 2 * pi * (1 - pi), pi**2])


def sim1_population_correlations(pi_table: np.ndarray, p_y: float) -> np.ndarray:
    """Exact trend-statistic population values for the design-1 causative
    block at a fixed response probability, via enumeration of the 3x2
    joint cell probabilities."""
    if not 0.0 < p_y < 1.0:
        raise ConfigError("p_y must be in (0, 1)")
    q = pi_table.shape[1]
    out = np.empty(q)
    p_m = np.array([1.0 - p_y, p_y])
    v = np.arange(3, dtype=np.float64)
    for j in range(q):
        p_km = np.stack(
            [binomial_cell_probs(pi_table[m, j]) * p_m[m] for m in (0, 1)], axis=1)
        p_k = p_km.sum(axis=1)
        ex = v @ p_k
        ey = p_m[1]
        tau = ((v - ex)[:, None] * (np.array([0.0, 1.0]) - ey)[None, :] * p_km).sum()
        sx = np.sqrt((v - ex) ** 2 @ p_k)
        sy = np.sqrt(p_m[0] * p_m[1])
        out[j] = abs(tau) / (sx * sy)
    return out
