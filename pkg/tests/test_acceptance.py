"""Acceptance suite.

Each test prints one pass/fail line (visible under ``pytest -rA``) and
asserts the stated tolerance.  The replication benchmarks run at their
stated scale, so this module takes several minutes; the shared heavy runs
are session fixtures.
"""

import time

import numpy as np
import pytest

from catscreen import (
    BenchSpec,
    CategoricalDesign,
    Method,
    PenaltySpec,
    PipelineSpec,
    RatioArgmax,
    ResponseVector,
    ScreenResult,
    cat_sis,
    cat_sis_numerator_cellform,
    consistency_probe,
    empirical_cells,
    fit_glm_path,
    run_bench,
    run_pipeline,
    select,
    sim_default,
)
from catscreen.penalized import _sigmoid
from catscreen.pipeline import final_model_size, stage_budget
from catscreen.simulate import SimulationSpec

MASTER_SEED = 0

# published comparison targets for the four simulation designs
SIM1_MEANS = {"cat": 54.674, "mmle": 150.340, "dc": 64.990, "hlw": 93.018}
SIM2_MEANS = {"cat": 112.627, "mmle": 508.672, "dc": 125.258, "hlw": 171.829}
SIM3_MEANS = {"cat": 41.976, "dc": 46.470, "mmle": 41.934, "hlw": 93.270}
SIM4_MEANS = {"cat": 95.610, "dc": 142.084}

# published trend-screener inclusion proportions for design 1 (rows d=10,15,20)
TABLE7_CAT = {
    10: [0.864, 0.980, 0.988, 0.832, 1.000, 0.998, 0.844, 0.974, 0.836, 0.858],
    15: [0.916, 0.988, 0.994, 0.922, 1.000, 0.998, 0.912, 0.982, 0.904, 0.908],
    20: [0.920, 0.988, 0.994, 0.930, 1.000, 0.998, 0.926, 0.990, 0.930, 0.930],
}


def _report(num, ok, detail):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}")
    return ok


def _rel_band(value, target, frac=0.30):
    return abs(value - target) <= frac * target


@pytest.fixture(scope="session")
def identity_datasets():
    """1000 randomized categorical datasets with n <= 200 and K_j <= 5."""
    rng = np.random.default_rng(424242)
    out = []
    for _ in range(1000):
        n = int(rng.integers(5, 201))
        k = int(rng.integers(2, 6))
        levels = rng.integers(0, k, size=(n, 1))
        scores = [np.sort(rng.normal(size=k))]
        y = rng.integers(0, 2, size=n)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        design = CategoricalDesign.from_levels(levels, level_scores=scores)
        out.append((design, ResponseVector.binary(y)))
    return out


@pytest.fixture(scope="session")
def sim1_bench():
    spec = BenchSpec(
        sim=sim_default(1),
        replications=500,
        methods=(Method.CAT_SIS, Method.HLW_SIS, Method.DC_SIS, Method.MMLE),
        d_list=(10, 15, 20),
        master_seed=MASTER_SEED,
        method_replications={Method.DC_SIS: 100, Method.MMLE: 100},
    )
    return run_bench(spec)


@pytest.fixture(scope="session")
def sim2_bench():
    spec = BenchSpec(
        sim=sim_default(2),
        replications=200,
        methods=(Method.CAT_SIS, Method.HLW_SIS, Method.MMLE),
        d_list=(10,),
        master_seed=MASTER_SEED,
    )
    return run_bench(spec)


@pytest.fixture(scope="session")
def sim3_bench():
    spec = BenchSpec(
        sim=sim_default(3),
        replications=200,
        methods=(Method.CAT_SIS, Method.HLW_SIS, Method.DC_SIS, Method.MMLE),
        d_list=(10, 15, 20),
        master_seed=MASTER_SEED,
    )
    return run_bench(spec)


@pytest.fixture(scope="session")
def sim4_bench():
    spec = BenchSpec(
        sim=sim_default(4),
        replications=500,
        methods=(Method.CAT_SIS, Method.DC_SIS),
        d_list=(10,),
        master_seed=MASTER_SEED,
    )
    return run_bench(spec)


def test_criterion_01_numerator_identity(identity_datasets):
    t0 = time.perf_counter()
    worst = 0.0
    for design, y in identity_datasets:
        cells = empirical_cells(design, y, 0)
        cell_form = cat_sis_numerator_cellform(cells)
        x = design.scored_matrix()[:, 0]
        obs_form = float(np.mean((x - x.mean()) * (y.values - y.values.mean())))
        worst = max(worst, abs(cell_form - obs_form))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 10.0
    assert _report(1, ok, f"numerator identity: max |cell - obs| = {worst:.2e}, "
                          f"runtime {elapsed:.2f}s"), \
        f"identity violated (worst {worst:.3e}) or too slow ({elapsed:.1f}s)"


def test_criterion_02_pearson_oracle_equivalence(identity_datasets):
    worst = 0.0
    for design, y in identity_datasets:
        score = cat_sis(design, y).scores[0]
        x = design.scored_matrix()[:, 0]
        yv = y.values
        tau = np.mean((x - x.mean()) * (yv - yv.mean()))
        sx = np.sqrt(np.mean((x - x.mean()) ** 2))
        sy = np.sqrt(np.mean((yv - yv.mean()) ** 2))
        oracle = 0.0 if sx == 0.0 or sy == 0.0 else abs(tau) / (sx * sy)
        worst = max(worst, abs(score - oracle))
    ok = worst <= 1e-12
    assert _report(2, ok, f"trend statistic vs plug-in correlation oracle: "
                          f"max diff = {worst:.2e}"), worst


def test_criterion_03_sim1_reproduction(sim1_bench):
    r = sim1_bench
    cat = r.mean_mms[Method.CAT_SIS]
    hlw = r.mean_mms[Method.HLW_SIS]
    cat100 = float(r.raw_mms[Method.CAT_SIS][:100].mean())
    dc100 = float(r.raw_mms[Method.DC_SIS].mean())
    hlw100 = float(r.raw_mms[Method.HLW_SIS][:100].mean())
    cat_ok = _rel_band(cat, SIM1_MEANS["cat"])
    hlw_ok = _rel_band(hlw, SIM1_MEANS["hlw"])
    order_ok = cat100 < dc100 < hlw100
    ok = cat_ok and hlw_ok and order_ok
    assert _report(
        3, ok,
        f"design-1 mean MMS: trend {cat:.3f} (target {SIM1_MEANS['cat']} +-30%), "
        f"chi-square {hlw:.3f} (target {SIM1_MEANS['hlw']} +-30%); "
        f"common-100 ordering {cat100:.1f} < {dc100:.1f} < {hlw100:.1f}"), (
        f"cat_in_band={cat_ok} hlw_in_band={hlw_ok} ordering={order_ok}")


def test_criterion_04_sim1_inclusion_proportions(sim1_bench):
    inc = sim1_bench.inclusion[Method.CAT_SIS]
    x5_x6_ok = inc[0, 4] >= 0.98 and inc[0, 5] >= 0.98
    worst = 0.0
    for di, d in enumerate((10, 15, 20)):
        worst = max(worst, float(np.max(np.abs(inc[di] - np.array(TABLE7_CAT[d])))))
    band_ok = worst <= 0.06
    ok = x5_x6_ok and band_ok
    assert _report(
        4, ok,
        f"design-1 inclusions: X5={inc[0, 4]:.3f} X6={inc[0, 5]:.3f} (need >=0.98); "
        f"max |diff to published table| = {worst:.3f} (need <=0.06)"), (
        "the published design-1 parameter table cannot reproduce the published "
        "inclusion table: features 6 and 9 have identical parameters there yet "
        f"are reported 0.162 apart; measured d=10 row {np.round(inc[0], 3).tolist()}")


def test_criterion_05_sim2(sim2_bench):
    r = sim2_bench
    cat = r.mean_mms[Method.CAT_SIS]
    hlw = r.mean_mms[Method.HLW_SIS]
    mm = r.mean_mms[Method.MMLE]
    band_ok = _rel_band(cat, SIM2_MEANS["cat"])
    order_ok = cat < hlw
    ratio_ok = mm > 3.0 * cat
    ok = band_ok and order_ok and ratio_ok
    assert _report(
        5, ok,
        f"design-2 mean MMS at 200 reps: trend {cat:.3f} "
        f"(target {SIM2_MEANS['cat']} +-30%), chi-square {hlw:.3f}, "
        f"marginal-logistic {mm:.3f} (need > 3x trend = {3 * cat:.1f})"), (
        f"band={band_ok} order={order_ok} ratio={ratio_ok}; the published "
        f"ratio is 4.5x, measured {mm / cat:.2f}x")


def test_criterion_06_sim3(sim3_bench):
    r = sim3_bench
    cat = r.mean_mms[Method.CAT_SIS]
    mm = r.mean_mms[Method.MMLE]
    hlw = r.mean_mms[Method.HLW_SIS]
    rel = abs(cat - mm) / mm
    rel_ok = rel <= 0.15
    order_ok = cat < hlw and mm < hlw
    x1 = {m.value: float(r.inclusion[m][0, 0]) for m in r.methods}
    x1_ok = all(v == 1.0 for v in x1.values())
    ok = rel_ok and order_ok and x1_ok
    assert _report(
        6, ok,
        f"design-3 at 200 reps: trend {cat:.3f} vs marginal-logistic {mm:.3f} "
        f"(|rel diff| {rel:.3f} <= 0.15), chi-square {hlw:.3f}; "
        f"X1 inclusion at d=10 {x1}"), (
        f"rel={rel_ok} order={order_ok} x1={x1_ok}")


def test_criterion_07_sim4(sim4_bench):
    r = sim4_bench
    cat = r.mean_mms[Method.CAT_SIS]
    dc = r.mean_mms[Method.DC_SIS]
    band_ok = _rel_band(cat, SIM4_MEANS["cat"])
    order_ok = cat < dc
    ok = band_ok and order_ok
    assert _report(
        7, ok,
        f"design-4 mean MMS at 500 reps: trend {cat:.3f} "
        f"(target {SIM4_MEANS['cat']} +-30%) < distance-correlation {dc:.3f}"), (
        f"band={band_ok} order={order_ok}")


def test_criterion_08_consistency_probe():
    t0 = time.perf_counter()
    base = SimulationSpec(design_id=1, n=200, p=100)
    probe = consistency_probe([200, 800, 3200], base, reps=200,
                              master_seed=MASTER_SEED)
    elapsed = time.perf_counter() - t0
    rec = probe.recovery_probability
    err = probe.median_max_error
    rec_ok = np.all(np.diff(rec) >= 0.0) and rec[-1] >= 0.95
    err_ok = bool(np.all(np.diff(err) < 0.0))
    time_ok = elapsed < 300.0
    ok = rec_ok and err_ok and time_ok
    assert _report(
        8, ok,
        f"consistency probe: recovery {np.round(rec, 3).tolist()}, "
        f"median max error {np.round(err, 4).tolist()}, runtime {elapsed:.1f}s"), (
        f"recovery={rec_ok} error_decreasing={err_ok} runtime={time_ok}")


def test_criterion_09_ratio_heuristic():
    result = ScreenResult.from_scores(Method.CAT_SIS, [0.8, 0.00008, 8e-10])
    no_floor = select(result, RatioArgmax(floor=0.0))
    floored = select(result, RatioArgmax(floor=1e-5))
    ok = set(no_floor.indices) == {0, 1} and set(floored.indices) == {0}
    assert _report(
        9, ok,
        f"size-ratio heuristic on (0.8, 8e-5, 8e-10): floor 0 -> {no_floor.size} "
        f"features, floor 1e-5 -> {floored.size} feature"), (no_floor, floored)


def test_criterion_10_penalized_correctness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(171717)
    worst_kkt = 0.0
    for i in range(50):
        n = int(rng.integers(40, 160))
        p = int(rng.integers(3, 25))
        x = rng.normal(size=(n, p))
        beta = np.zeros(p)
        k = min(3, p)
        beta[:k] = rng.choice([-1.0, 1.0], k) * rng.uniform(0.5, 1.5, k)
        y = (rng.random(n) < _sigmoid(x @ beta)).astype(float)
        if y.min() == y.max():
            y[0] = 1 - y[0]
        alpha = float(rng.choice([1.0, 0.5, 0.25]))
        path = fit_glm_path(x, y, PenaltySpec(alpha=alpha, n_lambdas=60))
        worst_kkt = max(worst_kkt, float(path.kkt_residuals.max()))
        if i == 0:
            assert np.count_nonzero(path.coefficients[0]) == 0
    kkt_ok = worst_kkt <= 1e-6
    # near-zero-lambda lasso against an unpenalized Newton oracle
    x = rng.normal(size=(50, 3))
    y = (rng.random(50) < _sigmoid(x @ np.array([1.0, -0.7, 0.3]))).astype(float)
    path = fit_glm_path(x, y, PenaltySpec(alpha=1.0, fixed_lambda=1e-8))
    xa = np.hstack([np.ones((50, 1)), x])
    b = np.zeros(4)
    for _ in range(200):
        mu = _sigmoid(xa @ b)
        w = mu * (1 - mu)
        step = np.linalg.solve(xa.T @ (xa * w[:, None]), xa.T @ (y - mu))
        b += step
        if np.abs(step).max() < 1e-13:
            break
    irls_diff = max(float(np.abs(path.coefficients[0] - b[1:]).max()),
                    abs(float(path.intercepts[0]) - b[0]))
    irls_ok = irls_diff <= 1e-4
    # empty model exactly at the top of the path
    x2 = rng.normal(size=(80, 10))
    y2 = (rng.random(80) < 0.4).astype(float)
    path2 = fit_glm_path(x2, y2, PenaltySpec(alpha=1.0))
    empty_ok = np.count_nonzero(path2.coefficients[0]) == 0
    elapsed = time.perf_counter() - t0
    time_ok = elapsed < 60.0
    ok = kkt_ok and irls_ok and empty_ok and time_ok
    assert _report(
        10, ok,
        f"penalized logistic: max KKT over 50 paths {worst_kkt:.2e} (<=1e-6), "
        f"IRLS match {irls_diff:.2e} (<=1e-4), empty model at path top, "
        f"runtime {elapsed:.1f}s"), (kkt_ok, irls_ok, empty_ok, time_ok)


def _snp_dataset(seed, n=400, p=2000, k=10, effect=1.15):
    """Synthetic additive-genotype data with k planted features whose
    standardized effect sizes are equalized."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=77, spawn_key=(seed,)))
    maf = rng.uniform(0.15, 0.85, size=p)
    levels = rng.binomial(2, np.broadcast_to(maf, (n, p))).astype(np.int64)
    truth = np.sort(rng.choice(p, size=k, replace=False))
    sd = np.sqrt(2 * maf[truth] * (1 - maf[truth]))
    b = rng.choice([-1.0, 1.0], k) * effect / sd
    eta = (levels[:, truth] - 2 * maf[truth]) @ b
    y = (rng.random(n) < _sigmoid(eta)).astype(np.int64)
    return (CategoricalDesign.from_levels(levels), ResponseVector.binary(y),
            set(truth.tolist()))


def test_criterion_11_pipeline():
    arithmetic_ok = final_model_size(4099) == 117 and stage_budget(4099) == 493
    recoveries = []
    header_ok = True
    for s in range(20):
        design, y, truth = _snp_dataset(s)
        spec = PipelineSpec(tuning_reps=20, seed=s, post_methods=("lasso",))
        report = run_pipeline(design, y, spec)
        support = np.nonzero(report.fits["lasso"].coefficients)[0]
        hits = len(set(report.selected[support].tolist()) & truth)
        recoveries.append(hits)
        if s == 0:
            header_ok = report.summary_table().splitlines()[0] == (
                "| Post Screening Method | Model size | McFadden's pseudo-R2 "
                "| AIC | Misclass. rate |")
    frac = np.mean([h >= 8 for h in recoveries])
    ok = arithmetic_ok and frac >= 0.8 and header_ok
    assert _report(
        11, ok,
        f"pipeline: final_d(4099)={final_model_size(4099)}, "
        f"budget(4099)={stage_budget(4099)}; >=8/10 planted recovered in "
        f"{frac:.0%} of 20 seeds (recoveries {recoveries}); summary header ok"), (
        f"arithmetic={arithmetic_ok} recovery_frac={frac} header={header_ok}")
