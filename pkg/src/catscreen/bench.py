"""Replication harness for the four simulation designs.

One dataset is generated per replicate and every requested screener sees
that identical dataset, so method comparisons are paired.  The harness
records the minimum model size per replicate and the per-feature top-d
inclusion indicators, aggregates them exactly, and renders the table
layouts (one mean-MMS table, one inclusion table per method).

Replicate r of a run with master seed s draws from the generator seeded
with ``derive_seed(s, r)``; replicates are therefore reproducible
independently of execution order or worker count.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .data import Method
from .errors import CatscreenError, ConfigError
from .screeners import screen
from .selection import minimum_model_size
from .simulate import SimulationSpec, generate, sim1_population_correlations

REPORT_SCHEMA_VERSION = 1


def derive_seed(master_seed: int, *indices: int) -> int:
    """Well-mixed 64-bit stream seed for a (master, index...) tuple."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(indices))
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class BenchSpec:
    """One benchmark run: a simulation design, methods, and sizes."""

    sim: SimulationSpec
    replications: int = 500
    methods: tuple[Method, ...] = (Method.CAT_SIS, Method.HLW_SIS, Method.DC_SIS, Method.MMLE)
    d_list: tuple[int, ...] = (10, 15, 20)
    master_seed: int = 0
    # slow screeners may run on a prefix of the replicates (same datasets)
    method_replications: dict[Method, int] = field(default_factory=dict)
    n_jobs: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigError("need at least one replication")
        if not self.d_list:
            raise ConfigError("d_list must be non-empty")
        if any(d < 1 or d > self.sim.p for d in self.d_list):
            raise ConfigError("every d must satisfy 1 <= d <= p")
        if not self.methods:
            raise ConfigError("at least one method required")
        for m, r in self.method_replications.items():
            if not 1 <= r <= self.replications:
                raise ConfigError(f"replication override for {m} must be in "
                                  f"[1, {self.replications}]")

    def reps_for(self, method: Method) -> int:
        return self.method_replications.get(method, self.replications)


@dataclass
class BenchReport:
    """Aggregated benchmark results; arrays are per-method keyed by tag."""

    design_id: int
    n: int
    p: int
    master_seed: int
    replications: int
    d_list: tuple[int, ...]
    truth: tuple[int, ...]
    methods: tuple[Method, ...]
    method_replications: dict[Method, int]
    raw_mms: dict[Method, np.ndarray]
    inclusion: dict[Method, np.ndarray]  # (len(d_list), len(truth))
    wallclock: dict[Method, float]

    @property
    def mean_mms(self) -> dict[Method, float]:
        return {m: float(v.mean()) for m, v in self.raw_mms.items()}

    def equals(self, other: "BenchReport", ignore_wallclock: bool = True) -> bool:
        if not isinstance(other, BenchReport):
            return False
        if (self.design_id, self.n, self.p, self.master_seed, self.replications,
                tuple(self.d_list), tuple(self.truth), tuple(self.methods)) != \
           (other.design_id, other.n, other.p, other.master_seed, other.replications,
                tuple(other.d_list), tuple(other.truth), tuple(other.methods)):
            return False
        if self.method_replications != other.method_replications:
            return False
        for m in self.methods:
            if not np.array_equal(self.raw_mms[m], other.raw_mms[m]):
                return False
            if not np.array_equal(self.inclusion[m], other.inclusion[m]):
                return False
        if not ignore_wallclock and self.wallclock != other.wallclock:
            return False
        return True

    def to_dict(self) -> dict:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "design_id": self.design_id,
            "n": self.n,
            "p": self.p,
            "master_seed": self.master_seed,
            "replications": self.replications,
            "d_list": list(self.d_list),
            "truth": list(self.truth),
            "methods": [m.value for m in self.methods],
            "method_replications": {m.value: r for m, r in self.method_replications.items()},
            "mean_mms": {m.value: v for m, v in self.mean_mms.items()},
            "raw_mms": {m.value: v.tolist() for m, v in self.raw_mms.items()},
            "inclusion": {m.value: v.tolist() for m, v in self.inclusion.items()},
            "wallclock": {m.value: w for m, w in self.wallclock.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchReport":
        methods = tuple(Method.parse(m) for m in d["methods"])
        return cls(
            design_id=d["design_id"],
            n=d["n"],
            p=d["p"],
            master_seed=d["master_seed"],
            replications=d["replications"],
            d_list=tuple(d["d_list"]),
            truth=tuple(d["truth"]),
            methods=methods,
            method_replications={Method.parse(m): r
                                 for m, r in d["method_replications"].items()},
            raw_mms={Method.parse(m): np.asarray(v, dtype=np.int64)
                     for m, v in d["raw_mms"].items()},
            inclusion={Method.parse(m): np.asarray(v, dtype=np.float64)
                       for m, v in d["inclusion"].items()},
            wallclock={Method.parse(m): w for m, w in d["wallclock"].items()},
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "BenchReport":
        return cls.from_dict(json.loads(text))


def _replicate_work(args):
    spec_args, rep, method_values, d_list = args
    sim = SimulationSpec(**spec_args)
    dataset_seed = derive_seed(sim.seed, rep)
    design, y, truth = generate(sim.with_seed(dataset_seed))
    out = {}
    for mv in method_values:
        method = Method.parse(mv)
        t0 = time.perf_counter()
        result = screen(design, y, method)
        elapsed = time.perf_counter() - t0
        mms = minimum_model_size(result, truth)
        pos = result.positions()[list(truth.indices)]
        incl = np.array([(pos < d).astype(np.float64) for d in d_list])
        out[mv] = (mms, incl, elapsed)
    return rep, out


def _sim_spec_args(sim: SimulationSpec) -> dict:
    return {
        "design_id": sim.design_id,
        "n": sim.n,
        "p": sim.p,
        "seed": sim.seed,
        "sim1_pi": sim.sim1_pi,
        "sim2_cutoffs": sim.sim2_cutoffs,
        "sim3_theta": sim.sim3_theta,
        "sim4_beta": sim.sim4_beta,
        "sim4_ar_rho": sim.sim4_ar_rho,
        "fixed_py": sim.fixed_py,
    }


def run_bench(spec: BenchSpec) -> BenchReport:
    """Run the replication benchmark described by ``spec``."""
    sim = spec.sim.with_seed(spec.master_seed)
    truth = sim.truth
    k = truth.size
    nd = len(spec.d_list)
    raw = {m: np.zeros(spec.reps_for(m), dtype=np.int64) for m in spec.methods}
    incl = {m: np.zeros((nd, k)) for m in spec.methods}
    wall = {m: 0.0 for m in spec.methods}
    tasks = []
    spec_args = _sim_spec_args(sim)
    for rep in range(spec.replications):
        wanted = [m.value for m in spec.methods if rep < spec.reps_for(m)]
        tasks.append((spec_args, rep, wanted, spec.d_list))
    try:
        if spec.n_jobs > 1:
            with ProcessPoolExecutor(max_workers=spec.n_jobs) as pool:
                results = list(pool.map(_replicate_work, tasks, chunksize=4))
        else:
            results = [_replicate_work(t) for t in tasks]
    except CatscreenError as exc:
        raise CatscreenError(f"benchmark aborted: {exc}") from exc
    for rep, per_method in results:
        for mv, (mms, inc, elapsed) in per_method.items():
            m = Method.parse(mv)
            raw[m][rep] = mms
            incl[m] += inc
            wall[m] += elapsed
    inclusion = {m: incl[m] / spec.reps_for(m) for m in spec.methods}
    return BenchReport(
        design_id=sim.design_id,
        n=sim.n,
        p=sim.p,
        master_seed=spec.master_seed,
        replications=spec.replications,
        d_list=tuple(spec.d_list),
        truth=tuple(truth.indices),
        methods=tuple(spec.methods),
        method_replications={m: spec.reps_for(m) for m in spec.methods},
        raw_mms=raw,
        inclusion=inclusion,
        wallclock=wall,
    )


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def emit_tables(report: BenchReport, fmt: str = "markdown") -> str:
    """Render the mean-MMS table and one inclusion table per method."""
    if fmt == "json":
        return report.to_json()
    if fmt not in ("markdown", "tsv"):
        raise ConfigError(f"unknown table format {fmt!r}")
    feature_labels = [f"X_{j + 1}" for j in report.truth]
    lines: list[str] = []
    if fmt == "markdown":
        lines.append(f"## Mean Minimum Model Sizes (n = {report.n}, p = {report.p})")
        lines.append("")
        lines.append("| | " + " | ".join(m.display for m in report.methods) + " |")
        lines.append("|---" * (len(report.methods) + 1) + "|")
        lines.append("| Mean Minimum Model Size | "
                      + " | ".join(_fmt(report.mean_mms[m]) for m in report.methods) + " |")
        for m in report.methods:
            lines.append("")
            lines.append(f"## Proportion of Replications Where X_j is in the Top d"
                         f" ({m.display})")
            lines.append("")
            lines.append("| | " + " | ".join(feature_labels) + " |")
            lines.append("|---" * (len(feature_labels) + 1) + "|")
            for di, d in enumerate(report.d_list):
                row = " | ".join(_fmt(v) for v in report.inclusion[m][di])
                lines.append(f"| d = {d} | {row} |")
    else:
        lines.append("mean_minimum_model_size\t" + "\t".join(m.display for m in report.methods))
        lines.append("\t" + "\t".join(_fmt(report.mean_mms[m]) for m in report.methods))
        for m in report.methods:
            lines.append("")
            lines.append(f"inclusion_{m.value}\t" + "\t".join(feature_labels))
            for di, d in enumerate(report.d_list):
                lines.append(f"d={d}\t" + "\t".join(_fmt(v) for v in report.inclusion[m][di]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ProbeResult:
    """Convergence diagnostics of the trend screener over a sample-size grid."""

    n_grid: tuple[int, ...]
    replications: int
    median_max_error: np.ndarray
    recovery_probability: np.ndarray

    def to_dict(self) -> dict:
        return {
            "n_grid": list(self.n_grid),
            "replications": self.replications,
            "median_max_error": self.median_max_error.tolist(),
            "recovery_probability": self.recovery_probability.tolist(),
        }


def consistency_probe(n_grid, base: SimulationSpec, reps: int,
                      master_seed: int = 0) -> ProbeResult:
    """Monte Carlo check that the trend statistic converges uniformly and
    that the top-k prefix recovers the causative set as n grows.

    Requires a design-1 family spec; the response probability is pinned to
    1/2 so the population statistic is available in closed form (noise
    features have population value 0 exactly).
    """
    if base.design_id != 1:
        raise ConfigError("the consistency probe is defined for design 1")
    probe_base = replace(base, fixed_py=0.5)
    truth = probe_base.truth
    k = truth.size
    rho = np.zeros(probe_base.p)
    rho[:k] = sim1_population_correlations(probe_base.sim1_pi, 0.5)
    truth_set = set(truth.indices)
    med_err = np.zeros(len(tuple(n_grid)))
    recov = np.zeros(len(tuple(n_grid)))
    for ni, n in enumerate(n_grid):
        errs = np.zeros(reps)
        hits = 0
        for rep in range(reps):
            seed = derive_seed(master_seed, ni, rep)
            design, y, _ = generate(replace(probe_base, n=int(n), seed=seed))
            result = screen(design, y, Method.CAT_SIS)
            errs[rep] = float(np.max(np.abs(result.scores - rho)))
            if set(result.ranking[:k].tolist()) == truth_set:
                hits += 1
        med_err[ni] = float(np.median(errs))
        recov[ni] = hits / reps
    return ProbeResult(
        n_grid=tuple(int(n) for n in n_grid),
        replications=reps,
        median_max_error=med_err,
        recovery_probability=recov,
    )
