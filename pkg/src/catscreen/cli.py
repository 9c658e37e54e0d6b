"""Command-line entry point.

Subcommands: simulate, screen, bench, postscreen, pipeline.  Exit codes:
0 success, 1 runtime failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import BenchSpec, emit_tables, run_bench
from .data import CategoricalDesign, Method
from .errors import CatscreenError, ConfigError, DatasetError
from .io import load_dataset, save_dataset, save_screen_result, write_sidecar
from .penalized import PenaltySpec, adaptive_lasso, cv_select, elastic_net_grid
from .pipeline import PipelineSpec, run_pipeline
from .screeners import screen
from .simulate import generate, sim_default

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="master seed (recorded in outputs)")
    p.add_argument("--threads", type=int, default=1,
                   help="parallelism degree; 0 = auto, 1 = bitwise-deterministic single process")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catscreen",
                                 description="Marginal screening toolkit for "
                                             "categorical data with a binary response")
    ap.add_argument("--version", action="version", version=f"catscreen {__version__}")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    ps = sub.add_parser("simulate", help="generate one simulated dataset as CSV")
    ps.add_argument("--sim", type=int, required=True, choices=(1, 2, 3, 4))
    ps.add_argument("--n", type=int, default=200)
    ps.add_argument("--p", type=int, default=None)
    ps.add_argument("--out", required=True, help="output CSV path")
    _add_common(ps)

    pc = sub.add_parser("screen", help="rank the features of a dataset")
    pc.add_argument("--in", dest="input", required=True)
    pc.add_argument("--response-col", default="y")
    pc.add_argument("--scores", default=None, help="JSON sidecar of level scores")
    pc.add_argument("--method", default="cat-sis",
                    choices=[m.value for m in Method] + ["all"])
    pc.add_argument("--out", required=True, help="output CSV path (stem when --method all)")
    _add_common(pc)

    pb = sub.add_parser("bench", help="replication benchmark over a simulation design")
    pb.add_argument("--sim", type=int, required=True, choices=(1, 2, 3, 4))
    pb.add_argument("--n", type=int, default=200)
    pb.add_argument("--p", type=int, default=None)
    pb.add_argument("--reps", type=int, default=500)
    pb.add_argument("--methods", default="cat-sis,hlw-sis,dc-sis,mmle")
    pb.add_argument("--d-list", default="10,15,20")
    pb.add_argument("--method-reps", default="",
                    help="per-method replication overrides, e.g. dc-sis=100,mmle=100")
    pb.add_argument("--format", default="markdown", choices=("markdown", "tsv"))
    pb.add_argument("--out", required=True, help="output directory")
    _add_common(pb)

    pp = sub.add_parser("postscreen", help="penalized logistic fit on a dataset")
    pp.add_argument("--in", dest="input", required=True)
    pp.add_argument("--response-col", default="y")
    pp.add_argument("--method", default="lasso", choices=("lasso", "adaptive", "enet"))
    pp.add_argument("--alpha-grid", default=None,
                    help="comma list of alphas for enet (default 0.01..0.99)")
    pp.add_argument("--folds", type=int, default=10)
    pp.add_argument("--out", required=True, help="output JSON path")
    _add_common(pp)

    pl = sub.add_parser("pipeline", help="two-stage iterative screen + post-screen")
    pl.add_argument("--in", dest="input", required=True)
    pl.add_argument("--response-col", default="y")
    pl.add_argument("--scores", default=None)
    pl.add_argument("--p1-min", type=int, default=5)
    pl.add_argument("--p1-max", type=int, default=None)
    pl.add_argument("--tuning-reps", type=int, default=200)
    pl.add_argument("--coarse-stride", type=int, default=8)
    pl.add_argument("--exhaustive", action="store_true")
    pl.add_argument("--post", default="lasso,adaptive,enet")
    pl.add_argument("--alpha-grid", default=None)
    pl.add_argument("--folds", type=int, default=10)
    pl.add_argument("--out", required=True, help="output stem (.json and .md written)")
    _add_common(pl)

    return ap


def _resolved(args) -> dict:
    return {k: v for k, v in vars(args).items() if k != "subcommand"}


def _cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    kwargs = {"n": args.n, "seed": args.seed}
    if args.p is not None:
        kwargs["p"] = args.p
    spec = sim_default(args.sim, **kwargs)
    design, y, truth = generate(spec)
    out = Path(args.out)
    save_dataset(design, y, out)
    write_sidecar(out.with_suffix(out.suffix + ".meta.json"),
                  command="simulate", config=_resolved(args), seed=args.seed,
                  wallclock=time.perf_counter() - t0,
                  extra={"truth": list(truth.indices), "design_id": spec.design_id,
                         "n": spec.n, "p": spec.p})
    print(f"wrote {out} ({spec.n} x {spec.p}, design {spec.design_id})")
    return EXIT_OK


def _cmd_screen(args) -> int:
    t0 = time.perf_counter()
    design, y = load_dataset(args.input, response_col=args.response_col,
                             scores_path=args.scores)
    if isinstance(design, CategoricalDesign):
        names = list(design.names())
    else:
        names = [f"x{j + 1}" for j in range(design.shape[1])]
    methods = list(Method) if args.method == "all" else [Method.parse(args.method)]
    out = Path(args.out)
    for m in methods:
        result = screen(design, y, m)
        if args.method == "all":
            target = out.with_name(f"{out.stem}.{m.value}{out.suffix or '.csv'}")
        else:
            target = out
        save_screen_result(result, names, target)
        write_sidecar(target.with_suffix(target.suffix + ".meta.json"),
                      command="screen", config=_resolved(args), seed=args.seed,
                      wallclock=time.perf_counter() - t0,
                      extra={"method": m.value,
                             "degenerate_features": int(result.degenerate.sum())})
        print(f"wrote {target}")
    return EXIT_OK


def _parse_method_reps(text: str) -> dict:
    out = {}
    if not text.strip():
        return out
    for part in text.split(","):
        name, _, value = part.partition("=")
        if not value:
            raise ConfigError(f"bad method-reps entry {part!r}")
        out[Method.parse(name)] = int(value)
    return out


def _cmd_bench(args) -> int:
    t0 = time.perf_counter()
    kwargs = {"n": args.n, "seed": args.seed}
    if args.p is not None:
        kwargs["p"] = args.p
    sim = sim_default(args.sim, **kwargs)
    methods = tuple(Method.parse(m) for m in args.methods.split(","))
    d_list = tuple(int(d) for d in args.d_list.split(","))
    jobs = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    spec = BenchSpec(sim=sim, replications=args.reps, methods=methods,
                     d_list=d_list, master_seed=args.seed,
                     method_replications=_parse_method_reps(args.method_reps),
                     n_jobs=jobs)
    report = run_bench(spec)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ext = "md" if args.format == "markdown" else "tsv"
    (outdir / f"tables.{ext}").write_text(emit_tables(report, args.format))
    (outdir / "report.json").write_text(report.to_json() + "\n")
    write_sidecar(outdir / "meta.json", command="bench", config=_resolved(args),
                  seed=args.seed, wallclock=time.perf_counter() - t0,
                  extra={"mean_mms": {m.value: v for m, v in report.mean_mms.items()}})
    print(emit_tables(report, args.format))
    print(f"wrote {outdir}/tables.{ext} and {outdir}/report.json")
    return EXIT_OK


def _cmd_postscreen(args) -> int:
    t0 = time.perf_counter()
    design, y = load_dataset(args.input, response_col=args.response_col)
    if isinstance(design, CategoricalDesign):
        x = design.scored_matrix()
    else:
        x = design
    grid = None
    if args.alpha_grid:
        grid = np.array([float(a) for a in args.alpha_grid.split(",")])
    if args.method == "lasso":
        fit = cv_select(x, y.values, PenaltySpec(alpha=1.0), folds=args.folds,
                        seed=args.seed)
    elif args.method == "adaptive":
        fit = adaptive_lasso(x, y.values, folds=args.folds, seed=args.seed)
    else:
        fit = elastic_net_grid(x, y.values, alpha_grid=grid, folds=args.folds,
                               seed=args.seed)
    out = Path(args.out)
    payload = {
        "method": args.method,
        "intercept": fit.intercept,
        "coefficients": fit.coefficients.tolist(),
        "chosen_lambda": fit.chosen_lambda,
        "chosen_alpha": fit.chosen_alpha,
        "model_size": fit.metrics.model_size,
        "pseudo_r2": fit.metrics.pseudo_r2,
        "aic": fit.metrics.aic,
        "misclassification": fit.metrics.misclassification,
        "single_class_folds": fit.single_class_folds,
    }
    out.write_text(json.dumps(payload, indent=1) + "\n")
    write_sidecar(out.with_suffix(out.suffix + ".meta.json"), command="postscreen",
                  config=_resolved(args), seed=args.seed,
                  wallclock=time.perf_counter() - t0)
    print(f"wrote {out} (model size {fit.metrics.model_size})")
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    t0 = time.perf_counter()
    design, y = load_dataset(args.input, response_col=args.response_col,
                             scores_path=args.scores)
    if not isinstance(design, CategoricalDesign):
        raise DatasetError("the pipeline requires a categorical dataset")
    grid = None
    if args.alpha_grid:
        grid = tuple(float(a) for a in args.alpha_grid.split(","))
    spec = PipelineSpec(
        p1_min=args.p1_min,
        p1_max=args.p1_max,
        tuning_reps=args.tuning_reps,
        post_methods=tuple(args.post.split(",")),
        seed=args.seed,
        coarse_stride=args.coarse_stride,
        exhaustive=args.exhaustive,
        folds=args.folds,
        enet_alpha_grid=grid,
    )
    report = run_pipeline(design, y, spec)
    stem = Path(args.out)
    json_path = stem.with_suffix(".json")
    md_path = stem.with_suffix(".md")
    json_path.write_text(report.to_json() + "\n")
    md_path.write_text(report.summary_table())
    write_sidecar(stem.with_suffix(".meta.json"), command="pipeline",
                  config=_resolved(args), seed=args.seed,
                  wallclock=time.perf_counter() - t0,
                  extra={"chosen_p1": report.chosen_p1, "final_d": report.final_d})
    print(report.summary_table())
    print(f"wrote {json_path} and {md_path}")
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "screen": _cmd_screen,
    "bench": _cmd_bench,
    "postscreen": _cmd_postscreen,
    "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.subcommand](args)
    except (DatasetError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CatscreenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
