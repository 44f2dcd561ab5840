"""Command-line entry point.

Subcommands cover the single-server study, the multi-server study, the two
figure-data generators (importance-weight heatmap, marginal-distortion
curves), and the CSV-backed real-data path. Every output file records the
package version, the exact command line, and the seed in comment lines, and
identical invocations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .classifiers import TrainConfig
from .csvio import load_dataset_csv, write_csv
from .experiment import (
    ExperimentConfig,
    VectorPool,
    preset,
    real_data_config,
    run_experiment,
    run_multi_experiment,
    summarize,
)
from .theory import mc_total_variation, weight_omega

OUT_DIR_ENV = "MRMA_OUT"


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok)


def _parse_range(text: str) -> np.ndarray:
    """Parse 'start:stop:step' into an inclusive grid."""
    try:
        start, stop, step = (float(tok) for tok in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected start:stop:step, got {text!r}"
        ) from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    count = int(round((stop - start) / step))
    return start + step * np.arange(count + 1)


def _meta(args, extra: dict | None = None) -> dict:
    meta = {
        "version": __version__,
        "command": " ".join(sys.argv) if sys.argv else "mrma",
        "seed": args.seed,
    }
    meta.update(extra or {})
    return meta


def _out_dir(args) -> Path:
    out = os.environ.get(OUT_DIR_ENV) or args.out
    return Path(out)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=42, help="root seed (default 42)")
    parser.add_argument("--out", default="results",
                        help=f"output directory (env {OUT_DIR_ENV} overrides)")
    parser.add_argument("--jobs", type=int, default=1, help="trial-level parallelism")


def _add_protocol_overrides(parser: argparse.ArgumentParser):
    parser.add_argument("--epsilon", type=_parse_floats, default=None,
                        help="comma-separated budget grid; 'inf' allowed")
    parser.add_argument("--trials", type=int, default=None)
    parser.add_argument("--test-size", type=int, default=None)
    parser.add_argument("--N0", type=int, default=None, help="training pool size")
    parser.add_argument("--N1", type=int, default=None, help="evaluation pool size")
    parser.add_argument("--n0", type=int, default=None, help="per-classifier subsample")
    parser.add_argument("--n1", type=int, default=None, help="per-classifier evaluation size")
    parser.add_argument("--B", type=int, default=None, help="number of weak classifiers")
    parser.add_argument("--r0", type=float, default=None, help="averaging cutoff")
    parser.add_argument("--classifier", choices=("logistic", "linear-svm"), default=None)


_FIELD_FOR_FLAG = {
    "epsilon": "epsilons",
    "trials": "trials",
    "test_size": "test_size",
    "N0": "n_train",
    "N1": "n_eval",
    "n0": "subsample_size",
    "n1": "eval_subset_size",
    "B": "n_members",
    "r0": "cutoff",
}


def _apply_overrides(config, args):
    updates = {}
    for flag, field_name in _FIELD_FOR_FLAG.items():
        value = getattr(args, flag, None)
        if value is not None and hasattr(config, field_name):
            updates[field_name] = value
    if getattr(args, "classifier", None):
        updates["train"] = replace(config.train, method=args.classifier)
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    return replace(config, **updates)


def _write_single_outputs(args, config, results, diagnostics, extra_meta=None):
    out = _out_dir(args)
    meta = _meta(args, {"T": config.grid_size, **(extra_meta or {})})
    write_csv(out / "results.csv",
              ["epsilon", "trial", "method", "misclassification"],
              [(r.epsilon, r.trial, r.method, r.misclassification) for r in results],
              meta)
    write_csv(out / "summary.csv",
              ["epsilon", "method", "mean", "stderr", "trials"],
              summarize(results), meta)
    if diagnostics:
        write_csv(out / "diagnostics.csv",
                  ["epsilon", "trial", "b", "r_hat", "r_tilde", "reversed", "weight"],
                  diagnostics, meta)
    print(f"wrote {out / 'results.csv'} and {out / 'summary.csv'}")


def _cmd_simulate_single(args) -> int:
    config = preset(args.preset)
    if not isinstance(config, ExperimentConfig):
        raise ValueError(f"preset {args.preset!r} is not a single-server preset")
    config = _apply_overrides(config, args)
    if args.basis:
        config = replace(config, basis_kind=args.basis)
    if args.d:
        config = replace(config, dimension=args.d)
    if args.rescale:
        config = replace(config, rescale_kind=args.rescale)
    if args.methods:
        config = replace(config, methods=tuple(args.methods.split(",")))
    results, diagnostics = run_experiment(config, jobs=args.jobs)
    _write_single_outputs(args, config, results, diagnostics)
    return 0


def _cmd_simulate_multi(args) -> int:
    config = preset(args.preset)
    if isinstance(config, ExperimentConfig):
        raise ValueError(f"preset {args.preset!r} is not a multi-server preset")
    config = _apply_overrides(config, args)
    results, cross, classifiers = run_multi_experiment(config, jobs=args.jobs)
    out = _out_dir(args)
    meta = _meta(args, {"T": config.grid_size})
    write_csv(out / "multi_results.csv",
              ["epsilon", "trial", "server", "group", "method", "misclassification"],
              results, meta)
    write_csv(out / "multi_diagnostics.csv",
              ["epsilon", "trial", "server", "peer", "r_tilde", "reversed", "weight"],
              cross, meta)
    dim = config.dimension
    write_csv(out / "multi_classifiers.csv",
              ["epsilon", "trial", "server", "method", "alpha",
               *(f"b{k + 1}" for k in range(dim)), "basis"],
              classifiers, meta)
    print(f"wrote {out / 'multi_results.csv'}")
    return 0


def _cmd_real_data(args) -> int:
    features, labels = load_dataset_csv(args.csv)
    pool = VectorPool(np.asarray(features), np.asarray(labels))
    config = real_data_config(
        pool,
        epsilons=args.epsilon or (1.0,),
        trials=args.trials or 100,
        test_size=args.test_size or max(1, len(labels) // 5),
        n_train=args.N0 or 0,
        n_eval=args.N1 or 0,
        subsample_size=args.n0 or 60,
        eval_subset_size=args.n1 or 60,
        n_members=args.B or 30,
        cutoff=args.r0 if args.r0 is not None else 0.7,
        seed=args.seed,
    )
    if config.n_train == 0 or config.n_eval == 0:
        # default split: a fifth of the pool trains, the rest evaluates
        clients = len(labels) - config.test_size
        n_train = args.N0 or max(config.subsample_size, clients // 5)
        n_eval = args.N1 or (clients - n_train)
        config = replace(config, n_train=n_train, n_eval=n_eval)
    if args.classifier:
        config = replace(config, train=replace(config.train, method=args.classifier))
    results, diagnostics = run_experiment(config, provider=pool, jobs=args.jobs)
    _write_single_outputs(args, config, results, diagnostics,
                          {"csv": args.csv, "d": pool.dimension})
    return 0


def _cmd_oracle_heatmap(args) -> int:
    rows = []
    z_grid = _parse_range(args.z_grid)
    for eps_z in args.epsilon_z:
        for z0 in _parse_range(args.z0_grid):
            omega = weight_omega(z_grid, float(z0), eps_z)
            rows.extend((float(z0), float(z), eps_z, float(w))
                        for z, w in zip(z_grid, omega))
    out = _out_dir(args)
    write_csv(out / "heatmap.csv", ["z0", "z", "epsilon_z", "omega"], rows, _meta(args))
    print(f"wrote {out / 'heatmap.csv'}")
    return 0


def _cmd_oracle_tv(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = []
    for d in args.d:
        for eps_z in args.epsilon_z:
            estimate = mc_total_variation(int(d), eps_z, args.samples, args.bins, rng)
            rows.append((int(d), eps_z, estimate, args.samples))
    out = _out_dir(args)
    write_csv(out / "tv_curve.csv", ["d", "epsilon_z", "tv_estimate", "n_samples"],
              rows, _meta(args))
    print(f"wrote {out / 'tv_curve.csv'}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrma",
        description="Privacy-preserving classification simulator "
                    "(model reversal + model averaging)",
    )
    parser.add_argument("--version", action="version", version=f"mrma {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-single", help="single-server study over an epsilon grid")
    p.add_argument("--preset", default="sec6.1",
                   help="sec6.1 or case1..case8 (flags override fields)")
    _add_protocol_overrides(p)
    p.add_argument("--methods", default=None, help="comma list of methods to run")
    p.add_argument("--basis", choices=("fourier", "cubic-bspline"), default=None)
    p.add_argument("--d", type=int, default=None, help="basis dimension")
    p.add_argument("--rescale", choices=("tanh", "max-abs"), default=None)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate_single)

    p = sub.add_parser("simulate-multi", help="multi-server exchange study")
    p.add_argument("--preset", default="sec6.2-scaled", help="sec6.2 or sec6.2-scaled")
    _add_protocol_overrides(p)
    _add_common(p)
    p.set_defaults(func=_cmd_simulate_multi)

    p = sub.add_parser("real-data", help="run the protocol on a CSV dataset")
    p.add_argument("--csv", required=True, help="dataset with header x1..xd,y")
    _add_protocol_overrides(p)
    _add_common(p)
    p.set_defaults(func=_cmd_real_data)

    p = sub.add_parser("oracle-heatmap", help="importance-weight heatmap data")
    p.add_argument("--epsilon-z", type=_parse_floats, default=(10.0, 1.0, 0.1, 0.01))
    p.add_argument("--z0-grid", default="-2:2:0.05")
    p.add_argument("--z-grid", default="-1:1:0.02")
    _add_common(p)
    p.set_defaults(func=_cmd_oracle_heatmap)

    p = sub.add_parser("oracle-tv", help="marginal distortion curve data")
    p.add_argument("--d", type=_parse_floats, default=(1, 2, 5, 10))
    p.add_argument("--epsilon-z", type=_parse_floats, default=(0.1, 0.5, 1.0, 5.0, 10.0))
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=64)
    _add_common(p)
    p.set_defaults(func=_cmd_oracle_tv)
    return parser


_RANGE_FLAGS = ("--z0-grid", "--z-grid")


def _merge_range_values(argv: list[str]) -> list[str]:
    # argparse rejects values like "-2:2:0.05" as unknown options; fold them
    # into --flag=value form
    merged, skip = [], False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        if token in _RANGE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            merged.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            merged.append(token)
    return merged


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    args = parser.parse_args(_merge_range_values(argv))
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
