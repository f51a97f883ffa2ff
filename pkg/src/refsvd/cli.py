"""Command-line front end.

Exit codes: 0 on success, 2 for configuration errors, 3 for data errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import fields
from pathlib import Path

from . import experiments, pipeline, ratings, synthetic
from .errors import ConfigError, DataError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3

# config-file key -> (PipelineConfig field, parser)
_CONFIG_KEYS = {
    "lambda": ("lam", float),
    "clusters": ("k_clusters", int),
    "rank": ("svd_rank", int),
    "k1": ("k1", float),
    "k2": ("k2", float),
    "seed": ("seed", int),
    "max_iters": ("kmeans_max_iters", int),
    "tol": ("kmeans_tol", float),
    "clamp": ("clamp_output", lambda s: s.strip().lower() in ("1", "true", "yes", "on")),
    "variant": ("variant", str),
}


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines into PipelineConfig keyword arguments."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "format":
                out["format"] = value
                continue
            if key not in _CONFIG_KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            name, conv = _CONFIG_KEYS[key]
            try:
                out[name] = conv(value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return out


def _build_config(args, variant=None) -> tuple[pipeline.PipelineConfig, str]:
    """Defaults < config file < flags."""
    values = read_config_file(args.config) if args.config else {}
    fmt = values.pop("format", "csv_triples")
    flag_map = {
        "lam": args.lam, "k_clusters": args.clusters, "svd_rank": args.rank,
        "k1": args.k1, "k2": args.k2, "seed": args.seed, "variant": variant,
    }
    values.update({k: v for k, v in flag_map.items() if v is not None})
    if args.clamp:
        values["clamp_output"] = True
    if args.format is not None:
        fmt = args.format
    known = {f.name for f in fields(pipeline.PipelineConfig)}
    return pipeline.PipelineConfig(**{k: v for k, v in values.items() if k in known}), fmt


def _add_model_flags(p):
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--lambda", dest="lam", type=float, help="refinement factor in [0, 1] (default 0.6)")
    p.add_argument("--clusters", type=int, help="number of K-means clusters (default 7)")
    p.add_argument("--rank", type=int, help="SVD approximation rank (default 28)")
    p.add_argument("--k1", type=float, help="item-mean pseudo-count (default 25)")
    p.add_argument("--k2", type=float, help="user-offset pseudo-count (default 10)")
    p.add_argument("--seed", type=int)
    p.add_argument("--clamp", action="store_true", help="clip predictions to [1, 5]")
    p.add_argument("--format", choices=ratings.FORMATS)
    p.add_argument("--config", help="file of key=value lines; flags take precedence")
    p.add_argument("--out")


def _write_text(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_split(args) -> int:
    src = ratings.load_ratings(args.input, args.format or "csv_triples")
    pair = ratings.split(src, args.fraction, args.seed)
    header = [f"seed={args.seed} train_fraction={args.fraction}"]
    ratings.save_ratings(pair.train, args.train, header + ["part=train"])
    ratings.save_ratings(pair.test, args.test, header + ["part=test"])
    if args.ids:
        ratings.save_id_maps(src, args.ids)
    print(f"# seed={args.seed} train={len(pair.train)} test={len(pair.test)}", file=sys.stderr)
    return EXIT_OK


def _warn_irrelevant(args, variant):
    if variant == "baseline_svd":
        ignored = [flag for flag, v in (("--lambda", args.lam), ("--clusters", args.clusters)) if v is not None]
    elif variant in ("corrected_only", "kmeans_only"):
        ignored = ["--lambda"] if args.lam is not None else []
    else:
        ignored = []
    if ignored:
        print(f"warning: {', '.join(ignored)} ignored by variant {variant}", file=sys.stderr)


def cmd_eval(args) -> int:
    cfg, fmt = _build_config(args, args.variant)
    _warn_irrelevant(args, cfg.variant)
    train, test = ratings.load_pair(args.train, args.test, fmt)
    result = pipeline.run_variant(train, cfg)
    report = experiments.evaluate(train, test, cfg, result)
    if args.predictions:
        pipeline.write_predictions_csv(result.predictions, test, args.predictions)
    _write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg, fmt = _build_config(args)
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in pipeline.VARIANTS:
            raise ConfigError(f"unknown variant {v!r}")
    grid = experiments.parse_grid(args.grid, integer=args.axis != "lambda")
    train, test = ratings.load_pair(args.train, args.test, fmt)
    rows = experiments.sweep(train, test, args.axis, grid, cfg, variants, jobs=args.jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("variant", "value", "rmse"))
    for variant, value, err in rows:
        w.writerow((variant, value, repr(err)))
    _write_text(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_stats(args) -> int:
    src = ratings.load_ratings(args.input, args.format or "csv_triples")
    item_hist, user_hist = ratings.rating_histograms(src, args.bins)
    if args.out:
        ratings.write_histogram_csv(item_hist, f"{args.out}_items.csv")
        ratings.write_histogram_csv(user_hist, f"{args.out}_users.csv")
    else:
        for name, hist in (("items", item_hist), ("users", user_hist)):
            print(f"# {name}")
            print("bin_lo,bin_hi,count")
            for lo, hi, c in hist.rows():
                print(f"{lo!r},{hi!r},{c}")
    summary = experiments.dataset_summary(src)
    print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = synthetic.SyntheticSpec(
        num_users=args.users, num_items=args.items, latent_rank=args.latent_rank,
        archetypes=args.archetypes, density=args.density, noise=args.noise, seed=args.seed,
    )
    m = synthetic.generate(spec)
    ratings.save_ratings(m, args.out, [f"synthetic {spec}"])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refsvd", description="Refined SVD collaborative filtering experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="random train/test split of a ratings file")
    p.add_argument("input")
    p.add_argument("--train", required=True, help="output path for the training part")
    p.add_argument("--test", required=True, help="output path for the test part")
    p.add_argument("--fraction", type=float, default=0.8)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=ratings.FORMATS)
    p.add_argument("--ids", help="also write the raw-id -> index map here")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("eval", help="run one pipeline variant and report test RMSE")
    _add_model_flags(p)
    p.add_argument("--variant", choices=pipeline.VARIANTS)
    p.add_argument("--predictions", help="write test-pair predictions CSV here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="test RMSE along one parameter axis")
    _add_model_flags(p)
    p.add_argument("--axis", required=True, choices=experiments.AXES)
    p.add_argument("--grid", required=True, help='"lo:hi:step" or "a,b,c"')
    p.add_argument("--variants", default="refined", help="comma-separated variant names")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("stats", help="per-item and per-user rating-count histograms")
    p.add_argument("input")
    p.add_argument("--bins", type=int, default=50)
    p.add_argument("--format", choices=ratings.FORMATS)
    p.add_argument("--out", help="prefix for <out>_items.csv and <out>_users.csv")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("gen", help="write a seeded synthetic ratings file")
    p.add_argument("--out", required=True)
    p.add_argument("--users", type=int, default=500)
    p.add_argument("--items", type=int, default=80)
    p.add_argument("--latent-rank", type=int, default=5)
    p.add_argument("--archetypes", type=int, default=4)
    p.add_argument("--density", type=float, default=0.15)
    p.add_argument("--noise", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
