"""The `tropitest` command line.

Subcommands mirror the pipeline stages: synth (generate clouds), ph
(barcodes), embed (coordinate vectors), test (two-sample test), pipeline
(everything in one run). Exit codes: 0 success, 1 usage or configuration
error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

import numpy as np

from .energy import Sample, permutation_test
from .errors import (
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    ConfigError,
    InputError,
    TropitestError,
)
from .pipeline import (
    PipelineConfig,
    barcodes_of_collection,
    deterministic_json,
    emit_report,
    load_collection,
    load_embedding_json,
    load_pipeline_config,
    pooled_capacity,
    run_pipeline,
    save_embedding_json,
    write_manifest,
)
from .persistence import save_barcode_json
from .shapes import load_shape_spec, sample_shape, save_cloud_csv
from .tropical import (
    canonicalize,
    check_regularized,
    regularization_parameter,
    sufficient_statistic,
)


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _max_scale_arg(text: str):
    if text == "auto":
        return None
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"max-scale must be a number or 'auto', got {text!r}"
        ) from None


def build_parser() -> _Parser:
    parser = _Parser(prog="tropitest", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="sample synthetic point clouds from a shape spec")
    p.add_argument("--spec", required=True, help="shape spec JSON file")
    p.add_argument("--count", required=True, type=int, help="number of clouds")
    p.add_argument("--points", type=int, default=100, help="points per cloud")
    p.add_argument("--noise", type=float, default=0.0, help="noise standard deviation")
    p.add_argument("--seed", type=int, default=0, help="base seed; cloud i uses seed + i")
    p.add_argument("--label", default=None, help="label stored in the manifest")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("ph", help="compute barcodes for a collection")
    p.add_argument("--in", dest="input", required=True, help="manifest or directory")
    p.add_argument(
        "--kind",
        choices=("pointclouds", "distance_matrices"),
        default="pointclouds",
    )
    p.add_argument("--dim", type=int, default=1, help="homology dimension")
    p.add_argument("--max-dim", type=int, default=None, help="default: dim + 1")
    p.add_argument(
        "--max-scale",
        type=_max_scale_arg,
        default=None,
        help="truncation scale, or 'auto' for the enclosing radius",
    )
    p.add_argument("--essential", choices=("truncate", "drop"), default="truncate")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("embed", help="embed barcodes as sorted coordinate vectors")
    p.add_argument("--in", dest="input", required=True, help="barcode manifest or directory")
    p.add_argument(
        "--pool-with",
        default=None,
        help="second collection pooled when fixing n and m (for paired runs)",
    )
    p.add_argument("--m-policy", choices=("data_driven", "universal"), default="data_driven")
    p.add_argument("--m", type=int, default=None, help="explicit regularization parameter")
    p.add_argument("--n", type=int, default=None, help="explicit capacity")
    p.add_argument("--clip", action="store_true", help="clip offending births to m * persistence")
    p.add_argument("--out", required=True, help="output embedding JSON")

    p = sub.add_parser("test", help="two-sample permutation test on embeddings")
    p.add_argument("--a", required=True, help="first embedding JSON")
    p.add_argument("--b", required=True, help="second embedding JSON")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--perms", type=int, default=999)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", required=True, help="output test-result JSON")

    p = sub.add_parser("pipeline", help="run the full pipeline from a config file")
    p.add_argument("--config", required=True, help="pipeline config JSON")
    p.add_argument("--out", default=None, help="report path (overrides the config)")

    return parser


def _cmd_synth(args) -> int:
    spec = load_shape_spec(args.spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    label = args.label if args.label is not None else spec.kind
    entries = []
    for rank in range(args.count):
        cloud = sample_shape(spec, args.points, noise_sd=args.noise, seed=args.seed + rank)
        name = f"cloud_{rank:03d}.csv"
        save_cloud_csv(out / name, cloud)
        entries.append((name, label))
    write_manifest(out / "manifest.json", entries, "pointclouds")
    print(f"wrote {args.count} clouds to {out}")
    return EXIT_OK


def _cmd_ph(args) -> int:
    items = load_collection(args.input, args.kind)
    config = PipelineConfig(
        a=args.input,
        b=args.input,
        kind=args.kind,
        homology_dim=args.dim,
        max_dim=args.max_dim,
        max_scale=args.max_scale,
        essential_policy=args.essential,
    )
    barcodes = barcodes_of_collection(items, config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for rank, (barcode, (_, label)) in enumerate(zip(barcodes, items)):
        name = f"barcode_{rank:03d}.json"
        save_barcode_json(out / name, barcode)
        entries.append((name, label))
    write_manifest(out / "manifest.json", entries, "barcodes")
    print(f"wrote {len(barcodes)} barcodes to {out}")
    return EXIT_OK


def _cmd_embed(args) -> int:
    main_items = load_collection(args.input, "barcodes")
    barcodes = [bc for bc, _ in main_items]
    pooled = list(barcodes)
    if args.pool_with:
        pooled += [bc for bc, _ in load_collection(args.pool_with, "barcodes")]
    if args.n is not None:
        if args.n < 1:
            raise ConfigError("n must be >= 1")
        n = args.n
    else:
        n = pooled_capacity(pooled)
    if args.m is not None:
        if args.m < 1:
            raise ConfigError("m must be >= 1")
        m = args.m
    else:
        m = regularization_parameter(pooled, args.m_policy)
    vectors = []
    for rank, barcode in enumerate(barcodes):
        canon = canonicalize(barcode, n)
        if not check_regularized(canon, m):
            if not args.clip:
                raise InputError(
                    f"barcode {rank} is not regularized for m = {m}; "
                    "pass --clip or a larger --m"
                )
            from .pipeline import _clip_barcode

            canon = _clip_barcode(canon, m)
        vectors.append(sufficient_statistic(canon, n, m).values)
    save_embedding_json(args.out, np.array(vectors, dtype=np.float64), n, m)
    print(f"wrote {len(vectors)} vectors (n={n}, m={m}) to {args.out}")
    return EXIT_OK


def _cmd_test(args) -> int:
    vec_a, n_a, m_a = load_embedding_json(args.a)
    vec_b, n_b, m_b = load_embedding_json(args.b)
    if (n_a, m_a) != (n_b, m_b):
        raise InputError(
            f"embeddings are not comparable: (n={n_a}, m={m_a}) vs (n={n_b}, m={m_b})"
        )
    result = permutation_test(
        Sample(vec_a),
        Sample(vec_b),
        alpha=args.alpha,
        num_permutations=args.perms,
        seed=args.seed,
    )
    with open(args.out, "w") as fh:
        fh.write(deterministic_json(result.to_dict()))
        fh.write("\n")
    print(
        f"statistic={result.statistic:.6g} critical={result.critical_value:.6g} "
        f"p={result.p_value:.6g} reject={result.reject}"
    )
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    config = load_pipeline_config(args.config)
    out = args.out if args.out is not None else config.out
    if out is None:
        raise ConfigError("no report path: set 'out' in the config or pass --out")
    report = run_pipeline(config)
    emit_report(report, out)
    result = report.test_result
    print(
        f"statistic={result.statistic:.6g} critical={result.critical_value:.6g} "
        f"p={result.p_value:.6g} reject={result.reject} -> {out}"
    )
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "ph": _cmd_ph,
    "embed": _cmd_embed,
    "test": _cmd_test,
    "pipeline": _cmd_pipeline,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse handles --help and usage errors by exiting; keep main()
        # returning an int so embedders never see the exception
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except TropitestError as exc:
        print(f"tropitest: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
