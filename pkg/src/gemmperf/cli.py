"""``gemmperf`` command line entry point.

Exit codes: 0 success, 1 user/input error, 2 internal invariant failure.
Data goes to stdout (or ``--output``); diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import sys
import traceback

from . import __version__
from .analytical import max_active_blocks, roofline
from .core import DeviceModel, GemmConfig
from .errors import GemmPerfError, InvariantError, TooFewRows

log = logging.getLogger("gemmperf")


class UsageError(GemmPerfError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _block(text):
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"block must look like 128x128x8, got {text!r}")
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"block must look like 128x128x8, got {text!r}") from None


def _block_list(text):
    return tuple(_block(b) for b in text.split(",") if b.strip())


def _alpha_beta_list(text):
    pairs = []
    for item in text.split(","):
        a, sep, b = item.partition(":")
        if not sep:
            raise argparse.ArgumentTypeError(f"alpha/beta pairs look like 1:0, got {item!r}")
        pairs.append((float(a), float(b)))
    return tuple(pairs)


def load_device(path) -> DeviceModel:
    """Read ``key=value`` lines (``#`` comments allowed) into a DeviceModel."""
    if path is None:
        return DeviceModel()
    values = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}: expected key=value, got {line!r}")
            values[key.strip()] = value.strip().strip('"')
    try:
        return DeviceModel.from_mapping(values)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _emit(text: str, path=None):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    return format(x, ".6g")


def cmd_version(args):
    from .learn.modelfile import FORMAT_VERSION
    from .learn.tree import BACKEND
    print(f"gemmperf {__version__} model-format v{FORMAT_VERSION}")
    log.info("tree kernel backend: %s", BACKEND)


def cmd_roofline(args):
    device = load_device(args.device)
    point = roofline(args.ai, device)
    if args.csv:
        print("arithmetic_intensity,ridge_point,attainable_tflops,regime")
        print(f"{point.arithmetic_intensity!r},{point.ridge_point!r},{point.attainable_tflops!r},{point.regime}")
    else:
        print(f"ai={_fmt(point.arithmetic_intensity)} ridge_point={point.ridge_point:.2f} "
              f"attainable_tflops={_fmt(point.attainable_tflops)} regime={point.regime}")


def cmd_occupancy(args):
    device = load_device(args.device)
    reports = [max_active_blocks(t, device) for t in args.tile]
    fields = ("tile_size", "threads_per_block", "shared_mem_bytes", "blocks_limit_threads",
              "blocks_limit_smem", "blocks_limit_hw", "max_active_blocks")
    if args.csv:
        print(",".join(fields))
        for r in reports:
            print(",".join(str(getattr(r, f)) for f in fields))
    else:
        for r in reports:
            print(" ".join(f"{f}={getattr(r, f)}" for f in fields))


def cmd_ingest(args):
    from .ingest import load_dataset, sanitize_numeric, save_dataset
    data = load_dataset(args.input)
    if args.sanitize:
        data = sanitize_numeric(data)
    inconsistent = sum(not r.energy_consistent() for r in data.records)
    if inconsistent:
        log.warning("%d record(s) have energy inconsistent with power x runtime (>5%%)", inconsistent)
    save_dataset(data, args.output)
    print(f"records={len(data)} provenance={data.provenance} energy_inconsistent={inconsistent}",
          file=sys.stderr)


def cmd_featurize(args):
    import csv

    from .core import TARGETS
    from .features import FEATURE_ORDER, featurize
    from .ingest import format_value, load_dataset, write_rows
    X, Y = featurize(load_dataset(args.input))
    header = list(FEATURE_ORDER) + list(TARGETS)
    rows = [[format_value(float(v)) if v == v else "" for v in (*x, *y)] for x, y in zip(X, Y)]
    if args.output:
        write_rows(args.output, header, rows)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_synth(args):
    from .ingest import save_dataset, write_dataset
    from .synth import SynthSpec, describe, generate
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    kwargs = dict(m_values=args.m, n_values=args.n, k_values=args.k, noise_fraction=args.noise,
                  seed=args.seed, device=load_device(args.device))
    if args.layouts:
        kwargs["layouts"] = tuple(args.layouts.split(","))
    if args.blocks:
        kwargs["blocks"] = args.blocks
    if args.alpha_beta:
        kwargs["alpha_beta"] = args.alpha_beta
    spec = SynthSpec(**kwargs)
    data = generate(spec)
    if args.output:
        save_dataset(data, args.output, comments=describe(spec))
        print(f"seed={spec.seed} records={len(data)} output={args.output}", file=sys.stderr)
    else:
        write_dataset(data, sys.stdout, comments=describe(spec))


def cmd_train(args):
    from .evaluate import evaluate_model
    from .ingest import load_dataset, save_dataset
    from .learn import fit_multi_output, save_model
    from .learn.tree import BACKEND
    from .preprocess import SPLIT_GENERATOR, train_test_split
    data = load_dataset(args.input)
    if len(data) < 2:
        raise TooFewRows(f"train requires at least 2 rows (minimum-rows rule), got {len(data)}")
    if args.seed < 0:
        raise UsageError("--seed must be non-negative")
    train_idx, test_idx = train_test_split(len(data), args.test_fraction, args.seed)
    train, test = data.subset(train_idx), data.subset(test_idx)
    log.info("fitting %s model on %d rows with the %s tree kernel", args.base, len(train), BACKEND)
    split_meta = {"split": {"seed": args.seed, "test_fraction": args.test_fraction,
                            "generator": SPLIT_GENERATOR, "n_test": len(test)}}
    model = fit_multi_output(train, base=args.base, n_estimators=args.estimators, max_depth=args.depth,
                             seed=args.seed, n_jobs=args.jobs, extra_metadata=split_meta)
    save_model(model, args.output)
    if args.test_output:
        save_dataset(test, args.test_output)
    print(f"# train seed={args.seed} base={args.base} n_train={len(train)} n_test={len(test)} model={args.output}")
    if len(test) >= 2:
        report = evaluate_model(model, test)
        sys.stdout.write(report.to_csv() if args.csv else report.to_text())


def cmd_predict(args):
    from .learn import load_model, predict
    bm, bn, bk = args.block
    config = GemmConfig(m=args.m, n=args.n, k=args.k, layout=args.layout, block_m=bm, block_n=bn, block_k=bk,
                        stages=args.stages, alpha=args.alpha, beta=args.beta, kernel_name=args.kernel_name,
                        tile_size=args.tile)
    model = load_model(args.model)
    (result,) = predict(model, [config])
    if args.csv:
        print(",".join(result))
        print(",".join(repr(v) for v in result.values()))
    else:
        print(" ".join(f"{k}={_fmt(v)}" for k, v in result.items()))


def cmd_evaluate(args):
    from .evaluate import evaluate_model
    from .ingest import load_dataset
    from .learn import load_model
    model = load_model(args.model)
    report = evaluate_model(model, load_dataset(args.input))
    text = report.to_text()
    if args.report:
        _emit(text, args.report)
    if args.csv:
        _emit(report.to_csv(), args.csv)
    sys.stdout.write(text)


def cmd_correlate(args):
    from .evaluate import correlation_matrix, render_correlation_csv, render_correlation_text
    from .ingest import load_dataset
    cm = correlation_matrix(load_dataset(args.input))
    sys.stdout.write(render_correlation_csv(cm) if args.csv else render_correlation_text(cm) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gemmperf", description="GEMM performance/power/energy prediction toolkit")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    p = sub.add_parser("version", help="print package and model-format versions")
    p.set_defaults(func=cmd_version)

    p = sub.add_parser("roofline", help="attainable TFLOP/s at an arithmetic intensity")
    p.add_argument("--ai", type=float, required=True, help="arithmetic intensity in FLOPs/byte")
    p.add_argument("--device", help="key=value device description file")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_roofline)

    p = sub.add_parser("occupancy", help="max active blocks per SM for tiled kernels")
    p.add_argument("--tile", type=_int_list, required=True, help="tile size, or comma-separated list")
    p.add_argument("--device", help="key=value device description file")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_occupancy)

    p = sub.add_parser("ingest", help="validate and rewrite a profiling CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--sanitize", action="store_true", help="turn NaN/inf measurements into missing cells")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("featurize", help="write the model feature matrix as CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("synth", help="generate a synthetic profiling dataset")
    p.add_argument("--m", type=_int_list, default=(256, 512, 1024, 2048))
    p.add_argument("--n", type=_int_list, default=(256, 512, 1024, 2048))
    p.add_argument("--k", type=_int_list, default=(256, 512, 1024, 2048))
    p.add_argument("--layouts", help="comma-separated subset of nn,nt,tn,tt")
    p.add_argument("--blocks", type=_block_list, help="e.g. 64x64x32,128x64x32")
    p.add_argument("--alpha-beta", type=_alpha_beta_list, help="e.g. 1:0,1:1,0.5:0.5,2:0")
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--device", help="key=value device description file")
    p.add_argument("--output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="fit a multi-output model")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--base", choices=("forest", "linear"), default="forest")
    p.add_argument("--estimators", type=int, default=100)
    p.add_argument("--depth", type=int, default=6)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--test-output", help="write the held-out rows to this CSV")
    p.add_argument("--jobs", type=int, default=-1, help="threads for forest fitting (-1 = all cores)")
    p.add_argument("--csv", action="store_true", help="print the held-out report as CSV")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="predict runtime/power/energy/TFLOPS for one config")
    p.add_argument("--model", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--layout", default="nn", choices=("nn", "nt", "tn", "tt"))
    p.add_argument("--block", type=_block, default=(128, 128, 8))
    p.add_argument("--stages", type=int, default=2)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--tile", type=int)
    p.add_argument("--kernel-name", default="")
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="score a model on a labelled CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--report", help="also write the text report here")
    p.add_argument("--csv", help="write the machine-readable report here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("correlate", help="dimension-product vs metric correlation table")
    p.add_argument("--input", required=True)
    p.add_argument("--csv", action="store_true")
    p.set_defaults(func=cmd_correlate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
        if args.command is None:
            parser.print_help(sys.stderr)
            return 1
        args.func(args)
        return 0
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (GemmPerfError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:  # noqa: BLE001 - anything unexpected is an internal failure
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
