"""Command-line entry point: ``amsos-bench run ...`` and ``amsos-bench generate ...``."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import ALGORITHMS, OUTPUTS, RunSpec, run
from .data import save_csv
from .errors import IngestionError, MissingReferenceError, SpecValidationError
from .seeding import METHODS
from .synthetic import BUILTIN_IDS, builtin_mixture, generate

EXIT_OK = 0
EXIT_SPEC = 2
EXIT_INGEST = 3

log = logging.getLogger("amsos")


def _label_col(value: str):
    if value.lower() in ("last", "none"):
        return value.lower()
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'last', 'none' or a column index, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="amsos-bench", description="AMSOS clustering benchmarks")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an algorithm and print validity indices")
    p.add_argument("--dataset", required=True, help=f"builtin id ({', '.join(BUILTIN_IDS)}) or CSV path")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="amsos")
    p.add_argument("--init", choices=METHODS, default="spss", help="seeding for k-means baselines")
    p.add_argument("--k", type=int, default=None, help="cluster count (k-means baselines only)")
    p.add_argument("--seed", type=int, default=0, help="master seed (data generation and per-run seeds)")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--output", choices=OUTPUTS, default="json")
    p.add_argument("--trace", metavar="FILE", help="write the AMSOS merge trace as JSON lines")
    p.add_argument("--label-col", type=_label_col, default="last", help="label column of a CSV: last, none or index")
    p.add_argument("--zscore", action="store_true", help="standardise features before clustering")

    g = sub.add_parser("generate", help="write a builtin synthetic dataset as CSV (labels last)")
    g.add_argument("--dataset", required=True, choices=BUILTIN_IDS)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, metavar="FILE")
    return parser


def _run(args) -> int:
    spec = RunSpec(
        dataset=args.dataset,
        algorithm=args.algorithm,
        init=args.init,
        k=args.k,
        seed=args.seed,
        repeats=args.repeats,
        output=args.output,
        label_col=args.label_col,
        zscore=args.zscore,
    )
    if args.trace and spec.algorithm != "amsos":
        raise SpecValidationError("--trace is only available for --algorithm amsos")
    log.info("running %s on %s (%d repeat(s))", spec.label, spec.dataset, spec.repeats)
    report = run(spec)
    if args.trace:
        report.trace.write(args.trace)
    sys.stdout.write(report.render())
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "generate":
            save_csv(generate(builtin_mixture(args.dataset), args.seed), args.out)
            return EXIT_OK
        return _run(args)
    except SpecValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    except (IngestionError, MissingReferenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INGEST


if __name__ == "__main__":
    sys.exit(main())
