"""Command-line front end: ``bench hash``, ``bench div``, ``sketch`` and ``verify``.

Results go to stdout as JSON (or CSV for benchmarks); logs go to stderr.
"""

import argparse
import logging
import re
import sys

from pydantic import BaseModel

from clients.sketch_store import sketch_store_client
from config import settings
from mersenne_src.bench import bench_div, bench_hash, to_csv
from mersenne_src.errors import MersenneError
from mersenne_src.field import is_mersenne_exponent
from mersenne_src.sketch import SPLITTER_IDS, CountSketch, parse_stream
from mersenne_src.verify import SUITES, run_suite

logger = logging.getLogger(__name__)

PRIME_RE = re.compile(r"^2\^(\d+)-1$")


class QueryEstimate(BaseModel):
    key: int
    estimate: int


class SketchOutput(BaseModel):
    f2: int
    f2_rows: list[int]
    saturated: bool
    updates: int
    width: int
    rows: int
    splitter: str
    queries: list[QueryEstimate]


def parse_prime(text: str) -> int:
    """'2^61-1' -> 61; the exponent must give a Mersenne prime."""
    m = PRIME_RE.match(text.strip())
    if not m:
        raise argparse.ArgumentTypeError(f"expected a prime spelled 2^b-1, got {text!r}")
    b = int(m.group(1))
    if not is_mersenne_exponent(b):
        raise argparse.ArgumentTypeError(f"2^{b}-1 is not a Mersenne prime")
    return b


def mersenne_exponent(text: str) -> int:
    b = int(text)
    if not is_mersenne_exponent(b):
        raise argparse.ArgumentTypeError(f"2^{b}-1 is not a Mersenne prime")
    return b


def _add_prime(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--prime", type=parse_prime, dest="b", help="Mersenne prime as 2^b-1")
    group.add_argument("--b", type=mersenne_exponent, dest="b", help="Mersenne exponent b")
    parser.set_defaults(b=settings.default_prime_exponent)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mersenne",
        description="Mersenne-prime hashing, pseudo-Mersenne division and Count Sketch tools",
    )
    parser.add_argument("--log-level", default=settings.log_level)
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="desk-scale benchmarks")
    bench_sub = bench.add_subparsers(dest="bench_command", required=True)

    hash_p = bench_sub.add_parser("hash", help="k-universal hashing throughput")
    _add_prime(hash_p)
    hash_p.add_argument("--k", type=int, choices=(2, 4, 8), default=4)
    hash_p.add_argument("--n", type=int, default=settings.bench_n)
    hash_p.add_argument("--seed", type=int, default=settings.seed)
    hash_p.add_argument("--format", choices=("json", "csv"), default=settings.output_format)

    div_p = bench_sub.add_parser("div", help="division by 2^b - c against Crandall-Chung-Hasan")
    div_p.add_argument("--b", type=int, default=settings.default_prime_exponent)
    div_p.add_argument("--c", type=int, default=1)
    div_p.add_argument("--n", type=int, default=settings.bench_n)
    div_p.add_argument("--seed", type=int, default=settings.seed)
    div_p.add_argument("--format", choices=("json", "csv"), default=settings.output_format)

    sk_p = sub.add_parser("sketch", help="run a Count Sketch over a 'key delta' stream")
    _add_prime(sk_p)
    sk_p.add_argument("--width", type=int, default=settings.sketch_width)
    sk_p.add_argument("--rows", type=int, default=settings.sketch_rows)
    sk_p.add_argument("--seed", type=int, default=settings.seed)
    sk_p.add_argument("--splitter", choices=tuple(SPLITTER_IDS), default=settings.sketch_splitter)
    sk_p.add_argument("--log-u", type=int, default=settings.sketch_log_u)
    sk_p.add_argument("--median-f2", action="store_true", default=settings.f2_median)
    sk_p.add_argument("--input", help="stream file (default: stdin)")
    sk_p.add_argument("--query", type=int, nargs="*", default=[], help="keys to point-query")
    sk_p.add_argument("--save", help="store the sketch state under this name or path")
    sk_p.add_argument("--load", help="start from stored sketch state instead of an empty sketch")

    ver_p = sub.add_parser("verify", help="exhaustive enumeration and fuzz checks")
    ver_p.add_argument("--suite", choices=("all",) + SUITES, default="all")
    ver_p.add_argument("--budget", type=float, default=settings.enumeration_budget_seconds)
    ver_p.add_argument("--trials", type=int, default=settings.verify_fuzz_trials)
    ver_p.add_argument("--seed", type=int, default=settings.seed)
    return parser


def cmd_bench_hash(args) -> int:
    results = bench_hash(args.b, args.k, args.n, args.seed)
    if args.format == "csv":
        sys.stdout.write(to_csv(results))
    else:
        for r in results:
            print(r.model_dump_json())
    return 0


def cmd_bench_div(args) -> int:
    comparison = bench_div(args.b, args.c, args.n, args.seed)
    if args.format == "csv":
        sys.stdout.write(to_csv(comparison.results))
    else:
        print(comparison.model_dump_json())
    logger.info(f"CCH / branch-free time ratio: {comparison.ratio:.2f}")
    return 0


def cmd_sketch(args) -> int:
    if args.load:
        sketch = sketch_store_client.load(args.load)
    else:
        sketch = CountSketch(
            width=args.width,
            rows=args.rows,
            b=args.b,
            log_u=args.log_u,
            seed=args.seed,
            splitter=args.splitter,
        )
    updates = 0
    if args.input:
        with open(args.input, encoding="utf-8") as fh:
            updates = sketch.process_stream(parse_stream(fh, sketch.u))
    elif not args.load:
        updates = sketch.process_stream(parse_stream(sys.stdin, sketch.u))
    logger.info(f"Processed {updates} updates")

    rows, saturated = sketch.row_f2()
    out = SketchOutput(
        f2=sketch.output_f2(median=args.median_f2),
        f2_rows=rows,
        saturated=saturated,
        updates=updates,
        width=sketch.width,
        rows=sketch.rows,
        splitter=sketch.splitter,
        queries=[QueryEstimate(key=x, estimate=sketch.point_query(x)) for x in args.query],
    )
    if args.save:
        sketch_store_client.save(args.save, sketch)
    print(out.model_dump_json())
    return 0


def cmd_verify(args) -> int:
    reports = run_suite(args.suite, args.budget, args.trials, args.seed)
    failed = [r for r in reports if not r.passed]
    for r in reports:
        print(r.model_dump_json())
    for r in failed:
        logger.error(f"Verification failed: {r.name} {r.config}")
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "bench":
            if args.bench_command == "hash":
                return cmd_bench_hash(args)
            return cmd_bench_div(args)
        if args.command == "sketch":
            return cmd_sketch(args)
        return cmd_verify(args)
    except MersenneError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
