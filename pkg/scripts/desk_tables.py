# scripts/desk_tables.py
"""Sweep the benchmark grid and write the hashing and division tables as CSV."""

import argparse
import logging
import pathlib

from config import settings
from mersenne_src.bench import BenchResult, bench_div, bench_hash, to_csv

logging.basicConfig(
    level=settings.log_level,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
)
logger = logging.getLogger(__name__)

# ---------- Grid ----------
HASH_PRIMES = (61, 89)
HASH_K = (2, 4, 8)
DIV_BITS = (32, 61, 64, 89, 127)
DIV_C = 1


def hash_table(n: int, seed: int) -> list[BenchResult]:
    rows: list[BenchResult] = []
    for b in HASH_PRIMES:
        for k in HASH_K:
            logger.info(f"hash b={b} k={k}")
            rows.extend(bench_hash(b, k, n, seed))
    return rows


def division_table(n: int, seed: int) -> list[BenchResult]:
    rows: list[BenchResult] = []
    for b in DIV_BITS:
        comparison = bench_div(b, DIV_C, n, seed)
        logger.info(f"division b={b}: CCH / branch-free = {comparison.ratio:.2f}")
        rows.extend(comparison.results)
    return rows


def main():
    parser = argparse.ArgumentParser(description="Write desk-scale hashing and division tables.")
    parser.add_argument("--n", type=int, default=settings.bench_n)
    parser.add_argument("--seed", type=int, default=settings.seed)
    parser.add_argument("--out", default=settings.results_dir)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    hash_file = out_dir / "hashing.csv"
    hash_file.write_text(to_csv(hash_table(args.n, args.seed)), encoding="utf-8")
    logger.info(f"Wrote {hash_file}")

    div_file = out_dir / "division.csv"
    div_file.write_text(to_csv(division_table(args.n, args.seed)), encoding="utf-8")
    logger.info(f"Wrote {div_file}")


if __name__ == "__main__":
    main()
