"""Desk-scale benchmarks of hashing and division.

Each measured loop folds every result into a 64-bit checksum, so no work can be
skipped and two implementations of the same function must produce the same checksum.
Inputs come from a fixed-seed pool that the loop cycles through.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from statistics import median
from typing import Callable, Sequence

from pydantic import BaseModel, field_validator

from config import settings
from mersenne_src.errors import ModulusError
from mersenne_src.field import (
    MersenneModulus,
    PseudoMersenneModulus,
    cch_divmod,
    pseudo_divmod_kernel,
)
from mersenne_src.polyhash import (
    family_new,
    hash_multishift,
    horner_mod,
    horner_partial,
    multishift_new,
    poly_hash,
)
from mersenne_src.prng import MASK64, SplitMix64

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["op", "b", "k", "c", "n", "ms", "ops_per_sec", "checksum"]
FOLD = 0x100000001B3


class BenchResult(BaseModel):
    op: str
    b: int
    k: int | None = None
    c: int | None = None
    n: int
    ms: float
    ops_per_sec: float
    checksum: int

    @field_validator("ms")
    @classmethod
    def positive_time(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("elapsed time must be positive")
        return v


class BenchComparison(BaseModel):
    results: list[BenchResult]
    ratio: float


def _fold(acc: int, value: int) -> int:
    return (acc * FOLD + value) & MASK64


def time_loop(
    body: Callable[[], int],
    warmup: int = settings.bench_warmup,
    repetitions: int = settings.bench_repetitions,
) -> tuple[float, int]:
    """Median wall time in ms of ``repetitions`` runs after ``warmup`` runs, plus the checksum."""
    checksum = 0
    for _ in range(warmup):
        checksum = body()
    samples = []
    for _ in range(repetitions):
        start = time.perf_counter()
        got = body()
        samples.append((time.perf_counter() - start) * 1000.0)
        if warmup and got != checksum:
            logger.warning(f"checksum drifted between runs: {got} != {checksum}")
        checksum = got
    # a clock too coarse for a tiny n still has to yield a positive time
    return max(median(samples), 1e-6), checksum


def _result(
    op: str, b: int, n: int, ms: float, checksum: int, k: int | None = None, c: int | None = None
) -> BenchResult:
    return BenchResult(
        op=op, b=b, k=k, c=c, n=n, ms=ms, ops_per_sec=n / (ms / 1000.0), checksum=checksum
    )


def key_bits_for(b: int) -> int:
    """32-bit keys for the 61-bit prime and below, 64-bit keys above, never more than b - 1."""
    return min(32 if b <= 64 else 64, b - 1)


def bench_hash(
    b: int,
    k: int,
    n: int = settings.bench_n,
    seed: int = settings.seed,
    pool_size: int = settings.bench_pool_size,
    warmup: int = settings.bench_warmup,
    repetitions: int = settings.bench_repetitions,
) -> list[BenchResult]:
    """Mersenne Horner hashing against a hardware-remainder Horner, plus multiply-shift when k = 2.

    Both Horner loops run the bare kernels on native ints; ``poly_hash`` with its
    domain checks is only used to confirm the kernel's first result.
    """
    mod = MersenneModulus(b, require_prime=True, engine="native")
    key_bits = key_bits_for(b)
    fam = family_new(mod, k, 1 << key_bits, seed)
    rng = SplitMix64(seed ^ 0x5EED)
    pool = [rng.randbits(key_bits) for _ in range(min(pool_size, n) or 1)]
    size = len(pool)
    coeffs, p = list(fam.coeffs), mod.p
    logger.info(f"hash bench: b={b} k={k} n={n} keys={key_bits}-bit")

    kernel = horner_partial
    first = kernel(coeffs, pool[0], b, p)
    if (first - p if first >= p else first) != poly_hash(fam, pool[0]):
        raise ModulusError(f"hash kernel disagrees with poly_hash at b={b}")

    def mersenne_loop() -> int:
        acc = 0
        for i in range(n):
            y = kernel(coeffs, pool[i % size], b, p)
            acc = _fold(acc, y - p if y >= p else y)
        return acc

    def generic_loop() -> int:
        acc = 0
        for i in range(n):
            acc = _fold(acc, horner_mod(coeffs, pool[i % size], p))
        return acc

    results = []
    ms, checksum = time_loop(mersenne_loop, warmup, repetitions)
    results.append(_result("mersenne_hash", b, n, ms, checksum, k=k))
    ms, checksum = time_loop(generic_loop, warmup, repetitions)
    results.append(_result("generic_mod_hash", b, n, ms, checksum, k=k))
    if k == 2:
        shift_fam = multishift_new(key_bits, min(b, 2 * key_bits), seed)

        def multishift_loop() -> int:
            acc = 0
            for i in range(n):
                acc = _fold(acc, hash_multishift(shift_fam, pool[i % size]))
            return acc

        ms, checksum = time_loop(multishift_loop, warmup, repetitions)
        results.append(_result("multiply_shift", b, n, ms, checksum, k=k))
    return results


def bench_div(
    b: int,
    c: int,
    n: int = settings.bench_n,
    seed: int = settings.seed,
    pool_size: int = settings.bench_pool_size,
    warmup: int = settings.bench_warmup,
    repetitions: int = settings.bench_repetitions,
) -> BenchComparison:
    """Branch-free division against Crandall-Chung-Hasan on 2b-bit inputs.

    Both algorithms run on native ints; the limb engine is covered by the correctness
    checks, not timed here.
    """
    mod = PseudoMersenneModulus(b, c, engine="native")
    if mod.limit < (1 << (2 * b)) - 1:
        raise ModulusError(f"default iterations do not cover 2b-bit inputs for b={b} c={c}")
    rng = SplitMix64(seed)
    pool = [rng.randbits(2 * b) for _ in range(min(pool_size, n) or 1)]
    size = len(pool)
    m = mod.m_iters
    logger.info(f"division bench: b={b} c={c} m={m} n={n}")

    kernel = pseudo_divmod_kernel

    def ours_loop() -> int:
        acc = 0
        for i in range(n):
            z, r = kernel(pool[i % size], b, c, m)
            acc = _fold(acc, z ^ r)
        return acc

    def cch_loop() -> int:
        acc = 0
        for i in range(n):
            q, r = cch_divmod(pool[i % size], mod)
            acc = _fold(acc, q ^ r)
        return acc

    ours_ms, ours_sum = time_loop(ours_loop, warmup, repetitions)
    cch_ms, cch_sum = time_loop(cch_loop, warmup, repetitions)
    if ours_sum != cch_sum:
        logger.error(f"division checksums disagree: {ours_sum} != {cch_sum}")
    results = [
        _result("pseudo_mersenne_divmod", b, n, ours_ms, ours_sum, c=c),
        _result("cch_divmod", b, n, cch_ms, cch_sum, c=c),
    ]
    return BenchComparison(results=results, ratio=cch_ms / ours_ms)


def to_csv(results: Sequence[BenchResult]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(r.model_dump())
    return buf.getvalue()
