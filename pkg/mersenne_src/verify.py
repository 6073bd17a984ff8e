"""Exhaustive enumeration and fuzzing of the hashing, sketching and division guarantees.

Every probability and moment is computed over *all* coefficient vectors of a small
field, so verdicts compare exact ``Fraction``s; no floating point reaches a report.
Enumeration runs vectorized with numpy over chunks of coefficient vectors and is
refused up front when it would exceed the configured work budget.
"""

from __future__ import annotations

import logging
import time
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterator, Literal

import numpy as np
from pydantic import BaseModel, Field, computed_field, field_validator

from config import settings
from mersenne_src.bucketing import (
    BitSelector,
    BucketSpec,
    collision_identity,
    collision_probability,
    is_most_uniform,
    preimage_counts,
)
from mersenne_src.errors import BudgetExceededError, DomainError, ModulusError
from mersenne_src.field import (
    MersenneModulus,
    PseudoMersenneModulus,
    cch_divmod,
    default_iterations,
    divmod_kernel,
    max_input,
    mersenne_divmod,
    pseudo_mersenne_divmod,
    pseudo_mersenne_mod,
    quotient_kernel,
    reduce_kernel,
)
from mersenne_src.polyhash import hash_columns, horner_mod
from mersenne_src.prng import SplitMix64
from mersenne_src.sketch import Splitter, check_split_params, split

logger = logging.getLogger(__name__)

Relation = Literal["==", "<", "<=", ">"]
Suite = Literal["all", "collision", "moments", "division", "bits"]
SUITES: tuple[str, ...] = ("collision", "moments", "division", "bits")

# the value map used throughout the moment checks
SAMPLE_F = {1: 2, 3: -1, 7: 3}


class Rational(BaseModel):
    num: int
    den: int

    @field_validator("den")
    @classmethod
    def den_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("denominator must be positive")
        return v

    @classmethod
    def of(cls, q: Fraction | int) -> Rational:
        q = Fraction(q)
        return cls(num=q.numerator, den=q.denominator)

    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)


class BoundCheck(BaseModel):
    name: str
    lhs: Rational
    relation: Relation
    rhs: Rational
    passed: bool


class EnumerationReport(BaseModel):
    name: str
    config: dict[str, Any] = Field(default_factory=dict)
    quantities: dict[str, Rational] = Field(default_factory=dict)
    distributions: dict[str, list[Rational]] = Field(default_factory=dict)
    bounds: list[BoundCheck] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.bounds)

    def set(self, name: str, value: Fraction | int) -> Fraction:
        self.quantities[name] = Rational.of(value)
        return Fraction(value)

    def check(self, name: str, lhs: Fraction | int, relation: Relation, rhs: Fraction | int) -> bool:
        lhs, rhs = Fraction(lhs), Fraction(rhs)
        ok = {
            "==": lhs == rhs,
            "<": lhs < rhs,
            "<=": lhs <= rhs,
            ">": lhs > rhs,
        }[relation]
        self.bounds.append(
            BoundCheck(name=name, lhs=Rational.of(lhs), relation=relation, rhs=Rational.of(rhs), passed=ok)
        )
        if not ok:
            logger.debug(f"{self.name}: {name} fails ({lhs} {relation} {rhs})")
        return ok


class Budget:
    """Work cap per enumeration plus a wall-clock cap shared by everything run under it."""

    def __init__(
        self,
        seconds: float = settings.enumeration_budget_seconds,
        max_work: int = settings.max_enumeration_work,
    ):
        self.seconds = seconds
        self.max_work = max_work
        self.started = time.monotonic()

    def require(self, work: int, what: str) -> None:
        if work > self.max_work:
            logger.warning(f"refusing {what}: {work} evaluations over budget {self.max_work}")
            raise BudgetExceededError(
                f"{what} needs {work} evaluations, budget allows {self.max_work}", required=work
            )

    def tick(self, what: str) -> None:
        elapsed = time.monotonic() - self.started
        if elapsed > self.seconds:
            raise BudgetExceededError(
                f"{what} ran past the {self.seconds}s wall-clock budget", required=elapsed
            )


# ---- enumeration helpers ----------------------------------------------------------


def _is_mersenne_number(p: int) -> bool:
    return p & (p + 1) == 0


def _coefficient_chunks(
    p: int, k: int, budget: Budget, what: str, chunk: int = settings.enumeration_chunk
) -> Iterator[list[np.ndarray]]:
    """All p^k coefficient vectors in chunks; column i of a chunk holds a_i."""
    total = p**k
    for start in range(0, total, chunk):
        budget.tick(what)
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        cols = []
        for _ in range(k):
            cols.append(idx % p)
            idx = idx // p
        logger.debug(f"{what}: vectors {start}..{start + len(cols[0])} of {total}")
        yield cols


def _check_keys(p: int, keys) -> None:
    # Mersenne evaluation keeps Horner below 2p only for keys in [(p+1)/2]
    limit = (p + 1) // 2 if _is_mersenne_number(p) else p
    for x in keys:
        if not 0 <= x < limit:
            raise DomainError("key outside domain")


def _hash_keys(p: int, cols: list[np.ndarray], x: int) -> np.ndarray:
    if _is_mersenne_number(p):
        return hash_columns(MersenneModulus(p.bit_length()), cols, x)
    return horner_mod(cols, x, p)


def _default_selector(p: int, r: int) -> BitSelector:
    if r & (r - 1):
        raise ModulusError(f"bit selection needs a power-of-two bucket count, got {r}")
    return BitSelector.low(p.bit_length(), r.bit_length() - 1)


# ---- hashing ------------------------------------------------------------------------


def enum_collision(
    p: int,
    k: int,
    r: int,
    selector: BitSelector | None = None,
    x: int = 0,
    y: int = 1,
    budget: Budget | None = None,
) -> Fraction:
    """Exact Pr[mu(h(x)) = mu(h(y))] over every degree-(k-1) polynomial mod p."""
    if r == 1:
        return Fraction(1)
    sel = selector or _default_selector(p, r)
    if sel.r != r:
        raise ModulusError(f"selector yields {sel.r} buckets, expected {r}")
    if x == y:
        raise DomainError("collision needs two distinct keys")
    _check_keys(p, (x, y))
    budget = budget or Budget()
    budget.require(2 * p**k, "collision enumeration")
    hits = 0
    for cols in _coefficient_chunks(p, k, budget, "collision enumeration"):
        hits += int(np.count_nonzero(sel(_hash_keys(p, cols, x)) == sel(_hash_keys(p, cols, y))))
    return Fraction(hits, p**k)


def enum_bucket_distribution(
    p: int, k: int, selector: BitSelector, key: int = 0, budget: Budget | None = None
) -> list[Fraction]:
    """Exact Pr[mu(h(key)) = i] for every bucket i."""
    _check_keys(p, (key,))
    budget = budget or Budget()
    budget.require(p**k, "bucket enumeration")
    counts = np.zeros(selector.r, dtype=np.int64)
    for cols in _coefficient_chunks(p, k, budget, "bucket enumeration"):
        counts += np.bincount(selector(_hash_keys(p, cols, key)), minlength=selector.r)
    return [Fraction(int(c), p**k) for c in counts]


def collision_report(
    p: int, k: int, r: int, kind: Literal["low", "top"] = "low", budget: Budget | None = None
) -> EnumerationReport:
    b = p.bit_length()
    sel = None if r == 1 else getattr(BitSelector, kind)(b, r.bit_length() - 1)
    report = EnumerationReport(name="collision", config={"p": p, "k": k, "r": r, "selector": kind})
    coll = report.set("collision", enum_collision(p, k, r, sel, budget=budget))
    if r == 1:
        report.check("single bucket always collides", coll, "==", 1)
        return report
    report.set("epsilon", r * coll - 1)
    if _is_mersenne_number(p) and k >= 2:
        report.check("collision == (1 + (r-1)/p^2)/r", coll, "==", (1 + Fraction(r - 1, p * p)) / r)
    return report


def enum_bit_bias(p: int) -> list[Fraction]:
    """Exact Pr[bit j = 1] for a uniform value in [p], least significant bit first."""
    if not 2 <= p <= 1 << 20:
        raise DomainError(f"bit-bias enumeration needs 2 <= p <= 2^20, got {p}")
    v = np.arange(p, dtype=np.int64)
    return [Fraction(int(np.count_nonzero((v >> j) & 1)), p) for j in range(p.bit_length())]


def bit_bias_report(p: int) -> EnumerationReport:
    report = EnumerationReport(name="bit_bias", config={"p": p})
    probs = enum_bit_bias(p)
    report.distributions["pr_one"] = [Rational.of(q) for q in probs]
    worst = max(abs(q - Fraction(1, 2)) for q in probs)
    report.set("max_deviation", worst)
    report.check("|Pr[bit=1] - 1/2| <= 1/p", worst, "<=", Fraction(1, p))
    if _is_mersenne_number(p):
        b = p.bit_length()
        expected = Fraction((1 << (b - 1)) - 1, p)
        report.check(
            "every bit has Pr[1] = (2^(b-1) - 1)/p",
            sum(q != expected for q in probs),
            "==",
            0,
        )
    return report


def top_bits_degeneracy(b: int, c: int, ell: int) -> tuple[int, int]:
    """How many values of [2^b - c] have top ell bits all zero, and how many all one."""
    top = np.arange((1 << b) - c, dtype=np.int64) >> (b - ell)
    return int(np.count_nonzero(top == 0)), int(np.count_nonzero(top == (1 << ell) - 1))


def degeneracy_report(budget: Budget | None = None) -> EnumerationReport:
    """Top-bit selection mod a non-Mersenne prime against the Mersenne case."""
    report = EnumerationReport(name="non_mersenne_degeneracy", config={"fermat_p": 17, "mersenne_p": 31})
    fermat = enum_bucket_distribution(17, 2, BitSelector.top(5, 1), budget=budget)
    mersenne = enum_bucket_distribution(31, 2, BitSelector.top(5, 1), budget=budget)
    report.distributions["fermat_top_bit"] = [Rational.of(q) for q in fermat]
    report.distributions["mersenne_top_bit"] = [Rational.of(q) for q in mersenne]
    report.check("p=17 top bit is 1 with probability 1/17", fermat[1], "==", Fraction(1, 17))
    report.check("p=31 top bit within 1/p of 1/2", abs(mersenne[1] - Fraction(1, 2)), "<=", Fraction(1, 31))
    report.check(
        "p=17 top bit is far more biased than p=31",
        abs(fermat[1] - Fraction(1, 2)),
        ">",
        abs(mersenne[1] - Fraction(1, 2)),
    )
    coll = report.set("fermat_top_bit_collision", enum_collision(17, 2, 2, BitSelector.top(5, 1), budget=budget))
    report.check("p=17 top bits nearly always agree", coll, "==", Fraction(16 * 16 + 1, 17 * 17))

    for b, c, ell in ((16, 15, 4), (16, 256, 8)):
        zeros, ones = top_bits_degeneracy(b, c, ell)
        tag = f"b={b},c={c},ell={ell}"
        report.check(f"{tag}: all-zero top bits hit 2^(b-ell) values", zeros, "==", 1 << (b - ell))
        report.check(
            f"{tag}: all-one top bits hit max(0, 2^(b-ell) - c) values",
            ones,
            "==",
            max(0, (1 << (b - ell)) - c),
        )
    return report


# ---- two-for-one and the sketch ---------------------------------------------------


def _split_params(p: int, r: int, splitter: Splitter) -> int:
    if not _is_mersenne_number(p):
        raise ModulusError(f"two-for-one splitting needs p = 2^b - 1, got {p}")
    b = p.bit_length()
    check_split_params(b, r, splitter)
    return b


def enum_sketch_moments(
    p: int,
    u: int,
    r: int,
    f: dict[int, int],
    splitter: Splitter = "pow2",
    budget: Budget | None = None,
) -> EnumerationReport:
    """Exact E[X], Var[X] and point-query means over all p^4 degree-3 families."""
    b = _split_params(p, r, splitter)
    if p < 2 * u - 1:
        raise ModulusError("modulus too small for key domain")
    f = {x: v for x, v in sorted(f.items()) if v}
    if not f:
        raise DomainError("value map has no nonzero entries")
    if any(not 0 <= x < u for x in f):
        raise DomainError("key outside domain")
    if sum(abs(v) for v in f.values()) > 1 << 10:
        raise DomainError("value map too heavy for 64-bit moment sums")
    keys, vals = list(f), list(f.values())
    n = len(keys)
    budget = budget or Budget()
    budget.require(n * p**4, "moment enumeration")

    total = p**4
    sum_x = sum_x2 = 0
    pq_sums = [0] * n
    coll_hits = 0
    index_counts = np.zeros(r, dtype=np.int64)
    f1 = sum(vals)
    f2 = sum(v * v for v in vals)
    for cols in _coefficient_chunks(p, 4, budget, "moment enumeration"):
        pairs = [split(_hash_keys(p, cols, x), b, r, splitter) for x in keys]
        x_est = np.full(len(cols[0]), f2, dtype=np.int64)
        pq = [np.full(len(cols[0]), v, dtype=np.int64) for v in vals]
        for i in range(n):
            for j in range(i + 1, n):
                t = pairs[i].sign * pairs[j].sign * (pairs[i].index == pairs[j].index)
                x_est += 2 * vals[i] * vals[j] * t
                pq[i] += vals[j] * t
                pq[j] += vals[i] * t
        sum_x += int(x_est.sum())
        sum_x2 += int((x_est * x_est).sum())
        for i in range(n):
            pq_sums[i] += int(pq[i].sum())
        if n >= 2:
            coll_hits += int(np.count_nonzero(pairs[0].index == pairs[1].index))
        index_counts += np.bincount(pairs[0].index, minlength=r)

    report = EnumerationReport(
        name="sketch_moments",
        config={"p": p, "u": u, "r": r, "k": 4, "splitter": splitter, "f": f},
    )
    report.set("F1", f1)
    report.set("F2", f2)
    report.set("sum_X", sum_x)
    e_x = report.set("E_X", Fraction(sum_x, total))
    var_x = report.set("Var_X", Fraction(sum_x2, total) - e_x * e_x)
    dist = [Fraction(int(c), total) for c in index_counts]
    report.distributions["index"] = [Rational.of(q) for q in dist]
    report.set("delta", r * max(dist) - 1)

    report.check("E[X] == F2 + (F1^2 - F2)/p^2", e_x, "==", f2 + Fraction(f1 * f1 - f2, p * p))
    report.check("|E[X] - F2| <= F2 (n-1)/p^2", abs(e_x - f2), "<=", Fraction(f2 * (n - 1), p * p))
    if splitter == "pow2":
        report.check("Var[X] < 2 F2^2 / r", var_x, "<", Fraction(2 * f2 * f2, r))
    else:
        report.check(
            "Var[X] < 2 (1 + (r/2^b)^2) F2^2 / r",
            var_x,
            "<",
            2 * (1 + Fraction(r, 1 << b) ** 2) * f2 * f2 / r,
        )
    for x, v, s in zip(keys, vals, pq_sums):
        mean = report.set(f"point_query_{x}", Fraction(s, total))
        report.check(f"E[estimate of f_{x}] == f_x + (F1 - f_x)/p^2", mean, "==", v + Fraction(f1 - v, p * p))
    if n >= 2:
        coll = report.set("collision", Fraction(coll_hits, total))
        report.set("epsilon", r * coll - 1)
        if splitter == "pow2":
            report.check("Pr[i_x = i_y] == (1 + (r-1)/p^2)/r", coll, "==", (1 + Fraction(r - 1, p * p)) / r)
        else:
            report.check(
                "Pr[i_x = i_y] <= (1 + (r/2^b)^2)/r", coll, "<=", (1 + Fraction(r, 1 << b) ** 2) / r
            )
    return report


def _imbalance(b: int, r: int, splitter: Splitter) -> tuple[int, int]:
    """The bucket t carrying the sign imbalance of the missing value 2^b - 1, and its sign."""
    if splitter == "pow2":
        return r - 1, 1
    if splitter == "uniform-arb":
        return r - 1, -1
    return 0, 1


def enum_sign_cancellation(
    p: int,
    r: int,
    splitter: Splitter = "pow2",
    x0: int = 0,
    x1: int = 1,
    two_function: bool = False,
    budget: Budget | None = None,
) -> EnumerationReport:
    """E[s_x0 A] against E[A | i_x0 = t]/p with A = [i_x0 = i_x1], over all degree-1 families.

    With two_function the sign comes from a second independent family and the check
    becomes E[s_x0 A] = E[s_x0] E[A].
    """
    b = _split_params(p, r, splitter)
    _check_keys(p, (x0, x1))
    if x0 == x1:
        raise DomainError("sign cancellation needs two distinct keys")
    k = 4 if two_function else 2
    budget = budget or Budget()
    budget.require(2 * p**k, "sign cancellation enumeration")
    total = p**k
    s_a = a_cnt = s_cnt = cond_a = cond_cnt = 0
    t, sigma = _imbalance(b, r, splitter)
    for cols in _coefficient_chunks(p, k, budget, "sign cancellation enumeration"):
        i0, s0 = split(_hash_keys(p, cols[:2], x0), b, r, splitter)
        i1, _ = split(_hash_keys(p, cols[:2], x1), b, r, splitter)
        if two_function:
            s0 = split(_hash_keys(p, cols[2:], x0), b, r, splitter).sign
        a = i0 == i1
        s_a += int((s0 * a).sum())
        a_cnt += int(np.count_nonzero(a))
        s_cnt += int(s0.sum())
        at_t = i0 == t
        cond_a += int(np.count_nonzero(a & at_t))
        cond_cnt += int(np.count_nonzero(at_t))

    report = EnumerationReport(
        name="sign_cancellation",
        config={"p": p, "r": r, "splitter": splitter, "two_function": two_function, "t": t},
    )
    lhs = report.set("E_sA", Fraction(s_a, total))
    if two_function:
        e_s = report.set("E_s", Fraction(s_cnt, total))
        e_a = report.set("E_A", Fraction(a_cnt, total))
        report.check("E[s A] == E[s] E[A]", lhs, "==", e_s * e_a)
    else:
        cond = report.set("E_A_given_t", Fraction(cond_a, cond_cnt))
        report.check("E[s A] == sign * E[A | i_x0 = t]/p", lhs, "==", sigma * cond / p)

    # over all 2^b-bit values nothing is missing, so the signs in every bucket cancel
    v = np.arange(1 << b, dtype=np.int64)
    idx, sgn = split(v, b, r, "pow2" if splitter == "pow2" else "uniform-arb")
    per_bucket = np.bincount(idx, weights=sgn, minlength=r)
    report.check("uniform b-bit values: E[s A] == 0", int(np.count_nonzero(per_bucket)), "==", 0)
    return report


def enum_index_distribution(b: int, r: int, with_distribution: bool = True) -> EnumerationReport:
    """Index distribution of the Mersenne-input arbitrary-bucket splitter, uniform h in [2^b - 1]."""
    check_split_params(b, r, "mersenne-arb")
    p = (1 << b) - 1
    idx = split(np.arange(p, dtype=np.int64), b, r, "mersenne-arb").index
    counts = np.bincount(idx, minlength=r)
    report = EnumerationReport(name="index_distribution", config={"b": b, "r": r})
    pr0 = Fraction(int(counts[0]), p)
    if with_distribution:
        report.distributions["index"] = [Rational.of(Fraction(int(c), p)) for c in counts]
    half = 1 << (b - 1)
    report.check("Pr[i=0] == (2 ceil(2^(b-1)/r) - 1)/p", pr0, "==", Fraction(2 * (-(-half // r)) - 1, p))
    report.check("Pr[i=0] <= (1 + r/2^b)/r", pr0, "<=", (1 + Fraction(r, 1 << b)) / r)
    coll = report.set("collision", collision_probability(counts, p))
    report.check("Pr[i_x = i_y] <= (1 + (r/2^b)^2)/r", coll, "<=", (1 + Fraction(r, 1 << b) ** 2) / r)
    return report


def check_index_distribution(max_b: int = 11, budget: Budget | None = None) -> EnumerationReport:
    budget = budget or Budget()
    report = EnumerationReport(name="index_distribution_sweep", config={"max_b": max_b})
    cases = violations = 0
    for b in range(2, max_b + 1):
        budget.tick("index distribution sweep")
        for r in range(2, (1 << (b - 1)) + 1):
            cases += 1
            sub = enum_index_distribution(b, r, with_distribution=False)
            if not sub.passed:
                violations += 1
                if len(report.notes) < 10:
                    report.notes.append(f"b={b} r={r}")
    report.set("cases", cases)
    report.check("index distribution violations", violations, "==", 0)
    return report


# ---- most uniform maps --------------------------------------------------------------


def check_most_uniform(
    max_b: int = 16, max_r: int = 64, cs: tuple[int, ...] = (1, 3, 5), budget: Budget | None = None
) -> EnumerationReport:
    """Every map of the bucketing module is most uniform, for all b <= max_b and r <= max_r."""
    budget = budget or Budget()
    report = EnumerationReport(name="most_uniform", config={"max_b": max_b, "max_r": max_r, "c": list(cs)})
    cases = violations = 0

    def record(ok: bool, tag: str) -> None:
        nonlocal cases, violations
        cases += 1
        if not ok:
            violations += 1
            if len(report.notes) < 10:
                report.notes.append(tag)

    for b in range(2, max_b + 1):
        budget.tick("most uniform sweep")
        q = 1 << b
        for r in range(1, max_r + 1):
            if r <= q:
                spec = BucketSpec(r, "pow2", b)
                record(is_most_uniform(preimage_counts(spec), q, r), f"pow2 b={b} r={r}")
            if r <= q - 1:
                spec = BucketSpec(r, "pow2", b)
                record(
                    is_most_uniform(preimage_counts(spec, skip_zero=True), q - 1, r),
                    f"pow2 nonzero b={b} r={r}",
                )
                spec = BucketSpec(r, "mersenne", b)
                record(is_most_uniform(preimage_counts(spec), q - 1, r), f"mersenne b={b} r={r}")
            for c in cs:
                if c >= 1 << (b - 1) or r > q - c:
                    continue
                spec = BucketSpec(r, "pseudo_mersenne", b, c)
                record(is_most_uniform(preimage_counts(spec), q - c, r), f"pseudo b={b} c={c} r={r}")
    report.set("cases", cases)
    report.check("most uniform violations", violations, "==", 0)
    return report


def check_rounding_cost(
    max_q: int = 1 << 11, max_r: int = 32, budget: Budget | None = None
) -> EnumerationReport:
    """Collision probability of floor(v r / q) equals (1 + a(r - a)/q^2)/r with r | q + a."""
    budget = budget or Budget()
    report = EnumerationReport(name="rounding_cost", config={"max_q": max_q, "max_r": max_r})
    cases = violations = 0
    for q in range(2, max_q + 1):
        if q % 256 == 0:
            budget.tick("rounding cost sweep")
        v = np.arange(q, dtype=np.int64)
        for r in range(2, min(max_r, q) + 1):
            cases += 1
            counts = np.bincount(v * r // q, minlength=r)
            if collision_probability(counts, q) != collision_identity(q, r):
                violations += 1
                if len(report.notes) < 10:
                    report.notes.append(f"q={q} r={r}")
    report.set("cases", cases)
    report.check("rounding cost identity violations", violations, "==", 0)
    return report


# ---- division ---------------------------------------------------------------------


def check_mersenne_exhaustive(max_b: int = 11, budget: Budget | None = None) -> EnumerationReport:
    """Branch-free divmod and partial reduction against numpy's divmod for every v < 2^(2b)."""
    budget = budget or Budget()
    report = EnumerationReport(name="mersenne_exhaustive", config={"max_b": max_b})
    bad = {"divmod": 0, "partial": 0, "double_partial": 0, "pseudo_c1": 0}
    values = 0
    chunk = settings.enumeration_chunk
    for b in range(2, max_b + 1):
        p = (1 << b) - 1
        top = 1 << (2 * b)
        budget.require(top, f"exhaustive division at b={b}")
        m = default_iterations(b, 1)
        for start in range(0, top, chunk):
            budget.tick("exhaustive division")
            v = np.arange(start, min(start + chunk, top), dtype=np.int64)
            values += len(v)
            want_q, want_r = np.divmod(v, p)
            z, y = divmod_kernel(v, b, p)
            bad["divmod"] += int(np.count_nonzero((z != want_q) | (y != want_r)))
            small = v[v < p * p]
            once = reduce_kernel(small, b, p)
            bad["partial"] += int(np.count_nonzero((once >= 2 * p) | (once % p != small % p)))
            twice = reduce_kernel(reduce_kernel(v, b, p), b, p)
            bad["double_partial"] += int(np.count_nonzero((twice > p) | (twice % p != want_r)))
            bad["pseudo_c1"] += int(np.count_nonzero(quotient_kernel(v, b, 1, m) != z))
    report.set("values", values)
    for kind, n in bad.items():
        report.check(f"{kind} mismatches", n, "==", 0)
    return report


@lru_cache(maxsize=8192)
def _max_iterations(b: int, c: int, cap_bits: int = 254) -> int:
    # largest n whose division domain stays below 2^cap_bits, so n + 1 iterations fit UWide
    n = 1
    while max_input(b, c, n + 1) < 1 << cap_bits:
        n += 1
    return n


def fuzz_division(
    trials: int = settings.verify_fuzz_trials,
    seed: int = settings.seed,
    budget: Budget | None = None,
    limb_every: int = settings.verify_limb_sample,
) -> EnumerationReport:
    """Seeded random (b, c, m, v) checked against Python's arbitrary-precision divmod.

    Trials run the kernels on native ints. Every ``limb_every``-th trial repeats the
    division on UWide limbs and must give the same quotient and remainder.
    """
    budget = budget or Budget()
    rng = SplitMix64(seed)
    counts = {"boundary": 0, "early_stop": 0, "fixpoint": 0, "cch": 0, "mersenne_path": 0, "limb": 0}
    failures: list[str] = []

    def fail(kind: str, b: int, c: int, n: int, v: int) -> None:
        failures.append(f"{kind}: b={b} c={c} m={n} v={v}")

    for t in range(trials):
        if t % 1024 == 0:
            budget.tick("division fuzz")
        b = 2 + rng.below(126)
        c_bits = 1 + rng.below(b - 1)
        c = rng.randbits(c_bits) | (1 << (c_bits - 1))
        n = 1 + rng.below(_max_iterations(b, c))
        mod = PseudoMersenneModulus(b, c, n, engine="native")
        p = mod.p
        pick = rng.below(8)
        if pick == 0:
            v = mod.limit
            counts["boundary"] += 1
        elif pick == 1:
            v = rng.randbits(2 * b) if mod.limit >> (2 * b) else rng.below(mod.limit + 1)
        else:
            v = rng.below(mod.limit + 1)
        want_q, want_r = divmod(v, p)

        z, r = pseudo_mersenne_divmod(v, mod)
        if z != want_q or r != want_r or pseudo_mersenne_mod(v, z, mod) != want_r:
            fail("divmod", b, c, n, v)
            continue
        if n >= 2:
            counts["early_stop"] += 1
            short = quotient_kernel(v, b, c, n - 1)
            if not 0 <= want_q - short <= mod.error_bound(1):
                fail("early_stop", b, c, n, v)
        counts["fixpoint"] += 1
        # one step past n iterations must not move the quotient
        if (z * c + v + c) >> b != want_q:
            fail("fixpoint", b, c, n, v)
        counts["cch"] += 1
        if cch_divmod(v, mod) != (want_q, want_r):
            fail("cch", b, c, n, v)
        if c == 1 and not v >> (2 * b):
            counts["mersenne_path"] += 1
            if mersenne_divmod(v, MersenneModulus(b, engine="native")) != (want_q, want_r):
                fail("mersenne_path", b, c, n, v)
        if limb_every and t % limb_every == 0:
            counts["limb"] += 1
            wide = PseudoMersenneModulus(b, c, n, engine="limb")
            lz, lr = pseudo_mersenne_divmod(v, wide)
            cq, cr = cch_divmod(v, wide)
            if (int(lz), int(lr)) != (want_q, want_r) or (int(cq), int(cr)) != (want_q, want_r):
                fail("limb", b, c, n, v)

    report = EnumerationReport(name="division_fuzz", config={"trials": trials, "seed": seed})
    report.set("trials", trials)
    for kind, n in counts.items():
        report.set(kind, n)
    report.notes.extend(failures[:10])
    report.check("division failures", len(failures), "==", 0)
    if failures:
        logger.error(f"division fuzz: {len(failures)} failures, first: {failures[0]}")
    return report


# ---- suites -------------------------------------------------------------------------


def _collision_suite(budget: Budget) -> list[EnumerationReport]:
    return [
        collision_report(7, 2, 2, "low", budget),
        collision_report(7, 2, 1, "low", budget),
        collision_report(31, 4, 4, "top", budget),
        collision_report(127, 2, 8, "low", budget),
    ]


def _moments_suite(budget: Budget) -> list[EnumerationReport]:
    return [
        enum_sketch_moments(31, 16, 4, SAMPLE_F, "pow2", budget),
        enum_sketch_moments(31, 16, 3, SAMPLE_F, "mersenne-arb", budget),
        enum_sketch_moments(31, 16, 4, {5: 9}, "pow2", budget),
        enum_sign_cancellation(7, 2, "pow2", budget=budget),
        enum_sign_cancellation(7, 3, "mersenne-arb", budget=budget),
        enum_sign_cancellation(7, 2, "pow2", two_function=True, budget=budget),
    ]


def _division_suite(budget: Budget, trials: int, seed: int) -> list[EnumerationReport]:
    return [check_mersenne_exhaustive(11, budget), fuzz_division(trials, seed, budget)]


def _bits_suite(budget: Budget) -> list[EnumerationReport]:
    reports = [bit_bias_report(p) for p in (3, 7, 31, 127, 8191, 131071, 524287)]
    reports.append(degeneracy_report(budget))
    reports.append(check_index_distribution(11, budget))
    reports.append(check_most_uniform(16, 64, budget=budget))
    reports.append(check_rounding_cost(1 << 11, budget=budget))
    return reports


def run_suite(
    name: Suite = "all",
    budget_seconds: float = settings.enumeration_budget_seconds,
    trials: int = settings.verify_fuzz_trials,
    seed: int = settings.seed,
) -> list[EnumerationReport]:
    """Run one suite, or every suite in turn; each suite gets its own wall-clock budget."""
    if name != "all" and name not in SUITES:
        raise ModulusError(f"unknown suite {name!r}")
    started = time.monotonic()
    reports: list[EnumerationReport] = []
    for suite in SUITES if name == "all" else (name,):
        logger.info(f"running {suite} suite")
        budget = Budget(seconds=budget_seconds)
        if suite == "collision":
            reports += _collision_suite(budget)
        elif suite == "moments":
            reports += _moments_suite(budget)
        elif suite == "division":
            reports += _division_suite(budget, trials, seed)
        else:
            reports += _bits_suite(budget)
    failed = sum(not r.passed for r in reports)
    logger.info(f"{len(reports)} reports, {failed} failed, {time.monotonic() - started:.1f}s")
    return reports
