"""Maps from hash-value domains onto [r] buckets.

Bit positions are numbered from the least significant bit (LSB = 0). All maps are
written with integer operators only, so they take Python ints as well as numpy
integer arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

from mersenne_src.errors import ModulusError
from mersenne_src.field import PseudoMersenneModulus, max_input, pseudo_mersenne_div, quotient_kernel

Source = Literal["pow2", "mersenne", "pseudo_mersenne"]


@dataclass(frozen=True, slots=True)
class BitSelector:
    b: int
    positions: tuple[int, ...]

    def __post_init__(self):
        if not self.positions:
            raise ModulusError("a selector needs at least one bit")
        if any(j >= k for j, k in zip(self.positions, self.positions[1:])):
            raise ModulusError("bit positions must be strictly increasing")
        if self.positions[0] < 0 or self.positions[-1] >= self.b:
            raise ModulusError(f"bit positions must lie in [0, {self.b})")

    @classmethod
    def top(cls, b: int, ell: int) -> BitSelector:
        return cls(b, tuple(range(b - ell, b)))

    @classmethod
    def low(cls, b: int, ell: int) -> BitSelector:
        return cls(b, tuple(range(ell)))

    @property
    def ell(self) -> int:
        return len(self.positions)

    @property
    def r(self) -> int:
        return 1 << self.ell

    def __call__(self, y):
        return select_bits(y, self)


def select_bits(y, sel: BitSelector):
    """Concatenate the selected bits of y; output bit i is input bit positions[i]."""
    first, ell = sel.positions[0], sel.ell
    if sel.positions[-1] - first == ell - 1:
        # contiguous run: a shift and a mask; top-ell and low-ell are special cases
        return (y >> first) & ((1 << ell) - 1)
    out = 0
    for i, j in enumerate(sel.positions):
        out = out | (((y >> j) & 1) << i)
    return out


def map_pow2(v, b: int, r: int):
    """(v*r) >> b: most uniform from [2^b] (and from [2^b] without 0) onto [r]."""
    return (v * r) >> b


def map_mersenne(v, b: int, r: int):
    """((v+1)*r) >> b: most uniform from [2^b - 1] onto [r]."""
    return ((v + 1) * r) >> b


def exact_division_modulus(mod: PseudoMersenneModulus, r: int) -> PseudoMersenneModulus:
    """Copy of mod with enough iterations that (p - 1)*r is always in the division domain."""
    top = (mod.p - 1) * r
    n = mod.m_iters
    while max_input(mod.b, mod.c, n) < top:
        n += 1
    if n == mod.m_iters:
        return mod
    return PseudoMersenneModulus(mod.b, mod.c, n, mod.engine)


def map_exact_division(v: int, r: int, mod: PseudoMersenneModulus) -> int:
    """floor(v*r / (2^b - c)) computed by the pseudo-Mersenne divider."""
    return int(pseudo_mersenne_div(v * r, mod))


@dataclass(frozen=True, slots=True)
class BucketSpec:
    r: int
    source: Source
    b: int
    c: int = 1
    divider: PseudoMersenneModulus | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.r < 1:
            raise ModulusError(f"bucket count must be >= 1, got {self.r}")
        if self.source == "pseudo_mersenne":
            object.__setattr__(
                self, "divider", exact_division_modulus(PseudoMersenneModulus(self.b, self.c), self.r)
            )
        elif self.source == "mersenne" and self.c != 1:
            raise ModulusError("a Mersenne domain has c = 1")
        if self.r > self.q:
            raise ModulusError(f"{self.r} buckets exceed the domain size {self.q}")

    @property
    def q(self) -> int:
        if self.source == "pow2":
            return 1 << self.b
        return (1 << self.b) - self.c

    @property
    def pow2_r(self) -> bool:
        return self.r & (self.r - 1) == 0

    def bucket(self, v):
        if self.source == "pow2":
            if self.pow2_r:
                return v >> (self.b - (self.r.bit_length() - 1))
            return map_pow2(v, self.b, self.r)
        if self.source == "mersenne":
            return map_mersenne(v, self.b, self.r)
        if isinstance(v, np.ndarray):
            d = self.divider
            return quotient_kernel(v * self.r, d.b, d.c, d.m_iters)
        return map_exact_division(v, self.r, self.divider)

    __call__ = bucket


def preimage_counts(spec: BucketSpec, skip_zero: bool = False) -> np.ndarray:
    """How many elements of the domain land in each bucket (exhaustive).

    skip_zero drops v = 0, giving the domain [q] without 0.
    """
    v = np.arange(1 if skip_zero else 0, spec.q, dtype=np.int64)
    return np.bincount(spec.bucket(v), minlength=spec.r)


def is_most_uniform(counts, q: int, r: int) -> bool:
    lo, hi = q // r, -(-q // r)
    return len(counts) == r and sum(int(c) for c in counts) == q and all(
        lo <= int(c) <= hi for c in counts
    )


def rounding_offset(q: int, r: int) -> int:
    """The a in [r] with r dividing q + a."""
    return -q % r


def collision_probability(counts, q: int) -> Fraction:
    """Pr[mu(v) = mu(w)] for independent uniform v, w over a domain of size q."""
    return Fraction(sum(int(c) ** 2 for c in counts), q * q)


def collision_identity(q: int, r: int) -> Fraction:
    """(1 + a(r - a)/q^2)/r, the collision probability of any most uniform map [q] -> [r]."""
    a = rounding_offset(q, r)
    return (1 + Fraction(a * (r - a), q * q)) / r
