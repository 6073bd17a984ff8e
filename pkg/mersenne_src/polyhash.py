"""k-universal polynomial hashing over Mersenne prime fields.

h_a(x) = sum(a_i * x^i) mod p, evaluated by Horner's rule with one partial Mersenne
reduction per step. Requiring p >= 2u - 1 keeps the running value below 2p, so the
full reduction happens once at the end.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from config import settings
from mersenne_src.errors import DomainError, ModulusError
from mersenne_src.field import MersenneModulus, divmod_kernel
from mersenne_src.prng import SplitMix64

logger = logging.getLogger(__name__)

Finish = Literal["subtract", "branchfree"]

# numpy path: every Horner intermediate must stay below 2^63
VECTOR_BITS = 63


@dataclass(frozen=True, slots=True)
class PolyHashFamily:
    modulus: MersenneModulus
    k: int
    u: int
    coeffs: tuple[int, ...]
    lifted: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ModulusError(f"independence k must be >= 1, got {self.k}")
        if len(self.coeffs) != self.k:
            raise ModulusError(f"expected {self.k} coefficients, got {len(self.coeffs)}")
        if self.u < 1 or self.u & (self.u - 1):
            raise ModulusError(f"key domain must be a power of two, got {self.u}")
        if self.modulus.p < 2 * self.u - 1:
            raise ModulusError("modulus too small for key domain")
        if any(not 0 <= a < self.modulus.p for a in self.coeffs):
            raise ModulusError("coefficients must lie in [p]")
        object.__setattr__(self, "lifted", tuple(self.modulus.lift(a) for a in self.coeffs))

    def __call__(self, x: int) -> int:
        return poly_hash(self, x)

    @property
    def vectorizable(self) -> bool:
        return self.modulus.b + self.u.bit_length() + 1 <= VECTOR_BITS


def family_new(modulus: MersenneModulus, k: int, u: int, seed: int) -> PolyHashFamily:
    """Draw a uniformly random family from [p]^k; the same seed gives the same family."""
    if modulus.p < 2 * u - 1:
        raise ModulusError("modulus too small for key domain")
    rng = SplitMix64(seed)
    coeffs = tuple(rng.below(modulus.p) for _ in range(k))
    return PolyHashFamily(modulus, k, u, coeffs)


def poly_hash(fam: PolyHashFamily, x: int, finish: Finish | None = None) -> int:
    if not 0 <= x < fam.u:
        raise DomainError("key outside domain")
    mod = fam.modulus
    b, p = mod.b, mod.p
    y = horner_partial(fam.lifted, mod.lift(x), b, p)
    assert y < 2 * p
    if (finish or settings.hash_finish) == "branchfree":
        y = divmod_kernel(y, b, p)[1]
    elif y >= p:
        y = y - p
    return int(y)


def horner_partial(coeffs: Sequence, x, b: int, p: int):
    """Horner with one partial reduction per step. Operators only; the result is below 2p."""
    y = coeffs[-1]
    for a in reversed(coeffs[:-1]):
        y = y * x + a  # < (2u - 1)p <= p^2
        y = (y & p) + (y >> b)
    return y


def _horner_columns(coeffs: Sequence, x, b: int, p: int):
    y = horner_partial(coeffs, x, b, p)
    return np.where(y >= p, y - p, y)


def hash_columns(modulus: MersenneModulus, coeff_columns: Sequence[np.ndarray], x: int) -> np.ndarray:
    """Hash one key under many families at once; column i holds every family's a_i."""
    if modulus.b + max(x, 1).bit_length() + 1 > VECTOR_BITS:
        raise DomainError("key and modulus too wide for 64-bit vector evaluation")
    cols = [np.asarray(c, dtype=np.int64) for c in coeff_columns]
    return _horner_columns(cols, x, modulus.b, modulus.p)


def hash_many(fam: PolyHashFamily, xs: np.ndarray) -> np.ndarray:
    xs = np.asarray(xs)
    if xs.size and (xs.min() < 0 or xs.max() >= fam.u):
        raise DomainError("key outside domain")
    if fam.vectorizable:
        return _horner_columns(list(fam.coeffs), xs.astype(np.int64), fam.modulus.b, fam.modulus.p)
    logger.debug(f"falling back to scalar hashing for b={fam.modulus.b}")
    return np.array([poly_hash(fam, int(x)) for x in xs], dtype=object)


def horner_mod(coeffs: Sequence[int], x, p: int):
    """Horner with a full remainder at every step: the generic-modulus baseline."""
    y = coeffs[-1]
    for a in reversed(coeffs[:-1]):
        y = (y * x + a) % p
    return y


# ---- multiply-shift baseline ----------------------------------------------------------


@dataclass(frozen=True, slots=True)
class MultiplyShiftFamily:
    a: int
    b: int
    w: int
    ell: int

    def __post_init__(self):
        if not 1 <= self.ell <= 2 * self.w:
            raise ModulusError(f"output bits must be in [1, {2 * self.w}], got {self.ell}")
        if not (0 <= self.a < 1 << (2 * self.w) and 0 <= self.b < 1 << (2 * self.w)):
            raise ModulusError("multipliers must fit in 2w bits")


def multishift_new(w: int, ell: int, seed: int) -> MultiplyShiftFamily:
    rng = SplitMix64(seed)
    a = rng.randbits(2 * w) | 1
    return MultiplyShiftFamily(a, rng.randbits(2 * w), w, ell)


def hash_multishift(fam: MultiplyShiftFamily, x):
    """((a*x + b) mod 2^(2w)) >> (2w - ell); also accepts int64 numpy arrays when 3w < 63."""
    mask = (1 << (2 * fam.w)) - 1
    return ((fam.a * x + fam.b) & mask) >> (2 * fam.w - fam.ell)
