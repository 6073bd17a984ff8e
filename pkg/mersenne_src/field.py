"""Modular reduction, division and modulus for Mersenne (2^b - 1) and
pseudo-Mersenne (2^b - c) moduli.

Each algorithm is written once as an operator-only kernel (``+ * >> &`` and nothing
else), so the same code runs on Python ints, on UWide limbs and on numpy integer
arrays. The public functions check the domain, lift the input to the modulus' engine
and call the kernel.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

from config import settings
from mersenne_src.errors import DomainError, ModulusError
from mersenne_src.wide import UWide

Engine = Literal["native", "limb"]

MAX_BITS = 127
MERSENNE_PRIME_EXPONENTS = frozenset({2, 3, 5, 7, 13, 17, 19, 31, 61, 89, 107, 127})


def is_mersenne_exponent(b: int) -> bool:
    return b in MERSENNE_PRIME_EXPONENTS


def resolve_engine(b: int, engine: Engine | None = None) -> Engine:
    if engine is not None:
        if engine not in ("native", "limb"):
            raise ModulusError(f"unknown arithmetic engine {engine!r}")
        return engine
    return "native" if b <= settings.native_max_bits else "limb"


def _lift(engine: Engine, value: int | UWide) -> int | UWide:
    if engine == "native":
        return int(value)
    return value if isinstance(value, UWide) else UWide.from_int(value)


@dataclass(frozen=True, slots=True)
class MersenneModulus:
    b: int
    require_prime: bool = False
    engine: Engine | None = None
    p: int = field(init=False)

    def __post_init__(self):
        if not 2 <= self.b <= MAX_BITS:
            raise ModulusError(f"bit-width must be in [2, {MAX_BITS}], got {self.b}")
        if self.require_prime and not is_mersenne_exponent(self.b):
            raise ModulusError(f"2^{self.b}-1 is not a Mersenne prime")
        object.__setattr__(self, "p", (1 << self.b) - 1)
        object.__setattr__(self, "engine", resolve_engine(self.b, self.engine))

    def lift(self, value: int | UWide) -> int | UWide:
        return _lift(self.engine, value)

    def to_pseudo(self, m_iters: int | None = None) -> PseudoMersenneModulus:
        """The same modulus seen as 2^b - c with c = 1."""
        return PseudoMersenneModulus(self.b, 1, m_iters, self.engine)


def max_input(b: int, c: int, n: int) -> int:
    """Largest v for which n division iterations are exact.

    With q = 2^b: v <= c(q/c)^n - c when c divides q, else v <= (q/c)^(n-1)(q - c).
    Evaluated in exact integers.
    """
    q = 1 << b
    if q % c == 0:
        return q**n // c ** (n - 1) - c
    return (q ** (n - 1) * (q - c)) // c ** (n - 1)


def default_iterations(b: int, c: int) -> int:
    """Smallest iteration count whose domain covers every v < 2^(2b)."""
    target = (1 << (2 * b)) - 1
    n = 1
    while max_input(b, c, n) < target:
        n += 1
    return n


@dataclass(frozen=True, slots=True)
class PseudoMersenneModulus:
    b: int
    c: int
    m_iters: int | None = None
    engine: Engine | None = None
    p: int = field(init=False)
    limit: int = field(init=False)

    def __post_init__(self):
        if not 2 <= self.b <= MAX_BITS:
            raise ModulusError(f"bit-width must be in [2, {MAX_BITS}], got {self.b}")
        if not 1 <= self.c < 1 << (self.b - 1):
            raise ModulusError(f"offset c must be in [1, 2^{self.b - 1}), got {self.c}")
        m = self.m_iters if self.m_iters is not None else default_iterations(self.b, self.c)
        if m < 1:
            raise ModulusError(f"iteration count must be >= 1, got {m}")
        object.__setattr__(self, "m_iters", m)
        object.__setattr__(self, "p", (1 << self.b) - self.c)
        object.__setattr__(self, "limit", max_input(self.b, self.c, m))
        object.__setattr__(self, "engine", resolve_engine(self.b, self.engine))

    def lift(self, value: int | UWide) -> int | UWide:
        return _lift(self.engine, value)

    def max_input(self, iterations: int | None = None) -> int:
        if iterations is None:
            return self.limit
        return max_input(self.b, self.c, iterations)

    def in_domain(self, v: int, iterations: int | None = None) -> bool:
        n = self.m_iters if iterations is None else iterations
        if v < 0:
            return False
        if v <= self.max_input(iterations):
            return True
        q = 1 << self.b
        # looser sufficient form v < (q/c)^n, cross-multiplied
        return self.c < q - 1 and v * self.c**n < q**n

    def error_bound(self, i: int) -> int:
        """u_i, where u_0 = 0 and u_{i+1} = floor((q/c) u_i + 1).

        Stopping n - i iterations short of the admissible n leaves an error of at most u_i.
        """
        q = 1 << self.b
        u = 0
        for _ in range(i):
            u = (q * u) // self.c + 1
        return u


# ---- kernels -----------------------------------------------------------------


def reduce_kernel(y, b: int, p: int):
    return (y & p) + (y >> b)


def divmod_kernel(v, b: int, p: int):
    v1 = v + 1
    z = ((v1 >> b) + v1) >> b
    return z, (v + z) & p


def quotient_kernel(v, b: int, c: int, iterations: int):
    v1 = v + c
    z = v1 >> b
    for _ in range(iterations - 1):
        z = (z * c + v1) >> b
    return z


def mod_kernel(v, z, b: int, c: int):
    return (v + z * c) & ((1 << b) - 1)


def pseudo_divmod_kernel(v, b: int, c: int, iterations: int):
    # quotient_kernel and mod_kernel fused into one call
    v1 = v + c
    z = v1 >> b
    for _ in range(iterations - 1):
        z = (z * c + v1) >> b
    return z, (v + z * c) & ((1 << b) - 1)


# ---- checked operations --------------------------------------------------------


def mersenne_reduce_partial(y: int | UWide, mod: MersenneModulus) -> int | UWide:
    """(y & p) + (y >> b): congruent to y and below 2p for y < p^2."""
    if int(y) >= mod.p * mod.p:
        raise DomainError("input exceeds p^2")
    return reduce_kernel(mod.lift(y), mod.b, mod.p)


def mersenne_divmod(v: int | UWide, mod: MersenneModulus) -> tuple[int | UWide, int | UWide]:
    """Branch-free (floor(v/p), v mod p) for v < 2^(2b)."""
    if int(v) >> (2 * mod.b):
        raise DomainError("input exceeds 2^(2b)")
    return divmod_kernel(mod.lift(v), mod.b, mod.p)


def mersenne_mod(v: int | UWide, mod: MersenneModulus) -> int | UWide:
    return mersenne_divmod(v, mod)[1]


def pseudo_mersenne_div(v: int | UWide, mod: PseudoMersenneModulus) -> int | UWide:
    if not mod.in_domain(int(v)):
        raise DomainError("input exceeds division domain for m iterations")
    return quotient_kernel(mod.lift(v), mod.b, mod.c, mod.m_iters)


def pseudo_mersenne_mod(
    v: int | UWide, z: int | UWide, mod: PseudoMersenneModulus
) -> int | UWide:
    # requires z = floor(v/p)
    return mod_kernel(mod.lift(v), mod.lift(z), mod.b, mod.c)


def pseudo_mersenne_divmod(
    v: int | UWide, mod: PseudoMersenneModulus
) -> tuple[int | UWide, int | UWide]:
    if not mod.in_domain(int(v)):
        raise DomainError("input exceeds division domain for m iterations")
    return pseudo_divmod_kernel(mod.lift(v), mod.b, mod.c, mod.m_iters)


def cch_divmod(x: int | UWide, mod: PseudoMersenneModulus) -> tuple[int | UWide, int | UWide]:
    """Crandall-Chung-Hasan quotient and remainder; the baseline the division is measured against."""
    x = mod.lift(x)
    mask = (1 << mod.b) - 1
    q_i = x >> mod.b
    q = q_i
    r = x & mask
    while q_i > 0:
        t = q_i * mod.c
        q_i = t >> mod.b
        q = q + q_i
        r = r + (t & mask)
    while r >= mod.p:
        r = r - mod.p
        q = q + 1
    return q, r
