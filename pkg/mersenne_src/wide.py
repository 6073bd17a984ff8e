"""Fixed-capacity unsigned integers made of four little-endian 64-bit limbs.

UWide carries the wide intermediates of the reduction and division algorithms for
moduli wider than the native path handles. Every operator works limb by limb with
explicit carries, exactly as a C implementation would, and refuses to wrap: anything
that would need more than 256 bits raises WideOverflowError.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from mersenne_src.errors import WideOverflowError

LIMB_BITS = 64
LIMB_COUNT = 4
LIMB_MASK = (1 << LIMB_BITS) - 1
CAPACITY_BITS = LIMB_BITS * LIMB_COUNT

Operand = Union["UWide", int]


@dataclass(frozen=True, slots=True)
class UWide:
    limbs: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.limbs) != LIMB_COUNT or any(not 0 <= w <= LIMB_MASK for w in self.limbs):
            raise WideOverflowError(f"limbs must be {LIMB_COUNT} words of 64 bits: {self.limbs}")

    @classmethod
    def from_int(cls, value: int) -> UWide:
        if value < 0 or value >> CAPACITY_BITS:
            raise WideOverflowError(f"value does not fit in {CAPACITY_BITS} bits")
        return cls(
            (
                value & LIMB_MASK,
                (value >> 64) & LIMB_MASK,
                (value >> 128) & LIMB_MASK,
                value >> 192,
            )
        )

    def __int__(self) -> int:
        w0, w1, w2, w3 = self.limbs
        return w0 | (w1 << 64) | (w2 << 128) | (w3 << 192)

    __index__ = __int__

    def __repr__(self) -> str:
        return f"UWide({int(self):#x})"

    def bit_length(self) -> int:
        for i in range(LIMB_COUNT - 1, -1, -1):
            if self.limbs[i]:
                return i * LIMB_BITS + self.limbs[i].bit_length()
        return 0

    # ---- arithmetic ---------------------------------------------------------

    def __add__(self, other: Operand) -> UWide:
        o = _coerce(other).limbs
        out = []
        carry = 0
        for a, b in zip(self.limbs, o):
            s = a + b + carry
            out.append(s & LIMB_MASK)
            carry = s >> LIMB_BITS
        if carry:
            raise WideOverflowError("addition overflows 256 bits")
        return UWide(tuple(out))

    __radd__ = __add__

    def __sub__(self, other: Operand) -> UWide:
        o = _coerce(other).limbs
        out = []
        borrow = 0
        for a, b in zip(self.limbs, o):
            d = a - b - borrow
            borrow = 1 if d < 0 else 0
            out.append(d & LIMB_MASK)
        if borrow:
            raise WideOverflowError("subtraction would go below zero")
        return UWide(tuple(out))

    def __rsub__(self, other: Operand) -> UWide:
        return _coerce(other) - self

    def __mul__(self, other: Operand) -> UWide:
        return wide_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __rshift__(self, n: int) -> UWide:
        if n >= CAPACITY_BITS:
            return ZERO
        whole, part = divmod(n, LIMB_BITS)
        src = self.limbs[whole:] + (0,) * whole
        if not part:
            return UWide(src)
        out = tuple(
            ((src[i] >> part) | (src[i + 1] << (LIMB_BITS - part) if i + 1 < LIMB_COUNT else 0))
            & LIMB_MASK
            for i in range(LIMB_COUNT)
        )
        return UWide(out)

    def __lshift__(self, n: int) -> UWide:
        if n and self.bit_length() + n > CAPACITY_BITS:
            raise WideOverflowError("left shift overflows 256 bits")
        whole, part = divmod(n, LIMB_BITS)
        src = (0,) * whole + self.limbs[: LIMB_COUNT - whole]
        if not part:
            return UWide(src)
        out = tuple(
            ((src[i] << part) | (src[i - 1] >> (LIMB_BITS - part) if i else 0)) & LIMB_MASK
            for i in range(LIMB_COUNT)
        )
        return UWide(out)

    def __and__(self, other: Operand) -> UWide:
        o = _coerce(other).limbs
        return UWide(tuple(a & b for a, b in zip(self.limbs, o)))

    __rand__ = __and__

    # ---- comparisons --------------------------------------------------------

    def _cmp(self, other: Operand) -> int:
        o = _coerce(other).limbs
        for i in range(LIMB_COUNT - 1, -1, -1):
            if self.limbs[i] != o[i]:
                return 1 if self.limbs[i] > o[i] else -1
        return 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UWide):
            return self.limbs == other.limbs
        if isinstance(other, int):
            return int(self) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(int(self))

    def __lt__(self, other: Operand) -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: Operand) -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: Operand) -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: Operand) -> bool:
        return self._cmp(other) >= 0

    def __bool__(self) -> bool:
        return any(self.limbs)


ZERO = UWide((0, 0, 0, 0))


def _coerce(value: Operand) -> UWide:
    if isinstance(value, UWide):
        return value
    return UWide.from_int(value)


def wide_mul(a: UWide, b: UWide) -> UWide:
    """Exact product; the operands' bit lengths must sum to at most 256."""
    if a.bit_length() + b.bit_length() > CAPACITY_BITS:
        raise WideOverflowError(
            f"product of {a.bit_length()}-bit and {b.bit_length()}-bit values exceeds 256 bits"
        )
    x, y = a.limbs, b.limbs
    acc = [0] * LIMB_COUNT
    for i in range(LIMB_COUNT):
        if not x[i]:
            continue
        carry = 0
        # partial products at limb i + j >= 4 are zero once the bit-length guard holds
        for j in range(LIMB_COUNT - i):
            t = x[i] * y[j] + acc[i + j] + carry
            acc[i + j] = t & LIMB_MASK
            carry = t >> LIMB_BITS
        if carry:
            raise WideOverflowError("product overflows 256 bits")
    return UWide(tuple(acc))
