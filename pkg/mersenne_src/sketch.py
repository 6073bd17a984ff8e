"""Two-for-one sign/index splitting and the Count Sketch built on it.

One 4-universal hash value h(x) over the Mersenne field gives both the bucket i(x) and
the sign s(x). The splitters only use ``+ - * >> &`` so they run on Python ints and on
numpy integer arrays alike.
"""

from __future__ import annotations

import logging
import re
import struct
from statistics import median_low
from typing import Iterable, Iterator, Literal, NamedTuple, TextIO

import numpy as np

from config import settings
from mersenne_src.errors import DomainError, ModulusError, SketchFormatError, StreamFormatError
from mersenne_src.field import MersenneModulus
from mersenne_src.polyhash import PolyHashFamily, family_new, poly_hash
from mersenne_src.prng import GOLDEN_GAMMA, MASK64, SplitMix64

logger = logging.getLogger(__name__)

Splitter = Literal["pow2", "uniform-arb", "mersenne-arb"]

SPLITTER_IDS: dict[str, int] = {"pow2": 0, "uniform-arb": 1, "mersenne-arb": 2}
SPLITTER_NAMES = {v: k for k, v in SPLITTER_IDS.items()}

MAGIC = b"MCSK1"
# magic, b, k, splitter, log2(u), rows, width
HEADER = struct.Struct("<5sBBBBII")

F2_CEILING = (1 << 127) - 1
_I64_OFFSET = 1 << 63
DELTA_RE = re.compile(r"[+-]?[0-9]+")


class SignIndexPair(NamedTuple):
    index: int
    sign: int


def split_pow2(h, b: int, ell: int) -> SignIndexPair:
    """Low ell bits pick the bucket, the top bit picks the sign (s = 1 - 2a)."""
    return SignIndexPair(h & ((1 << ell) - 1), 1 - 2 * (h >> (b - 1)))


def split_arb_uniform(h, b: int, r: int) -> SignIndexPair:
    """Most uniform index in [r] from the low b - 1 bits, sign s = 2a - 1 from the top bit."""
    j = h & ((1 << (b - 1)) - 1)
    return SignIndexPair((r * j) >> (b - 1), 2 * (h >> (b - 1)) - 1)


def split_arb_mersenne(h, b: int, r: int) -> SignIndexPair:
    """As split_arb_uniform after shifting a value from [2^b - 1] up to [1, 2^b)."""
    return split_arb_uniform(h + 1, b, r)


def split(h, b: int, r: int, splitter: Splitter) -> SignIndexPair:
    if splitter == "pow2":
        return split_pow2(h, b, r.bit_length() - 1)
    if splitter == "uniform-arb":
        return split_arb_uniform(h, b, r)
    return split_arb_mersenne(h, b, r)


def check_split_params(b: int, r: int, splitter: Splitter) -> None:
    if splitter not in SPLITTER_IDS:
        raise ModulusError(f"unknown splitter {splitter!r}")
    if splitter == "pow2":
        if r & (r - 1):
            raise ModulusError(f"the pow2 splitter needs a power-of-two width, got {r}")
        if r.bit_length() - 1 >= b:
            raise ModulusError(f"width {r} leaves no sign bit in a {b}-bit hash")
    elif r > 1 << (b - 1):
        raise ModulusError(f"width {r} exceeds 2^{b - 1}")


def _wrap64(value: int) -> int:
    return ((value + _I64_OFFSET) & MASK64) - _I64_OFFSET


def parse_stream(
    lines: Iterable[str] | TextIO, u: int | None = None
) -> Iterator[tuple[int, int]]:
    """Yield (key, delta) from "key delta" lines; blank lines are skipped."""
    for line_no, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) != 2:
            raise StreamFormatError(line_no, f"expected 'key delta', got {line.strip()!r}")
        key_s, delta_s = parts
        if not (key_s.isascii() and key_s.isdigit()):
            raise StreamFormatError(line_no, f"key must be an unsigned decimal, got {key_s!r}")
        if not DELTA_RE.fullmatch(delta_s):
            raise StreamFormatError(line_no, f"delta must be a signed decimal, got {delta_s!r}")
        delta = int(delta_s)
        key = int(key_s)
        if u is not None and key >= u:
            raise StreamFormatError(line_no, f"key {key} outside domain [0, {u})")
        yield key, delta


class CountSketch:
    """d rows of r signed 64-bit counters, one 4-universal family per row.

    Row seeds are drawn from ``seed`` unless given explicitly; two sketches with equal
    seeds and shape are linear in their input streams and can be merged.
    """

    def __init__(
        self,
        width: int = settings.sketch_width,
        rows: int = settings.sketch_rows,
        b: int = settings.default_prime_exponent,
        log_u: int = settings.sketch_log_u,
        seed: int = settings.seed,
        splitter: Splitter = settings.sketch_splitter,
        k: int = 4,
        seeds: tuple[int, ...] | None = None,
        two_function: bool = False,
    ):
        if width < 2:
            raise ModulusError(f"sketch width must be at least 2, got {width}")
        if rows < 1:
            raise ModulusError(f"sketch needs at least one row, got {rows}")
        if not 1 <= log_u < 256:
            raise ModulusError(f"log2 of the key domain must be in [1, 255], got {log_u}")
        check_split_params(b, width, splitter)

        self.modulus = MersenneModulus(b, require_prime=True)
        self.width = width
        self.rows = rows
        self.log_u = log_u
        self.u = 1 << log_u
        self.k = k
        self.splitter: Splitter = splitter
        self.two_function = two_function
        if seeds is None:
            rng = SplitMix64(seed)
            seeds = tuple(rng.next_u64() for _ in range(rows))
        if len(seeds) != rows:
            raise ModulusError(f"expected {rows} row seeds, got {len(seeds)}")
        self.seeds = tuple(s & MASK64 for s in seeds)
        self.families: tuple[PolyHashFamily, ...] = tuple(
            family_new(self.modulus, k, self.u, s) for s in self.seeds
        )
        # sign families for the A/B mode; never part of the serialized state
        self.sign_families: tuple[PolyHashFamily, ...] = ()
        if two_function:
            self.sign_families = tuple(
                family_new(self.modulus, k, self.u, (s + GOLDEN_GAMMA) & MASK64) for s in self.seeds
            )
        self.counters = np.zeros((rows, width), dtype=np.int64)

    @property
    def b(self) -> int:
        return self.modulus.b

    def _locate(self, x: int) -> list[SignIndexPair]:
        if not 0 <= x < self.u:
            raise DomainError("key outside domain")
        out = []
        for row, fam in enumerate(self.families):
            pair = split(poly_hash(fam, x), self.b, self.width, self.splitter)
            if self.two_function:
                sign = split(poly_hash(self.sign_families[row], x), self.b, self.width, self.splitter)
                pair = SignIndexPair(pair.index, sign.sign)
            out.append(pair)
        return out

    def process(self, x: int, delta: int) -> None:
        for row, (i, s) in enumerate(self._locate(x)):
            self.counters[row, i] = _wrap64(int(self.counters[row, i]) + s * delta)

    def process_stream(self, pairs: Iterable[tuple[int, int]]) -> int:
        n = 0
        for x, delta in pairs:
            self.process(x, delta)
            n += 1
        return n

    def row_f2(self) -> tuple[list[int], bool]:
        """Exact sum of squared counters per row, and whether any row hit the ceiling."""
        out = []
        saturated = False
        for row in self.counters:
            total = sum(int(c) * int(c) for c in row)
            if total > F2_CEILING:
                saturated = True
                total = F2_CEILING
            out.append(total)
        if saturated:
            logger.warning("F2 sum saturated at 2^127 - 1")
        return out, saturated

    def output_f2(self, median: bool | None = None) -> int:
        rows, _ = self.row_f2()
        use_median = settings.f2_median if median is None else median
        if use_median:
            return median_low(rows)
        return rows[0]

    def point_query(self, x: int) -> int:
        estimates = [s * int(self.counters[row, i]) for row, (i, s) in enumerate(self._locate(x))]
        return median_low(estimates)

    # ---- linearity ----------------------------------------------------------

    def _config(self) -> tuple:
        return (self.b, self.k, self.log_u, self.splitter, self.rows, self.width, self.seeds, self.two_function)

    def _check_compatible(self, other: CountSketch) -> None:
        if not isinstance(other, CountSketch):
            raise SketchFormatError(f"cannot combine a sketch with {type(other).__name__}")
        if self._config() != other._config():
            raise SketchFormatError("sketches differ in shape, splitter or seeds")

    def copy(self) -> CountSketch:
        out = CountSketch.__new__(CountSketch)
        out.__dict__.update(self.__dict__)
        out.counters = self.counters.copy()
        return out

    def merge(self, other: CountSketch) -> CountSketch:
        self._check_compatible(other)
        out = self.copy()
        out.counters = self.counters + other.counters  # int64 arrays wrap
        return out

    def subtract(self, other: CountSketch) -> CountSketch:
        """Sketch of f - g; its F2 estimates the squared Euclidean distance of f and g."""
        self._check_compatible(other)
        out = self.copy()
        out.counters = self.counters - other.counters
        return out

    __add__ = merge
    __sub__ = subtract

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CountSketch):
            return NotImplemented
        return self._config() == other._config() and np.array_equal(self.counters, other.counters)

    def __repr__(self) -> str:
        return (
            f"CountSketch(width={self.width}, rows={self.rows}, b={self.b}, "
            f"log_u={self.log_u}, splitter={self.splitter!r})"
        )

    # ---- binary state ---------------------------------------------------------

    def to_bytes(self) -> bytes:
        if self.two_function:
            raise SketchFormatError("two-function sketches are not serializable")
        header = HEADER.pack(
            MAGIC, self.b, self.k, SPLITTER_IDS[self.splitter], self.log_u, self.rows, self.width
        )
        seeds = struct.pack(f"<{self.rows}Q", *self.seeds)
        return header + seeds + self.counters.astype("<i8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> CountSketch:
        if len(data) < HEADER.size:
            raise SketchFormatError("truncated sketch header")
        magic, b, k, splitter_id, log_u, rows, width = HEADER.unpack_from(data)
        if magic != MAGIC:
            raise SketchFormatError(f"bad magic {magic!r}")
        if splitter_id not in SPLITTER_NAMES:
            raise SketchFormatError(f"unknown splitter id {splitter_id}")
        expected = HEADER.size + 8 * rows + 8 * rows * width
        if len(data) != expected:
            raise SketchFormatError(f"expected {expected} bytes of sketch state, got {len(data)}")
        seeds = struct.unpack_from(f"<{rows}Q", data, HEADER.size)
        try:
            sk = cls(width, rows, b, log_u, splitter=SPLITTER_NAMES[splitter_id], k=k, seeds=seeds)
        except ModulusError as e:
            raise SketchFormatError(f"invalid sketch parameters: {e}") from e
        counters = np.frombuffer(data, dtype="<i8", offset=HEADER.size + 8 * rows)
        sk.counters = counters.astype(np.int64).reshape(rows, width)
        return sk
