import json
import pathlib
from fractions import Fraction

import pytest

from mersenne_src.bucketing import BitSelector, BucketSpec, preimage_counts
from mersenne_src.field import (
    MersenneModulus,
    PseudoMersenneModulus,
    cch_divmod,
    mersenne_divmod,
    mersenne_reduce_partial,
    pseudo_mersenne_div,
    pseudo_mersenne_mod,
)
from mersenne_src.polyhash import PolyHashFamily, poly_hash
from mersenne_src.sketch import split_arb_mersenne, split_arb_uniform, split_pow2
from mersenne_src.verify import enum_bit_bias, enum_collision
from mersenne_src.wide import UWide, wide_mul

CASES = json.loads((pathlib.Path(__file__).parent / "vectors.json").read_text(encoding="utf-8"))


def _big(expr: str) -> int:
    # the vectors spell wide values as small arithmetic over 2^n
    return eval(expr.replace("^", "**"), {"__builtins__": {}})


def _wide_mul(a, b):
    return int(wide_mul(UWide.from_int(_big(a)), UWide.from_int(_big(b))))


def _hash(b, u, coeffs, x):
    return poly_hash(PolyHashFamily(MersenneModulus(b), len(coeffs), u, tuple(coeffs)), x)


def _preimage_counts(source, b, c, r):
    return [int(n) for n in preimage_counts(BucketSpec(r, source, b, c))]


OPS = {
    "wide_mul": _wide_mul,
    "mersenne_reduce_partial": lambda b, y: int(mersenne_reduce_partial(y, MersenneModulus(b))),
    "mersenne_divmod": lambda b, v: [int(t) for t in mersenne_divmod(v, MersenneModulus(b))],
    "pseudo_mersenne_div": lambda b, c, m, v: int(pseudo_mersenne_div(v, PseudoMersenneModulus(b, c, m))),
    "pseudo_mersenne_mod": lambda b, c, v, z: int(pseudo_mersenne_mod(v, z, PseudoMersenneModulus(b, c))),
    "cch_divmod": lambda b, c, x: [int(t) for t in cch_divmod(x, PseudoMersenneModulus(b, c))],
    "hash": _hash,
    "select_bits": lambda b, y, positions: BitSelector(b, tuple(positions))(y),
    "preimage_counts": _preimage_counts,
    "split_pow2": lambda h, b, param: list(split_pow2(h, b, param)),
    "split_arb_uniform": lambda h, b, param: list(split_arb_uniform(h, b, param)),
    "split_arb_mersenne": lambda h, b, param: list(split_arb_mersenne(h, b, param)),
    "enum_collision": lambda p, k, r: enum_collision(p, k, r),
    "enum_bit_bias": lambda p: enum_bit_bias(p),
}


def _expected(case):
    want = case["expected"]
    if case["op"] == "wide_mul":
        return _big(want)
    if case["op"] == "enum_collision":
        return Fraction(*want)
    if case["op"] == "enum_bit_bias":
        return [Fraction(*q) for q in want]
    return want


@pytest.mark.parametrize("case", CASES, ids=[c["id"] for c in CASES])
def test_vector(case):
    assert OPS[case["op"]](**case["inputs"]) == _expected(case)
