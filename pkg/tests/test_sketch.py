import logging

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st

from mersenne_src.errors import DomainError, ModulusError, SketchFormatError, StreamFormatError
from mersenne_src.sketch import (
    F2_CEILING,
    HEADER,
    CountSketch,
    check_split_params,
    parse_stream,
    split,
)

SPLITTERS = ["pow2", "uniform-arb", "mersenne-arb"]

updates = st.lists(
    st.tuples(st.integers(min_value=0, max_value=255), st.integers(min_value=-1000, max_value=1000)),
    max_size=30,
)


def small(**kw) -> CountSketch:
    args = dict(width=16, rows=1, b=31, log_u=8, seed=11, splitter="mersenne-arb")
    args.update(kw)
    return CountSketch(**args)


def test_rejects_bad_shapes():
    with pytest.raises(ModulusError):
        small(width=1)
    with pytest.raises(ModulusError):
        small(rows=0)
    with pytest.raises(ModulusError):
        small(log_u=0)
    with pytest.raises(ModulusError):
        small(b=11)
    with pytest.raises(ModulusError):
        small(splitter="pow2", width=12)


def test_split_param_limits():
    check_split_params(3, 4, "pow2")
    with pytest.raises(ModulusError):
        check_split_params(3, 8, "pow2")
    check_split_params(3, 4, "uniform-arb")
    with pytest.raises(ModulusError):
        check_split_params(3, 5, "mersenne-arb")
    with pytest.raises(ModulusError):
        check_split_params(31, 4, "other")


@pytest.mark.parametrize("splitter", SPLITTERS)
def test_split_on_arrays_matches_scalars(splitter):
    hs = np.arange(127, dtype=np.int64)
    index, sign = split(hs, 7, 8, splitter)
    for h in range(127):
        assert split(h, 7, 8, splitter) == (index[h], sign[h])
    assert set(sign.tolist()) <= {-1, 1}
    assert 0 <= index.min() and index.max() < 8


def test_empty_sketch():
    sk = small(rows=3)
    assert sk.output_f2() == 0
    assert sk.output_f2(median=True) == 0
    assert sk.point_query(5) == 0


@pytest.mark.parametrize("splitter", SPLITTERS)
def test_single_key_is_exact(splitter):
    sk = small(splitter=splitter, rows=3)
    sk.process(42, 7)
    assert [int(np.count_nonzero(row)) for row in sk.counters] == [1, 1, 1]
    assert sk.row_f2() == ([49, 49, 49], False)
    assert sk.output_f2() == 49
    assert sk.point_query(42) == 7


def test_insert_then_delete_cancels():
    sk = small()
    stream = [(3, 5), (9, -2), (200, 40)]
    sk.process_stream(stream)
    sk.process_stream((x, -d) for x, d in stream)
    assert not sk.counters.any()
    assert sk.output_f2() == 0


def test_key_outside_domain():
    with pytest.raises(DomainError):
        small().process(256, 1)


def test_counters_wrap_at_64_bits():
    sk = small()
    sk.process(1, (1 << 63) - 1)
    sk.process(1, (1 << 63) - 1)
    assert sk.point_query(1) == -2


def test_f2_saturates(caplog):
    sk = small(width=4)
    sk.counters[:] = np.iinfo(np.int64).min
    with caplog.at_level(logging.WARNING):
        assert sk.row_f2() == ([F2_CEILING], True)
    assert "saturated" in caplog.text


@hyp_settings(max_examples=100, deadline=None)
@given(updates, updates)
def test_merge_equals_sketch_of_concatenation(left, right):
    a, b, both = small(), small(), small()
    a.process_stream(left)
    b.process_stream(right)
    both.process_stream(left + right)
    assert a.merge(b) == both
    assert a.merge(b).to_bytes() == both.to_bytes()
    assert a + b == both
    assert (both - b) == a


def test_merge_rejects_mismatches():
    with pytest.raises(SketchFormatError):
        small().merge(small(seed=12))
    with pytest.raises(SketchFormatError):
        small().merge(small(width=32))
    with pytest.raises(SketchFormatError):
        small().merge(small(two_function=True))
    with pytest.raises(SketchFormatError):
        small().merge("sketch")


def test_merge_leaves_operands_untouched():
    a, b = small(), small()
    a.process(1, 3)
    b.process(2, 4)
    merged = a.merge(b)
    merged.process(5, 1)
    assert a.output_f2() == 9
    assert b.output_f2() == 16


def test_point_query_uses_median_of_rows():
    sk = small(rows=5, width=64)
    for x in range(20):
        sk.process(x, 1)
    sk.process(100, 1000)
    assert abs(sk.point_query(100) - 1000) <= 20


@pytest.mark.parametrize("splitter", SPLITTERS)
def test_acceptance_stream_f2(splitter):
    stream = list(parse_stream(["1 2", "3 -1", "7 3"], u=16))
    exact = 0
    for seed in range(100):
        sk = CountSketch(width=1024, rows=1, b=31, log_u=4, seed=seed, splitter=splitter)
        sk.process_stream(stream)
        exact += sk.output_f2() == 14
    assert exact >= 95


def test_state_round_trip():
    sk = small(rows=2, splitter="pow2")
    sk.process_stream([(1, 5), (2, -7), (255, 1 << 40)])
    data = sk.to_bytes()
    assert len(data) == HEADER.size + 8 * 2 + 8 * 2 * 16
    assert data[:5] == b"MCSK1"
    loaded = CountSketch.from_bytes(data)
    assert loaded == sk
    assert loaded.to_bytes() == data
    assert loaded.point_query(2) == sk.point_query(2)


def test_serialization_is_deterministic():
    a, b = small(), small()
    for sk in (a, b):
        sk.process_stream([(9, 1), (10, 2)])
    assert a.to_bytes() == b.to_bytes()


def test_from_bytes_rejects_malformed_state():
    data = bytearray(small().to_bytes())
    with pytest.raises(SketchFormatError, match="magic"):
        CountSketch.from_bytes(b"XXXXX" + bytes(data[5:]))
    with pytest.raises(SketchFormatError):
        CountSketch.from_bytes(bytes(data[:-1]))
    with pytest.raises(SketchFormatError, match="truncated"):
        CountSketch.from_bytes(bytes(data[:4]))
    bad = bytearray(data)
    bad[7] = 9
    with pytest.raises(SketchFormatError, match="splitter"):
        CountSketch.from_bytes(bytes(bad))
    bad = bytearray(data)
    bad[5] = 11
    with pytest.raises(SketchFormatError, match="invalid sketch parameters"):
        CountSketch.from_bytes(bytes(bad))


def test_two_function_mode():
    sk = small(two_function=True, rows=3)
    assert len(sk.sign_families) == 3
    sk.process(4, -6)
    assert sk.output_f2() == 36
    assert sk.point_query(4) == -6
    with pytest.raises(SketchFormatError):
        sk.to_bytes()


def test_parse_stream():
    lines = ["1 2\n", "\n", "3 -1\n", "   \n", "7 +3\n"]
    assert list(parse_stream(lines)) == [(1, 2), (3, -1), (7, 3)]


@pytest.mark.parametrize(
    "line",
    ["x 3", "1 abc", "1 2 3", "-1 2", "١ 2", "16 1", "1 1_000", "1 ٣", "1 +-2"],
)
def test_parse_stream_errors_carry_line_numbers(line):
    with pytest.raises(StreamFormatError, match="line 3") as info:
        list(parse_stream(["1 1", "", line], u=16))
    assert info.value.line_no == 3
