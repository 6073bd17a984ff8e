import pytest

from mersenne_src.bench import bench_div, bench_hash, key_bits_for, to_csv
from mersenne_src.errors import ModulusError


def test_hash_loops_agree():
    results = bench_hash(89, 4, n=300, warmup=1, repetitions=1)
    assert [r.op for r in results] == ["mersenne_hash", "generic_mod_hash"]
    assert results[0].checksum == results[1].checksum
    assert all(r.k == 4 and r.n == 300 for r in results)


def test_division_loops_agree():
    comparison = bench_div(127, 1, n=300, warmup=1, repetitions=1)
    ours, cch = comparison.results
    assert ours.checksum == cch.checksum
    assert comparison.ratio == pytest.approx(cch.ms / ours.ms)


def test_hash_bench_needs_mersenne_prime():
    for b in (11, 64):
        with pytest.raises(ModulusError):
            bench_hash(b, 2, n=10)


def test_key_bits():
    assert key_bits_for(61) == 32
    assert key_bits_for(89) == 64
    assert key_bits_for(5) == 4


def test_csv_columns():
    text = to_csv(bench_hash(31, 2, n=50, warmup=0, repetitions=1))
    header, *rows = text.splitlines()
    assert header == "op,b,k,c,n,ms,ops_per_sec,checksum"
    assert len(rows) == 3


@pytest.mark.slow
@pytest.mark.parametrize("b", [61, 89])
def test_mersenne_hash_beats_generic_remainder(b):
    mersenne, generic = bench_hash(b, 8, n=20_000)
    assert mersenne.checksum == generic.checksum
    assert mersenne.ms < generic.ms


@pytest.mark.slow
@pytest.mark.parametrize("b", [61, 89, 127])
def test_branch_free_division_beats_cch(b):
    comparison = bench_div(b, 1, n=20_000)
    assert comparison.ratio > 1
