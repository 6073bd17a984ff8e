import logging
from fractions import Fraction

import pytest
from pydantic import ValidationError

from mersenne_src.bucketing import BitSelector
from mersenne_src.errors import BudgetExceededError, DomainError, ModulusError
from mersenne_src.verify import (
    SAMPLE_F,
    Budget,
    Rational,
    bit_bias_report,
    check_index_distribution,
    check_mersenne_exhaustive,
    check_most_uniform,
    check_rounding_cost,
    collision_report,
    degeneracy_report,
    enum_bucket_distribution,
    enum_collision,
    enum_index_distribution,
    enum_sign_cancellation,
    enum_sketch_moments,
    fuzz_division,
    run_suite,
    top_bits_degeneracy,
)


def test_collision_mod_7():
    assert enum_collision(7, 2, 2) == Fraction(25, 49)
    assert enum_collision(7, 2, 1) == 1


@pytest.mark.parametrize(
    "p,k,r,kind", [(7, 2, 2, "low"), (31, 2, 4, "top"), (31, 3, 8, "low"), (127, 2, 16, "top")]
)
def test_collision_report_matches_closed_form(p, k, r, kind):
    report = collision_report(p, k, r, kind)
    assert report.passed
    assert report.quantities["collision"].fraction() == (1 + Fraction(r - 1, p * p)) / r


def test_collision_argument_errors():
    with pytest.raises(ModulusError):
        enum_collision(7, 2, 3)
    with pytest.raises(ModulusError):
        enum_collision(7, 2, 4, BitSelector.low(3, 1))
    with pytest.raises(DomainError):
        enum_collision(7, 2, 2, x=1, y=1)
    with pytest.raises(DomainError):
        enum_collision(7, 2, 2, x=0, y=4)


def test_budget_refuses_up_front(caplog):
    with caplog.at_level(logging.WARNING, logger="mersenne_src.verify"):
        with pytest.raises(BudgetExceededError) as info:
            enum_collision(127, 4, 2, budget=Budget(max_work=1000))
    assert info.value.required == 2 * 127**4
    assert f"{2 * 127**4} evaluations over budget 1000" in caplog.text


def test_budget_wall_clock():
    with pytest.raises(BudgetExceededError):
        enum_collision(7, 2, 2, budget=Budget(seconds=-1))


def test_bucket_distribution_sums_to_one():
    dist = enum_bucket_distribution(31, 2, BitSelector.top(5, 2))
    assert sum(dist) == 1
    # 31 values: buckets 0..2 hold 8 each, bucket 3 holds 7
    assert dist == [Fraction(8, 31)] * 3 + [Fraction(7, 31)]


def test_bit_bias():
    assert bit_bias_report(31).passed
    assert bit_bias_report(8191).passed
    fermat = bit_bias_report(17)
    assert not fermat.passed
    assert fermat.distributions["pr_one"][4].fraction() == Fraction(1, 17)
    with pytest.raises(DomainError):
        bit_bias_report(1 << 21)


def test_non_mersenne_degeneracy():
    assert top_bits_degeneracy(16, 15, 4) == (4096, 4081)
    assert top_bits_degeneracy(16, 256, 8) == (256, 0)
    report = degeneracy_report()
    assert report.passed
    assert report.quantities["fermat_top_bit_collision"].fraction() == Fraction(257, 289)


@pytest.mark.parametrize("splitter", ["pow2", "uniform-arb", "mersenne-arb"])
def test_sketch_mean_identity(splitter):
    report = enum_sketch_moments(31, 16, 4, SAMPLE_F, splitter)
    q = report.quantities
    assert q["sum_X"].fraction() == 12931216
    assert q["E_X"].fraction() == 14 + Fraction(2, 961)
    assert q["point_query_1"].fraction() == 2 + Fraction(2, 961)
    assert all(b.passed for b in report.bounds if b.name.startswith("E["))


@pytest.mark.slow
@pytest.mark.parametrize("r,splitter", [(4, "pow2"), (3, "mersenne-arb")])
def test_sketch_variance_bounds(r, splitter):
    report = enum_sketch_moments(31, 16, r, SAMPLE_F, splitter)
    assert report.passed, [b.name for b in report.bounds if not b.passed]


def test_single_key_sketch_is_exact():
    report = enum_sketch_moments(31, 16, 4, {5: 9}, "pow2")
    assert report.passed
    assert report.quantities["E_X"].fraction() == 81
    assert report.quantities["Var_X"].fraction() == 0


def test_sketch_moment_errors():
    with pytest.raises(ModulusError):
        enum_sketch_moments(17, 8, 4, SAMPLE_F)
    with pytest.raises(ModulusError, match="too small"):
        enum_sketch_moments(31, 17, 4, SAMPLE_F)
    with pytest.raises(DomainError):
        enum_sketch_moments(31, 16, 4, {1: 0})
    with pytest.raises(DomainError):
        enum_sketch_moments(31, 16, 4, {16: 1})


@pytest.mark.parametrize(
    "r,splitter",
    [(2, "pow2"), (4, "pow2"), (2, "uniform-arb"), (3, "uniform-arb"), (3, "mersenne-arb")],
)
def test_sign_cancellation(r, splitter):
    report = enum_sign_cancellation(7, r, splitter)
    assert report.passed, [b.name for b in report.bounds if not b.passed]


def test_sign_cancellation_two_functions():
    report = enum_sign_cancellation(7, 2, "pow2", two_function=True)
    assert report.passed
    q = report.quantities
    assert q["E_sA"].fraction() == q["E_s"].fraction() * q["E_A"].fraction()


def test_index_distribution():
    report = enum_index_distribution(5, 3)
    assert report.passed
    # h + 1 over [1, 32): bucket 0 takes j in {0..5} when a = 1 and j in {1..5} when a = 0
    assert report.distributions["index"][0].fraction() == Fraction(11, 31)
    assert check_index_distribution(max_b=7).passed


def test_most_uniform_sweep():
    report = check_most_uniform(max_b=8, max_r=16)
    assert report.passed
    assert report.quantities["cases"].fraction() > 0


def test_rounding_cost_sweep():
    assert check_rounding_cost(max_q=120, max_r=12).passed


def test_exhaustive_division():
    report = check_mersenne_exhaustive(max_b=7)
    assert report.passed
    assert report.quantities["values"].fraction() == sum(1 << (2 * b) for b in range(2, 8))


def test_division_fuzz():
    report = fuzz_division(trials=300, seed=3, limb_every=10)
    assert report.passed, report.notes
    assert report.quantities["cch"].fraction() == 300
    assert report.quantities["limb"].fraction() == 30


@pytest.mark.slow
def test_division_suite_at_full_scale():
    reports = run_suite("division", budget_seconds=120, trials=1_000_000)
    assert [r.name for r in reports] == ["mersenne_exhaustive", "division_fuzz"]
    assert all(r.passed for r in reports), [r.notes for r in reports]
    assert reports[0].config == {"max_b": 11}
    assert reports[1].quantities["trials"].fraction() == 1_000_000


@pytest.mark.slow
def test_bits_suite_at_full_scale():
    reports = run_suite("bits")
    assert all(r.passed for r in reports), [r.name for r in reports if not r.passed]
    by_name = {r.name: r.config for r in reports}
    assert by_name["rounding_cost"]["max_q"] == 1 << 11
    assert (by_name["most_uniform"]["max_b"], by_name["most_uniform"]["max_r"]) == (16, 64)
    assert by_name["index_distribution_sweep"] == {"max_b": 11}


def test_reports_serialize_with_verdict():
    dumped = collision_report(7, 2, 2).model_dump()
    assert dumped["passed"] is True
    assert dumped["quantities"]["collision"] == {"num": 25, "den": 49}


def test_rational_rejects_zero_denominator():
    with pytest.raises(ValidationError):
        Rational(num=1, den=0)


def test_run_suite():
    reports = run_suite("collision")
    assert reports and all(r.passed for r in reports)
    with pytest.raises(ModulusError):
        run_suite("nonsense")
