import math

import numpy as np
import pytest

from silverstep.schedules import (
    RHO,
    constant_schedule,
    divisor_near,
    rate_factor,
    restart_plan,
    restarted_schedule,
    silver_schedule,
    silver_step,
)

SQRT2 = math.sqrt(2.0)


def test_first_three_levels():
    assert np.allclose(silver_schedule(1).entries, [SQRT2], atol=1e-12)
    assert np.allclose(silver_schedule(2).entries, [SQRT2, 2, SQRT2], atol=1e-12)
    expected = [SQRT2, 2, SQRT2, 2 + SQRT2, SQRT2, 2, SQRT2]
    assert np.allclose(silver_schedule(3).entries, expected, atol=1e-12)


@pytest.mark.parametrize("k", range(1, 21))
def test_palindrome(k):
    entries = silver_schedule(k).entries
    assert len(entries) == 2 ** k - 1
    assert np.array_equal(entries, entries[::-1])


def test_prefix_consistency_bitexact():
    prev = silver_schedule(1).entries
    for k in range(2, 16):
        cur = silver_schedule(k).entries
        assert np.array_equal(cur[: len(prev)], prev)
        prev = cur


def test_entries_bounded_below_by_sqrt2():
    entries = silver_schedule(14).entries
    assert entries.min() >= SQRT2


def test_middle_entries():
    for k in range(2, 12):
        entries = silver_schedule(k).entries
        assert entries[2 ** (k - 1) - 1] == 1.0 + RHO ** (k - 2)


def test_silver_step_matches_schedule():
    entries = silver_schedule(12).entries
    for n in range(len(entries)):
        assert silver_step(n) == entries[n]


def test_silver_step_examples():
    assert silver_step(0) == SQRT2
    assert silver_step(3) == 2 + SQRT2
    assert silver_step(7) == pytest.approx(1 + RHO ** 2, abs=0)
    assert silver_step(7) == pytest.approx(6.82842712474619, abs=1e-12)


def test_schedule_level_bounds():
    with pytest.raises(ValueError):
        silver_schedule(0)
    with pytest.raises(ValueError):
        silver_schedule(41)
    with pytest.raises(ValueError):
        silver_step(-1)


def test_rate_factor_value():
    # direct evaluation of 1 / (1 + sqrt(4 rho^2 - 3))
    expected = 1.0 / (1.0 + math.sqrt(4.0 * RHO ** 2 - 3.0))
    assert rate_factor(1) == expected
    assert 0.18158 < rate_factor(1) < 0.18159


def test_rate_factor_decreasing_and_bounded():
    prev = 1.0
    for k in range(1, 25):
        r = rate_factor(k)
        assert 0.0 < r < prev
        assert r <= RHO ** (-k)
        prev = r
    # r_k * rho^k stays bounded (rate ~ n^(-log2 rho))
    products = [rate_factor(k) * RHO ** k for k in range(1, 25)]
    assert max(products) < 1.0
    assert products[-1] == pytest.approx(0.5, rel=1e-6)


@pytest.mark.parametrize("k", range(1, 13))
def test_half_rate_quadratic_identity(k):
    a = 1.0 / (2.0 * rate_factor(k))
    lhs = a - a * a
    rhs = 1.0 - RHO ** (2 * k)
    assert lhs == pytest.approx(rhs, rel=1e-9)


def test_restart_plan_examples():
    plan = restart_plan(10.0, 1)
    assert (plan.k_star, plan.inner_iters, plan.total) == (4, 15, 15)
    plan = restart_plan(1000.0, 2)
    assert (plan.k_star, plan.inner_iters, plan.total) == (9, 511, 1022)


@pytest.mark.parametrize("kappa", [1.5, 2.0, 10.0, 123.4, 1e3, 1e7, 1e13])
def test_restart_contraction_guarantee(kappa):
    plan = restart_plan(kappa, 1)
    assert 2.0 * kappa * rate_factor(plan.k_star) <= 2.0 / RHO < 1.0


def test_restart_plan_rejects_bad_kappa():
    with pytest.raises(ValueError):
        restart_plan(1.0, 1)
    with pytest.raises(ValueError):
        restart_plan(10.0, 0)


def test_constant_schedule():
    sched = constant_schedule(1.0, 3)
    assert np.array_equal(sched.entries, [1.0, 1.0, 1.0])
    assert np.array_equal(constant_schedule(1.99, 2).entries, [1.99, 1.99])
    assert np.array_equal(constant_schedule(2.01, 1).entries, [2.01])
    with pytest.raises(ValueError):
        constant_schedule(0.0, 3)
    with pytest.raises(IndexError):
        sched.step(3)


def test_silver_schedule_extends_past_length():
    sched = silver_schedule(2)
    assert sched.step(5) == silver_step(5)


def test_applied_steps_scaled_by_smoothness():
    sched = silver_schedule(2, smoothness_L=4.0)
    assert sched.applied(0) == SQRT2 / 4.0


def test_restarted_schedule_resets_at_block_starts():
    plan = restart_plan(10.0, 3)
    sched = restarted_schedule(plan)
    assert sched.mode == "restarted_silver"
    assert len(sched) == plan.total
    for b in range(3):
        assert sched.step(b * plan.inner_iters) == SQRT2


def test_divisor_near():
    assert divisor_near(1500, 20) == 20
    assert divisor_near(1500, 511) == 500
    assert divisor_near(7, 3) == 1
    assert 1500 % divisor_near(1500, 511) == 0
