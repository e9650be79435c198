"""Step-size schedules for Riemannian gradient descent.

The silver schedule is the palindromic sequence built by the recursion

    block(k+1) = [block(k), 1 + rho^(k-1), block(k)],   rho = 1 + sqrt(2),

starting from block(1) = [sqrt(2)].  Entries are dimensionless multiples of
1/L; `StepSchedule.smoothness_L` divides each entry at application time.

Entries are generated by the exact recursion in double precision rather than
by pattern-matching powers, which keeps drift below 1e-13 for k <= 20 and
makes `silver_step(n)` (the index-addressable form, via the largest
power-of-two dividing n+1) bit-identical to the materialized blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RHO",
    "StepSchedule",
    "RestartPlan",
    "silver_schedule",
    "silver_step",
    "rate_factor",
    "restart_plan",
    "constant_schedule",
    "restarted_schedule",
    "divisor_near",
]

RHO: float = 1.0 + math.sqrt(2.0)

_SQRT2: float = math.sqrt(2.0)

# Hard cap on the block level: 2^40 - 1 entries is already absurd to
# materialize, and rho**(k-1) stays comfortably inside double range.
_MAX_LEVEL = 40


def _entry(valuation: int) -> float:
    """Value of a silver step whose position n has 2-adic valuation
    v = valuation of n+1: eta = 1 + rho^(v-1)."""
    if valuation == 0:
        return _SQRT2
    if valuation == 1:
        return 2.0
    return 1.0 + RHO ** (valuation - 1)


@dataclass(frozen=True)
class StepSchedule:
    """Finite step-size sequence.

    mode: 'silver' | 'constant' | 'restarted_silver'.  Entries are the
    unscaled eta_n; the applied step at iteration i is entries[i] / L.
    Silver schedules extend past their materialized length through
    `silver_step`.
    """

    mode: str
    entries: np.ndarray
    smoothness_L: float = 1.0

    def __post_init__(self):
        if self.mode not in ("silver", "constant", "restarted_silver"):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.smoothness_L <= 0:
            raise ValueError("smoothness_L must be positive")
        arr = np.asarray(self.entries, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        if self.mode == "silver":
            m = len(arr) + 1  # block length must be 2^k - 1
            if m & (m - 1) or m < 2:
                raise ValueError("silver blocks have length 2^k - 1")
            if arr.min() < _SQRT2:
                raise ValueError("silver entries are bounded below by sqrt(2)")
        elif self.mode == "constant":
            if len(arr) and (arr != arr[0]).any():
                raise ValueError("constant schedules have equal entries")

    def __len__(self) -> int:
        return len(self.entries)

    def step(self, i: int) -> float:
        """Unscaled entry at index i; silver mode extends indefinitely."""
        if i < len(self.entries):
            return float(self.entries[i])
        if self.mode == "silver":
            return silver_step(i)
        raise IndexError(f"schedule of mode {self.mode!r} has only {len(self.entries)} entries")

    def applied(self, i: int) -> float:
        return self.step(i) / self.smoothness_L


@dataclass(frozen=True)
class RestartPlan:
    """Restarted-silver plan: cycles of 2^k_star - 1 silver steps."""

    k_star: int
    inner_iters: int
    cycles: int
    total: int = field(init=False)

    def __post_init__(self):
        if self.inner_iters != 2 ** self.k_star - 1:
            raise ValueError("inner_iters must equal 2^k_star - 1")
        if self.cycles < 1:
            raise ValueError("cycles must be positive")
        object.__setattr__(self, "total", self.cycles * self.inner_iters)


def silver_schedule(k: int, smoothness_L: float = 1.0) -> StepSchedule:
    """Level-k silver block of length 2^k - 1, built by the exact recursion."""
    if not 1 <= k <= _MAX_LEVEL:
        raise ValueError(f"silver schedule level must be in [1, {_MAX_LEVEL}], got {k}")
    block = np.array([_SQRT2])
    for level in range(1, k):
        block = np.concatenate([block, [_entry(level)], block])
    return StepSchedule(mode="silver", entries=block, smoothness_L=smoothness_L)


def silver_step(n: int) -> float:
    """Entry n of the infinite silver sequence.

    Position n holds 1 + rho^(v-1) where 2^v is the largest power of two
    dividing n+1; this is consistent with every prefix of the recursion.
    """
    if n < 0:
        raise ValueError("step index must be non-negative")
    m = n + 1
    valuation = (m & -m).bit_length() - 1
    return _entry(valuation)


def rate_factor(k: int) -> float:
    """Convergence-rate factor for a level-k silver block:
    1 / (1 + sqrt(4 rho^(2k) - 3)), strictly decreasing, in (0, 1)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 / (1.0 + math.sqrt(4.0 * RHO ** (2 * k) - 3.0))


def restart_plan(kappa: float, cycles: int) -> RestartPlan:
    """Restart plan for condition number kappa: k_star = ceil(log_rho kappa) + 1.

    The construction guarantees the per-cycle contraction
    2 * kappa * rate_factor(k_star) <= 2/rho < 1, which is asserted here.
    """
    if not kappa > 1.0:
        raise ValueError(f"kappa must exceed 1, got {kappa}")
    if cycles < 1:
        raise ValueError("cycles must be positive")
    k_star = math.ceil(math.log(kappa) / math.log(RHO)) + 1
    contraction = 2.0 * kappa * rate_factor(k_star)
    # Provable for this k_star; a violation would mean rate_factor broke.
    if not contraction <= 2.0 / RHO:
        raise AssertionError(
            f"restart contraction 2*kappa*r(k*) = {contraction} exceeds 2/rho "
            f"for kappa={kappa}, k*={k_star}"
        )
    return RestartPlan(k_star=k_star, inner_iters=2 ** k_star - 1, cycles=cycles)


def constant_schedule(eta: float, n: int, smoothness_L: float = 1.0) -> StepSchedule:
    """n copies of the (unscaled) step eta."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    return StepSchedule(mode="constant", entries=np.full(n, float(eta)), smoothness_L=smoothness_L)


def restarted_schedule(plan: RestartPlan, smoothness_L: float = 1.0) -> StepSchedule:
    """Silver block of the plan tiled `cycles` times, index reset each cycle."""
    block = silver_schedule(plan.k_star).entries
    return StepSchedule(
        mode="restarted_silver",
        entries=np.tile(block, plan.cycles),
        smoothness_L=smoothness_L,
    )


def divisor_near(total: int, target: int) -> int:
    """Divisor of `total` closest to `target` (ties toward the smaller).

    Helper for choosing an inner-cycle length that divides a fixed
    iteration budget.
    """
    if total < 1 or target < 1:
        raise ValueError("total and target must be positive")
    best = 1
    for cand in range(1, total + 1):
        if total % cand == 0 and abs(cand - target) < abs(best - target):
            best = cand
    return best
