"""Riemannian gradient descent driver, restart driver, and bound evaluation.

The update is x_{n+1} = exp_{x_n}(-eta_n Grad f(x_n)) with eta_n drawn from a
`StepSchedule` and divided by the schedule's smoothness constant at
application time.  Runs never raise on numerical failure: divergence and
covariance degeneration truncate the trajectory with a status flag and the
prefix preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrixError
from .manifolds import Manifold, ManifoldPoint
from .objectives import Objective
from .schedules import RestartPlan, StepSchedule, rate_factor, restarted_schedule

__all__ = ["Trajectory", "BoundReport", "rgd_run", "restarted_run", "check_bound", "error_curve"]

DIVERGENCE_LIMIT = 1e100

# points are stored densely up to this dimension; beyond it callers should
# pass an explicit stride
DENSE_POINT_DIM = 256

COMPLETED = "completed"
DIVERGED = "diverged"
DEGENERATE_STOP = "degenerate_stop"


@dataclass
class Trajectory:
    """Record of one optimizer run.

    Scalars (values, grad_norm_sq) are dense: one entry per iterate.  Points
    are stored at the indices in `point_indices` (every `point_stride`-th
    iterate plus the last).  `applied_steps` holds eta_n / L and has one
    entry fewer than there are iterates.
    """

    points: list[ManifoldPoint]
    point_indices: list[int]
    values: list[float]
    grad_norm_sq: list[float]
    applied_steps: list[float]
    status: str = COMPLETED
    stop_index: int | None = None
    point_stride: int = 1

    @property
    def n_steps(self) -> int:
        return len(self.applied_steps)

    @property
    def final_point(self) -> ManifoldPoint:
        return self.points[-1]

    @property
    def final_value(self) -> float:
        return self.values[-1]

    def point_at(self, index: int) -> ManifoldPoint:
        try:
            pos = self.point_indices.index(index)
        except ValueError:
            raise IndexError(
                f"iterate {index} was not stored (stride {self.point_stride})"
            ) from None
        return self.points[pos]

    def check_consistent(self) -> None:
        assert len(self.values) == len(self.grad_norm_sq) == self.n_steps + 1
        assert len(self.points) == len(self.point_indices)


@dataclass(frozen=True)
class BoundReport:
    """Evaluation of the silver-rate bound f(x_n) - f* <= r_k L D^2."""

    k: int
    rate: float
    smoothness_L: float
    dist_sq_start: float
    bound: float
    achieved: float
    satisfied: bool
    margin: float


def _divergent(value: float, grad_norm_sq: float) -> bool:
    return (
        not np.isfinite(value)
        or not np.isfinite(grad_norm_sq)
        or abs(value) > DIVERGENCE_LIMIT
        or grad_norm_sq > DIVERGENCE_LIMIT
    )


def rgd_run(
    manifold: Manifold,
    objective: Objective,
    schedule: StepSchedule,
    x0: ManifoldPoint,
    n: int,
    point_stride: int = 1,
) -> Trajectory:
    """Run n gradient-descent updates from x0 under the given schedule.

    Every iterate's value, squared gradient norm, and applied step are
    recorded.  A non-finite or > 1e100 value/gradient marks the trajectory
    `diverged` at that iterate; a degenerate covariance update marks it
    `degenerate_stop` with the failing step not applied.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if schedule.mode != "silver" and len(schedule) < n:
        raise ValueError(
            f"schedule supplies {len(schedule)} entries but {n} are required"
        )
    if point_stride < 1:
        raise ValueError("point_stride must be >= 1")

    traj = Trajectory(
        points=[], point_indices=[], values=[], grad_norm_sq=[], applied_steps=[],
        point_stride=point_stride,
    )

    x = x0
    grad = objective.grad(x)
    traj.values.append(objective.value(x))
    traj.grad_norm_sq.append(manifold.norm_sq(x, grad))
    traj.points.append(x)
    traj.point_indices.append(0)

    for i in range(n):
        if _divergent(traj.values[-1], traj.grad_norm_sq[-1]):
            traj.status = DIVERGED
            traj.stop_index = i
            return traj
        eta = schedule.applied(i)
        try:
            x_new = manifold.exp(x, manifold.scale(grad, -eta))
            grad = objective.grad(x_new)
            value = objective.value(x_new)
        except DegenerateMatrixError:
            # covariance annihilated outright, or the objective needs
            # strict positivity the new iterate no longer has
            traj.status = DEGENERATE_STOP
            traj.stop_index = i
            return traj
        traj.applied_steps.append(eta)
        x = x_new
        traj.values.append(value)
        traj.grad_norm_sq.append(manifold.norm_sq(x, grad))
        if (i + 1) % point_stride == 0 or i + 1 == n:
            traj.points.append(x)
            traj.point_indices.append(i + 1)

    if _divergent(traj.values[-1], traj.grad_norm_sq[-1]):
        traj.status = DIVERGED
        traj.stop_index = n
    return traj


def restarted_run(
    manifold: Manifold,
    objective: Objective,
    plan: RestartPlan,
    x0: ManifoldPoint,
    point_stride: int = 1,
) -> Trajectory:
    """Run `plan.cycles` silver blocks of length 2^k* - 1, restarting the
    schedule index at 0 from the previous block's final iterate."""
    if objective.strong_convexity_alpha <= 0:
        raise ValueError("restarting requires a strongly convex objective (alpha > 0)")
    L = objective.smoothness_L if objective.smoothness_L is not None else 1.0
    schedule = restarted_schedule(plan, smoothness_L=L)
    return rgd_run(manifold, objective, schedule, x0, plan.total, point_stride=point_stride)


def check_bound(traj: Trajectory, objective: Objective, k: int) -> BoundReport:
    """Evaluate the rate bound at n = 2^k - 1 against the recorded run.

    The distance uses the objective's (possibly extended) squared distance
    from the starting point to its reference optimum.
    """
    n = 2 ** k - 1
    if traj.n_steps < n:
        raise ValueError(f"trajectory has {traj.n_steps} steps, need {n}")
    f_star = objective.reference_value()
    if f_star is None:
        raise ValueError("objective does not declare a reference optimum")
    dist_sq = objective.ref_distance_sq(traj.points[0])
    if dist_sq is None:
        raise ValueError("objective does not provide a distance to its reference")
    L = objective.smoothness_L if objective.smoothness_L is not None else 1.0
    rate = rate_factor(k)
    bound = rate * L * dist_sq
    achieved = traj.values[n] - f_star
    satisfied = achieved <= bound + 1e-9 * (1.0 + bound)
    return BoundReport(
        k=k,
        rate=rate,
        smoothness_L=L,
        dist_sq_start=dist_sq,
        bound=bound,
        achieved=achieved,
        satisfied=satisfied,
        margin=bound - achieved,
    )


def error_curve(traj: Trajectory, objective: Objective, f_star: float | None = None) -> list[float]:
    """f(x_i) - f* per recorded iterate; not monotone under silver steps."""
    if f_star is None:
        f_star = objective.reference_value()
    if f_star is None:
        raise ValueError("no reference optimal value available")
    return [v - f_star for v in traj.values]
