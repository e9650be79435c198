"""Configuration-driven benchmark runner.

Configs are flat ``key = value`` text files with one repeated ``arm`` key;
runs are deterministic functions of (config, seed) and are written as CSV
with LF line endings and shortest-roundtrip float formatting, so reruns are
byte-identical on a fixed platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .objectives import (
    QuadraticPotentialBW,
    RayleighSphere,
    make_meanfield_net,
    make_rayleigh_matrix,
    make_sigma_star,
)
from .optimizer import DIVERGED, Trajectory, rgd_run
from .rng import make_rng
from .schedules import (
    StepSchedule,
    constant_schedule,
    restart_plan,
    restarted_schedule,
    silver_schedule,
)

__all__ = ["ArmSpec", "ExperimentConfig", "parse_config", "run_experiment", "RunResult"]

CSV_HEADER = (
    "seed,arm,iteration,step_size,objective_value,error,grad_norm_sq,dist_sq_to_ref,status"
)

KNOWN_EXPERIMENTS = ("bw_potential", "rayleigh", "meanfield", "custom")

# hook for user-registered builders of the 'custom' experiment kind
CUSTOM_BUILDERS: dict = {}


@dataclass(frozen=True)
class ArmSpec:
    """One schedule arm: silver, constant(eta), or restart(cycles|auto)."""

    kind: str
    eta: float | None = None
    cycles: int | None = None  # None means auto

    @property
    def label(self) -> str:
        if self.kind == "constant":
            return f"constant({self.eta:g})"
        if self.kind == "restart":
            return f"restart({'auto' if self.cycles is None else self.cycles})"
        return "silver"


@dataclass
class ExperimentConfig:
    experiment: str
    d: int = 10
    kappa: float | None = None
    alpha: float | None = None
    L: float = 1.0
    n: int = 1023
    seeds: list[int] = field(default_factory=lambda: [0])
    arms: list[ArmSpec] = field(default_factory=list)
    out: str = "results"
    thin: int = 1
    plot: bool = False
    h_kind: str = "spread"
    target: str = "sine"
    width: int = 100
    samples: int = 200
    name: str = ""

    def validate(self) -> None:
        if self.experiment not in KNOWN_EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r} (expected one of {KNOWN_EXPERIMENTS})",
                field="experiment",
            )
        if self.experiment == "custom" and self.name not in CUSTOM_BUILDERS:
            raise ConfigError(
                "experiment 'custom' needs a registered builder via name = <key>",
                field="name",
            )
        if self.n < 1:
            raise ConfigError("n must be >= 1", field="n")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty", field="seeds")
        if not self.arms:
            raise ConfigError("at least one arm is required", field="arm")
        if self.thin < 1:
            raise ConfigError("thin must be >= 1", field="thin")
        if self.d < 1:
            raise ConfigError("d must be >= 1", field="d")
        if self.L <= 0:
            raise ConfigError("L must be positive", field="L")
        for arm in self.arms:
            if arm.kind == "constant" and (arm.eta is None or arm.eta <= 0):
                raise ConfigError("constant arm needs eta > 0", field="arm")
        if self.experiment == "bw_potential":
            if self.kappa is None and self.alpha is None:
                raise ConfigError("bw_potential needs kappa or alpha", field="kappa")
        if self.experiment in ("rayleigh", "meanfield"):
            for arm in self.arms:
                if arm.kind == "restart":
                    raise ConfigError(
                        f"restart arm needs a strongly convex objective; "
                        f"{self.experiment} has alpha = 0",
                        field="arm",
                    )
        if self.h_kind not in ("wigner", "spread"):
            raise ConfigError("h_kind must be 'wigner' or 'spread'", field="h_kind")
        if self.target not in ("sine", "teacher"):
            raise ConfigError("target must be 'sine' or 'teacher'", field="target")

    @property
    def effective_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return self.L / self.kappa


def _parse_arm(text: str, line_no: int) -> ArmSpec:
    t = text.strip()
    if t == "silver":
        return ArmSpec("silver")
    if t.startswith("constant(") and t.endswith(")"):
        try:
            return ArmSpec("constant", eta=float(t[9:-1]))
        except ValueError:
            raise ConfigError(f"bad constant arm {text!r}", line=line_no, field="arm") from None
    if t.startswith("restart(") and t.endswith(")"):
        inner = t[8:-1].strip()
        if inner == "auto":
            return ArmSpec("restart", cycles=None)
        try:
            return ArmSpec("restart", cycles=int(inner))
        except ValueError:
            raise ConfigError(f"bad restart arm {text!r}", line=line_no, field="arm") from None
    raise ConfigError(f"unknown arm {text!r}", line=line_no, field="arm")


def _parse_seeds(text: str, line_no: int) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = part.split("..", 1)
            try:
                out.extend(range(int(lo), int(hi) + 1))
            except ValueError:
                raise ConfigError(f"bad seed range {part!r}", line=line_no, field="seeds") from None
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise ConfigError(f"bad seed {part!r}", line=line_no, field="seeds") from None
    return out


_BOOL = {"true": True, "false": False, "yes": True, "no": False, "1": True, "0": False}


def parse_config(text: str) -> ExperimentConfig:
    """Parse the flat key = value format; raises ConfigError with line/field
    context on any problem."""
    cfg = ExperimentConfig(experiment="")
    seen_experiment = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key = value, got {raw!r}", line=line_no)
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key == "experiment":
                cfg.experiment = value
                seen_experiment = True
            elif key == "d":
                cfg.d = int(value)
            elif key == "kappa":
                cfg.kappa = float(value)
            elif key == "alpha":
                cfg.alpha = float(value)
            elif key == "L":
                cfg.L = float(value)
            elif key == "n":
                cfg.n = int(value)
            elif key == "seeds":
                cfg.seeds = _parse_seeds(value, line_no)
            elif key == "arm":
                cfg.arms.append(_parse_arm(value, line_no))
            elif key == "out":
                cfg.out = value
            elif key == "thin":
                cfg.thin = int(value)
            elif key == "plot":
                if value.lower() not in _BOOL:
                    raise ConfigError(f"bad boolean {value!r}", line=line_no, field="plot")
                cfg.plot = _BOOL[value.lower()]
            elif key == "h_kind":
                cfg.h_kind = value
            elif key == "target":
                cfg.target = value
            elif key == "width":
                cfg.width = int(value)
            elif key == "samples":
                cfg.samples = int(value)
            elif key == "name":
                cfg.name = value
            else:
                raise ConfigError(f"unknown key {key!r}", line=line_no, field=key)
        except ConfigError:
            raise
        except ValueError:
            raise ConfigError(f"bad value {value!r}", line=line_no, field=key) from None
    if not seen_experiment:
        raise ConfigError("missing 'experiment' key", field="experiment")
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# instance builders: (objective, x0) as a deterministic function of the seed
# ---------------------------------------------------------------------------


def _build_instance(cfg: ExperimentConfig, seed: int):
    if cfg.experiment == "bw_potential":
        rng = make_rng(seed, stream=1)
        m_star = rng.uniform(0.0, 1.0, size=cfg.d)
        sigma = make_sigma_star(cfg.d, cfg.L, cfg.effective_alpha, seed)
        obj = QuadraticPotentialBW(m_star, sigma)
        x0 = obj.manifold.point(np.zeros(cfg.d), np.eye(cfg.d))
        return obj, x0
    if cfg.experiment == "rayleigh":
        obj = RayleighSphere(make_rayleigh_matrix(cfg.d, cfg.h_kind, seed))
        rng = make_rng(seed, stream=2)
        x0 = obj.manifold.point(rng.standard_normal(cfg.d))
        return obj, x0
    if cfg.experiment == "meanfield":
        net, x0, _test = make_meanfield_net(
            cfg.target, seed, width=cfg.width, smoothness_L=cfg.L, n_samples=cfg.samples
        )
        return net, x0
    builder = CUSTOM_BUILDERS[cfg.name]
    return builder(cfg, seed)


def _build_schedule(cfg: ExperimentConfig, arm: ArmSpec, objective) -> tuple[StepSchedule, int]:
    """Schedule plus the iteration count for this arm."""
    L = objective.smoothness_L if objective.smoothness_L is not None else 1.0
    if arm.kind == "silver":
        k = max(1, math.ceil(math.log2(cfg.n + 1)))
        return silver_schedule(k, smoothness_L=L), cfg.n
    if arm.kind == "constant":
        return constant_schedule(arm.eta, cfg.n, smoothness_L=L), cfg.n
    kappa = objective.kappa
    if kappa is None or kappa <= 1.0:
        raise ConfigError("restart arm needs an objective with kappa > 1", field="arm")
    if arm.cycles is not None:
        plan = restart_plan(kappa, arm.cycles)
    else:
        # auto: power-of-two cycle count bringing ell * (2^k* - 1) to at
        # least the configured budget
        probe = restart_plan(kappa, 1)
        cycles = 2 ** max(0, math.ceil(math.log2(cfg.n / probe.inner_iters)))
        plan = restart_plan(kappa, cycles)
    return restarted_schedule(plan, smoothness_L=L), plan.total


@dataclass
class RunResult:
    seed: int
    arm: str
    trajectory: Trajectory
    errors: list[float]
    dist_sq: list[float | None]


def _reference_value(objective) -> float:
    ref = objective.reference_value()
    return 0.0 if ref is None else ref


def run_experiment(cfg: ExperimentConfig) -> list[RunResult]:
    """Run every (seed, arm) cell sequentially in deterministic order."""
    results: list[RunResult] = []
    for seed in cfg.seeds:
        objective, x0 = _build_instance(cfg, seed)
        f_star = _reference_value(objective)
        for arm in cfg.arms:
            schedule, n_arm = _build_schedule(cfg, arm, objective)
            traj = rgd_run(
                objective.manifold, objective, schedule, x0, n_arm, point_stride=cfg.thin
            )
            errors = [v - f_star for v in traj.values]
            dist: list[float | None] = [None] * len(traj.values)
            for pos, idx in enumerate(traj.point_indices):
                d = objective.ref_distance_sq(traj.points[pos])
                if d is not None:
                    dist[idx] = d
            results.append(
                RunResult(seed=seed, arm=arm.label, trajectory=traj, errors=errors, dist_sq=dist)
            )
    return results


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def write_rows_csv(cfg: ExperimentConfig, results: list[RunResult], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for res in results:
            traj = res.trajectory
            n_pts = len(traj.values)
            for i in range(n_pts):
                step = traj.applied_steps[i] if i < len(traj.applied_steps) else None
                fh.write(
                    f"{res.seed},{res.arm},{i},{_fmt(step)},{_fmt(traj.values[i])},"
                    f"{_fmt(res.errors[i])},{_fmt(traj.grad_norm_sq[i])},"
                    f"{_fmt(res.dist_sq[i])},{traj.status}\n"
                )


def write_summary_csv(results: list[RunResult], path: str) -> None:
    """Per-arm mean final error with the 2.5/97.5 percentile band."""
    by_arm: dict[str, list[float]] = {}
    status: dict[str, list[str]] = {}
    for res in results:
        by_arm.setdefault(res.arm, []).append(res.errors[-1])
        status.setdefault(res.arm, []).append(res.trajectory.status)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("arm,n_runs,final_error_mean,final_error_p2.5,final_error_p97.5,n_diverged\n")
        for arm in sorted(by_arm):
            vals = np.array(by_arm[arm])
            lo, hi = np.percentile(vals, [2.5, 97.5])
            n_div = sum(1 for s in status[arm] if s == DIVERGED)
            fh.write(
                f"{arm},{len(vals)},{_fmt(np.mean(vals))},{_fmt(lo)},{_fmt(hi)},{n_div}\n"
            )


def all_diverged(results: list[RunResult]) -> bool:
    return bool(results) and all(r.trajectory.status == DIVERGED for r in results)
