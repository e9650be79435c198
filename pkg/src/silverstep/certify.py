"""Numerical certification of the geometric and convexity inequalities that
the silver-step convergence analysis rests on.

Each certificate samples instances from a seeded stream, evaluates a signed
gap that the theory claims is non-negative (or zero), and reports the worst
case.  Reports are deterministic per seed.  A failing certificate on an
objective outside the theory's hypotheses (e.g. the sphere Rayleigh
quotient, which is not geodesically convex) is informative, not a bug.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedLogError
from .linalg import SpdMatrix, log_det, spd_inv_sqrt, spd_sqrt
from .manifolds import (
    BuresWasserstein,
    Euclidean,
    Manifold,
    ManifoldPoint,
    Sphere,
    ot_map_matrix,
)
from .objectives import (
    ConvexQuadratic,
    Objective,
    QuadraticPotentialBW,
    make_sigma_star,
)
from .optimizer import Trajectory, rgd_run
from .rng import gaussian_symmetric, make_rng
from .schedules import RHO, rate_factor, silver_schedule, silver_step

__all__ = [
    "CertificateReport",
    "CertificateWeights",
    "interpolation_gap",
    "anchored_convexity_gap",
    "cocoercivity_gap",
    "descent_gap",
    "three_point_gap",
    "certificate_weights",
    "energy_inequality_sides",
    "combination_gap",
    "bw_sectional_curvature",
    "entropy_curve_values",
    "entropy_curve_check",
    "run_suite",
    "suite_names",
    "curvature_table",
    "write_reports",
    "sample_point",
    "sample_tangent",
]

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class CertificateReport:
    """Outcome of one inequality battery.

    worst_gap is signed: >= 0 means every sampled constraint held.  The
    report passes iff worst_gap >= -tolerance.  `witness` serializes the
    worst-case inputs for reproduction.
    """

    name: str
    samples: int
    worst_gap: float
    tolerance: float
    passed: bool
    witness: str = ""

    @staticmethod
    def from_gaps(name, gaps, tolerance, witness="") -> "CertificateReport":
        worst = float(min(gaps)) if len(gaps) else float("inf")
        return CertificateReport(
            name=name,
            samples=len(gaps),
            worst_gap=worst,
            tolerance=tolerance,
            passed=worst >= -tolerance,
            witness=witness,
        )

    def to_line(self) -> str:
        return (
            f"{self.name}, {self.samples}, {self.worst_gap!r}, "
            f"{self.tolerance!r}, {'pass' if self.passed else 'FAIL'}"
        )


def write_reports(reports, path) -> None:
    """Line-oriented report format: one summary line per certificate plus an
    indented witness block."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rep in reports:
            fh.write(rep.to_line() + "\n")
            if rep.witness:
                for line in rep.witness.splitlines():
                    fh.write("    " + line + "\n")


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------


def sample_point(manifold: Manifold, rng: np.random.Generator, scale: float = 1.0) -> ManifoldPoint:
    """Draw a point by shooting a Gaussian tangent from a fixed base.

    Bases: the origin (Euclidean), the first coordinate axis (sphere), and
    the standard Gaussian (0, I).  Bures-Wasserstein matrix directions are
    shrunk when they would push an update-factor eigenvalue near zero, which
    keeps sampled covariances well-conditioned enough for 1e-8 checks.
    """
    if isinstance(manifold, Euclidean):
        return manifold.point(rng.standard_normal(manifold.dim) * scale)
    if isinstance(manifold, Sphere):
        base = np.zeros(manifold.dim)
        base[0] = 1.0
        x = manifold.point(base)
        vec = rng.standard_normal(manifold.dim) * scale
        return manifold.exp(x, manifold.tangent(x, vec))
    if isinstance(manifold, BuresWasserstein):
        d = manifold.dim
        x = manifold.point(np.zeros(d), np.eye(d))
        a = rng.standard_normal(d) * scale
        s = gaussian_symmetric(d, rng, scale=scale / math.sqrt(d))
        min_factor = float(np.linalg.eigvalsh(s + np.eye(d))[0])
        if min_factor < 0.05:
            s = s * (0.95 / (1.0 - min_factor))
        return manifold.exp(x, manifold.tangent(x, a, s))
    raise TypeError(f"no sampler for manifold {manifold!r}")


def sample_tangent(
    manifold: Manifold, x: ManifoldPoint, rng: np.random.Generator, scale: float = 1.0
):
    if isinstance(manifold, BuresWasserstein):
        d = manifold.dim
        return manifold.tangent(
            x, rng.standard_normal(d) * scale, gaussian_symmetric(d, rng, scale=scale / math.sqrt(d))
        )
    return manifold.tangent(x, rng.standard_normal(manifold.dim) * scale)


def _sample_pair(manifold, rng, scale=1.0):
    """Two points with a well-defined connecting geodesic."""
    for _ in range(64):
        x = sample_point(manifold, rng, scale)
        y = sample_point(manifold, rng, scale)
        if isinstance(manifold, Sphere) and manifold.dist(x, y) > math.pi - 1e-3:
            continue
        return x, y
    raise RuntimeError("could not sample a non-antipodal pair")


# ---------------------------------------------------------------------------
# pointwise inequality gaps
# ---------------------------------------------------------------------------


def interpolation_gap(
    objective: Objective,
    manifold: Manifold,
    x_i: ManifoldPoint,
    x_j: ManifoldPoint,
    L: float | None = None,
) -> float:
    """Smooth-convex interpolation certificate between two points:

        2L(f_i - f_j) - 2L <G_j, log_{x_j} x_i> - |Gamma G_i - G_j|^2_{x_j},

    expanded through the transport isometry as
    ... - |G_i|^2_{x_i} - |G_j|^2_{x_j} + 2 <G_j, Gamma G_i>_{x_j},
    which needs a single transport.  Non-negative for every pair whenever
    the objective is generalized geodesically convex and L-smooth.
    """
    if L is None:
        L = objective.smoothness_L
    f_i, f_j = objective.value(x_i), objective.value(x_j)
    g_i, g_j = objective.grad(x_i), objective.grad(x_j)
    log_ji = manifold.log(x_j, x_i)
    moved = manifold.transport(x_i, x_j, g_i)
    return (
        2.0 * L * (f_i - f_j)
        - 2.0 * L * manifold.inner(x_j, g_j, log_ji)
        - manifold.norm_sq(x_i, g_i)
        - manifold.norm_sq(x_j, g_j)
        + 2.0 * manifold.inner(x_j, g_j, moved)
    )


def anchored_convexity_gap(
    objective: Objective,
    manifold: Manifold,
    x: ManifoldPoint,
    y: ManifoldPoint,
    z: ManifoldPoint,
) -> float:
    """Convexity measured from an anchor point z:

        f(y) - f(x) - <Gamma_x^z Grad f(x), log_z y - log_z x>_z.

    Non-negative for all anchors iff f is convex along every anchored
    curve (the first-order bound along a curve whose initial velocity is
    taken at the anchor); z = x recovers plain geodesic convexity.
    """
    g_x = objective.grad(x)
    moved = manifold.transport(x, z, g_x)
    diff = manifold.add(manifold.log(z, y), manifold.scale(manifold.log(z, x), -1.0))
    return objective.value(y) - objective.value(x) - manifold.inner(z, moved, diff)


def cocoercivity_gap(
    objective: Objective,
    manifold: Manifold,
    x: ManifoldPoint,
    y: ManifoldPoint,
    L: float | None = None,
) -> float:
    """Gradient co-coercivity residual:

        <Gamma_y^x Grad f(y) - Grad f(x), log_x y> - (1/L) |same|^2.

    Summing the two orderings of the interpolation certificate yields this,
    so it is non-negative whenever both certificates are.
    """
    if L is None:
        L = objective.smoothness_L
    g_x = objective.grad(x)
    moved = manifold.transport(y, x, objective.grad(y))
    diff = manifold.add(moved, manifold.scale(g_x, -1.0))
    return manifold.inner(x, diff, manifold.log(x, y)) - manifold.norm_sq(x, diff) / L


def descent_gap(
    objective: Objective,
    manifold: Manifold,
    x: ManifoldPoint,
    y: ManifoldPoint,
    L: float | None = None,
) -> float:
    """Smoothness (descent) residual:

        f(x) + <Grad f(x), log_x y> + (L/2) d^2(x, y) - f(y),

    non-negative under geodesic L-smoothness.
    """
    if L is None:
        L = objective.smoothness_L
    g_x = objective.grad(x)
    return (
        objective.value(x)
        + manifold.inner(x, g_x, manifold.log(x, y))
        + 0.5 * L * manifold.dist_sq(x, y)
        - objective.value(y)
    )


def three_point_gap(manifold: Manifold, x: ManifoldPoint, y: ManifoldPoint, z: ManifoldPoint) -> float:
    """Cosine-rule comparison for non-negative curvature:

        |log_x z|^2 + |log_x y|^2 - 2 <log_x y, log_x z> - |log_y z|^2,

    non-negative on non-negatively curved manifolds, identically zero in
    flat space.
    """
    log_xz = manifold.log(x, z)
    log_xy = manifold.log(x, y)
    return (
        manifold.norm_sq(x, log_xz)
        + manifold.norm_sq(x, log_xy)
        - 2.0 * manifold.inner(x, log_xy, log_xz)
        - manifold.norm_sq(y, manifold.log(y, z))
    )


# ---------------------------------------------------------------------------
# certificate weight recursion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertificateWeights:
    """Non-negative weights combining pairwise interpolation certificates
    along a level-k silver trajectory.

    The square array is indexed by iterates {0, ..., 2^k - 1} plus the
    optimum in the last slot.
    """

    level: int
    array: np.ndarray

    @property
    def size(self) -> int:
        return self.array.shape[0]

    def min_entry(self) -> float:
        return float(self.array.min())


def certificate_weights(k: int) -> CertificateWeights:
    """Build the level-k weight matrix by doubling.

    Level 1 is the closed 3x3 seed; each doubling copies the block twice
    (the second copy scaled by 1 + 2 rho), subtracts 2 rho eta_j from the
    optimum row over the second half, and applies closed-form corrections
    at the old and new final iterates.  Certificates sourced at the old
    final iterate against later iterates or the optimum, and the entire
    copied row of the new final iterate, are dropped: the flat-space exact
    combination carries them with non-negative weight, so the reduced
    combination keeps the inequality while avoiding the terms whose metric
    distortion is uncontrolled.  All entries stay >= 0.
    """
    if not 1 <= k <= 12:
        raise ValueError("weight recursion supported for 1 <= k <= 12")
    a1 = 1.0 / (2.0 * rate_factor(1))
    lam = np.array(
        [
            [0.0, RHO, 0.0],
            [1.0, 0.0, RHO - 1.0],
            [RHO - 1.0, a1, 0.0],
        ]
    )
    for level in range(1, k):
        n = 2 ** level - 1
        old = lam
        size = 2 * (n + 1) + 1
        lam = np.zeros((size, size))
        body = old[:-1, :-1]
        # first copy, unscaled
        lam[: n + 1, : n + 1] = body
        lam[: n + 1, -1] = old[:-1, -1]
        lam[-1, : n + 1] = old[-1, :-1]
        # second copy, scaled
        w = 1.0 + 2.0 * RHO
        lam[n + 1 : 2 * n + 2, n + 1 : 2 * n + 2] = w * body
        lam[n + 1 : 2 * n + 2, -1] += w * old[:-1, -1]
        lam[-1, n + 1 : 2 * n + 2] += w * old[-1, :-1]
        lam[-1, -1] = (1.0 + w) * old[-1, -1]
        # drop the old-final row against the second half and the optimum,
        # and the copied new-final row (nonzero only after level 1)
        lam[n, n:] = 0.0
        lam[2 * n + 1, :] = 0.0
        # optimum-row corrections
        for j in range(n + 1, 2 * n + 1):
            lam[-1, j] -= 2.0 * RHO * silver_step(j)
        lam[-1, n] += 1.0 + RHO ** (level - 1) - 1.0 / (2.0 * rate_factor(level))
        lam[-1, 2 * n + 1] += 1.0 / (2.0 * rate_factor(level + 1)) - w / (
            2.0 * rate_factor(level)
        )
    return CertificateWeights(level=k, array=lam)


# ---------------------------------------------------------------------------
# trajectory inequalities
# ---------------------------------------------------------------------------


class _TrajectoryData:
    """Values, gradients, and pairwise certificates along a trajectory,
    rescaled to unit smoothness (f/L), with the optimum appended as a
    stationary point (gradient hard-set to zero)."""

    def __init__(self, traj: Trajectory, objective: Objective, n: int, x_star: ManifoldPoint):
        if traj.point_stride != 1:
            raise ValueError("trajectory inequalities need densely stored points")
        if traj.n_steps < n:
            raise ValueError(f"trajectory has {traj.n_steps} steps, need {n}")
        self.manifold = objective.manifold
        L = objective.smoothness_L if objective.smoothness_L is not None else 1.0
        self.points = list(traj.points[: n + 1]) + [x_star]
        self.values = [v / L for v in traj.values[: n + 1]] + [objective.value(x_star) / L]
        self.grads = [
            self.manifold.scale(objective.grad(p), 1.0 / L) for p in traj.points[: n + 1]
        ]
        self.grads.append(self.manifold.zero_tangent(x_star))
        self.norms_sq = [
            self.manifold.norm_sq(p, g) for p, g in zip(self.points, self.grads)
        ]
        self.star = len(self.points) - 1

    def log(self, i: int, j: int):
        return self.manifold.log(self.points[i], self.points[j])

    def q(self, i: int, j: int) -> float:
        """Unit-smoothness interpolation certificate between iterates."""
        man = self.manifold
        xi, xj = self.points[i], self.points[j]
        gi, gj = self.grads[i], self.grads[j]
        if self.norms_sq[i] == 0.0 or self.norms_sq[j] == 0.0:
            cross = 0.0  # transport of the zero vector is zero
        else:
            cross = man.inner(xj, gj, man.transport(xi, xj, gi))
        return (
            2.0 * (self.values[i] - self.values[j])
            - 2.0 * man.inner(xj, gj, self.log(j, i))
            - self.norms_sq[i]
            - self.norms_sq[j]
            + 2.0 * cross
        )


def energy_inequality_sides(
    traj: Trajectory, objective: Objective, k: int, x_star: ManifoldPoint | None = None
) -> tuple[float, float]:
    """Both sides of the telescoped gradient-energy inequality at n = 2^k - 1.

    Left:  a_k^2 |G_n|^2 + (1/r_k) <G_n, log_{x_n} x*> +
           sum eta_i^2 |G_i|^2 + 2 sum eta_i <G_i, log_{x_i} x*>
    Right: |log_{x_n} x* + a_k G_n|^2 - d^2(x_0, x*),

    with everything rescaled to unit smoothness and a_k = 1/(2 r_k).  The
    inequality left >= right holds under non-negative curvature (with
    equality in flat space).
    """
    n = 2 ** k - 1
    if x_star is None:
        x_star = objective.reference_point()
        if x_star is None:
            raise ValueError("no reference point; pass a surrogate x_star")
    data = _TrajectoryData(traj, objective, n, x_star)
    man = data.manifold
    rk = rate_factor(k)
    a_k = 1.0 / (2.0 * rk)
    log_n_star = data.log(n, data.star)
    lhs = a_k * a_k * data.norms_sq[n] + (1.0 / rk) * man.inner(
        data.points[n], data.grads[n], log_n_star
    )
    for i in range(n):
        eta = silver_step(i)
        lhs += eta * eta * data.norms_sq[i]
        lhs += 2.0 * eta * man.inner(data.points[i], data.grads[i], data.log(i, data.star))
    shifted = man.add(log_n_star, man.scale(data.grads[n], a_k))
    rhs = man.norm_sq(data.points[n], shifted) - man.dist_sq(data.points[0], x_star)
    return lhs, rhs


def combination_gap(
    traj: Trajectory,
    objective: Objective,
    k: int,
    weights: CertificateWeights | None = None,
    x_star: ManifoldPoint | None = None,
) -> float:
    """Slack of the weighted-certificate inequality at n = 2^k - 1:

        [ (1/r_k)(f* - f_n) - energy ] - sum_ij w_ij Q_ij  >=  0

    under the analysis' hypotheses, everything at unit smoothness.  The
    energy term is the left side of `energy_inequality_sides`.
    """
    n = 2 ** k - 1
    if weights is None:
        weights = certificate_weights(k)
    if weights.level != k:
        raise ValueError(f"weights are level {weights.level}, trajectory check is level {k}")
    if x_star is None:
        x_star = objective.reference_point()
        if x_star is None:
            raise ValueError("no reference point; pass a surrogate x_star")
    data = _TrajectoryData(traj, objective, n, x_star)
    lhs, _ = energy_inequality_sides(traj, objective, k, x_star)
    rk = rate_factor(k)
    rhs = (data.values[data.star] - data.values[n]) / rk - lhs

    total = 0.0
    arr = weights.array
    for i in range(arr.shape[0]):
        for j in range(arr.shape[1]):
            w = arr[i, j]
            if w != 0.0:
                total += w * data.q(i, j)
    return rhs - total


# ---------------------------------------------------------------------------
# sectional curvature of the Gaussian covariance manifold
# ---------------------------------------------------------------------------

_CURVATURE_PAIRS = ("e+_fij", "eik_fij", "eij_fij", "fij_fik", "other")


def bw_sectional_curvature(
    lambdas, pair: str, i: int = 0, j: int = 1, k: int | None = None
) -> float:
    """Closed-form sectional curvature of the Bures-Wasserstein covariance
    factor on the plane spanned by two eigenbasis directions.

    `lambdas` is the ascending covariance spectrum; indices are 0-based
    positions into it.  Pair tags name the two basis elements (e_ij are
    diagonal-difference directions, f_ij symmetric off-diagonal ones, e+ the
    corner sum).  Every combination not listed is flat.
    """
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    if pair == "other":
        return 0.0
    if pair not in _CURVATURE_PAIRS:
        raise ValueError(f"unknown basis pair {pair!r}")
    d = lam.size

    def _check(idx, name):
        if not 0 <= idx < d:
            raise IndexError(f"index {name}={idx} out of range for spectrum of size {d}")

    _check(i, "i")
    _check(j, "j")
    if pair == "eij_fij":
        if i == j:
            raise ValueError("eij_fij needs i != j")
        return float(12.0 * lam[i] * lam[j] / (lam[i] + lam[j]) ** 3)
    if k is None:
        if pair in ("eik_fij", "fij_fik"):
            raise ValueError(f"{pair} needs an index k")
        k = 0
    _check(k, "k")
    if pair == "eik_fij":
        if j == k:
            raise ValueError("eik_fij needs j != k")
        if i == k or i == j:
            raise ValueError("eik_fij needs distinct basis indices")
        return float(3.0 * lam[i] * lam[j] / ((lam[i] + lam[j]) ** 2 * (lam[i] + lam[k])))
    if pair == "fij_fik":
        if j == k or i == j or i == k:
            raise ValueError("fij_fik needs distinct indices")
        return float(
            3.0 * lam[j] * lam[k] / ((lam[i] + lam[j]) * (lam[j] + lam[k]) * (lam[i] + lam[k]))
        )
    # e+_fij
    if i == j:
        raise ValueError("e+_fij needs i != j")
    if i != 0 and j != d - 1:
        raise ValueError("e+_fij is defined for i at the bottom or j at the top of the spectrum")
    return float(3.0 * lam[i] * lam[j] / ((lam[i] + lam[j]) ** 2 * (lam[0] + lam[-1])))


def curvature_table(lambdas) -> list[tuple[str, tuple[int, ...], float]]:
    """All non-flat planes for a spectrum, as (pair, indices, curvature)."""
    lam = np.asarray(lambdas, dtype=float)
    d = lam.size
    rows: list[tuple[str, tuple[int, ...], float]] = []
    for i in range(d):
        for j in range(i + 1, d):
            rows.append(("eij_fij", (i, j), bw_sectional_curvature(lam, "eij_fij", i, j)))
            if i == 0 or j == d - 1:
                rows.append(("e+_fij", (i, j), bw_sectional_curvature(lam, "e+_fij", i, j)))
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if len({i, j, k}) == 3:
                    rows.append(
                        ("eik_fij", (i, j, k), bw_sectional_curvature(lam, "eik_fij", i, j, k))
                    )
    for i in range(d):
        others = [j for j in range(d) if j != i]
        for a in range(len(others)):
            for b in range(a + 1, len(others)):
                j, k = others[a], others[b]
                rows.append(
                    ("fij_fik", (i, j, k), bw_sectional_curvature(lam, "fij_fik", i, j, k))
                )
    return rows


# ---------------------------------------------------------------------------
# entropy convexity curves on SPD matrices
# ---------------------------------------------------------------------------


def _spd_log(m: SpdMatrix) -> np.ndarray:
    dec = m.eigen
    return (dec.eigenvectors * np.log(dec.eigenvalues)) @ dec.eigenvectors.T


def _sym_exp(arr: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh((arr + arr.T) / 2.0)
    return (vecs * np.exp(vals)) @ vecs.T


def entropy_curve_values(
    m0: SpdMatrix, m1: SpdMatrix, base: SpdMatrix, geometry: str, grid: int = 257
):
    """Gaussian entropy -(1/2) log det M(t) along the anchored curve from m0
    to m1 with anchor `base`, on a uniform t-grid.

    geometry 'bures_wasserstein': M(t) = A_t M0 A_t^T with
    A_t = (1-t) I + t B(base->m1) B(m0->base); returns the analytic second
    derivative tr([A_t^{-1/2}(B B' - I) A_t^{-1/2}]^2) alongside.
    geometry 'affine_invariant': the matrix-exponential interpolation, whose
    entropy is exactly linear in t (analytic second derivative 0).
    """
    if grid < 3:
        raise ValueError("grid must have at least 3 points")
    ts = np.linspace(0.0, 1.0, grid)
    if geometry == "affine_invariant":
        inv_root = spd_inv_sqrt(base).entries
        root = spd_sqrt(base).entries
        log0 = _spd_log(SpdMatrix(inv_root @ m0.entries @ inv_root))
        log1 = _spd_log(SpdMatrix(inv_root @ m1.entries @ inv_root))
        values = np.empty(grid)
        for idx, t in enumerate(ts):
            mt = root @ _sym_exp((1.0 - t) * log0 + t * log1) @ root
            values[idx] = -0.5 * log_det(SpdMatrix(mt))
        return ts, values, np.zeros(grid)
    if geometry != "bures_wasserstein":
        raise ValueError(f"unknown geometry {geometry!r}")
    b1 = ot_map_matrix(base, m1).entries
    b0 = ot_map_matrix(m0, base).entries
    g = b1 @ b0
    eye = np.eye(g.shape[0])
    values = np.empty(grid)
    second = np.empty(grid)
    from .errors import DegenerateMatrixError

    for idx, t in enumerate(ts):
        a_t = (1.0 - t) * eye + t * g
        mt = a_t @ m0.entries @ a_t.T
        try:
            values[idx] = -0.5 * log_det(SpdMatrix(mt))
        except DegenerateMatrixError as exc:
            raise DegenerateMatrixError(
                f"anchored curve is near-singular at t={t:.6f}; the transport "
                f"composition must have positive eigenvalues on (0, 1)",
                min_eigenvalue=exc.min_eigenvalue,
            ) from exc
        if 0.0 < t < 1.0:
            # A_t is similar to an SPD matrix on the open interval; its
            # principal inverse square root exists even though A_t itself
            # is not symmetric.
            a_inv = np.linalg.inv(a_t)
            inner = a_inv @ (g - eye)
            second[idx] = float(np.sum(inner * inner.T))
        else:
            second[idx] = np.nan
    return ts, values, second


def entropy_curve_check(
    m0: SpdMatrix,
    m1: SpdMatrix,
    base: SpdMatrix,
    geometry: str,
    grid: int = 257,
    tolerance: float = 1e-7,
    match_tolerance: float = 1e-5,
) -> CertificateReport:
    """Certify convexity of the entropy along the anchored curve.

    Bures-Wasserstein: finite-difference second differences must be
    >= -tolerance and agree with the analytic trace form within
    match_tolerance.  Affine-invariant: |second differences| <= tolerance
    (exactly linear).  A mismatch beyond match_tolerance is folded into the
    gap so that pass <=> worst_gap >= -tolerance stays exact.
    """
    ts, values, analytic = entropy_curve_values(m0, m1, base, geometry, grid)
    h = ts[1] - ts[0]
    fd_second = (values[:-2] - 2.0 * values[1:-1] + values[2:]) / (h * h)
    if geometry == "affine_invariant":
        worst = float(-np.max(np.abs(fd_second)))
        witness = f"max |second difference| = {np.max(np.abs(fd_second))!r}"
    else:
        worst = float(np.min(fd_second))
        mismatch = float(np.max(np.abs(fd_second - analytic[1:-1])))
        witness = f"min second difference = {worst!r}, analytic mismatch = {mismatch!r}"
        if mismatch > match_tolerance:
            worst = min(worst, -2.0 * tolerance * (1.0 + mismatch / match_tolerance))
    return CertificateReport(
        name=f"entropy_curve/{geometry}",
        samples=len(fd_second),
        worst_gap=worst,
        tolerance=tolerance,
        passed=worst >= -tolerance,
        witness=witness,
    )


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def _witness_points(manifold, pts) -> str:
    chunks = []
    for tag, p in pts:
        chunks.append(f"{tag}: {_format_point(manifold, p)}")
    return "\n".join(chunks)


def _point_residual(manifold, p, q) -> float:
    """Coordinate-space distance between two points; unlike the geodesic
    distance this resolves residuals down to machine precision."""
    if isinstance(manifold, BuresWasserstein):
        return float(
            np.linalg.norm(p.coords.mean - q.coords.mean)
            + np.linalg.norm(p.coords.cov.entries - q.coords.cov.entries)
        )
    return float(np.linalg.norm(p.coords - q.coords))


def _format_point(manifold, p) -> str:
    if isinstance(manifold, BuresWasserstein):
        return f"mean={np.array_repr(p.coords.mean)}, cov={np.array_repr(p.coords.cov.entries)}"
    return np.array_repr(p.coords)


def _suite_manifolds(bw_dim=10, sphere_dim=100):
    return [Euclidean(8), Sphere(sphere_dim), BuresWasserstein(bw_dim)]


def _geometry_reports(seed: int, samples: int) -> list[CertificateReport]:
    reports = []
    for mi, manifold in enumerate(_suite_manifolds()):
        rng = make_rng(seed, stream=100 + mi)
        roundtrip, reversal, isometry, inverse, distcomp, threept = [], [], [], [], [], []
        worst = {}
        for _ in range(samples):
            x, y = _sample_pair(manifold, rng)
            z = sample_point(manifold, rng)
            u = sample_tangent(manifold, x, rng)
            v = sample_tangent(manifold, x, rng)

            log_xy = manifold.log(x, y)
            back = manifold.exp(x, log_xy)
            gap = -_point_residual(manifold, back, y)
            roundtrip.append(gap)
            if gap <= min(roundtrip):
                worst["roundtrip"] = _witness_points(manifold, [("x", x), ("y", y)])

            moved = manifold.transport(x, y, log_xy)
            resid = manifold.add(moved, manifold.log(y, x))
            reversal.append(-math.sqrt(max(manifold.norm_sq(y, resid), 0.0)))

            gu = manifold.transport(x, y, u)
            gv = manifold.transport(x, y, v)
            isometry.append(
                -abs(manifold.inner(x, u, v) - manifold.inner(y, gu, gv))
            )

            back_v = manifold.transport(y, x, gu)
            diff = manifold.add(back_v, manifold.scale(u, -1.0))
            inverse.append(-math.sqrt(max(manifold.norm_sq(x, diff), 0.0)))

            distcomp.append(
                -abs(manifold.dist_sq(x, y) - manifold.norm_sq(x, log_xy))
            )

            for _ in range(64):
                try:
                    threept.append(three_point_gap(manifold, x, y, z))
                    break
                except UndefinedLogError:
                    z = sample_point(manifold, rng)
        name = manifold.name.split("(")[0]
        tol = DEFAULT_TOL
        reports.append(CertificateReport.from_gaps(f"geometry/{name}/roundtrip", roundtrip, tol, worst.get("roundtrip", "")))
        reports.append(CertificateReport.from_gaps(f"geometry/{name}/log_reversal", reversal, tol))
        reports.append(CertificateReport.from_gaps(f"geometry/{name}/transport_isometry", isometry, tol))
        reports.append(CertificateReport.from_gaps(f"geometry/{name}/transport_inverse", inverse, tol))
        reports.append(CertificateReport.from_gaps(f"geometry/{name}/distance_compat", distcomp, tol))
        reports.append(CertificateReport.from_gaps(f"geometry/{name}/three_point", threept, tol))
    return reports


def _bw_quadratic_instance(seed: int, d: int = 10, kappa: float = 100.0) -> QuadraticPotentialBW:
    rng = make_rng(seed, stream=55)
    m_star = rng.uniform(0.0, 1.0, size=d)
    sigma = make_sigma_star(d, L=1.0, alpha=1.0 / kappa, seed=seed + 1)
    return QuadraticPotentialBW(m_star, sigma)


def _convexity_reports(seed: int, samples: int) -> list[CertificateReport]:
    obj = _bw_quadratic_instance(seed)
    manifold = obj.manifold
    rng = make_rng(seed, stream=200)
    anchored, cocoercive, descent, interp = [], [], [], []
    for _ in range(samples):
        x = sample_point(manifold, rng)
        y = sample_point(manifold, rng)
        z = sample_point(manifold, rng)
        anchored.append(anchored_convexity_gap(obj, manifold, x, y, z))
        cocoercive.append(cocoercivity_gap(obj, manifold, x, y))
        descent.append(descent_gap(obj, manifold, x, y))
        interp.append(interpolation_gap(obj, manifold, x, y))
    tol = DEFAULT_TOL
    return [
        CertificateReport.from_gaps("convexity/bw_quadratic/anchored", anchored, tol),
        CertificateReport.from_gaps("convexity/bw_quadratic/cocoercivity", cocoercive, tol),
        CertificateReport.from_gaps("convexity/bw_quadratic/descent", descent, tol),
        CertificateReport.from_gaps("convexity/bw_quadratic/interpolation", interp, tol),
    ]


def _smoothness_reports(seed: int, samples: int) -> list[CertificateReport]:
    from .objectives import RayleighSphere, make_rayleigh_matrix

    obj = RayleighSphere(make_rayleigh_matrix(20, "wigner", seed))
    manifold = obj.manifold
    rng = make_rng(seed, stream=300)
    gaps = []
    for _ in range(samples):
        x, y = _sample_pair(manifold, rng)
        gaps.append(descent_gap(obj, manifold, x, y))
    return [CertificateReport.from_gaps("smoothness/rayleigh/descent", gaps, DEFAULT_TOL)]


def _schedule_reports(seed: int, samples: int) -> list[CertificateReport]:
    gaps_pal, gaps_prefix, gaps_low = [], [], []
    prev = silver_schedule(1).entries
    for k in range(1, 21):
        entries = silver_schedule(k).entries if k > 1 else prev
        gaps_pal.append(-float(np.max(np.abs(entries - entries[::-1]))))
        if k > 1:
            gaps_prefix.append(-float(np.max(np.abs(entries[: len(prev)] - prev))))
            prev = entries
        gaps_low.append(float(entries.min() - math.sqrt(2.0)))
    gaps_rate = []
    for k in range(1, 13):
        a_k = 1.0 / (2.0 * rate_factor(k))
        ident = a_k - a_k * a_k - (1.0 - RHO ** (2 * k))
        gaps_rate.append(-abs(ident) / abs(1.0 - RHO ** (2 * k)) + 1e-9)
        gaps_rate.append(a_k - (1.0 + RHO ** (k - 1)))
        if k > 1:
            gaps_rate.append(rate_factor(k - 1) - rate_factor(k))
        gaps_rate.append(RHO ** (-k) - rate_factor(k))
    return [
        CertificateReport.from_gaps("schedule/palindrome", gaps_pal, 1e-13),
        CertificateReport.from_gaps("schedule/prefix", gaps_prefix, 0.0),
        CertificateReport.from_gaps("schedule/lower_bound", gaps_low, 1e-13),
        CertificateReport.from_gaps("schedule/rate_identities", gaps_rate, 0.0),
    ]


def _weights_reports(seed: int, samples: int) -> list[CertificateReport]:
    gaps = []
    for k in range(1, 9):
        gaps.append(certificate_weights(k).min_entry())
    a1 = 1.0 / (2.0 * rate_factor(1))
    seed_matrix = np.array([[0.0, RHO, 0.0], [1.0, 0.0, RHO - 1.0], [RHO - 1.0, a1, 0.0]])
    exact = -float(np.max(np.abs(certificate_weights(1).array - seed_matrix)))
    return [
        CertificateReport.from_gaps("weights/nonnegative", gaps, 1e-12),
        CertificateReport.from_gaps("weights/level1_exact", [exact], 0.0),
    ]


def _random_quadratic(rng, d: int) -> ConvexQuadratic:
    from .rng import haar_orthogonal

    lam = rng.uniform(0.05, 1.0, size=d)
    lam[rng.integers(d)] = 1.0  # pin the smoothness constant at 1
    q = haar_orthogonal(d, rng)
    center = rng.standard_normal(d)
    return ConvexQuadratic((q * lam) @ q.T, center=center)


def _energy_reports(seed: int, samples: int) -> list[CertificateReport]:
    rng = make_rng(seed, stream=400)
    gaps = []
    count = max(4, samples // 10)
    for _ in range(count):
        d = int(rng.integers(1, 6))
        obj = _random_quadratic(rng, d)
        x0 = obj.manifold.point(rng.standard_normal(d) * 2.0)
        for k in range(1, 5):
            traj = rgd_run(
                obj.manifold, obj, silver_schedule(k, smoothness_L=obj.smoothness_L), x0, 2 ** k - 1
            )
            lhs, rhs = energy_inequality_sides(traj, obj, k)
            gaps.append(lhs - rhs)
    return [CertificateReport.from_gaps("energy/euclidean_quadratic", gaps, DEFAULT_TOL)]


def _combination_reports(
    seed: int, samples: int, manifold: str = "euclidean", objective: str = "quadratic"
) -> list[CertificateReport]:
    rng = make_rng(seed, stream=500)
    gaps = []
    if manifold == "euclidean" and objective == "quadratic":
        count = max(4, samples // 10)
        for _ in range(count):
            d = int(rng.integers(1, 6))
            obj = _random_quadratic(rng, d)
            x0 = obj.manifold.point(rng.standard_normal(d) * 2.0)
            for k in range(1, 5):
                traj = rgd_run(
                    obj.manifold, obj, silver_schedule(k, smoothness_L=obj.smoothness_L),
                    x0, 2 ** k - 1,
                )
                gaps.append(combination_gap(traj, obj, k))
        return [CertificateReport.from_gaps("combination/euclidean_quadratic", gaps, 1e-7)]
    if manifold == "bures_wasserstein" and objective == "quadratic":
        count = max(2, samples // 25)
        for idx in range(count):
            # moderate spectrum: deep silver blocks crush covariance
            # directions quadratically, and the epsilon-surrogate checks
            # need the collapsed eigenvalues to stay above eigh noise
            obj = _bw_quadratic_instance(seed + idx, d=3, kappa=10.0)
            x0 = obj.manifold.point(np.zeros(3), np.eye(3))
            star = obj.surrogate_optimum(1e-6)
            for k in range(1, 5):
                traj = rgd_run(
                    obj.manifold, obj, silver_schedule(k, smoothness_L=obj.smoothness_L),
                    x0, 2 ** k - 1,
                )
                gaps.append(combination_gap(traj, obj, k, x_star=star))
        return [CertificateReport.from_gaps("combination/bw_quadratic_surrogate", gaps, 1e-4)]
    if manifold == "sphere" and objective == "rayleigh":
        from .objectives import RayleighSphere, make_rayleigh_matrix

        count = max(2, samples // 25)
        for idx in range(count):
            obj = RayleighSphere(make_rayleigh_matrix(10, "wigner", seed + idx))
            srng = make_rng(seed + idx, stream=501)
            x0 = sample_point(obj.manifold, srng)
            for k in range(1, 4):
                traj = rgd_run(
                    obj.manifold, obj, silver_schedule(k, smoothness_L=obj.smoothness_L),
                    x0, 2 ** k - 1,
                )
                try:
                    gaps.append(combination_gap(traj, obj, k))
                except UndefinedLogError:
                    continue
        return [CertificateReport.from_gaps("combination/sphere_rayleigh", gaps, 1e-7)]
    raise ValueError(f"no combination battery for manifold={manifold!r}, objective={objective!r}")


def _curvature_reports(seed: int, samples: int) -> list[CertificateReport]:
    gaps = [
        -abs(bw_sectional_curvature([1.0, 1.0], "eij_fij", 0, 1) - 1.5),
        -abs(bw_sectional_curvature([0.1] * 3, "fij_fik", 0, 1, 2) - 3.0 / 0.8),
        -abs(bw_sectional_curvature([1e-3] * 3, "fij_fik", 0, 1, 2) - 375.0),
        -abs(bw_sectional_curvature([1.0, 2.0], "other")),
    ]
    return [CertificateReport.from_gaps("curvature/closed_forms", gaps, 1e-12)]


def _entropy_reports(seed: int, samples: int) -> list[CertificateReport]:
    rng = make_rng(seed, stream=600)
    count = max(4, samples // 10)
    worst_bw = None
    worst_ai = None
    for _ in range(count):
        d = int(rng.integers(2, 7))
        mats = []
        for _ in range(3):
            g = gaussian_symmetric(d, rng, scale=0.4)
            mats.append(SpdMatrix(_sym_exp(g)))
        # BW needs a fine grid (discretization error vs the analytic form
        # scales as h^2); the exactly-linear AI curve needs a coarse one
        # (roundoff in the second difference scales as 1/h^2)
        bw = entropy_curve_check(mats[0], mats[1], mats[2], "bures_wasserstein", grid=2049)
        ai = entropy_curve_check(mats[0], mats[1], mats[2], "affine_invariant", grid=257)
        if worst_bw is None or bw.worst_gap < worst_bw.worst_gap:
            worst_bw = bw
        if worst_ai is None or ai.worst_gap < worst_ai.worst_gap:
            worst_ai = ai
    return [
        CertificateReport(
            name="entropy/bures_wasserstein",
            samples=count,
            worst_gap=worst_bw.worst_gap,
            tolerance=worst_bw.tolerance,
            passed=worst_bw.passed,
            witness=worst_bw.witness,
        ),
        CertificateReport(
            name="entropy/affine_invariant",
            samples=count,
            worst_gap=worst_ai.worst_gap,
            tolerance=worst_ai.tolerance,
            passed=worst_ai.passed,
            witness=worst_ai.witness,
        ),
    ]


_SUITES = {
    "geometry": _geometry_reports,
    "convexity": _convexity_reports,
    "smoothness": _smoothness_reports,
    "schedule": _schedule_reports,
    "weights": _weights_reports,
    "energy": _energy_reports,
    "combination": _combination_reports,
    "curvature": _curvature_reports,
    "entropy": _entropy_reports,
}


def suite_names() -> list[str]:
    return sorted(_SUITES)


def run_suite(names, seed: int = 0, samples: int = 200, **kwargs) -> list[CertificateReport]:
    """Run the named certificate batteries with seeded sampling.

    Unknown names raise ValueError.  'all' expands to every suite.  Extra
    keyword arguments are forwarded to suites that accept them (the
    combination suite takes manifold= and objective=).
    """
    reports: list[CertificateReport] = []
    expanded: list[str] = []
    for name in names:
        if name == "all":
            expanded.extend(suite_names())
        else:
            expanded.append(name)
    for name in expanded:
        if name not in _SUITES:
            raise ValueError(f"unknown certificate suite {name!r}")
        fn = _SUITES[name]
        if name == "combination" and kwargs:
            reports.extend(fn(seed, samples, **kwargs))
        else:
            reports.extend(fn(seed, samples))
    return reports
