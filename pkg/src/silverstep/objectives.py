"""Objective functionals with values, Riemannian gradients, smoothness and
strong-convexity constants, and reference optima, plus the seeded problem
generators used by the benchmark experiments.
"""

from __future__ import annotations

import numpy as np

from .linalg import EigenDecomposition, SpdMatrix, SymMatrix, log_det, spd_inverse, sym_eigen
from .manifolds import BuresWasserstein, Euclidean, ManifoldPoint, Manifold, Sphere, TangentVector
from .rng import haar_orthogonal, make_rng

__all__ = [
    "Objective",
    "QuadraticPotentialBW",
    "RayleighSphere",
    "GaussianEntropy",
    "ConvexQuadratic",
    "MeanFieldNet",
    "make_sigma_star",
    "make_rayleigh_matrix",
    "make_meanfield_dataset",
    "make_meanfield_net",
]


class Objective:
    """Interface: value(x), grad(x), constants, and an optional reference.

    `smoothness_L` is the geodesic smoothness constant (None if unknown) and
    `strong_convexity_alpha` the strong-convexity constant (0 when merely
    convex or nonconvex).  `reference_value` is the optimal value when known;
    `ref_distance_sq(x)` is the squared distance from x to the reference
    optimum, continuously extended when the optimum sits on the boundary of
    the manifold.
    """

    manifold: Manifold
    smoothness_L: float | None = None
    strong_convexity_alpha: float = 0.0

    def value(self, x: ManifoldPoint) -> float:
        raise NotImplementedError

    def grad(self, x: ManifoldPoint) -> TangentVector:
        raise NotImplementedError

    def reference_value(self) -> float | None:
        return None

    def reference_point(self) -> ManifoldPoint | None:
        return None

    def ref_distance_sq(self, x: ManifoldPoint) -> float | None:
        ref = self.reference_point()
        if ref is None:
            return None
        return self.manifold.dist_sq(x, ref)

    @property
    def kappa(self) -> float | None:
        if self.smoothness_L is None or self.strong_convexity_alpha <= 0:
            return None
        return self.smoothness_L / self.strong_convexity_alpha


class BWPotential(Objective):
    """Potential functional mu -> E_{X~mu}[V(X)] on Gaussians.

    Subclasses supply the expected gradient and expected Hessian of V under
    N(m, Sigma); the Riemannian gradient is then (E[grad V], E[hess V]) and
    a gradient step reproduces the affine mean/covariance update exactly.
    This is the extension point for potentials whose expectations need
    sampling; only the quadratic closed form ships.
    """

    manifold: BuresWasserstein

    def mean_grad(self, mean: np.ndarray, cov: SpdMatrix) -> np.ndarray:
        raise NotImplementedError

    def mean_hessian(self, mean: np.ndarray, cov: SpdMatrix) -> np.ndarray:
        raise NotImplementedError

    def grad(self, x: ManifoldPoint) -> TangentVector:
        mean, cov = x.coords.mean, x.coords.cov
        # matrix parts from mean_hessian are symmetric by contract; build
        # the tangent directly to keep gradient evaluation off the shape
        # validation path
        return TangentVector(
            self.manifold, x, (self.mean_grad(mean, cov), self.mean_hessian(mean, cov))
        )


class QuadraticPotentialBW(BWPotential):
    """Expected quadratic potential V(x) = (1/2)(x - m*)^T Sigma*^{-1} (x - m*).

    Closed form: value = (1/2)(m - m*)^T P (m - m*) + (1/2) tr(P Sigma) with
    P = Sigma*^{-1}.  Constants are L = 1/lambda_min(Sigma*) and
    alpha = 1/lambda_max(Sigma*), computed from the spectrum, never user-set.
    The infimum 0 is attained only in the degenerate limit (m*, 0), so the
    reference distance is the continuous extension |m - m*|^2 + tr(Sigma).
    """

    def __init__(self, m_star, sigma_star: SpdMatrix):
        self.manifold = BuresWasserstein(len(np.atleast_1d(m_star)))
        self.m_star = np.array(m_star, dtype=float).reshape(self.manifold.dim)
        self.sigma_star = sigma_star if isinstance(sigma_star, SpdMatrix) else SpdMatrix(sigma_star)
        self.sigma_star.require_spd()
        eig = self.sigma_star.eigen
        self.precision = spd_inverse(self.sigma_star).entries
        self.smoothness_L = 1.0 / float(eig.eigenvalues[0])
        self.strong_convexity_alpha = 1.0 / float(eig.eigenvalues[-1])

    def value(self, x: ManifoldPoint) -> float:
        diff = x.coords.mean - self.m_star
        sigma = x.coords.cov.entries
        return float(0.5 * diff @ self.precision @ diff + 0.5 * (self.precision * sigma).sum())

    def mean_grad(self, mean, cov) -> np.ndarray:
        return self.precision @ (mean - self.m_star)

    def mean_hessian(self, mean, cov) -> np.ndarray:
        return self.precision

    def reference_value(self) -> float:
        return 0.0

    def ref_distance_sq(self, x: ManifoldPoint) -> float:
        diff = x.coords.mean - self.m_star
        return float(np.dot(diff, diff) + x.coords.cov.trace())

    def surrogate_optimum(self, epsilon: float = 1e-6) -> ManifoldPoint:
        """Interior stand-in (m*, eps I) for the degenerate optimum."""
        return self.manifold.point(self.m_star, epsilon * np.eye(self.manifold.dim))


class RayleighSphere(Objective):
    """f(x) = -(1/2) x^T H x on the unit sphere; minimizing drives x to the
    top eigenvector of H.  Geodesically (lambda_max - lambda_min)-smooth,
    not geodesically convex."""

    def __init__(self, matrix: SymMatrix):
        self.matrix = matrix if isinstance(matrix, SymMatrix) else SymMatrix(matrix)
        self.manifold = Sphere(self.matrix.dim)
        eig = sym_eigen(self.matrix)
        self.lambda_min = float(eig.eigenvalues[0])
        self.lambda_max = float(eig.eigenvalues[-1])
        self._top = eig.eigenvectors[:, -1].copy()
        self.smoothness_L = self.lambda_max - self.lambda_min
        self.strong_convexity_alpha = 0.0

    def value(self, x: ManifoldPoint) -> float:
        return float(-0.5 * x.coords @ self.matrix.entries @ x.coords)

    def grad(self, x: ManifoldPoint) -> TangentVector:
        hx = self.matrix.entries @ x.coords
        return self.manifold.from_ambient(x, -hx)

    def reference_value(self) -> float:
        return -0.5 * self.lambda_max

    def reference_point(self) -> ManifoldPoint:
        return self.manifold.point(self._top)

    def ref_distance_sq(self, x: ManifoldPoint) -> float:
        # the optimum is the antipodal pair {+v, -v}; use the nearer one
        ref = self.reference_point()
        d_plus = self.manifold.dist(x, ref)
        return float(min(d_plus, np.pi - d_plus) ** 2)


class GaussianEntropy(Objective):
    """Negative log-volume of a centered Gaussian: value -(1/2) log det Sigma,
    gradient (0, -Sigma^{-1}).  Unbounded below; used by the convexity
    certificates, not as an optimization target."""

    def __init__(self, dim: int):
        self.manifold = BuresWasserstein(dim)
        self.smoothness_L = None
        self.strong_convexity_alpha = 0.0

    def value(self, x: ManifoldPoint) -> float:
        return -0.5 * log_det(x.coords.cov)

    def grad(self, x: ManifoldPoint) -> TangentVector:
        inv = spd_inverse(x.coords.cov).entries
        return self.manifold.tangent(x, np.zeros(self.manifold.dim), -inv)


class ConvexQuadratic(Objective):
    """Euclidean quadratic f(x) = (1/2)(x - c)^T A (x - c) + f0 with A SPD."""

    def __init__(self, matrix, center=None, offset: float = 0.0):
        self.matrix = np.asarray(matrix, dtype=float)
        dim = self.matrix.shape[0]
        self.manifold = Euclidean(dim)
        self.center = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
        self.offset = float(offset)
        eigs = np.linalg.eigvalsh((self.matrix + self.matrix.T) / 2.0)
        if eigs[0] <= 0:
            raise ValueError("quadratic matrix must be positive definite")
        self.smoothness_L = float(eigs[-1])
        self.strong_convexity_alpha = float(eigs[0])

    def value(self, x: ManifoldPoint) -> float:
        diff = x.coords - self.center
        return float(0.5 * diff @ self.matrix @ diff) + self.offset

    def grad(self, x: ManifoldPoint) -> TangentVector:
        return self.manifold.tangent(x, self.matrix @ (x.coords - self.center))

    def reference_value(self) -> float:
        return self.offset

    def reference_point(self) -> ManifoldPoint:
        return self.manifold.point(self.center)


class MeanFieldNet(Objective):
    """Mean squared training error of a width-m two-layer ReLU network on a
    univariate regression task.

    Parameters are a Euclidean point of dimension 3m laid out as
    (a_1..a_m, w_1..w_m, b_1..b_m); the prediction is
    (1/m) sum_i a_i relu(w_i x + b_i).  The ReLU subgradient at 0 is 0.
    """

    def __init__(self, inputs, targets, width: int, smoothness_L: float = 100.0):
        self.inputs = np.asarray(inputs, dtype=float).ravel()
        self.targets = np.asarray(targets, dtype=float).ravel()
        if self.inputs.size == 0 or self.inputs.shape != self.targets.shape:
            raise ValueError("need a non-empty dataset with matching inputs/targets")
        self.width = int(width)
        self.manifold = Euclidean(3 * self.width)
        self.smoothness_L = float(smoothness_L)
        self.strong_convexity_alpha = 0.0

    def _split(self, theta: np.ndarray):
        m = self.width
        return theta[:m], theta[m : 2 * m], theta[2 * m :]

    def predict(self, theta: np.ndarray, inputs: np.ndarray) -> np.ndarray:
        a, w, b = self._split(theta)
        pre = np.outer(inputs, w) + b[np.newaxis, :]
        return np.maximum(pre, 0.0) @ a / self.width

    def mse(self, theta: np.ndarray, inputs: np.ndarray, targets: np.ndarray) -> float:
        resid = self.predict(theta, inputs) - targets
        return float(np.mean(resid * resid))

    def value(self, x: ManifoldPoint) -> float:
        return self.mse(x.coords, self.inputs, self.targets)

    def grad(self, x: ManifoldPoint) -> TangentVector:
        a, w, b = self._split(x.coords)
        pre = np.outer(self.inputs, w) + b[np.newaxis, :]
        act = np.maximum(pre, 0.0)
        resid = act @ a / self.width - self.targets
        n = self.inputs.size
        # d mse / d pred = 2 resid / n, then backprop through a * relu(wx+b)
        sens = 2.0 * resid / n
        grad_a = act.T @ sens / self.width
        gate = (pre > 0.0).astype(float) * a[np.newaxis, :] / self.width
        grad_w = (gate * self.inputs[:, np.newaxis]).T @ sens
        grad_b = gate.T @ sens
        return self.manifold.tangent(x, np.concatenate([grad_a, grad_w, grad_b]))


# ---------------------------------------------------------------------------
# seeded problem generators
# ---------------------------------------------------------------------------


def make_sigma_star(d: int, L: float, alpha: float, seed: int) -> SpdMatrix:
    """Target covariance with eigenvalues log-spaced on [1/L, 1/alpha] and a
    Haar-random eigenbasis.

    The factorization is retained on the returned matrix so the extreme
    eigenvalues (hence L and alpha) are exact even at huge condition numbers,
    where a dense re-eigendecomposition would lose the small end.
    """
    if not 0 < alpha <= L:
        raise ValueError("need 0 < alpha <= L")
    if d < 1:
        raise ValueError("dimension must be positive")
    if d == 1:
        lam = np.array([1.0 / L])
    else:
        lam = np.geomspace(1.0 / L, 1.0 / alpha, d)
        lam[0] = 1.0 / L
        lam[-1] = 1.0 / alpha
    rng = make_rng(seed)
    q = haar_orthogonal(d, rng)
    entries = (q * lam) @ q.T
    return SpdMatrix(entries, eigen=EigenDecomposition(lam, q))


def make_rayleigh_matrix(d: int, kind: str, seed: int) -> SymMatrix:
    """Symmetric benchmark matrix for the sphere problem.

    'wigner': (A + A^T)/2 with A_ij iid N(0, 1/d), small eigenvalue gaps.
    'spread': Haar-conjugated spectrum with d/2 points log-spaced on [1, d]
    and their negatives on [-d, -1]; the gap (-1, 1) is excluded so no
    eigenvalue sits near zero.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    rng = make_rng(seed)
    if kind == "wigner":
        a = rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, d))
        return SymMatrix((a + a.T) / 2.0)
    if kind == "spread":
        if d % 2 != 0:
            raise ValueError("'spread' needs an even dimension")
        half = d // 2
        pos = np.geomspace(1.0, float(d), half)
        if half >= 2:
            pos[0], pos[-1] = 1.0, float(d)
        lam = np.concatenate([-pos[::-1], pos])
        q = haar_orthogonal(d, rng)
        return SymMatrix((q * lam) @ q.T)
    raise ValueError(f"unknown matrix kind {kind!r}")


def _teacher_targets(inputs: np.ndarray, seed: int, width: int = 30) -> np.ndarray:
    rng = make_rng(seed, stream=7)
    a = rng.standard_normal(width)
    w = rng.standard_normal(width)
    b = rng.standard_normal(width)
    pre = np.outer(inputs, w) + b[np.newaxis, :]
    return np.maximum(pre, 0.0) @ a / width


def make_meanfield_dataset(
    target: str, seed: int, n_samples: int = 200, train_fraction: float = 0.7
):
    """Univariate regression data on [-1, 1] with a 70/30 train/test split.

    target 'sine' is sin(2 pi x); 'teacher' is a fixed width-30 ReLU network
    drawn from the seed.
    """
    rng = make_rng(seed, stream=3)
    inputs = rng.uniform(-1.0, 1.0, size=n_samples)
    if target == "sine":
        targets = np.sin(2.0 * np.pi * inputs)
    elif target == "teacher":
        targets = _teacher_targets(inputs, seed)
    else:
        raise ValueError(f"unknown target {target!r}")
    n_train = int(round(train_fraction * n_samples))
    return (inputs[:n_train], targets[:n_train], inputs[n_train:], targets[n_train:])


def make_meanfield_net(
    target: str, seed: int, width: int = 100, smoothness_L: float = 100.0, n_samples: int = 200
):
    """Network objective on the training split plus a seeded initial point."""
    x_tr, y_tr, x_te, y_te = make_meanfield_dataset(target, seed, n_samples=n_samples)
    net = MeanFieldNet(x_tr, y_tr, width=width, smoothness_L=smoothness_L)
    rng = make_rng(seed, stream=4)
    theta0 = rng.standard_normal(3 * width)
    x0 = net.manifold.point(theta0)
    return net, x0, (x_te, y_te)
