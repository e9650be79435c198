"""Manifold backends: Euclidean space, the unit sphere, and the
Bures-Wasserstein space of Gaussian measures.

All three expose the same surface: inner product, exponential and
logarithmic maps, geodesic parallel transport, distance, and conversion of
ambient gradients to Riemannian gradients.  Points and tangent vectors are
immutable tagged values; everything here is pure and safe to share across
threads.

Bures-Wasserstein conventions
-----------------------------
A point is a Gaussian N(m, Sigma) stored as (mean vector, SpdMatrix); a
tangent vector is a pair (a, S) parameterizing the affine displacement map
x -> a + S(x - m).  The metric is

    <(a0, S0), (a1, S1)>_(m,Sigma) = <a0, a1> + tr(S0^T S1 Sigma),

the L2(N(m, Sigma)) inner product of the displacement fields, which reduces
to tr(S0 Sigma S1) when both matrix parts are symmetric.  Parallel transport
is implemented as the isometric composition with the reverse optimal
transport map, (a, S) -> (a, S B), where B pushes the destination covariance
onto the source covariance.  Transported matrix parts are in general not
symmetric; the metric above handles them exactly, and the transport is an
exact isometry and an exact inverse of the reverse transport.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    DegenerateCovarianceError,
    TangentBaseMismatchError,
    UndefinedLogError,
    UndefinedTransportError,
)
from .linalg import SpdMatrix, SymMatrix, spd_sqrt, spd_inv_sqrt

__all__ = [
    "ManifoldPoint",
    "TangentVector",
    "Manifold",
    "Euclidean",
    "Sphere",
    "BuresWasserstein",
    "ot_map_matrix",
    "riemannian_grad",
]

_ANTIPODAL_MARGIN = 1e-6
_SMALL_ANGLE = 1e-9


class ManifoldPoint:
    __slots__ = ("manifold", "coords")

    def __init__(self, manifold: "Manifold", coords):
        object.__setattr__(self, "manifold", manifold)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("ManifoldPoint is immutable")

    def __repr__(self) -> str:
        return f"ManifoldPoint({self.manifold.name})"


class TangentVector:
    __slots__ = ("manifold", "base", "coords")

    def __init__(self, manifold: "Manifold", base: ManifoldPoint, coords):
        object.__setattr__(self, "manifold", manifold)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("TangentVector is immutable")

    def __repr__(self) -> str:
        return f"TangentVector({self.manifold.name})"


class Manifold:
    """Common manifold interface; see subclasses for the closed forms."""

    name: str = "abstract"

    # -- construction -------------------------------------------------
    def point(self, *args) -> ManifoldPoint:
        raise NotImplementedError

    def tangent(self, x: ManifoldPoint, *args) -> TangentVector:
        raise NotImplementedError

    def zero_tangent(self, x: ManifoldPoint) -> TangentVector:
        raise NotImplementedError

    # -- metric -------------------------------------------------------
    def inner(self, x: ManifoldPoint, u: TangentVector, v: TangentVector) -> float:
        raise NotImplementedError

    def norm_sq(self, x: ManifoldPoint, v: TangentVector) -> float:
        return self.inner(x, v, v)

    # -- geodesic calculus ---------------------------------------------
    def exp(self, x: ManifoldPoint, v: TangentVector) -> ManifoldPoint:
        raise NotImplementedError

    def log(self, x: ManifoldPoint, y: ManifoldPoint) -> TangentVector:
        raise NotImplementedError

    def transport(self, x: ManifoldPoint, y: ManifoldPoint, v: TangentVector) -> TangentVector:
        raise NotImplementedError

    def dist_sq(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        raise NotImplementedError

    def dist(self, x: ManifoldPoint, y: ManifoldPoint) -> float:
        return float(np.sqrt(max(self.dist_sq(x, y), 0.0)))

    # -- gradients and scaling ------------------------------------------
    def from_ambient(self, x: ManifoldPoint, ambient) -> TangentVector:
        raise NotImplementedError

    def scale(self, v: TangentVector, c: float) -> TangentVector:
        raise NotImplementedError

    def add(self, u: TangentVector, v: TangentVector) -> TangentVector:
        raise NotImplementedError

    # -- shared checks ---------------------------------------------------
    def _check_base(self, x: ManifoldPoint, v: TangentVector) -> None:
        if v.base is x:
            return
        if not self._points_equal(v.base, x):
            raise TangentBaseMismatchError(
                f"tangent vector based at a different point of {self.name}"
            )

    def _points_equal(self, a: ManifoldPoint, b: ManifoldPoint) -> bool:
        raise NotImplementedError


class _VectorManifold(Manifold):
    """Shared plumbing for manifolds whose coordinates are flat vectors."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim

    def tangent(self, x: ManifoldPoint, vec) -> TangentVector:
        arr = np.asarray(vec, dtype=float)
        if arr.shape != (self.dim,):
            raise ValueError(f"expected shape ({self.dim},), got {arr.shape}")
        return TangentVector(self, x, arr)

    def zero_tangent(self, x: ManifoldPoint) -> TangentVector:
        return TangentVector(self, x, np.zeros(self.dim))

    def inner(self, x, u, v) -> float:
        self._check_base(x, u)
        self._check_base(x, v)
        return float(np.dot(u.coords, v.coords))

    def scale(self, v, c) -> TangentVector:
        return TangentVector(self, v.base, v.coords * c)

    def add(self, u, v) -> TangentVector:
        return TangentVector(self, u.base, u.coords + v.coords)

    def _points_equal(self, a, b) -> bool:
        return np.array_equal(a.coords, b.coords)


class Euclidean(_VectorManifold):
    """R^d with the flat metric; every map is the obvious one."""

    def __init__(self, dim: int):
        super().__init__(dim)
        self.name = f"euclidean({dim})"

    def point(self, vec) -> ManifoldPoint:
        arr = np.array(vec, dtype=float).reshape(self.dim)
        arr.setflags(write=False)
        return ManifoldPoint(self, arr)

    def exp(self, x, v) -> ManifoldPoint:
        self._check_base(x, v)
        return self.point(x.coords + v.coords)

    def log(self, x, y) -> TangentVector:
        return TangentVector(self, x, y.coords - x.coords)

    def transport(self, x, y, v) -> TangentVector:
        self._check_base(x, v)
        return TangentVector(self, y, v.coords.copy())

    def dist_sq(self, x, y) -> float:
        diff = y.coords - x.coords
        return float(np.dot(diff, diff))

    def from_ambient(self, x, ambient) -> TangentVector:
        return self.tangent(x, ambient)


class Sphere(_VectorManifold):
    """Unit sphere S^(d-1) embedded in R^d, constant curvature +1.

    exp_x(v) = cos|v| x + sin|v| v/|v|, log_x(y) = theta (y - cos(theta) x)
    / sin(theta) with theta = arccos<x, y>, and transport rotates the
    span{x, direction} plane while fixing its orthogonal complement.
    Angles within 1e-6 of pi are rejected as antipodal.
    """

    def __init__(self, dim: int):
        if dim < 2:
            raise ValueError("sphere needs ambient dimension >= 2")
        super().__init__(dim)
        self.name = f"sphere({dim})"

    def point(self, vec) -> ManifoldPoint:
        arr = np.array(vec, dtype=float).reshape(self.dim)
        norm = np.linalg.norm(arr)
        if norm == 0 or not np.isfinite(norm):
            raise ValueError("cannot normalize a zero or non-finite vector onto the sphere")
        arr = arr / norm
        arr.setflags(write=False)
        return ManifoldPoint(self, arr)

    def tangent(self, x: ManifoldPoint, vec) -> TangentVector:
        arr = np.asarray(vec, dtype=float)
        arr = arr - np.dot(x.coords, arr) * x.coords
        return TangentVector(self, x, arr)

    def exp(self, x, v) -> ManifoldPoint:
        self._check_base(x, v)
        theta = np.linalg.norm(v.coords)
        if theta < _SMALL_ANGLE:
            # second-order expansion of cos / sinc avoids 0/0
            out = (1.0 - theta * theta / 2.0) * x.coords + (1.0 - theta * theta / 6.0) * v.coords
        else:
            out = np.cos(theta) * x.coords + np.sin(theta) / theta * v.coords
        return self.point(out)

    def _angle(self, x, y) -> float:
        c = float(np.clip(np.dot(x.coords, y.coords), -1.0, 1.0))
        return float(np.arccos(c))

    def log(self, x, y) -> TangentVector:
        theta = self._angle(x, y)
        if theta > np.pi - _ANTIPODAL_MARGIN:
            raise UndefinedLogError(
                f"log undefined for (near-)antipodal sphere points (angle {theta:.8f})"
            )
        if theta < _SMALL_ANGLE:
            factor = 1.0 + theta * theta / 6.0
        else:
            factor = theta / np.sin(theta)
        return TangentVector(self, x, factor * (y.coords - np.cos(theta) * x.coords))

    def transport(self, x, y, v) -> TangentVector:
        self._check_base(x, v)
        theta = self._angle(x, y)
        if theta > np.pi - _ANTIPODAL_MARGIN:
            raise UndefinedTransportError(
                f"transport undefined for (near-)antipodal sphere points (angle {theta:.8f})"
            )
        if theta < _SMALL_ANGLE:
            return TangentVector(self, y, v.coords.copy())
        direction = self.log(x, y).coords / theta
        along = float(np.dot(direction, v.coords))
        out = v.coords + along * ((np.cos(theta) - 1.0) * direction - np.sin(theta) * x.coords)
        # remove residual radial drift at the destination
        out = out - np.dot(y.coords, out) * y.coords
        return TangentVector(self, y, out)

    def dist_sq(self, x, y) -> float:
        return self._angle(x, y) ** 2

    def dist(self, x, y) -> float:
        return self._angle(x, y)

    def from_ambient(self, x, ambient) -> TangentVector:
        return self.tangent(x, ambient)


def ot_map_matrix(sigma0: SpdMatrix, sigma1: SpdMatrix) -> SymMatrix:
    """Matrix of the optimal transport map pushing N(0, sigma0) to N(0, sigma1):

        B = sigma0^(-1/2) (sigma0^(1/2) sigma1 sigma0^(1/2))^(1/2) sigma0^(-1/2),

    the unique symmetric positive definite B with B sigma0 B = sigma1.

    The inner product sigma0^(1/2) sigma1 sigma0^(1/2) is positive
    semidefinite by construction but can span more than machine precision
    when a run has contracted covariance directions; its eigenvalues are
    clamped at zero rather than rejected, because the directions affected
    carry negligible weight in the metric.
    """
    root0 = spd_sqrt(sigma0).entries
    inv_root0 = spd_inv_sqrt(sigma0).entries
    middle = root0 @ sigma1.entries @ root0
    vals, vecs = np.linalg.eigh((middle + middle.T) / 2.0)
    mid_root = (vecs * np.sqrt(np.maximum(vals, 0.0))) @ vecs.T
    return SymMatrix(inv_root0 @ mid_root @ inv_root0)


@dataclass(frozen=True)
class _BWCoords:
    mean: np.ndarray
    cov: SpdMatrix


class BuresWasserstein(Manifold):
    """Gaussian measures on R^d under the 2-Wasserstein metric."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dimension must be positive")
        self.dim = dim
        self.name = f"bures_wasserstein({dim})"
        self._eye = np.eye(dim)
        self._eye.setflags(write=False)

    # -- construction -------------------------------------------------
    def point(self, mean, cov: Union[SpdMatrix, np.ndarray], validate: bool = True) -> ManifoldPoint:
        arr = np.array(mean, dtype=float).reshape(self.dim)
        arr.setflags(write=False)
        spd = cov if isinstance(cov, SpdMatrix) else SpdMatrix(cov)
        if validate:
            spd.require_spd()
        return ManifoldPoint(self, _BWCoords(mean=arr, cov=spd))

    def tangent(self, x: ManifoldPoint, vec, mat) -> TangentVector:
        a = np.asarray(vec, dtype=float).reshape(self.dim)
        m = np.asarray(mat, dtype=float)
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"matrix part must be {self.dim}x{self.dim}")
        return TangentVector(self, x, (a, m))

    def zero_tangent(self, x: ManifoldPoint) -> TangentVector:
        return TangentVector(self, x, (np.zeros(self.dim), np.zeros((self.dim, self.dim))))

    # -- metric -------------------------------------------------------
    def inner(self, x, u, v) -> float:
        self._check_base(x, u)
        self._check_base(x, v)
        a0, m0 = u.coords
        a1, m1 = v.coords
        sigma = x.coords.cov.entries
        return float(np.dot(a0, a1) + ((m0.T @ m1) * sigma).sum())

    # -- geodesic calculus ---------------------------------------------
    def exp(self, x, v) -> ManifoldPoint:
        self._check_base(x, v)
        a, s = v.coords
        # sums of finite entries are finite unless entries are near the
        # overflow scale, which is divergence either way
        if not (np.isfinite(a.sum()) and np.isfinite(s.sum())):
            raise ValueError("tangent vector has non-finite coordinates")
        factor = s + self._eye
        self._check_factor(factor)
        sigma = x.coords.cov.entries
        new_cov = factor @ sigma @ factor.T
        cov = SpdMatrix(SymMatrix._wrap((new_cov + new_cov.T) / 2.0))
        mean = x.coords.mean + a
        mean.setflags(write=False)
        return ManifoldPoint(self, _BWCoords(mean=mean, cov=cov))

    def _check_factor(self, factor: np.ndarray) -> None:
        # The pushed-forward covariance F Sigma F^T stays positive definite
        # iff F is nonsingular.  A step that exactly annihilates single
        # directions (step length hitting an eigenvalue resonance) leaves a
        # valid point of the closure: value, gradient, and further updates
        # of potential objectives remain well-defined there, and operations
        # that genuinely need strict positivity raise at their call site.
        # Only total annihilation, where the factor itself vanishes, kills
        # the state irrecoverably and is rejected here.  Entries bound the
        # spectral radius within a dimension factor, so the cheap entry test
        # triggers the eigenvalue diagnostics only when the factor is tiny.
        if np.abs(factor).max() > 1e-12:
            return
        if np.array_equal(factor, factor.T):
            eigs = np.linalg.eigvalsh(factor)
            small = float(eigs[np.argmin(np.abs(eigs))])
        else:
            small = float(np.linalg.svd(factor, compute_uv=False)[-1])
        raise DegenerateCovarianceError(
            f"covariance update factor vanishes; the whole covariance is "
            f"annihilated (smallest eigenvalue {small:.3e})",
            factor_min_eigenvalue=small,
        )

    def log(self, x, y) -> TangentVector:
        ot = ot_map_matrix(x.coords.cov, y.coords.cov).entries
        return TangentVector(
            self, x, (y.coords.mean - x.coords.mean, ot - self._eye)
        )

    def transport(self, x, y, v) -> TangentVector:
        self._check_base(x, v)
        a, s = v.coords
        reverse = ot_map_matrix(y.coords.cov, x.coords.cov).entries
        return TangentVector(self, y, (a.copy(), s @ reverse))

    def dist_sq(self, x, y) -> float:
        diff = y.coords.mean - x.coords.mean
        root0 = spd_sqrt(x.coords.cov).entries
        middle = SpdMatrix(root0 @ y.coords.cov.entries @ root0)
        cross = float(np.sum(np.sqrt(np.maximum(middle.eigen.eigenvalues, 0.0))))
        val = float(np.dot(diff, diff)) + x.coords.cov.trace() + y.coords.cov.trace() - 2.0 * cross
        return max(val, 0.0)

    # -- gradients and scaling ------------------------------------------
    def from_ambient(self, x, ambient) -> TangentVector:
        grad_mean, grad_cov = ambient
        g = np.asarray(grad_cov, dtype=float)
        return self.tangent(x, grad_mean, g + g.T)

    def scale(self, v, c) -> TangentVector:
        a, s = v.coords
        return TangentVector(self, v.base, (a * c, s * c))

    def add(self, u, v) -> TangentVector:
        a0, s0 = u.coords
        a1, s1 = v.coords
        return TangentVector(self, u.base, (a0 + a1, s0 + s1))

    def _points_equal(self, a, b) -> bool:
        return np.array_equal(a.coords.mean, b.coords.mean) and np.array_equal(
            a.coords.cov.entries, b.coords.cov.entries
        )


def riemannian_grad(manifold: Manifold, x: ManifoldPoint, ambient) -> TangentVector:
    """Convert an ambient gradient to the Riemannian gradient at x.

    Euclidean: identity.  Sphere: tangent projection (I - x x^T) g.
    Bures-Wasserstein: ambient is a (mean-gradient, covariance-gradient)
    pair and the tangent is (grad_m, 2 * sym(grad_Sigma)).
    """
    return manifold.from_ambient(x, ambient)
