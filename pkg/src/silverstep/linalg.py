"""Dense symmetric / SPD matrix kernels.

Covariance matrices flow through every manifold and objective in this
library, so the primitives here are deliberately small: eigendecomposition,
principal (inverse) square roots, and log-determinant, all with an explicit
eigenvalue floor so that covariances contracting toward zero are detected
before a log or inverse blows up.

All constructors symmetrize their input as (M + M^T)/2, which suppresses
drift from repeated sandwich products.  All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMatrixError, NumericalFailure

__all__ = [
    "SymMatrix",
    "SpdMatrix",
    "EigenDecomposition",
    "sym_eigen",
    "spd_sqrt",
    "spd_inv_sqrt",
    "log_det",
    "spd_floor",
]


def _as_symmetric(entries) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    sym = (arr + arr.T) / 2.0
    sym.setflags(write=False)
    return sym


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in ascending order, eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return (q * self.eigenvalues) @ q.T


class SymMatrix:
    """Real symmetric matrix; input is symmetrized on construction."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        object.__setattr__(self, "entries", _as_symmetric(entries))

    @classmethod
    def _wrap(cls, entries: np.ndarray) -> "SymMatrix":
        # caller guarantees a finite, exactly symmetric array (hot paths)
        out = object.__new__(cls)
        object.__setattr__(out, "entries", entries)
        return out

    def __setattr__(self, name, value):
        raise AttributeError("SymMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __repr__(self) -> str:
        return f"SymMatrix(dim={self.dim})"


class SpdMatrix:
    """Symmetric positive definite matrix with a lazy eigenvalue floor.

    The eigendecomposition is computed at most once and cached; operations
    that genuinely require positive definiteness (square roots, inverses,
    log-determinant) check the smallest eigenvalue against `spd_floor` at
    that point.  Set `validate=True` to check eagerly on construction.
    """

    __slots__ = ("base", "_eigen", "_min_eig")

    def __init__(self, entries, validate: bool = False, eigen: EigenDecomposition | None = None):
        base = entries if isinstance(entries, SymMatrix) else SymMatrix(entries)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "_eigen", eigen)
        object.__setattr__(self, "_min_eig", None if eigen is None else float(eigen.eigenvalues[0]))
        if validate:
            self.require_spd()

    def __setattr__(self, name, value):
        raise AttributeError("SpdMatrix is immutable")

    @property
    def entries(self) -> np.ndarray:
        return self.base.entries

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def eigen(self) -> EigenDecomposition:
        if self._eigen is None:
            dec = sym_eigen(self.base)
            object.__setattr__(self, "_eigen", dec)
            object.__setattr__(self, "_min_eig", float(dec.eigenvalues[0]))
        return self._eigen

    @property
    def min_eigenvalue(self) -> float:
        if self._min_eig is None:
            self.eigen
        return self._min_eig

    def floor(self) -> float:
        return spd_floor(self.entries)

    def require_spd(self) -> "SpdMatrix":
        if self.min_eigenvalue <= self.floor():
            raise DegenerateMatrixError(
                f"matrix is not positive definite above the floor "
                f"{self.floor():.3e}: smallest eigenvalue {self.min_eigenvalue:.3e}",
                min_eigenvalue=self.min_eigenvalue,
            )
        return self

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def __repr__(self) -> str:
        return f"SpdMatrix(dim={self.dim})"


def spd_floor(entries: np.ndarray) -> float:
    """Relative eigenvalue floor: 1e-12 * (1 + trace/dim)."""
    arr = np.asarray(entries)
    return 1e-12 * (1.0 + float(np.trace(arr)) / arr.shape[0])


def sym_eigen(m: SymMatrix | SpdMatrix | np.ndarray) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix, eigenvalues ascending.

    Backed by the deterministic Householder-tridiagonalization + QR LAPACK
    path, so repeated runs reproduce bit-stably on a fixed platform.
    """
    if isinstance(m, SpdMatrix):
        return m.eigen
    arr = m.entries if isinstance(m, SymMatrix) else _as_symmetric(m)
    try:
        vals, vecs = np.linalg.eigh(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(
            f"symmetric eigendecomposition did not converge "
            f"(frobenius norm {np.linalg.norm(arr):.6e})"
        ) from exc
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return EigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def _checked_eigen(m: SpdMatrix) -> EigenDecomposition:
    # Kernels tolerate well-conditioned matrices of any scale (covariances
    # legitimately contract toward zero along a run), so the degeneracy
    # test here is relative to the matrix's own scale rather than the
    # construction-time floor of `require_spd`.
    dec = m.eigen
    smallest = float(dec.eigenvalues[0])
    scale_floor = 1e-12 * max(float(np.trace(m.entries)), 0.0) / m.dim
    if smallest <= scale_floor:
        raise DegenerateMatrixError(
            f"matrix has eigenvalue {smallest:.3e} at or below its "
            f"scale-relative floor {scale_floor:.3e}",
            min_eigenvalue=smallest,
        )
    return dec


def spd_sqrt(m: SpdMatrix) -> SpdMatrix:
    """Principal square root R with R @ R = m."""
    dec = _checked_eigen(m)
    roots = np.sqrt(dec.eigenvalues)
    q = dec.eigenvectors
    arr = (q * roots) @ q.T
    return SpdMatrix(arr, eigen=EigenDecomposition(roots, q))


def spd_inv_sqrt(m: SpdMatrix) -> SpdMatrix:
    """Principal inverse square root R with R @ m @ R = identity."""
    dec = _checked_eigen(m)
    inv_roots = 1.0 / np.sqrt(dec.eigenvalues)
    q = dec.eigenvectors
    arr = (q * inv_roots) @ q.T
    return SpdMatrix(arr, eigen=EigenDecomposition(inv_roots[::-1].copy(), q[:, ::-1].copy()))


def spd_inverse(m: SpdMatrix) -> SpdMatrix:
    """Inverse through the eigendecomposition (stable for ill-conditioned m)."""
    dec = _checked_eigen(m)
    inv_vals = 1.0 / dec.eigenvalues
    q = dec.eigenvectors
    arr = (q * inv_vals) @ q.T
    return SpdMatrix(arr, eigen=EigenDecomposition(inv_vals[::-1].copy(), q[:, ::-1].copy()))


def log_det(m: SpdMatrix) -> float:
    """Sum of log eigenvalues."""
    dec = _checked_eigen(m)
    return float(np.sum(np.log(dec.eigenvalues)))
