"""Seeded random number generation.

Every random quantity in the library is a deterministic function of a single
integer seed.  Streams are built on the Philox counter-based bit generator so
that independent sub-streams can be derived from (seed, index) pairs without
correlation, and reruns reproduce byte-identical output on a fixed platform.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Generator for the given seed; `stream` selects an independent
    sub-stream (suites, arms, ... each get their own)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def haar_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Orthogonal matrix drawn from the Haar measure on O(dim).

    QR of a Gaussian matrix with the sign of R's diagonal folded into Q,
    which removes the sign ambiguity that would otherwise bias the draw.
    """
    gauss = rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(gauss)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs[np.newaxis, :]


def gaussian_symmetric(dim: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Symmetric matrix with Gaussian entries, symmetrized as (A + A^T)/2."""
    a = rng.standard_normal((dim, dim)) * scale
    return (a + a.T) / 2.0
