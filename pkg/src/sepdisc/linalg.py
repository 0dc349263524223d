"""Small dense complex-matrix arithmetic.

All operators in this package are dense complex matrices of dimension at
most a few dozen, so everything below simply wraps LAPACK through numpy.
Functions accept stacked operands (leading batch axes) where noted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT, Tolerances
from .errors import BadBipartition, DimensionMismatch, NotHermitian


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; dimensions multiply."""
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(factors) -> np.ndarray:
    out = np.asarray(factors[0])
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f))
    return out


def dag(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def frob(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def maxabs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if np.asarray(a).size else 0.0


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues (real, ascending) and orthonormal eigenvector columns."""

    values: np.ndarray
    vectors: np.ndarray


def hermiticity_defect(a: np.ndarray) -> float:
    return maxabs(a - dag(a))


def hermitian_eig(a: np.ndarray, tol: Tolerances = DEFAULT) -> EigenResult:
    """Full eigendecomposition of a Hermitian matrix.

    The input is symmetrized internally; an asymmetry beyond the
    ``hermiticity`` tolerance (relative to the matrix scale) is rejected.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, maxabs(a))
    if hermiticity_defect(a) > tol.hermiticity * scale:
        raise NotHermitian(
            f"asymmetry {hermiticity_defect(a):.3e} exceeds {tol.hermiticity:.1e}*{scale:.3e}"
        )
    w, v = np.linalg.eigh((a + dag(a)) / 2.0)
    return EigenResult(values=w, vectors=v)


@dataclass(frozen=True)
class PsdResult:
    is_psd: bool
    min_eigenvalue: float


def psd_check(a: np.ndarray, tol: float | None = None, tols: Tolerances = DEFAULT) -> PsdResult:
    """PSD iff the smallest eigenvalue is above ``-tol``."""
    if tol is None:
        tol = tols.psd
    w = hermitian_eig(a, tols).values
    lo = float(w[0]) if w.size else 0.0
    return PsdResult(is_psd=lo >= -tol, min_eigenvalue=lo)


def psd_project(a: np.ndarray) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped).

    Accepts a stack ``(..., D, D)`` of Hermitian matrices.
    """
    a = np.asarray(a, dtype=complex)
    h = (a + dag(a)) / 2.0
    w, v = np.linalg.eigh(h)
    w = np.clip(w, 0.0, None)
    return np.einsum("...ij,...j,...kj->...ik", v, w, v.conj())


def min_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each matrix in a Hermitian stack."""
    h = (a + dag(a)) / 2.0
    return np.linalg.eigvalsh(h)[..., 0]


def _axis_spec(dims, parties, nbatch: int):
    k = len(dims)
    for p in parties:
        if not 0 <= p < k:
            raise BadBipartition(f"party index {p} out of range for {k} parties")
    axes = list(range(nbatch + 2 * k))
    for p in parties:
        i, j = nbatch + p, nbatch + k + p
        axes[i], axes[j] = axes[j], axes[i]
    return axes


def partial_transpose(a: np.ndarray, dims, parties) -> np.ndarray:
    """Transpose on the chosen tensor factors only; involutive.

    ``parties`` is an index or an iterable of indices into ``dims``.
    Accepts a stack ``(..., D, D)``.
    """
    if isinstance(parties, (int, np.integer)):
        parties = (int(parties),)
    parties = tuple(parties)
    a = np.asarray(a)
    d = int(np.prod(dims))
    if a.shape[-2:] != (d, d):
        raise DimensionMismatch(
            f"operator of shape {a.shape[-2:]} does not match total dimension {d}"
        )
    batch = a.shape[:-2]
    t = a.reshape(batch + tuple(dims) * 2)
    t = np.transpose(t, _axis_spec(tuple(dims), parties, len(batch)))
    return t.reshape(batch + (d, d))


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (m + dag(m)) / 2.0
