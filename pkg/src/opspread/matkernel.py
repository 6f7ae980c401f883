"""Dense complex linear algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Nothing here
mutates its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
LOG_CLIP = 1e-12


class NotHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix contains NaN or Inf entries")
    return arr


def _square(m: np.ndarray) -> np.ndarray:
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class HermitianEigen:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def kron(*factors) -> np.ndarray:
    """Kronecker product of one or more matrices, left to right."""
    if not factors:
        raise ValueError("kron needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Trace out every tensor factor of ``m`` not listed in ``keep``.

    Args:
        m: square matrix on the space ``dims[0] x dims[1] x ...``.
        dims: local dimensions of the tensor factors.
        keep: index (or iterable of indices) of the factors to retain, in any
            order; the result keeps them in ascending order.

    Returns:
        The reduced matrix on the kept factors.
    """
    m = _square(as_matrix(m))
    dims = [int(d) for d in dims]
    if any(d < 1 for d in dims):
        raise ValueError(f"dims must be positive, got {dims}")
    total = int(np.prod(dims))
    if m.shape[0] != total:
        raise ValueError(f"matrix of size {m.shape[0]} does not match dims {dims} (product {total})")
    keep = sorted({int(keep)} if np.isscalar(keep) else {int(k) for k in keep})
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")

    n = len(dims)
    traced = [k for k in range(n) if k not in keep]
    t = m.reshape(dims + dims)
    # move kept row axes, then kept column axes, then traced pairs to the end
    order = keep + [n + k for k in keep] + traced + [n + k for k in traced]
    t = t.transpose(order)
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    traced_dim = int(np.prod([dims[k] for k in traced])) if traced else 1
    t = t.reshape(kept_dim, kept_dim, traced_dim, traced_dim)
    return np.trace(t, axis1=2, axis2=3)


def hermiticity_defect(m) -> float:
    m = as_matrix(m)
    return float(np.linalg.norm(m - m.conj().T, 2))


def herm_eig(m, tol: float = HERMITIAN_TOL) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix, ascending eigenvalues.

    The input is symmetrized as ``(m + m^dagger)/2`` before decomposition.
    Raises :class:`NotHermitianError` if the spectral norm of ``m - m^dagger``
    exceeds ``tol``.
    """
    m = _square(as_matrix(m))
    defect = hermiticity_defect(m)
    if defect > tol:
        raise NotHermitianError(f"matrix is not Hermitian: ||m - m^dag|| = {defect:.3e} > {tol:.1e}")
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return HermitianEigen(w, v)


def singular_values(m) -> np.ndarray:
    return np.linalg.svd(as_matrix(m), compute_uv=False)


def trace_norm(m) -> float:
    """Sum of singular values."""
    m = _square(as_matrix(m))
    return float(np.sum(singular_values(m)))


def operator_norm(m) -> float:
    """Largest singular value."""
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def herm_log(m, clip: float = LOG_CLIP) -> np.ndarray:
    """Matrix logarithm of a Hermitian PSD matrix restricted to its support.

    Eigenvalues at or below ``clip`` are dropped (the ``0 log 0 = 0``
    convention); eigenvalues below ``-clip`` raise ``ValueError``.
    """
    eig = herm_eig(m)
    w, v = eig.eigenvalues, eig.eigenvectors
    if w[0] < -clip:
        raise ValueError(f"matrix is not positive semidefinite: eigenvalue {w[0]:.3e}")
    support = w > clip
    logw = np.zeros_like(w)
    logw[support] = np.log(w[support])
    return (v * logw) @ v.conj().T


def herm_exp(m) -> np.ndarray:
    eig = herm_eig(m)
    v = eig.eigenvectors
    return (v * np.exp(eig.eigenvalues)) @ v.conj().T


def evolution_unitary(h, t: float) -> np.ndarray:
    """``exp(-i h t)`` for Hermitian ``h`` via its eigendecomposition."""
    eig = herm_eig(h)
    if t == 0:
        return np.eye(eig.eigenvalues.size, dtype=complex)
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.conj().T


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    return a @ b - b @ a


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return operator_norm(u.conj().T @ u - np.eye(u.shape[0])) <= tol
