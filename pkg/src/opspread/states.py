"""Density matrices and the entropic functionals built on them.

All logarithms are natural (nats). The skew-divergence sandwich
``2(1-lam)^2/(-log lam) * T^2 <= S_lam <= T`` relies on Pinsker's inequality
with constant 2, which holds in nats only.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matkernel import (
    LOG_CLIP,
    NotHermitianError,
    as_matrix,
    herm_eig,
    hermiticity_defect,
    trace_norm,
)

STATE_TOL = 1e-10
PROB_TOL = 1e-12


class StateError(ValueError):
    """Base class for rejected density matrices."""


class HermiticityError(StateError):
    pass


class PositivityError(StateError):
    pass


class TraceError(StateError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A certified density matrix; build with :func:`validate_state`."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def validate_state(
    m,
    herm_tol: float = STATE_TOL,
    psd_tol: float = STATE_TOL,
    trace_tol: float = STATE_TOL,
) -> DensityMatrix:
    """Certify ``m`` as a density matrix and return its symmetrized form.

    Raises:
        HermiticityError: ``||m - m^dag||`` exceeds ``herm_tol``.
        PositivityError: smallest eigenvalue below ``-psd_tol``.
        TraceError: ``|Tr m - 1|`` exceeds ``trace_tol``.
    """
    if isinstance(m, DensityMatrix):
        return m
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise StateError(f"density matrix must be square, got {m.shape}")
    defect = hermiticity_defect(m)
    if defect > herm_tol:
        raise HermiticityError(f"not Hermitian: ||m - m^dag|| = {defect:.3e}")
    sym = (m + m.conj().T) / 2
    w = np.linalg.eigvalsh(sym)
    if w[0] < -psd_tol:
        raise PositivityError(f"not positive semidefinite: min eigenvalue {w[0]:.3e}")
    tr = float(np.trace(sym).real)
    if abs(tr - 1.0) > trace_tol:
        raise TraceError(f"trace {tr:.12g} differs from 1")
    sym.setflags(write=False)
    return DensityMatrix(sym)


def validate_probs(p, tol: float = PROB_TOL) -> np.ndarray:
    """Check a probability vector and return it as a float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("probability vector must be a nonempty 1-D array")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError(f"probabilities must lie in [0, 1], got {p}")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {p.sum():.15g}, not 1")
    return p


def pure_state(psi) -> DensityMatrix:
    psi = np.asarray(psi, dtype=complex).ravel()
    psi = psi / np.linalg.norm(psi)
    return validate_state(np.outer(psi, psi.conj()))


def basis_state(dim: int, index: int = 0) -> DensityMatrix:
    psi = np.zeros(dim, dtype=complex)
    psi[index] = 1.0
    return pure_state(psi)


def maximally_mixed(dim: int) -> DensityMatrix:
    return validate_state(np.eye(dim, dtype=complex) / dim)


def random_state(dim: int, rng: np.random.Generator, rank: int | None = None) -> DensityMatrix:
    """Random density matrix from a ``dim x rank`` Ginibre matrix (Hilbert-Schmidt measure at full rank)."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return validate_state(rho / np.trace(rho).real)


def random_pure_state(dim: int, rng: np.random.Generator) -> DensityMatrix:
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return pure_state(psi)


def _spectrum(rho) -> np.ndarray:
    return herm_eig(np.asarray(rho)).eigenvalues


def von_neumann_entropy(rho, clip: float = LOG_CLIP) -> float:
    """``-Tr rho log rho`` in nats."""
    w = _spectrum(rho)
    w = w[w > clip]
    return max(float(-np.sum(w * np.log(w))), 0.0)


def relative_entropy(eta, mu, clip: float = LOG_CLIP) -> float:
    """Quantum relative entropy ``Tr eta (log eta - log mu)`` in nats.

    Returns ``inf`` when the support of ``eta`` is not contained in the
    support of ``mu``, detected as weight above ``clip`` of ``eta`` on the
    eigenvectors of ``mu`` with eigenvalue at or below ``clip``.
    """
    eta_m, mu_m = np.asarray(eta), np.asarray(mu)
    if eta_m.shape != mu_m.shape:
        raise ValueError(f"dimension mismatch: {eta_m.shape} vs {mu_m.shape}")
    mu_eig = herm_eig(mu_m)
    # diagonal of eta in the eigenbasis of mu
    v = mu_eig.eigenvectors
    weights = np.real(np.einsum("ki,kl,li->i", v.conj(), eta_m, v))
    support = mu_eig.eigenvalues > clip
    if np.sum(weights[~support]) > clip:
        return float("inf")
    cross = float(np.sum(weights[support] * np.log(mu_eig.eigenvalues[support])))
    value = -von_neumann_entropy(eta_m, clip) - cross
    return max(value, 0.0)


def trace_distance(eta, mu) -> float:
    """``||eta - mu||_1 / 2``."""
    eta_m, mu_m = np.asarray(eta), np.asarray(mu)
    if eta_m.shape != mu_m.shape:
        raise ValueError(f"dimension mismatch: {eta_m.shape} vs {mu_m.shape}")
    return 0.5 * trace_norm(eta_m - mu_m)


def skew_divergence(eta, mu, lam: float) -> float:
    """Quantum skew divergence ``S(eta || lam eta + (1-lam) mu) / (-log lam)``.

    Always finite, since the mixture's support contains that of ``eta``.
    """
    if not 0.0 < lam < 1.0:
        raise ValueError(f"skew parameter must lie strictly in (0, 1), got {lam}")
    eta_m, mu_m = np.asarray(eta), np.asarray(mu)
    if eta_m.shape != mu_m.shape:
        raise ValueError(f"dimension mismatch: {eta_m.shape} vs {mu_m.shape}")
    mixture = lam * eta_m + (1.0 - lam) * mu_m
    return relative_entropy(eta_m, mixture) / -np.log(lam)


def skew_sandwich(eta, mu, lam: float) -> tuple[float, float]:
    """Lower and upper bounds on :func:`skew_divergence` from the trace distance."""
    t = trace_distance(eta, mu)
    return 2.0 * (1.0 - lam) ** 2 / -np.log(lam) * t * t, t


def shannon_entropy(p) -> float:
    """``-sum p log p`` in nats with ``0 log 0 = 0``."""
    p = validate_probs(p)
    nz = p[p > 0]
    return max(float(-np.sum(nz * np.log(nz))), 0.0)


__all__ = [
    "DensityMatrix",
    "HermiticityError",
    "NotHermitianError",
    "PositivityError",
    "StateError",
    "TraceError",
    "basis_state",
    "maximally_mixed",
    "pure_state",
    "random_pure_state",
    "random_state",
    "relative_entropy",
    "shannon_entropy",
    "skew_divergence",
    "skew_sandwich",
    "trace_distance",
    "validate_probs",
    "validate_state",
    "von_neumann_entropy",
]
