"""Derivative-free search on the unitary group.

Unitaries are charted as ``U = exp(i H(theta))`` with ``H(theta)`` a real
combination of a fixed Hermitian basis: the identity followed by the
generalized Gell-Mann matrices (for a qubit: ``I, X, Y, Z``). The search is a
multi-restart coordinate pattern search with a shrinking step.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 8
    max_iters: int = 400
    init_step: float = 0.5
    shrink: float = 0.5
    tol: float = 1e-7
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.init_step <= 0:
            raise ValueError("init_step must be > 0")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


@dataclass(frozen=True)
class UnitaryParams:
    dim: int
    theta: np.ndarray

    def __post_init__(self):
        if np.shape(self.theta) != (self.dim**2,):
            raise ValueError(f"expected {self.dim**2} parameters for dim {self.dim}, got {np.shape(self.theta)}")


@lru_cache(maxsize=None)
def hermitian_basis(dim: int) -> np.ndarray:
    """Identity plus the ``dim**2 - 1`` generalized Gell-Mann matrices.

    Ordered: identity, symmetric off-diagonal, antisymmetric off-diagonal,
    diagonal. Pairwise Hilbert-Schmidt orthogonal; the Gell-Mann elements
    have ``Tr B^2 = 2``.
    """
    basis = [np.eye(dim, dtype=complex)]
    sym, anti = [], []
    for j in range(dim):
        for k in range(j + 1, dim):
            s = np.zeros((dim, dim), dtype=complex)
            s[j, k] = s[k, j] = 1.0
            sym.append(s)
            a = np.zeros((dim, dim), dtype=complex)
            a[j, k], a[k, j] = -1j, 1j
            anti.append(a)
    diag = []
    for l in range(1, dim):
        d = np.zeros(dim)
        d[:l] = 1.0
        d[l] = -l
        diag.append(np.diag(d * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    out = np.stack(basis + sym + anti + diag)
    out.setflags(write=False)
    return out


def unitary_from_params(p: UnitaryParams | np.ndarray, dim: int | None = None) -> np.ndarray:
    """``exp(i sum_k theta_k B_k)``; accepts :class:`UnitaryParams` or a raw vector plus ``dim``."""
    if isinstance(p, UnitaryParams):
        theta, dim = p.theta, p.dim
    else:
        theta = np.asarray(p, dtype=float)
        dim = int(round(np.sqrt(theta.size))) if dim is None else dim
    h = (theta @ hermitian_basis(dim).reshape(dim * dim, -1)).reshape(dim, dim)
    # Hermitian by construction, so skip the defect check of evolution_unitary
    w, v = np.linalg.eigh(h)
    return (v * np.exp(1j * w)) @ v.conj().T


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    # (restart, iteration, running best over everything evaluated so far)
    trace: list = field(default_factory=list)
    restart_values: list = field(default_factory=list)


def pattern_search(
    objective: Callable[[np.ndarray], float],
    n_params: int,
    cfg: OptimizerConfig,
    stream=(),
    ceiling: float | None = None,
) -> SearchResult:
    """Maximize ``objective`` over ``R^n_params``.

    Restart ``r`` draws its start uniformly from ``[-pi, pi]^n`` using the
    RNG stream ``(cfg.seed, *stream, r)``, so results depend only on the
    configuration and stream label. Each iteration sweeps the coordinates,
    accepting the first improving move of size ``step``; a sweep without
    improvement shrinks the step until it falls below ``cfg.tol``. The best
    point over all restarts wins, ties going to the earliest restart. If
    ``ceiling`` is given, a restart stops once it attains it.
    """
    stream = tuple(int(s) for s in np.atleast_1d(stream))
    best_x, best_val = None, -np.inf
    trace, restart_values = [], []
    for r in range(cfg.restarts):
        rng = np.random.default_rng((cfg.seed, *stream, r))
        x = rng.uniform(-np.pi, np.pi, n_params)
        fx = objective(x)
        step = cfg.init_step
        for it in range(cfg.max_iters):
            improved = False
            for k in range(n_params):
                for sign in (1.0, -1.0):
                    y = x.copy()
                    y[k] += sign * step
                    fy = objective(y)
                    if fy > fx:
                        x, fx, improved = y, fy, True
                        break
            if fx > best_val:
                best_x, best_val = x.copy(), fx
            trace.append((r, it, best_val))
            if ceiling is not None and fx >= ceiling:
                break
            if not improved:
                step *= cfg.shrink
                if step < cfg.tol:
                    break
        restart_values.append(fx)
        if fx > best_val:
            best_x, best_val = x.copy(), fx
    return SearchResult(best_x, float(best_val), trace, restart_values)
