"""Operator spreading: commutator norms, the unit-ball supremum, spin chains
and light cones."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import pauli
from .channels import KrausChannel, adjoint_apply, from_kraus
from .matkernel import (
    as_matrix,
    evolution_unitary,
    is_unitary,
    kron,
    operator_norm,
)
from .search import OptimizerConfig, pattern_search, unitary_from_params

MAX_SITES = 10

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def commutator_norm(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError(f"commutator needs equal square shapes, got {a.shape} and {b.shape}")
    return operator_norm(a @ b - b @ a)


@dataclass
class SupEstimate:
    estimate: float
    witness: np.ndarray
    restart_values: list


def sup_commutator(
    ch: KrausChannel,
    u_a,
    d_a: int,
    d_b: int,
    opt: OptimizerConfig = OptimizerConfig(),
    stream=(),
) -> SupEstimate:
    """Best found ``||[u_A (x) I, tau^dag(I (x) O_B)]||`` over unitary ``O_B``.

    The objective is a norm of a linear image of ``O_B``, so its maximum over
    the unit operator-norm ball sits at an extreme point, i.e. a unitary.
    The returned estimate is a lower bound on the true supremum, clipped to
    the ceiling ``2 ||u_A|| = 2``.
    """
    u_a = as_matrix(u_a)
    if u_a.shape != (d_a, d_a) or not is_unitary(u_a):
        raise ValueError("u_A must be a unitary on subsystem A")
    if ch.dim != d_a * d_b:
        raise ValueError(f"channel dimension {ch.dim} does not match {d_a} x {d_b}")
    big_u = np.kron(u_a, np.eye(d_b))
    # the commutator is linear in O_B: precompute it on matrix units
    units = []
    for j in range(d_b):
        for k in range(d_b):
            e = np.zeros((d_b, d_b), dtype=complex)
            e[j, k] = 1.0
            h = adjoint_apply(ch, np.kron(np.eye(d_a), e))
            units.append(big_u @ h - h @ big_u)
    if max(operator_norm(c) for c in units) == 0.0:
        return SupEstimate(0.0, np.eye(d_b, dtype=complex), [0.0])
    n = ch.dim
    flat = np.stack(units).reshape(d_b * d_b, n * n)

    def objective(theta):
        o_b = unitary_from_params(theta, d_b)
        return float(np.linalg.svd((o_b.ravel() @ flat).reshape(n, n), compute_uv=False)[0])

    res = pattern_search(objective, d_b * d_b, opt, stream=stream, ceiling=2.0)
    witness = unitary_from_params(res.x, d_b)
    return SupEstimate(min(res.value, 2.0), witness, res.restart_values)


def eps_lr(
    ch: KrausChannel,
    unitaries,
    d_a: int,
    d_b: int,
    opt: OptimizerConfig = OptimizerConfig(),
    stream=(),
) -> float:
    """Largest :func:`sup_commutator` estimate over the encoding unitaries.

    ``unitaries`` may be an ensemble (anything with a ``unitaries``
    attribute) or a plain sequence of matrices.
    """
    unitaries = getattr(unitaries, "unitaries", unitaries)
    return max(
        sup_commutator(ch, u, d_a, d_b, opt, stream=(*stream, i)).estimate
        for i, u in enumerate(unitaries)
    )


@dataclass(frozen=True)
class SpinChainModel:
    """Transverse-field Ising chain ``H = -J sum Z_i Z_{i+1} - g sum X_i``."""

    n_sites: int
    J: float = 1.0
    g: float = 1.0
    boundary: str = "open"
    max_sites: int = MAX_SITES

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("a spin chain needs at least 2 sites")
        if self.n_sites > self.max_sites:
            raise ValueError(f"n_sites={self.n_sites} exceeds the dense-storage cap {self.max_sites}")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"boundary must be 'open' or 'periodic', got {self.boundary!r}")

    def bonds(self) -> list[tuple[int, int]]:
        bonds = [(i, i + 1) for i in range(self.n_sites - 1)]
        if self.boundary == "periodic" and self.n_sites > 2:
            bonds.append((self.n_sites - 1, 0))
        return bonds


def site_operator(op, site: int, n_sites: int) -> np.ndarray:
    return kron(*[op if k == site else PAULI["I"] for k in range(n_sites)])


def build_hamiltonian(m: SpinChainModel) -> np.ndarray:
    n = m.n_sites
    z = [site_operator(PAULI["Z"], i, n) for i in range(n)]
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i, j in m.bonds():
        h -= m.J * z[i] @ z[j]
    for i in range(n):
        h -= m.g * site_operator(PAULI["X"], i, n)
    return h


def evolve_operator(h, o, t: float) -> np.ndarray:
    """Heisenberg picture ``e^{iht} o e^{-iht}``."""
    u = evolution_unitary(h, t)
    return u.conj().T @ as_matrix(o) @ u


@dataclass
class LightconeGrid:
    times: np.ndarray
    distances: np.ndarray
    values: np.ndarray  # values[d_index, t_index]

    def rows(self):
        for k, t in enumerate(self.times):
            for j, d in enumerate(self.distances):
                yield float(t), int(d), float(self.values[j, k])


@lru_cache(maxsize=8)
def _pauli_generator(m: SpinChainModel):
    n = m.n_sites
    terms = [(-m.J, *pauli.string_masks(n, {i: "Z", j: "Z"})) for i, j in m.bonds()]
    terms += [(-m.g, *pauli.string_masks(n, {i: "X"})) for i in range(n)]
    return pauli.generator(n, terms)


def lightcone_scan(m: SpinChainModel, o_a: str = "Z", o_b: str = "Z", times=(0.0,)) -> LightconeGrid:
    """``||[O_A(t), O_B at site 1+d]||`` for ``d = 1 .. n-1``.

    ``o_a`` (on the first site) and ``o_b`` are Pauli labels. The Heisenberg
    operator is propagated in the Pauli-string basis; the commutator with a
    single-site Pauli is twice the norm of the anticommuting sector, which is
    assembled without touching the large commuting part.
    """
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be ascending")
    n = m.n_sites
    lmat = _pauli_generator(m)
    c = np.zeros(4**n)
    x, z = pauli.string_masks(n, {0: o_a})
    c[(x << n) | z] = 1.0
    masks = [pauli.anticommuting_mask(n, d, o_b) for d in range(1, n)]
    values = np.zeros((n - 1, times.size))
    t_prev = 0.0
    for k, t in enumerate(times):
        c = pauli.propagate(lmat, c, t - t_prev)
        t_prev = t
        for j, mask in enumerate(masks):
            if not np.any(c[mask]):
                continue
            sector = np.where(mask, c, 0.0)
            values[j, k] = min(2.0 * operator_norm(pauli.to_dense(n, sector)), 2.0)
    return LightconeGrid(times, np.arange(1, n), values)


def chain_channel(m: SpinChainModel, t: float, site_b: int, h=None, u=None) -> KrausChannel:
    """Bipartite channel from site 0 (``A``) and ``site_b`` (``B``) to themselves.

    The remaining sites start in ``|0...0>``, evolve jointly under
    ``exp(-iHt)`` and are traced out. Pass ``u`` to reuse a propagator.
    """
    n = m.n_sites
    if not 1 <= site_b < n:
        raise ValueError(f"site_b must lie in 1..{n - 1}")
    if u is None:
        u = evolution_unitary(build_hamiltonian(m) if h is None else h, t)
    env = [s for s in range(n) if s not in (0, site_b)]
    order = [0, site_b] + env
    tens = u.reshape([2] * (2 * n)).transpose(order + [n + s for s in order])
    de = 2 ** len(env)
    tens = tens.reshape(4, de, 4, de)
    # K_e = (I_AB (x) <e|) U (I_AB (x) |0>)
    ops = [tens[:, e, :, 0] for e in range(de)]
    return from_kraus(ops, (2, 2))


__all__ = [
    "LightconeGrid",
    "PAULI",
    "SpinChainModel",
    "SupEstimate",
    "build_hamiltonian",
    "chain_channel",
    "commutator_norm",
    "eps_lr",
    "evolve_operator",
    "lightcone_scan",
    "site_operator",
    "sup_commutator",
]
