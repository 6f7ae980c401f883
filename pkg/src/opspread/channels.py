"""CPTP maps in Kraus form.

Convention for the Choi operator: ``J = sum_ij tau(|i><j|) (x) |i><j|``,
i.e. output factor first, input factor second. With Kraus operators this is
``J = sum_a |K_a>><<K_a|`` where ``|K>>`` is the row-major vectorization.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .matkernel import as_matrix, is_unitary, operator_norm
from .states import DensityMatrix, validate_state

COMPLETENESS_TOL = 1e-9
PRODUCT_TOL = 1e-8


class ChannelError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """A validated CPTP map on a ``dim``-dimensional system.

    ``subsystem_dims`` optionally records a bipartition ``(d_A, d_B)``.
    """

    kraus_ops: tuple
    subsystem_dims: tuple | None = None
    completeness_defect: float = field(default=0.0, compare=False)

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]

    def __len__(self) -> int:
        return len(self.kraus_ops)


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Choi operator with index grouping ``(out, in)``; ``dims`` lists the
    subsystem dimensions of one side (input and output agree)."""

    matrix: np.ndarray
    dims: tuple


def from_kraus(ops: Sequence, subsystem_dims=None, tol: float = COMPLETENESS_TOL) -> KrausChannel:
    """Validate a Kraus list and wrap it as a channel.

    Raises ``ChannelError`` when the list is empty, shapes disagree, or
    ``||sum K^dag K - I||`` exceeds ``tol`` (the deviation is reported).
    """
    ops = [as_matrix(k) for k in ops]
    if not ops:
        raise ChannelError("a channel needs at least one Kraus operator")
    dim = ops[0].shape[0]
    for k in ops:
        if k.shape != (dim, dim):
            raise ChannelError(f"Kraus operators must all be {dim}x{dim}, got {k.shape}")
    if subsystem_dims is not None:
        subsystem_dims = tuple(int(d) for d in subsystem_dims)
        if len(subsystem_dims) != 2 or subsystem_dims[0] * subsystem_dims[1] != dim:
            raise ChannelError(f"subsystem dims {subsystem_dims} do not factor dimension {dim}")
    stacked = np.stack(ops)
    gram = np.einsum("aji,ajk->ik", stacked.conj(), stacked)
    defect = operator_norm(gram - np.eye(dim))
    if defect > tol:
        raise ChannelError(f"completeness violated: ||sum K^dag K - I|| = {defect:.3e}")
    for k in ops:
        k.setflags(write=False)
    return KrausChannel(tuple(ops), subsystem_dims, defect)


def unitary_channel(u, subsystem_dims=None) -> KrausChannel:
    u = as_matrix(u)
    if not is_unitary(u):
        raise ChannelError("unitary_channel requires a unitary matrix")
    return from_kraus([u], subsystem_dims)


def identity_channel(dim: int, subsystem_dims=None) -> KrausChannel:
    return from_kraus([np.eye(dim)], subsystem_dims)


def product_channel(tau_a: KrausChannel, tau_b: KrausChannel) -> KrausChannel:
    """``tau_a (x) tau_b`` with Kraus set ``{K_a (x) K_b}``."""
    ops = [np.kron(ka, kb) for ka in tau_a.kraus_ops for kb in tau_b.kraus_ops]
    return from_kraus(ops, (tau_a.dim, tau_b.dim))


def _kraus_stack(ch: KrausChannel) -> np.ndarray:
    return np.stack(ch.kraus_ops)


def apply_raw(ch: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """``sum K rho K^dag`` without revalidating the output."""
    k = _kraus_stack(ch)
    return np.einsum("aij,jk,alk->il", k, rho, k.conj(), optimize=True)


def apply(ch: KrausChannel, rho) -> DensityMatrix:
    rho = np.asarray(rho)
    if rho.shape != (ch.dim, ch.dim):
        raise ChannelError(f"state of shape {rho.shape} does not match channel dimension {ch.dim}")
    return validate_state(apply_raw(ch, rho))


def adjoint_apply(ch: KrausChannel, o) -> np.ndarray:
    """Heisenberg-picture action ``sum K^dag O K``."""
    o = as_matrix(o)
    if o.shape != (ch.dim, ch.dim):
        raise ChannelError(f"operator of shape {o.shape} does not match channel dimension {ch.dim}")
    k = _kraus_stack(ch)
    return np.einsum("aji,jk,akl->il", k.conj(), o, k, optimize=True)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with the phases of R's diagonal absorbed."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_channel(dim: int, env_dim: int, seed, subsystem_dims=None) -> KrausChannel:
    """Random channel from a Haar isometry ``C^dim -> C^dim (x) C^env_dim``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts; equal
    seeds give bitwise-identical Kraus lists.
    """
    if dim < 1 or env_dim < 1:
        raise ValueError("dimensions must be positive")
    rng = np.random.default_rng(seed)
    v = haar_unitary(dim * env_dim, rng)[:, :dim]
    # rows of v are indexed (system, environment)
    ops = v.reshape(dim, env_dim, dim).transpose(1, 0, 2)
    return from_kraus(list(ops), subsystem_dims)


def choi_matrix(ch: KrausChannel) -> ChoiMatrix:
    vecs = _kraus_stack(ch).reshape(len(ch), -1)
    j = vecs.T @ vecs.conj()
    dims = ch.subsystem_dims if ch.subsystem_dims is not None else (ch.dim,)
    return ChoiMatrix(j, dims)


def reshuffle(choi: ChoiMatrix) -> np.ndarray:
    """Regroup a bipartite Choi operator as ``(A-out, A-in) : (B-out, B-in)``.

    Row index of the result runs over ``(oA, iA, oA', iA')`` and column index
    over ``(oB, iB, oB', iB')``, so a product map ``tau_A (x) tau_B`` becomes
    the rank-one matrix ``vec(J_A) vec(J_B)^T``.
    """
    if len(choi.dims) != 2:
        raise ChannelError("reshuffling needs a bipartite channel")
    da, db = choi.dims
    # axes: oA oB iA iB | oA' oB' iA' iB'
    t = choi.matrix.reshape(da, db, da, db, da, db, da, db)
    t = t.transpose(0, 2, 4, 6, 1, 3, 5, 7)
    return t.reshape(da**4, db**4)


@dataclass(frozen=True)
class ProductCertificate:
    is_product: bool
    schmidt_values: np.ndarray

    def __bool__(self) -> bool:
        return self.is_product


def is_product(ch: KrausChannel, tol: float = PRODUCT_TOL) -> ProductCertificate:
    """Decide whether ``ch`` factorizes as ``tau_A (x) tau_B``.

    The decision is operator-Schmidt rank one of the reshuffled Choi operator:
    exactly one singular value above ``tol * sigma_max``. The certificate
    carries the full singular spectrum.
    """
    if ch.subsystem_dims is None:
        raise ChannelError("is_product needs subsystem_dims")
    s = np.linalg.svd(reshuffle(choi_matrix(ch)), compute_uv=False)
    rank = int(np.sum(s > tol * s[0]))
    return ProductCertificate(rank == 1, s)


def dump_channel(ch: KrausChannel) -> str:
    """Serialize to a JSON document; floats round-trip exactly."""
    doc = {
        "dim": ch.dim,
        "subsystem_dims": list(ch.subsystem_dims) if ch.subsystem_dims else None,
        "kraus": [
            [[[float(z.real), float(z.imag)] for z in row] for row in k]
            for k in ch.kraus_ops
        ],
    }
    return json.dumps(doc, indent=1)


def load_channel(text: str) -> KrausChannel:
    doc = json.loads(text)
    ops = [np.array([[complex(re, im) for re, im in row] for row in k]) for k in doc["kraus"]]
    ch = from_kraus(ops, doc.get("subsystem_dims"))
    if ch.dim != doc["dim"]:
        raise ChannelError(f"declared dim {doc['dim']} does not match Kraus shape {ch.dim}")
    return ch


# fixed two-qubit gates, qubit A is the left tensor factor
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def swap_channel() -> KrausChannel:
    return unitary_channel(SWAP, (2, 2))


def cnot_channel() -> KrausChannel:
    return unitary_channel(CNOT, (2, 2))


def heisenberg_weyl(dim: int) -> list[np.ndarray]:
    """The ``dim**2`` clock-and-shift unitaries ``X^a Z^b``."""
    omega = np.exp(2j * np.pi / dim)
    shift = np.roll(np.eye(dim), 1, axis=0)
    clock = np.diag(omega ** np.arange(dim))
    return [
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(dim)
        for b in range(dim)
    ]


def depolarizing_channel(dim: int) -> KrausChannel:
    """Completely depolarizing channel, ``rho -> I/dim``."""
    return from_kraus([w / dim for w in heisenberg_weyl(dim)])


__all__ = [
    "CNOT",
    "ChannelError",
    "ChoiMatrix",
    "KrausChannel",
    "ProductCertificate",
    "SWAP",
    "adjoint_apply",
    "apply",
    "apply_raw",
    "choi_matrix",
    "cnot_channel",
    "depolarizing_channel",
    "dump_channel",
    "from_kraus",
    "haar_unitary",
    "heisenberg_weyl",
    "identity_channel",
    "is_product",
    "load_channel",
    "product_channel",
    "random_channel",
    "reshuffle",
    "swap_channel",
    "unitary_channel",
]
