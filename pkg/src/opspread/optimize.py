"""Encoding search: maximize the Holevo information over unitaries on ``A``.

For a non-product channel some encoding transmits information; this module
looks for one by pattern search over ``m * d_A**2`` chart parameters with the
probabilities held fixed.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .channels import KrausChannel
from .holevo import Ensemble, holevo_information, output_states
from .search import OptimizerConfig, SearchResult, UnitaryParams, pattern_search, unitary_from_params
from .states import validate_probs

WITNESS_THRESHOLD = 1e-6


@dataclass
class HolevoSearch:
    ensemble: Ensemble
    value: float
    trace: list  # (restart, iteration, running best)
    params: np.ndarray

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["restart", "iter", "best_value"])
        for r, it, v in self.trace:
            w.writerow([r, it, format(v, ".17g")])
        return buf.getvalue()


def _entropy(rho: np.ndarray) -> float:
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-12]
    return float(-np.sum(w * np.log(w)))


def _transfer_matrix(ch: KrausChannel, d_a: int, d_b: int) -> np.ndarray:
    """Matrix of ``rho_AB -> Tr_A tau(rho_AB)`` acting on row-major vectorizations."""
    n = d_a * d_b
    kraus = np.stack(ch.kraus_ops)
    cols = []
    for j in range(n):
        for k in range(n):
            # tau(|j><k|) = sum_a K_a[:, j] K_a[:, k]^*
            out = np.einsum("ai,al->il", kraus[:, :, j], kraus[:, :, k].conj())
            cols.append(np.einsum("ijik->jk", out.reshape(d_a, d_b, d_a, d_b)).ravel())
    return np.stack(cols, axis=1)


def _objective(ch: KrausChannel, rho0: np.ndarray, probs: np.ndarray, d_a: int, d_b: int):
    transfer = _transfer_matrix(ch, d_a, d_b)
    r0 = rho0.reshape(d_a, d_b, d_a, d_b)
    m = probs.size

    def f(theta: np.ndarray) -> float:
        outs = []
        for block in theta.reshape(m, d_a * d_a):
            u = unitary_from_params(block, d_a)
            enc = np.einsum("ac,cbde,fd->abfe", u, r0, u.conj())
            outs.append((transfer @ enc.ravel()).reshape(d_b, d_b))
        avg = sum(p * o for p, o in zip(probs, outs))
        return _entropy(avg) - sum(p * _entropy(o) for p, o in zip(probs, outs))

    return f


def _ensemble(theta: np.ndarray, probs: np.ndarray, d_a: int) -> Ensemble:
    blocks = theta.reshape(probs.size, d_a * d_a)
    return Ensemble(probs, tuple(unitary_from_params(UnitaryParams(d_a, b)) for b in blocks))


def maximize_holevo(
    ch: KrausChannel,
    rho0,
    m: int,
    d_a: int,
    d_b: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    probs=None,
    stream=(),
) -> HolevoSearch:
    """Search ``m``-member unitary encodings for the largest Holevo information.

    ``probs`` defaults to uniform and is not optimized. The reported value is
    recomputed from the returned ensemble through the validated pipeline.
    """
    probs = np.full(m, 1.0 / m) if probs is None else validate_probs(probs)
    if probs.size != m:
        raise ValueError(f"{probs.size} probabilities for an ensemble of size {m}")
    rho0 = np.asarray(rho0)
    res: SearchResult = pattern_search(_objective(ch, rho0, probs, d_a, d_b), m * d_a * d_a, cfg, stream=stream)
    ens = _ensemble(res.x, probs, d_a)
    value = holevo_information(output_states(ch, rho0, ens, d_a, d_b))
    return HolevoSearch(ens, value, res.trace, res.x)


@dataclass
class Witness:
    found: bool
    ensemble: Ensemble
    value: float


def positivity_witness(
    ch: KrausChannel,
    rho0,
    d_a: int,
    d_b: int,
    cfg: OptimizerConfig = OptimizerConfig(),
    threshold: float = WITNESS_THRESHOLD,
    stream=(),
) -> Witness:
    """Two-member uniform encoding search; ``found`` when the value exceeds ``threshold`` nats."""
    res = maximize_holevo(ch, rho0, 2, d_a, d_b, cfg, stream=stream)
    return Witness(res.value > threshold, res.ensemble, res.value)


__all__ = [
    "HolevoSearch",
    "OptimizerConfig",
    "UnitaryParams",
    "WITNESS_THRESHOLD",
    "Witness",
    "maximize_holevo",
    "positivity_witness",
    "unitary_from_params",
]
