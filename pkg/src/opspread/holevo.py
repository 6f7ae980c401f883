"""Holevo information of locally encoded ensembles and its two-sided bounds.

An ensemble ``{p_i, U_i}`` of unitaries on ``A`` encodes a shared state
``rho0`` on ``AB``; a channel acts on ``AB``; ``B`` receives
``rho_i = Tr_A tau((U_i (x) I) rho0 (U_i (x) I)^dag)``. With
``rho_bar = sum p_i rho_i`` and the complementary state
``rho~_i = (rho_bar - p_i rho_i)/(1 - p_i)``:

    sum_i p_i (1-p_i)^2 ||rho_i - rho~_i||_1^2 / 2
        <= chi <=
    sum_i -p_i log(p_i) ||rho_i - rho~_i||_1 / 2

``chi`` is reported as ``c_chi`` (it is the Holevo information of a fixed
ensemble, sometimes called the Holevo capacity). Everything is in nats.
Zero-probability entries are dropped before any computation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np

from .channels import KrausChannel, apply_raw
from .matkernel import as_matrix, is_unitary, partial_trace, trace_norm
from .search import OptimizerConfig
from .spreading import sup_commutator
from .states import (
    DensityMatrix,
    relative_entropy,
    shannon_entropy,
    skew_divergence,
    trace_distance,
    validate_probs,
    validate_state,
    von_neumann_entropy,
)

NEGATIVE_CLAMP = 1e-12
BOUND_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    unitaries: tuple

    def __post_init__(self):
        probs = validate_probs(self.probs)
        unitaries = tuple(as_matrix(u) for u in self.unitaries)
        if len(unitaries) != probs.size:
            raise ValueError(f"{probs.size} probabilities but {len(unitaries)} unitaries")
        for u in unitaries:
            if not is_unitary(u):
                raise ValueError("ensemble members must be unitary")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "unitaries", unitaries)

    @property
    def size(self) -> int:
        return self.probs.size

    @property
    def dim(self) -> int:
        return self.unitaries[0].shape[0]

    @classmethod
    def uniform(cls, unitaries: Sequence) -> "Ensemble":
        return cls(np.full(len(unitaries), 1.0 / len(unitaries)), tuple(unitaries))


@dataclass(frozen=True, eq=False)
class OutputFamily:
    probs: np.ndarray
    outputs: tuple
    baseline: DensityMatrix | None = None

    def __post_init__(self):
        probs = validate_probs(self.probs)
        outputs = tuple(validate_state(o) for o in self.outputs)
        if len(outputs) != probs.size:
            raise ValueError(f"{probs.size} probabilities but {len(outputs)} outputs")
        if len({o.dim for o in outputs}) != 1:
            raise ValueError("all outputs must share one dimension")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "outputs", outputs)

    def active(self) -> "OutputFamily":
        """The family with zero-probability members removed."""
        keep = self.probs > 0
        if keep.all():
            return self
        return OutputFamily(
            self.probs[keep],
            tuple(o for o, k in zip(self.outputs, keep) if k),
            self.baseline,
        )

    def average(self) -> np.ndarray:
        return np.tensordot(self.probs, np.stack([o.matrix for o in self.outputs]), axes=1)


@dataclass
class BoundReport:
    c_chi: float
    lower: float
    upper: float
    shannon: float
    tmax: float
    tmax_bound: float
    # (p_i, ||rho_i - rho~_i||_1, S_{p_i}(rho_i || rho~_i)) for each p_i > 0
    per_index: list = field(default_factory=list)
    eps_lr: float | None = None
    lr_bound_half: float | None = None
    lr_bound_one: float | None = None

    def sandwich_holds(self, slack: float = BOUND_SLACK) -> bool:
        return self.lower - slack <= self.c_chi <= self.upper + slack

    def ceilings_hold(self, slack: float = BOUND_SLACK) -> bool:
        return self.c_chi <= self.shannon + slack and self.c_chi <= self.tmax_bound + slack

    def as_record(self) -> dict:
        """Flat key-value form; per-index triples become ``p_i``, ``trace_norm_i``, ``skew_i``."""
        rec = {
            "c_chi": self.c_chi,
            "lower": self.lower,
            "upper": self.upper,
            "shannon": self.shannon,
            "tmax": self.tmax,
            "tmax_bound": self.tmax_bound,
            "eps_lr": self.eps_lr,
            "lr_bound_half": self.lr_bound_half,
            "lr_bound_one": self.lr_bound_one,
        }
        for i, (p, tn, sk) in enumerate(self.per_index):
            rec[f"p_{i}"], rec[f"trace_norm_{i}"], rec[f"skew_{i}"] = p, tn, sk
        return rec


def _check_dims(rho0, d_a: int, d_b: int) -> np.ndarray:
    rho0 = np.asarray(rho0)
    if rho0.shape != (d_a * d_b, d_a * d_b):
        raise ValueError(f"state of shape {rho0.shape} does not match d_A*d_B = {d_a * d_b}")
    return rho0


def encode(rho0, e: Ensemble, d_a: int, d_b: int) -> list[DensityMatrix]:
    """``(U_i (x) I_B) rho0 (U_i (x) I_B)^dag`` for each ensemble member."""
    rho0 = _check_dims(rho0, d_a, d_b)
    if e.dim != d_a:
        raise ValueError(f"ensemble unitaries act on dimension {e.dim}, expected {d_a}")
    out = []
    for u in e.unitaries:
        big = np.kron(u, np.eye(d_b))
        out.append(validate_state(big @ rho0 @ big.conj().T))
    return out


def output_states(ch: KrausChannel, rho0, e: Ensemble, d_a: int, d_b: int) -> OutputFamily:
    """Marginals on ``B`` after encoding and the channel; ``baseline`` is the unencoded output."""
    rho0 = _check_dims(rho0, d_a, d_b)
    if ch.dim != d_a * d_b:
        raise ValueError(f"channel dimension {ch.dim} does not match d_A*d_B = {d_a * d_b}")

    def marginal(rho):
        return validate_state(partial_trace(apply_raw(ch, np.asarray(rho)), [d_a, d_b], [1]))

    outputs = tuple(marginal(r) for r in encode(rho0, e, d_a, d_b))
    return OutputFamily(e.probs, outputs, marginal(rho0))


def holevo_information(f: OutputFamily) -> float:
    """``S(sum p_i rho_i) - sum p_i S(rho_i)`` in nats."""
    f = f.active()
    if f.probs.size == 1:
        return 0.0
    value = von_neumann_entropy(f.average()) - sum(
        p * von_neumann_entropy(o) for p, o in zip(f.probs, f.outputs)
    )
    if -NEGATIVE_CLAMP < value <= 0:
        return 0.0
    return float(value)


def complementary_state(f: OutputFamily, i: int) -> DensityMatrix:
    """Normalized mixture of all members other than ``i``."""
    p = f.probs[i]
    if p >= 1.0:
        raise ValueError("the complementary state is undefined when p_i = 1")
    return validate_state((f.average() - p * f.outputs[i].matrix) / (1.0 - p))


def _per_index(f: OutputFamily) -> list[tuple[float, float, float]]:
    """Per active member: ``(p_i, ||rho_i - rho~_i||_1, S_{p_i}(rho_i || rho~_i))``."""
    f = f.active()
    if f.probs.size == 1:
        return [(1.0, float("nan"), float("nan"))]
    out = []
    for i, (p, rho) in enumerate(zip(f.probs, f.outputs)):
        comp = complementary_state(f, i)
        out.append((float(p), trace_norm(rho.matrix - comp.matrix), skew_divergence(rho, comp, p)))
    return out


def theorem1_bounds(f: OutputFamily) -> tuple[float, float]:
    """Quadratic lower and linear upper bound on the Holevo information."""
    f = f.active()
    if f.probs.size == 1:
        return 0.0, 0.0
    lower = upper = 0.0
    for i, (p, rho) in enumerate(zip(f.probs, f.outputs)):
        tn = trace_norm(rho.matrix - complementary_state(f, i).matrix)
        lower += 0.5 * p * (1.0 - p) ** 2 * tn * tn
        upper += -0.5 * p * np.log(p) * tn
    return float(lower), float(upper)


def skew_identity_check(f: OutputFamily) -> float:
    """Largest deviation in the relative-entropy and skew-divergence identities.

    Checks, for every member, ``S(rho_i || rho_bar) = -log(p_i) S_{p_i}(rho_i || rho~_i)``
    and, for the family, ``chi = sum p_i S(rho_i || rho_bar) = -sum p_i log(p_i) S_{p_i}``.
    """
    f = f.active()
    if f.probs.size == 1:
        raise ValueError("the skew identity needs every p_i strictly inside (0, 1)")
    avg = f.average()
    chi = holevo_information(f)
    dev = 0.0
    rel_sum = skew_sum = 0.0
    for i, (p, rho) in enumerate(zip(f.probs, f.outputs)):
        rel = relative_entropy(rho, avg)
        skew = -np.log(p) * skew_divergence(rho, complementary_state(f, i), p)
        dev = max(dev, abs(rel - skew))
        rel_sum += p * rel
        skew_sum += p * skew
    return float(max(dev, abs(chi - rel_sum), abs(chi - skew_sum)))


def tmax_bound(f: OutputFamily) -> tuple[float, float]:
    """Largest pairwise trace distance and ``H(P) * t_max``."""
    f = f.active()
    tmax = max((trace_distance(a, b) for a, b in combinations(f.outputs, 2)), default=0.0)
    return float(tmax), shannon_entropy(f.probs) * tmax


def lr_capacity_bound(shannon: float, eps: float) -> tuple[float, float]:
    """``(H eps / 2, H eps)``: the half-factor form and the factor-one form."""
    if eps < 0:
        raise ValueError("eps_lr must be nonnegative")
    return 0.5 * shannon * eps, shannon * eps


def bound_report(f: OutputFamily, eps: float | None = None) -> BoundReport:
    shannon = shannon_entropy(f.active().probs)
    lower, upper = theorem1_bounds(f)
    tmax, tbound = tmax_bound(f)
    rep = BoundReport(
        c_chi=holevo_information(f),
        lower=lower,
        upper=upper,
        shannon=shannon,
        tmax=tmax,
        tmax_bound=tbound,
        per_index=_per_index(f),
    )
    if eps is not None:
        rep.eps_lr = float(eps)
        rep.lr_bound_half, rep.lr_bound_one = lr_capacity_bound(shannon, eps)
    return rep


@dataclass
class BravyiEntry:
    lhs: float
    sup_estimate: float
    hard_violation: bool

    @property
    def consistent(self) -> bool:
        return self.lhs <= self.sup_estimate + 1e-6


def bravyi_check(
    ch: KrausChannel,
    rho0,
    e: Ensemble,
    d_a: int,
    d_b: int,
    opt: OptimizerConfig = OptimizerConfig(),
    stream=(),
) -> list[BravyiEntry]:
    """Compare ``||rho_i - rho_0||_1`` with the commutator supremum per member.

    The supremum estimate is a lower bound, so a shortfall is reported via
    :attr:`BravyiEntry.consistent` but only exceeding the analytic ceiling 2
    counts as a hard violation.
    """
    f = output_states(ch, rho0, e, d_a, d_b)
    out = []
    for i, (u, rho) in enumerate(zip(e.unitaries, f.outputs)):
        lhs = trace_norm(rho.matrix - f.baseline.matrix)
        est = sup_commutator(ch, u, d_a, d_b, opt, stream=(*stream, i)).estimate
        out.append(BravyiEntry(lhs, est, lhs > 2.0 + 1e-9))
    return out
