"""Named experiments. Each returns records in instance order plus an exit code.

Instance ``k`` of a randomized scenario draws from the RNG stream
``(seed, k)``, so any single instance can be regenerated in isolation.

Exit codes: 0 when every record passes, 2 when some assertion failed.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .channels import (
    cnot_channel,
    haar_unitary,
    is_product,
    product_channel,
    random_channel,
    swap_channel,
)
from .config import RunConfig
from .holevo import (
    BoundReport,
    Ensemble,
    bound_report,
    bravyi_check,
    output_states,
    skew_identity_check,
)
from .optimize import maximize_holevo, positivity_witness
from .search import OptimizerConfig
from .spreading import (
    PAULI,
    SpinChainModel,
    build_hamiltonian,
    chain_channel,
    eps_lr,
    lightcone_scan,
)
from .matkernel import evolution_unitary
from .states import basis_state, random_pure_state, random_state

log = logging.getLogger(__name__)

LN2 = float(np.log(2.0))
CONVERSE_MARGIN = 1e-3
FIXTURE_TOL = 1e-10
SATURATION_TOL = 1e-9

COLUMNS = {
    "theorem1": ["instance", "m", "d_A", "d_B", "env_dim", "c_chi", "lower", "upper", "shannon", "tmax", "tmax_bound", "pass"],
    "bounds-sweep": ["instance", "m", "c_chi", "lower", "upper", "shannon", "tmax", "tmax_bound", "skew_identity_dev", "pass"],
    "claim1-forward": ["instance", "m", "c_chi", "is_product", "schmidt_ratio", "shannon", "tmax_bound", "pass"],
    "claim1-converse": ["instance", "label", "is_product", "value", "found", "schmidt_ratio", "choi_spectrum", "pass"],
    "bravyi": ["instance", "i", "lhs", "sup_estimate", "pass"],
    "lightcone": ["t", "d", "commutator_norm", "eps_lr", "c_chi", "hp_eps_half", "hp_eps_one", "pass"],
}
# columns carrying entropies; rescaled when units = bits
NAT_COLUMNS = {"c_chi", "lower", "upper", "shannon", "tmax_bound", "value", "hp_eps_half", "hp_eps_one"}


@dataclass
class RunRecord:
    scenario: str
    values: dict
    passed: bool
    report: BoundReport | None = None
    wall_time: float = 0.0
    extra: dict = field(default_factory=dict)
    # effective configuration, defaults included
    config: dict = field(default_factory=dict)


def optimizer_config(cfg: RunConfig, restarts: int | None = None) -> OptimizerConfig:
    return OptimizerConfig(
        restarts=restarts or cfg.restarts,
        max_iters=cfg.max_iters,
        init_step=cfg.init_step,
        shrink=cfg.shrink,
        tol=cfg.opt_tol,
        seed=cfg.seed,
    )


def _rng(cfg: RunConfig, k: int) -> np.random.Generator:
    return np.random.default_rng((cfg.seed, k))


def random_instance(cfg: RunConfig, k: int, product: bool = False):
    """Channel, input state and ensemble for randomized instance ``k``."""
    rng = _rng(cfg, k)
    d_a, d_b = cfg.d_A, cfg.d_B
    m = int(rng.choice(cfg.ensemble_size))
    probs = rng.dirichlet(np.ones(m))
    if product:
        ch = product_channel(
            random_channel(d_a, cfg.env_dim, (cfg.seed, k, 1)),
            random_channel(d_b, cfg.env_dim, (cfg.seed, k, 2)),
        )
    else:
        ch = random_channel(d_a * d_b, cfg.env_dim, (cfg.seed, k, 0), (d_a, d_b))
    rank = int(rng.integers(1, d_a * d_b + 1))
    rho0 = random_state(d_a * d_b, rng, rank)
    ens = Ensemble(probs, tuple(haar_unitary(d_a, rng) for _ in range(m)))
    return ch, rho0, ens


def orthogonal_pair():
    """SWAP on two qubits, ``|00>``, encodings ``{I, X}``: outputs ``|0>, |1>``."""
    return swap_channel(), basis_state(4), Ensemble.uniform([PAULI["I"], PAULI["X"]])


def _fmt(v: float) -> str:
    return format(v, ".17g")


def _run_theorem1(cfg: RunConfig, sweep: bool = False) -> list[RunRecord]:
    records = []
    n = 1 if cfg.fixture == "orthogonal-pair" else cfg.n_instances
    for k in range(n):
        t0 = time.perf_counter()
        if cfg.fixture == "orthogonal-pair":
            ch, rho0, ens = orthogonal_pair()
            env = 1
        else:
            ch, rho0, ens = random_instance(cfg, k)
            env = cfg.env_dim
        fam = output_states(ch, rho0, ens, cfg.d_A, cfg.d_B)
        rep = bound_report(fam)
        ok = rep.sandwich_holds(cfg.tol) and rep.ceilings_hold(cfg.tol)
        values = {"instance": k, "m": ens.size}
        if sweep:
            dev = skew_identity_check(fam) if np.all(fam.probs < 1) else 0.0
            ok = ok and dev < cfg.tol
            values.update(
                c_chi=rep.c_chi, lower=rep.lower, upper=rep.upper, shannon=rep.shannon,
                tmax=rep.tmax, tmax_bound=rep.tmax_bound, skew_identity_dev=dev,
            )
        else:
            values.update(
                d_A=cfg.d_A, d_B=cfg.d_B, env_dim=env, c_chi=rep.c_chi, lower=rep.lower,
                upper=rep.upper, shannon=rep.shannon, tmax=rep.tmax, tmax_bound=rep.tmax_bound,
            )
        if not ok:
            log.warning("instance %d violates a bound: %s", k, rep.as_record())
        records.append(RunRecord(cfg.scenario, values, ok, rep, time.perf_counter() - t0))
    return records


def _run_forward(cfg: RunConfig) -> list[RunRecord]:
    records = []
    for k in range(cfg.n_instances):
        t0 = time.perf_counter()
        ch, rho0, ens = random_instance(cfg, k, product=True)
        cert = is_product(ch, cfg.product_tol)
        rep = bound_report(output_states(ch, rho0, ens, cfg.d_A, cfg.d_B))
        s = cert.schmidt_values
        ok = cert.is_product and rep.c_chi < cfg.tol
        values = {
            "instance": k, "m": ens.size, "c_chi": rep.c_chi, "is_product": cert.is_product,
            "schmidt_ratio": float(s[1] / s[0]) if s.size > 1 else 0.0,
            "shannon": rep.shannon, "tmax_bound": rep.tmax_bound,
        }
        records.append(RunRecord(cfg.scenario, values, ok, rep, time.perf_counter() - t0))
    return records


def _run_converse(cfg: RunConfig) -> list[RunRecord]:
    opt = optimizer_config(cfg)
    records = []
    rho00 = basis_state(cfg.d_A * cfg.d_B) if (cfg.d_A, cfg.d_B) == (2, 2) else None
    fixtures = [("swap", swap_channel()), ("cnot", cnot_channel())] if rho00 is not None else []
    for k, (label, ch) in enumerate(fixtures):
        t0 = time.perf_counter()
        res = maximize_holevo(ch, rho00, 2, 2, 2, opt, stream=(k,))
        cert = is_product(ch, cfg.product_tol)
        ok = res.value >= LN2 - CONVERSE_MARGIN
        rep = bound_report(output_states(ch, rho00, res.ensemble, 2, 2))
        records.append(RunRecord(cfg.scenario, _converse_values(k, label, cert, res.value, cfg.witness_threshold, ok), ok, rep,
                                 time.perf_counter() - t0))

    randoms = []
    for j in range(cfg.n_instances):
        k = len(fixtures) + j
        t0 = time.perf_counter()
        rng = _rng(cfg, k)
        ch = random_channel(cfg.d_A * cfg.d_B, cfg.env_dim, (cfg.seed, k, 0), (cfg.d_A, cfg.d_B))
        cert = is_product(ch, cfg.product_tol)
        rho0 = random_pure_state(cfg.d_A * cfg.d_B, rng)
        w = positivity_witness(ch, rho0, cfg.d_A, cfg.d_B, opt, cfg.witness_threshold, stream=(k,))
        rep = bound_report(output_states(ch, rho0, w.ensemble, cfg.d_A, cfg.d_B))
        rec = RunRecord(cfg.scenario, _converse_values(k, "random", cert, w.value, cfg.witness_threshold, w.found), w.found, rep,
                        time.perf_counter() - t0, {"certified": not cert.is_product})
        if not w.found:
            log.warning("no witness for instance %d (value %.3e); Choi Schmidt spectrum %s",
                        k, w.value, rec.values["choi_spectrum"])
        randoms.append(rec)

    # a missed witness fails only if the success rate over certified channels drops below target
    certified = [r for r in randoms if r.extra["certified"]]
    rate = np.mean([r.values["found"] for r in certified]) if certified else 1.0
    log.info("positivity witness found in %d/%d certified non-product instances",
             sum(r.values["found"] for r in certified), len(certified))
    for r in randoms:
        r.passed = bool(r.values["found"] or rate >= cfg.witness_rate)
        r.values["pass"] = r.passed
    return records + randoms


def _converse_values(k, label, cert, value, threshold, ok) -> dict:
    s = cert.schmidt_values
    return {
        "instance": k, "label": label, "is_product": cert.is_product, "value": value,
        "found": value > threshold, "schmidt_ratio": float(s[1] / s[0]) if s.size > 1 else 0.0,
        "choi_spectrum": ";".join(_fmt(float(x)) for x in s), "pass": ok,
    }


def _run_bravyi(cfg: RunConfig) -> list[RunRecord]:
    opt = optimizer_config(cfg)
    records = []
    # instance 0: product channel fixture; instance 1: SWAP with {I, X}; then random
    cases = []
    ch, rho0, ens = random_instance(cfg, 0, product=True)
    cases.append(("product", ch, rho0, ens, cfg.d_A, cfg.d_B))
    if (cfg.d_A, cfg.d_B) == (2, 2):
        cases.append(("swap", *orthogonal_pair(), 2, 2))
    for j in range(cfg.n_instances):
        cases.append(("random", *random_instance(cfg, len(cases)), cfg.d_A, cfg.d_B))

    randoms = []
    for k, (label, ch, rho0, ens, d_a, d_b) in enumerate(cases):
        t0 = time.perf_counter()
        entries = bravyi_check(ch, rho0, ens, d_a, d_b, opt, stream=(k,))
        rep = bound_report(output_states(ch, rho0, ens, d_a, d_b))
        elapsed = time.perf_counter() - t0
        for i, e in enumerate(entries):
            ok = not e.hard_violation
            if label == "product":
                ok = ok and e.lhs <= FIXTURE_TOL and e.sup_estimate <= FIXTURE_TOL
            elif label == "swap" and i == 1:
                ok = ok and abs(e.lhs - 2) <= SATURATION_TOL and abs(e.sup_estimate - 2) <= SATURATION_TOL
            rec = RunRecord(cfg.scenario, {"instance": k, "i": i, "lhs": e.lhs, "sup_estimate": e.sup_estimate},
                            ok, rep, elapsed, {"consistent": e.consistent, "label": label})
            if label == "random":
                randoms.append(rec)
            elif not e.consistent:
                rec.passed = False
            records.append(rec)

    # instance-level consistency: every index of the instance satisfies lhs <= sup + slack
    by_instance = {}
    for r in randoms:
        by_instance.setdefault(r.values["instance"], []).append(
            r.values["lhs"] <= r.values["sup_estimate"] + cfg.bravyi_slack)
    rate = np.mean([all(v) for v in by_instance.values()]) if by_instance else 1.0
    for k, flags in by_instance.items():
        if not all(flags):
            log.warning("instance %d: lhs exceeds the supremum estimate (estimate is a lower bound)", k)
    log.info("commutator bound consistent in %d/%d random instances",
             sum(all(v) for v in by_instance.values()), len(by_instance))
    for r in randoms:
        r.passed = r.passed and (r.extra["consistent"] or rate >= cfg.bravyi_rate)
    for r in records:
        r.values["pass"] = r.passed
    return records


def _run_lightcone(cfg: RunConfig) -> list[RunRecord]:
    model = SpinChainModel(cfg.n_sites, cfg.J, cfg.g, cfg.boundary)
    times = np.linspace(cfg.t_min, cfg.t_max, cfg.n_times)
    grid = lightcone_scan(model, cfg.o_a, cfg.o_b, times)
    h = build_hamiltonian(model)
    opt = optimizer_config(cfg)
    ens = Ensemble.uniform([PAULI["I"], PAULI[cfg.encoding]])
    rho0 = basis_state(4)
    records = []
    half_holds = 0
    for k, t in enumerate(times):
        t0 = time.perf_counter()
        u = evolution_unitary(h, t)
        column = grid.values[:, k]
        decreasing = bool(np.all(np.diff(column) < 0))
        probe = abs(t - cfg.probe_t) < 1e-12
        half_t = 0
        if probe:
            log.info("t=%g: commutator norms strictly decreasing in d: %s", t, decreasing)
        for j, d in enumerate(grid.distances):
            ch = chain_channel(model, t, int(d), u=u)
            eps = eps_lr(ch, ens, 2, 2, opt)
            rep = bound_report(output_states(ch, rho0, ens, 2, 2), eps)
            value = float(column[j])
            ok = 0.0 <= value <= 2.0 and rep.c_chi <= rep.lr_bound_one + cfg.tol
            if t == 0:
                ok = ok and value == 0.0
            if probe:
                ok = ok and decreasing
            half_t += rep.c_chi <= rep.lr_bound_half + cfg.tol
            records.append(RunRecord(cfg.scenario, {
                "t": float(t), "d": int(d), "commutator_norm": value, "eps_lr": eps, "c_chi": rep.c_chi,
                "hp_eps_half": rep.lr_bound_half, "hp_eps_one": rep.lr_bound_one,
            }, ok, rep, time.perf_counter() - t0))
        log.info("t=%g: c_chi <= H(P) eps_lr / 2 at %d/%d distances", t, half_t, grid.distances.size)
        half_holds += half_t
    log.info("half-factor form c_chi <= H(P) eps_lr / 2 held at %d/%d grid points", half_holds, len(records))
    for r in records:
        r.values["pass"] = r.passed
    return records


def run_scenario(cfg: RunConfig) -> tuple[list[RunRecord], int]:
    """Execute ``cfg.scenario``; returns records and the exit code (0 pass, 2 failed assertion)."""
    runners = {
        "theorem1": _run_theorem1,
        "bounds-sweep": lambda c: _run_theorem1(c, sweep=True),
        "claim1-forward": _run_forward,
        "claim1-converse": _run_converse,
        "bravyi": _run_bravyi,
        "lightcone": _run_lightcone,
    }
    records = runners[cfg.scenario](cfg)
    echo = cfg.echo()
    for r in records:
        r.config = dict(echo)
        r.values["pass"] = r.passed
        if cfg.units == "bits":
            for key in NAT_COLUMNS & r.values.keys():
                if isinstance(r.values[key], float):
                    r.values[key] = r.values[key] / LN2
        r.values = {c: r.values[c] for c in COLUMNS[cfg.scenario]}
    failed = sum(not r.passed for r in records)
    if failed:
        log.warning("%s: %d of %d records failed an assertion", cfg.scenario, failed, len(records))
    return records, 2 if failed else 0
