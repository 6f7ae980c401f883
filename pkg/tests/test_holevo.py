import numpy as np
import pytest

from opspread.channels import haar_unitary, product_channel, random_channel, swap_channel
from opspread.holevo import (
    Ensemble,
    OutputFamily,
    bound_report,
    bravyi_check,
    complementary_state,
    encode,
    holevo_information,
    lr_capacity_bound,
    output_states,
    skew_identity_check,
    theorem1_bounds,
    tmax_bound,
)
from opspread.matkernel import partial_trace
from opspread.search import OptimizerConfig
from opspread.spreading import PAULI
from opspread.states import basis_state, random_state, relative_entropy, shannon_entropy

LN2 = np.log(2)
X, I2 = PAULI["X"], PAULI["I"]


def orthogonal_family(probs=(0.5, 0.5)):
    return output_states(swap_channel(), basis_state(4), Ensemble(np.array(probs), (I2, X)), 2, 2)


def random_family(rng, m=3, dim=2):
    probs = rng.dirichlet(np.ones(m))
    return OutputFamily(probs, tuple(random_state(dim, rng) for _ in range(m)))


def random_setup(rng, m=3):
    ch = random_channel(4, 4, int(rng.integers(1 << 30)), (2, 2))
    e = Ensemble(rng.dirichlet(np.ones(m)), tuple(haar_unitary(2, rng) for _ in range(m)))
    return ch, random_state(4, rng), e


def test_ensemble_validation():
    with pytest.raises(ValueError):
        Ensemble(np.array([0.5, 0.5]), (I2,))
    with pytest.raises(ValueError):
        Ensemble(np.array([1.0]), (2 * I2,))
    assert Ensemble.uniform([I2, X, I2]).probs == pytest.approx([1 / 3] * 3)


def test_encode(rng):
    rho0 = random_state(4, rng)
    for r in encode(rho0, Ensemble.uniform([I2, I2]), 2, 2):
        assert np.allclose(r.matrix, rho0.matrix)
    e = Ensemble.uniform([haar_unitary(2, rng) for _ in range(3)])
    spec0 = np.linalg.eigvalsh(rho0.matrix)
    for r in encode(rho0, e, 2, 2):
        assert np.allclose(np.linalg.eigvalsh(r.matrix), spec0, atol=1e-12)
        assert np.allclose(partial_trace(r.matrix, [2, 2], [1]), partial_trace(rho0.matrix, [2, 2], [1]), atol=1e-12)


def test_output_states_examples(rng):
    f = orthogonal_family()
    assert np.allclose(f.outputs[0].matrix, np.diag([1, 0]))
    assert np.allclose(f.outputs[1].matrix, np.diag([0, 1]))
    prod = product_channel(random_channel(2, 2, 1), random_channel(2, 2, 2))
    e = Ensemble.uniform([haar_unitary(2, rng) for _ in range(3)])
    f = output_states(prod, random_state(4, rng), e, 2, 2)
    for o in f.outputs:
        assert np.allclose(o.matrix, f.baseline.matrix, atol=1e-12)
    assert holevo_information(f) < 1e-10


def test_output_states_dim_checks(rng):
    with pytest.raises(ValueError):
        output_states(swap_channel(), np.eye(3) / 3, Ensemble.uniform([I2]), 2, 2)
    with pytest.raises(ValueError):
        output_states(random_channel(6, 2, 0), np.eye(4) / 4, Ensemble.uniform([I2]), 2, 2)


def test_holevo_examples(rng):
    assert holevo_information(orthogonal_family()) == pytest.approx(LN2, abs=1e-14)
    for _ in range(20):
        f = random_family(rng, 4)
        avg = f.average()
        rel = sum(p * relative_entropy(o, avg) for p, o in zip(f.probs, f.outputs))
        assert holevo_information(f) == pytest.approx(rel, abs=1e-9)


def test_complementary_state(rng):
    f = random_family(rng, 2)
    f2 = OutputFamily(np.array([0.5, 0.5]), f.outputs)
    assert np.allclose(complementary_state(f2, 0).matrix, f.outputs[1].matrix)
    f = random_family(rng, 4)
    for i, p in enumerate(f.probs):
        comp = complementary_state(f, i)
        assert np.abs(p * f.outputs[i].matrix + (1 - p) * comp.matrix - f.average()).max() < 1e-12
        assert np.linalg.eigvalsh(comp.matrix).min() > -1e-12
    with pytest.raises(ValueError):
        complementary_state(OutputFamily(np.array([1.0]), f.outputs[:1]), 0)


def test_bounds_closed_form():
    # ||rho_i - rho~_i||_1 = 2 for both members: lower = 2 * (1/2)(1/2)(1/4)(4), upper = 2 * (1/2)(1/2)(ln 2)(2)
    lower, upper = theorem1_bounds(orthogonal_family())
    assert lower == pytest.approx(0.5, abs=1e-12)
    assert upper == pytest.approx(LN2, abs=1e-12)
    assert upper == pytest.approx(holevo_information(orthogonal_family()), abs=1e-12)


def test_single_message(rng):
    f = OutputFamily(np.array([1.0]), (random_state(2, rng),))
    assert theorem1_bounds(f) == (0.0, 0.0)
    assert holevo_information(f) == 0.0


def test_sandwich_random_families(rng):
    for m in (2, 3, 5):
        for _ in range(20):
            f = random_family(rng, m, dim=3)
            lower, upper = theorem1_bounds(f)
            c = holevo_information(f)
            assert lower - 1e-9 <= c <= upper + 1e-9
            assert lower >= 0 and upper <= 2 * shannon_entropy(f.probs) + 1e-12
            assert c <= shannon_entropy(f.probs) + 1e-9


def test_skew_identity(rng):
    same = random_state(3, rng)
    assert skew_identity_check(OutputFamily(np.array([0.2, 0.8]), (same, same))) == pytest.approx(0, abs=1e-12)
    assert skew_identity_check(orthogonal_family()) < 1e-12
    for _ in range(30):
        assert skew_identity_check(random_family(rng, 3)) < 1e-9


def test_tmax_bound(rng):
    same = random_state(2, rng)
    assert tmax_bound(OutputFamily(np.array([0.3, 0.7]), (same, same)))[1] == pytest.approx(0, abs=1e-15)
    tmax, bound = tmax_bound(orthogonal_family())
    assert tmax == pytest.approx(1)
    assert bound == pytest.approx(LN2)
    for _ in range(20):
        f = random_family(rng, 4)
        assert holevo_information(f) <= tmax_bound(f)[1] + 1e-9


def test_permutation_invariance(rng):
    f = random_family(rng, 4)
    perm = [2, 0, 3, 1]
    g = OutputFamily(f.probs[perm], tuple(f.outputs[i] for i in perm))
    a, b = bound_report(f), bound_report(g)
    for key in ("c_chi", "lower", "upper"):
        assert getattr(a, key) == pytest.approx(getattr(b, key), abs=1e-12)
    assert np.allclose(np.array(a.per_index)[perm], np.array(b.per_index), atol=1e-12, rtol=0)


def test_zero_probabilities_are_ignored(rng):
    f = random_family(rng, 3)
    extra = OutputFamily(np.append(f.probs, 0.0), f.outputs + (random_state(2, rng),))
    a, b = bound_report(f).as_record(), bound_report(extra).as_record()
    assert a == pytest.approx(b, abs=1e-15)


def test_lr_capacity_bound():
    assert lr_capacity_bound(LN2, 0.0) == (0.0, 0.0)
    half, one = lr_capacity_bound(LN2, 2.0)
    assert half == pytest.approx(LN2) and one == pytest.approx(2 * LN2)
    with pytest.raises(ValueError):
        lr_capacity_bound(1.0, -0.1)


def test_report_record_fields(rng):
    ch, rho0, e = random_setup(rng)
    rep = bound_report(output_states(ch, rho0, e, 2, 2), eps=0.5)
    rec = rep.as_record()
    assert rec["lr_bound_one"] == pytest.approx(rep.shannon * 0.5)
    assert {"p_0", "trace_norm_2", "skew_2"} <= rec.keys()
    assert rep.sandwich_holds() and rep.ceilings_hold()


def test_bravyi_examples(rng):
    opt = OptimizerConfig(restarts=4)
    prod = product_channel(random_channel(2, 2, 5), random_channel(2, 2, 6))
    e = Ensemble.uniform([haar_unitary(2, rng) for _ in range(2)])
    for entry in bravyi_check(prod, random_state(4, rng), e, 2, 2, opt):
        assert entry.lhs < 1e-10 and entry.sup_estimate < 1e-10
    entries = bravyi_check(swap_channel(), basis_state(4), Ensemble.uniform([I2, X]), 2, 2, opt)
    assert entries[1].lhs == pytest.approx(2, abs=1e-9)
    assert entries[1].sup_estimate == pytest.approx(2, abs=1e-9)
    assert all(not en.hard_violation for en in entries)


def test_bravyi_random_consistent(rng):
    opt = OptimizerConfig(restarts=8)
    for _ in range(3):
        ch, rho0, e = random_setup(rng, 2)
        assert all(en.consistent for en in bravyi_check(ch, rho0, e, 2, 2, opt))
