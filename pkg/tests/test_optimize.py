import numpy as np
import pytest

from opspread.channels import cnot_channel, product_channel, random_channel, swap_channel
from opspread.holevo import holevo_information, output_states
from opspread.optimize import maximize_holevo, positivity_witness
from opspread.search import (
    OptimizerConfig,
    UnitaryParams,
    hermitian_basis,
    pattern_search,
    unitary_from_params,
)
from opspread.states import basis_state, random_pure_state

X = np.array([[0, 1], [1, 0]], dtype=complex)
LN2 = np.log(2)
FAST = OptimizerConfig(restarts=3, max_iters=200)


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValueError):
        OptimizerConfig(shrink=1.5)


def test_params_length_checked():
    with pytest.raises(ValueError):
        UnitaryParams(2, np.zeros(3))


def test_chart_origin_and_unitarity(rng):
    assert np.allclose(unitary_from_params(np.zeros(9), 3), np.eye(3))
    for dim in (2, 3, 4):
        u = unitary_from_params(UnitaryParams(dim, rng.uniform(-np.pi, np.pi, dim * dim)))
        assert np.abs(u.conj().T @ u - np.eye(dim)).max() < 1e-10


def test_chart_x_generator():
    theta = np.zeros(4)
    theta[1] = np.pi / 2
    assert np.allclose(unitary_from_params(theta, 2), 1j * X, atol=1e-14)


def test_hermitian_basis_spans():
    b = hermitian_basis(3)
    assert b.shape == (9, 3, 3)
    assert np.linalg.matrix_rank(b.reshape(9, 9)) == 9
    for k in range(9):
        assert np.allclose(b[k], b[k].conj().T)


def test_pattern_search_finds_quadratic_max():
    res = pattern_search(lambda x: -np.sum((x - 0.3) ** 2), 3, OptimizerConfig(restarts=2, tol=1e-9))
    assert np.allclose(res.x, 0.3, atol=1e-6)


def test_pattern_search_trace_monotone_and_deterministic():
    f = lambda x: np.cos(3 * x[0]) * np.sin(2 * x[1]) + 0.1 * x[0]
    a = pattern_search(f, 2, FAST, stream=(4,))
    b = pattern_search(f, 2, FAST, stream=(4,))
    vals = [v for _, _, v in a.trace]
    assert all(y >= x for x, y in zip(vals, vals[1:]))
    assert np.array_equal(a.x, b.x) and a.value == b.value
    assert a.value == max(a.restart_values)


def test_more_restarts_never_worse():
    f = lambda x: np.sin(5 * x[0]) + np.cos(7 * x[1] * x[0])
    prev = -np.inf
    for r in (1, 2, 4, 8):
        v = pattern_search(f, 2, OptimizerConfig(restarts=r, seed=3)).value
        assert v >= prev
        prev = v


def test_ceiling_stops_early():
    res = pattern_search(lambda x: min(float(x[0]), 1.0), 1, OptimizerConfig(restarts=1), ceiling=1.0)
    assert res.value == 1.0


@pytest.mark.parametrize("ch", [swap_channel(), cnot_channel()], ids=["swap", "cnot"])
def test_maximize_reaches_ln2(ch):
    res = maximize_holevo(ch, basis_state(4), 2, 2, 2, FAST)
    assert res.value >= LN2 - 1e-3
    assert res.value <= LN2 + 1e-9
    recomputed = holevo_information(output_states(ch, basis_state(4), res.ensemble, 2, 2))
    assert res.value == pytest.approx(recomputed, abs=1e-12)


def test_maximize_trace_csv():
    res = maximize_holevo(swap_channel(), basis_state(4), 2, 2, 2, OptimizerConfig(restarts=1, max_iters=5))
    lines = res.trace_csv().splitlines()
    assert lines[0] == "restart,iter,best_value"
    assert len(lines) == len(res.trace) + 1


def test_maximize_respects_probs_and_ceiling():
    probs = np.array([0.9, 0.1])
    res = maximize_holevo(swap_channel(), basis_state(4), 2, 2, 2, FAST, probs=probs)
    h = -np.sum(probs * np.log(probs))
    assert res.value <= min(h, LN2) + 1e-9
    assert res.value == pytest.approx(h, abs=1e-6)
    with pytest.raises(ValueError):
        maximize_holevo(swap_channel(), basis_state(4), 3, 2, 2, FAST, probs=probs)


def test_maximize_deterministic():
    ch = random_channel(4, 2, 5, (2, 2))
    a = maximize_holevo(ch, basis_state(4), 2, 2, 2, FAST)
    b = maximize_holevo(ch, basis_state(4), 2, 2, 2, FAST)
    assert np.array_equal(a.params, b.params)


def test_witness_product_and_swap(rng):
    prod = product_channel(random_channel(2, 2, 1), random_channel(2, 2, 2))
    w = positivity_witness(prod, random_pure_state(4, rng), 2, 2, FAST)
    assert not w.found and w.value <= 1e-9
    w = positivity_witness(swap_channel(), basis_state(4), 2, 2, FAST)
    assert w.found and w.value == pytest.approx(LN2, abs=1e-3)


def test_witness_random_channel(rng):
    ch = random_channel(4, 4, 21, (2, 2))
    w = positivity_witness(ch, random_pure_state(4, rng), 2, 2, FAST)
    assert w.found
