import itertools

import numpy as np
import pytest

from opspread.channels import (
    CNOT,
    SWAP,
    ChannelError,
    adjoint_apply,
    apply,
    choi_matrix,
    cnot_channel,
    depolarizing_channel,
    dump_channel,
    from_kraus,
    haar_unitary,
    identity_channel,
    is_product,
    load_channel,
    product_channel,
    random_channel,
    reshuffle,
    swap_channel,
    unitary_channel,
)
from opspread.matkernel import partial_trace
from opspread.states import random_state

from conftest import random_matrix

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_from_kraus_examples():
    assert len(from_kraus([np.eye(2)])) == 1
    ch = from_kraus([X / np.sqrt(2), Z / np.sqrt(2)])
    assert ch.completeness_defect < 1e-15
    with pytest.raises(ChannelError, match="7.500e-01"):
        from_kraus([X / 2])


def test_from_kraus_rejects_shapes():
    with pytest.raises(ChannelError):
        from_kraus([])
    with pytest.raises(ChannelError):
        from_kraus([np.eye(2), np.eye(3)])
    with pytest.raises(ChannelError):
        from_kraus([np.eye(4)], (2, 3))


def test_unitary_channel(rng):
    u = haar_unitary(3, rng)
    rho = random_state(3, rng)
    assert np.allclose(apply(unitary_channel(u), rho).matrix, u @ rho.matrix @ u.conj().T, atol=1e-13)
    with pytest.raises(ChannelError):
        unitary_channel(2 * np.eye(2))


def test_identity_and_swap(rng):
    rho = random_state(4, rng)
    assert np.allclose(apply(identity_channel(4), rho).matrix, rho.matrix)
    a, b = random_state(2, rng), random_state(2, rng)
    out = apply(swap_channel(), np.kron(a.matrix, b.matrix)).matrix
    assert np.allclose(partial_trace(out, [2, 2], [0]), b.matrix)
    assert np.allclose(partial_trace(out, [2, 2], [1]), a.matrix)


def test_product_channel_sequential(rng):
    ta, tb = random_channel(2, 3, 1), random_channel(3, 2, 2)
    ch = product_channel(ta, tb)
    assert len(ch) == len(ta) * len(tb)
    assert ch.subsystem_dims == (2, 3)
    a, b = random_state(2, rng), random_state(3, rng)
    joint = apply(ch, np.kron(a.matrix, b.matrix)).matrix
    assert np.allclose(joint, np.kron(apply(ta, a).matrix, apply(tb, b).matrix), atol=1e-13)
    assert is_product(product_channel(identity_channel(2), identity_channel(2)))


def test_depolarizing(rng):
    for dim in (2, 3):
        out = apply(depolarizing_channel(dim), random_state(dim, rng))
        assert np.allclose(out.matrix, np.eye(dim) / dim, atol=1e-13)


def test_apply_preserves_trace_and_positivity(rng):
    for seed in range(20):
        ch = random_channel(4, 3, seed)
        out = apply(ch, random_state(4, rng)).matrix
        assert abs(np.trace(out) - 1) < 1e-10
        assert np.linalg.eigvalsh(out).min() > -1e-9


def test_adjoint(rng):
    ch = random_channel(4, 2, 7)
    assert np.allclose(adjoint_apply(ch, np.eye(4)), np.eye(4), atol=1e-10)
    u = haar_unitary(4, rng)
    o = random_matrix((4, 4), rng)
    assert np.allclose(adjoint_apply(unitary_channel(u), o), u.conj().T @ o @ u, atol=1e-13)
    rho = random_state(4, rng)
    lhs = np.trace(apply(ch, rho).matrix @ o)
    rhs = np.trace(rho.matrix @ adjoint_apply(ch, o))
    assert abs(lhs - rhs) < 1e-10


def test_adjoint_of_product_acts_locally(rng):
    ta, tb = random_channel(2, 2, 3), random_channel(2, 3, 4)
    o_b = random_matrix((2, 2), rng)
    got = adjoint_apply(product_channel(ta, tb), np.kron(np.eye(2), o_b))
    assert np.allclose(got, np.kron(np.eye(2), adjoint_apply(tb, o_b)), atol=1e-10)


def test_random_channel_properties():
    for seed in range(100):
        assert random_channel(3, 2, seed).completeness_defect < 1e-10
    a, b = random_channel(4, 3, 11), random_channel(4, 3, 11)
    assert all(np.array_equal(x, y) for x, y in zip(a.kraus_ops, b.kraus_ops))
    u = random_channel(3, 1, 5)
    assert len(u) == 1
    assert np.allclose(u.kraus_ops[0].conj().T @ u.kraus_ops[0], np.eye(3), atol=1e-12)


def test_choi_matrix():
    j = choi_matrix(identity_channel(3)).matrix
    phi = np.eye(3).ravel()
    assert np.allclose(j, np.outer(phi, phi))
    for seed in range(10):
        j = choi_matrix(random_channel(4, 3, seed)).matrix
        assert np.linalg.eigvalsh(j).min() > -1e-10
        assert np.trace(j).real == pytest.approx(4)


def test_choi_of_unitary_has_rank_one(rng):
    s = np.linalg.svd(choi_matrix(unitary_channel(haar_unitary(4, rng))).matrix, compute_uv=False)
    assert s[1] < 1e-10 * s[0]


def _brute_reshuffle(kraus, da, db):
    """Reshuffled Choi entries from the defining index sum."""
    out = np.zeros((da**4, db**4), dtype=complex)
    for oa, ob, ia, ib, oa2, ob2, ia2, ib2 in itertools.product(*[range(d) for d in (da, db) * 4]):
        val = sum(k[oa * db + ob, ia * db + ib] * np.conj(k[oa2 * db + ob2, ia2 * db + ib2]) for k in kraus)
        row = ((oa * da + ia) * da + oa2) * da + ia2
        col = ((ob * db + ib) * db + ob2) * db + ib2
        out[row, col] = val
    return out


def test_reshuffle_matches_index_sum():
    ch = random_channel(4, 2, 9, (2, 2))
    assert np.allclose(reshuffle(choi_matrix(ch)), _brute_reshuffle(ch.kraus_ops, 2, 2), atol=1e-14)


def test_swap_is_not_product():
    # SWAP = (1/2) sum_P P (x) P has operator Schmidt rank 4, so the channel has 16 equal values
    s = np.linalg.svd(_brute_reshuffle([SWAP], 2, 2), compute_uv=False)
    assert np.allclose(s, s[0])
    cert = is_product(swap_channel())
    assert not cert
    assert np.allclose(cert.schmidt_values, s)
    assert not is_product(cnot_channel())


def test_product_certificate_for_random_factors():
    for seed in range(20):
        ch = product_channel(random_channel(2, 3, (seed, 1)), random_channel(2, 3, (seed, 2)))
        cert = is_product(ch, 1e-8)
        assert cert.is_product
        assert cert.schmidt_values[1] < 1e-8 * cert.schmidt_values[0]


def test_is_product_needs_bipartition():
    with pytest.raises(ChannelError):
        is_product(identity_channel(4))


def test_dump_load_round_trip():
    ch = random_channel(4, 2, 3, (2, 2))
    back = load_channel(dump_channel(ch))
    assert back.subsystem_dims == (2, 2)
    assert all(np.array_equal(a, b) for a, b in zip(ch.kraus_ops, back.kraus_ops))


def test_gate_constants():
    assert np.array_equal(SWAP @ SWAP, np.eye(4))
    assert np.array_equal(CNOT @ np.array([0, 0, 1, 0]), np.array([0, 0, 0, 1]))
