import math

import numpy as np
import pytest

from xyfamily import qcore as q


def test_index_levels_roundtrip_msb_first():
    sp = q.QuditSpace((3, 2, 3))
    assert sp.index((1, 0, 2)) == 1 * 6 + 0 * 3 + 2
    for i in range(sp.dim):
        assert sp.index(sp.levels(i)) == i


def test_space_rejects_bad_dims():
    with pytest.raises(ValueError):
        q.QuditSpace((2, 1))
    with pytest.raises(q.DimensionError):
        q.QuditSpace.qubits(2).index((0, 2))


def test_rz_convention():
    np.testing.assert_allclose(q.rz(0.4).matrix, np.diag([np.exp(-0.2j), np.exp(0.2j)]))


def test_xy_matrix_elements():
    u = q.xy_unitary(0.3, math.pi).matrix
    assert u[0, 0] == 1 and u[3, 3] == 1
    assert np.isclose(u[1, 2], 1j * np.exp(0.3j))
    assert np.isclose(u[2, 1], 1j * np.exp(-0.3j))
    assert q.distance_global_phase(q.xy_unitary(0.0, math.pi), q.iswap()) < 1e-15


def test_xy02_column():
    beta = 0.9
    u = q.xy02_unitary(beta, math.pi)
    sp = u.space
    col = u.matrix[:, sp.index((1, 1))]
    assert np.isclose(col[sp.index((0, 2))], -1j * np.exp(-1j * beta))
    assert np.isclose(np.linalg.norm(col), 1.0)


def test_xy_composes_in_theta():
    a = q.xy_unitary(0.4, 0.7) @ q.xy_unitary(0.4, 1.1)
    assert q.distance_global_phase(a, q.xy_unitary(0.4, 1.8)) < 1e-14


def test_unitary_rejects_non_unitary():
    with pytest.raises(ValueError):
        q.Unitary(np.ones((2, 2)), q.QuditSpace.qubits(1))


def test_embed_matches_kron():
    rng = np.random.default_rng(1)
    g = q.Unitary(q.random_unitary(4, rng), q.QuditSpace.qubits(2))
    sp = q.QuditSpace.qubits(3)
    np.testing.assert_allclose(q.embed(g, [0, 1], sp).matrix, np.kron(g.matrix, np.eye(2)), atol=1e-14)
    # reversed site order equals swap-conjugated gate
    sw = q.swap().matrix
    np.testing.assert_allclose(q.embed(g, [1, 0], q.QuditSpace.qubits(2)).matrix, sw @ g.matrix @ sw, atol=1e-14)


def test_embed_errors():
    sp = q.QuditSpace.qubits(2)
    with pytest.raises(q.DimensionError):
        q.embed(q.cz(), [0, 0], sp)
    with pytest.raises(IndexError):
        q.embed(q.rz(0.1), [3], sp)


def test_lift_leaves_upper_levels_alone():
    g = q.lift(q.cz(), (3, 3))
    sp = g.space
    assert g.matrix[sp.index((1, 1)), sp.index((1, 1))] == -1
    assert g.matrix[sp.index((0, 2)), sp.index((0, 2))] == 1


def test_circuit_op_order_is_time_order():
    sp = q.QuditSpace.qubits(1)
    c = q.Circuit(sp, (q.Op("h", (), (0,)), q.Op("s", (), (0,))))
    expect = q.phase_s().matrix @ q.hadamard().matrix
    np.testing.assert_allclose(q.circuit_unitary(c).matrix, expect, atol=1e-15)
    with pytest.raises(KeyError):
        q.Circuit(sp, (q.Op("bogus", (), (0,)),))


def test_zz_phase_equals_gadget():
    sp = q.QuditSpace.qubits(2)
    c = q.Circuit(sp, (q.Op("cnot", (), (0, 1)), q.Op("rz", (0.8,), (1,)), q.Op("cnot", (), (0, 1))))
    assert q.distance_global_phase(q.circuit_unitary(c), q.zz_phase(0.8)) < 1e-15


def test_distance_properties():
    rng = np.random.default_rng(3)
    u = q.random_unitary(4, rng)
    assert q.distance_global_phase(u, np.exp(0.7j) * u) < 1e-15
    v = q.random_unitary(4, rng)
    d = q.distance_global_phase(u, v)
    assert 0 < d <= 1
    assert math.isclose(d, math.sqrt(1 - abs(np.trace(u.conj().T @ v)) / 4), rel_tol=1e-9)
    with pytest.raises(q.DimensionError):
        q.distance_global_phase(np.eye(2), np.eye(4))


def test_json_roundtrip():
    u = q.xy_unitary(0.2, 0.3)
    back = q.from_json(q.to_json(u))
    np.testing.assert_array_equal(back.matrix, u.matrix)
