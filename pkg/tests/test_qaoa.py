import math

import numpy as np
import pytest

from xyfamily import qaoa as qa
from xyfamily.bench import NoiseModel

PI = math.pi


def test_graph_validation():
    with pytest.raises(ValueError):
        qa.WeightedGraph(3, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        qa.WeightedGraph(3, ((0, 1, 1.0), (1, 0, 1.0)))
    with pytest.raises(ValueError):
        qa.WeightedGraph(3, ((0, 5, 1.0),))


def test_cut_values_msb_convention():
    g = qa.ring_graph(4)
    assert g.cut_value(0b0101) == 4.0
    assert g.cut_value(0b0011) == 2.0
    assert max(qa.cut_values(qa.complete_graph(4))) == 4.0


def test_random_weights_are_reproducible():
    a = qa.ring_graph().with_random_weights()
    b = qa.ring_graph().with_random_weights(qa.WEIGHT_SEED)
    assert a == b
    assert all(0 <= w < 1 for *_, w in a.edges)


def test_topology():
    t = qa.DeviceTopology.line(4)
    assert t.adjacent(1, 2) and not t.adjacent(0, 2)
    assert t.next_hop(0, 3) == 1
    with pytest.raises(ValueError):
        qa.DeviceTopology(4, ((0, 1), (2, 3)))


@pytest.mark.parametrize("graph", ["ring4", "k4"])
@pytest.mark.parametrize("gateset", qa.GATESETS)
def test_routed_circuits_verify_with_random_weights(graph, gateset):
    g = qa.GRAPHS[graph]().with_random_weights(3)
    ang = qa.QAOAAngles(0.77, -0.41)
    comp = qa.route(qa.build_qaoa_circuit(g, ang), gateset=gateset)
    assert qa.verify_compiled(comp, g, ang) < 1e-10
    # only nearest-neighbour two-qubit gates survive routing
    topo = qa.DeviceTopology.line(4)
    assert all(topo.adjacent(*o.targets) for o in comp.circuit.ops if len(o.targets) == 2)


def test_unknown_gateset():
    g = qa.ring_graph()
    with pytest.raises(ValueError):
        qa.route(qa.build_qaoa_circuit(g, qa.QAOAAngles(0.1, 0.1)), gateset="cnot")


def test_compiled_text_dump():
    g = qa.ring_graph()
    comp = qa.route(qa.build_qaoa_circuit(g, qa.QAOAAngles(0.1, 0.2)), gateset="cz_and_xy")
    text = comp.to_text()
    assert text.startswith("# gateset cz_and_xy")
    assert sum(line.startswith("xy ") for line in text.splitlines()) == 2


def test_unit_ring_landscape_extremes():
    g = qa.ring_graph()
    assert math.isclose(qa.expected_cut(g, qa.QAOAAngles(0.0, 0.3)), 2.0, abs_tol=1e-12)
    best, val = qa.optimal_angles(g, n_grid=17)
    assert math.isclose(val, 3.0, abs_tol=1e-9)


def test_sampled_landscape_seeded():
    g = qa.complete_graph()
    gam, bet = np.linspace(0, PI, 3), np.linspace(0, PI / 2, 2)
    a = qa.landscape(g, gam, bet, shots=300, seed=9)
    b = qa.landscape(g, gam, bet, shots=300, seed=9)
    np.testing.assert_array_equal(a, b)
    exact = qa.landscape(g, gam, bet)
    assert np.max(np.abs(a - exact)) < 0.5
    with pytest.raises(ValueError):
        qa.landscape(g, [], bet)


def test_noisy_execution_degrades_toward_half_total_weight():
    g = qa.ring_graph()
    best, val = qa.optimal_angles(g, n_grid=17)
    comp = qa.route(qa.build_qaoa_circuit(g, best), gateset="cz_only")
    noiseless = qa.noisy_expected_cut(comp, g, NoiseModel())
    assert math.isclose(noiseless, val, abs_tol=1e-9)
    noisy = qa.noisy_expected_cut(comp, g, NoiseModel(t1=(24e-6,) * 4, t2=(13e-6,) * 4))
    assert g.total_weight / 2 < noisy < val
