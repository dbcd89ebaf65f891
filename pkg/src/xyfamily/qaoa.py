"""
Depth-one MaxCut QAOA on a line of qubits.

Cost layer: one phase gadget ``CNOT(u, v) · RZ_v(gamma * w) · CNOT(u, v)`` per edge,
i.e. ``exp(-i gamma w Z_u Z_v / 2)``. Mixer: ``RX(2 beta_mix)`` on every qubit.
Routing to a line uses a greedy swap insertion that fuses a swap with the phase
gadget of the pair it exchanges whenever that gadget is still outstanding.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np
from scipy.optimize import minimize

from .qcore import Circuit, Op, QuditSpace, circuit_unitary, distance_global_phase, embed, gate_matrix, rx

PI = math.pi
WEIGHT_SEED = 20200131


@dataclass(frozen=True)
class WeightedGraph:
    n_vertices: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        norm = []
        seen = set()
        for u, v, w in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) outside {self.n_vertices} vertices")
            if not math.isfinite(w):
                raise ValueError("edge weights must be finite")
            u, v = min(u, v), max(u, v)
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            norm.append((u, v, float(w)))
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def total_weight(self) -> float:
        return sum(w for *_, w in self.edges)

    def cut_value(self, bits: int) -> float:
        """Cut weight of the partition given by the bits of ``bits`` (vertex 0 = MSB)."""
        n = self.n_vertices
        side = [(bits >> (n - 1 - q)) & 1 for q in range(n)]
        return sum(w for u, v, w in self.edges if side[u] != side[v])

    def with_weights(self, weights) -> "WeightedGraph":
        return WeightedGraph(self.n_vertices, tuple((u, v, w) for (u, v, _), w in zip(self.edges, weights)))

    def with_random_weights(self, seed: int = WEIGHT_SEED) -> "WeightedGraph":
        rng = np.random.default_rng(seed)
        return self.with_weights(rng.uniform(0.0, 1.0, len(self.edges)))

    def to_dict(self) -> dict:
        return {"n_vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}


def ring_graph(n: int = 4) -> WeightedGraph:
    """Cycle 0-1-...-(n-1)-0, edges listed in cycle order."""
    return WeightedGraph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))


def complete_graph(n: int = 4) -> WeightedGraph:
    return WeightedGraph(n, tuple((u, v, 1.0) for u in range(n) for v in range(u + 1, n)))


GRAPHS = {"ring4": lambda: ring_graph(4), "k4": lambda: complete_graph(4)}


@dataclass(frozen=True)
class DeviceTopology:
    n_qubits: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(tuple(sorted(p)) for p in self.pairs))
        if self.n_qubits > 1 and len(self._components()) != 1:
            raise ValueError("topology is disconnected; circuits cannot be routed")

    @classmethod
    def line(cls, n: int = 4) -> "DeviceTopology":
        return cls(n, tuple((i, i + 1) for i in range(n - 1)))

    def neighbours(self, q: int) -> list[int]:
        return sorted({b for a, b in self.pairs if a == q} | {a for a, b in self.pairs if b == q})

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.pairs

    def _components(self):
        left = set(range(self.n_qubits))
        comps = []
        while left:
            start = left.pop()
            comp, todo = {start}, [start]
            while todo:
                for nb in self.neighbours(todo.pop()):
                    if nb in left:
                        left.discard(nb)
                        comp.add(nb)
                        todo.append(nb)
            comps.append(comp)
        return comps

    def next_hop(self, src: int, dst: int) -> int:
        """First step on a shortest path (lowest-index neighbour on ties)."""
        prev = {dst: None}
        queue = deque([dst])
        while queue:
            q = queue.popleft()
            for nb in self.neighbours(q):
                if nb not in prev:
                    prev[nb] = q
                    queue.append(nb)
        if src not in prev:
            raise ValueError(f"qubits {src} and {dst} are not connected")
        return prev[src]


@dataclass(frozen=True)
class QAOAAngles:
    gamma: float
    beta_mix: float


# -- logical circuit ---------------------------------------------------------------

def build_qaoa_circuit(graph: WeightedGraph, angles: QAOAAngles, p: int = 1) -> Circuit:
    if p != 1:
        raise ValueError("only depth-one QAOA is supported")
    ops = [Op("h", (), (q,)) for q in range(graph.n_vertices)]
    for u, v, w in graph.edges:
        ops += [Op("cnot", (), (u, v)), Op("rz", (angles.gamma * w,), (v,)), Op("cnot", (), (u, v))]
    ops += [Op("rx", (2 * angles.beta_mix,), (q,)) for q in range(graph.n_vertices)]
    return Circuit(QuditSpace.qubits(graph.n_vertices), tuple(ops))


# -- native two-qubit blocks ----------------------------------------------------------

def _cnot(c: int, t: int) -> list[Op]:
    return [Op("h", (), (t,)), Op("cz", (), (c, t)), Op("h", (), (t,))]


def _locals_to_ops(el, a: int, b: int) -> list[Op]:
    """Single-qubit Clifford pair (a bench tableau) as rz/rx ops on physical a, b."""
    from .bench.clifford import synthesis_table

    ops = synthesis_table("cz")[el.key]
    site = {0: a, 1: b}
    return [Op(o.label, o.params, (site[o.targets[0]],)) for o in ops]


@lru_cache(maxsize=1)
def _dcnot_from_iswap():
    """Local Cliffords (pre, post) with post · iSWAP · pre = CNOT(0,1) · CNOT(1,0)."""
    from .bench.clifford import CliffordElement, clifford_group
    from .qcore import cnot, iswap

    reversed_cnot = embed(cnot(), (1, 0), QuditSpace.qubits(2)).matrix
    target = CliffordElement.from_unitary(cnot().matrix @ reversed_cnot)
    isw = CliffordElement.from_unitary(iswap().matrix)
    for pre in clifford_group():
        if not _is_local(pre):
            continue
        post = pre.then(isw).inverse().then(target)
        if _is_local(post):
            return pre, post
    raise RuntimeError("no local dressing of iSWAP reaches the double CNOT")


def _is_local(el) -> bool:
    q0 = el.images[0], el.images[2]
    q1 = el.images[1], el.images[3]
    return all(p[0] & 2 == 0 and p[1] & 2 == 0 for p in q0) and all(p[0] & 1 == 0 and p[1] & 1 == 0 for p in q1)


def _dcnot(a: int, b: int, gateset: str) -> list[Op]:
    """CNOT(b, a) then CNOT(a, b) on physical qubits a, b."""
    if gateset == "cz_only":
        return _cnot(b, a) + _cnot(a, b)
    pre, post = _dcnot_from_iswap()
    return _locals_to_ops(pre, a, b) + [Op("xy", (0.0, PI), (a, b))] + _locals_to_ops(post, a, b)


def gadget_ops(a: int, b: int, phi: float) -> list[Op]:
    return _cnot(a, b) + [Op("rz", (phi,), (b,))] + _cnot(a, b)


def gadget_swap_ops(a: int, b: int, phi: float, gateset: str) -> list[Op]:
    """Phase gadget followed by SWAP, fused: CNOT(a,b), RZ_b, CNOT(b,a), CNOT(a,b)."""
    return _cnot(a, b) + [Op("rz", (phi,), (b,))] + _dcnot(a, b, gateset)


def swap_ops(a: int, b: int, gateset: str) -> list[Op]:
    return _cnot(a, b) + _dcnot(a, b, gateset)


# -- routing ------------------------------------------------------------------------

GATESETS = ("cz_only", "cz_and_xy")


@dataclass(frozen=True)
class CompiledCircuit:
    circuit: Circuit
    final_permutation: tuple[int, ...]  # logical qubit -> physical qubit
    counts: dict = field(default_factory=dict)
    gateset: str = "cz_only"

    def __post_init__(self):
        if sorted(self.final_permutation) != list(range(len(self.final_permutation))):
            raise ValueError("final permutation is not a bijection")
        want = {"CZ": self.circuit.count("cz"), "XY": self.circuit.count("xy")}
        if {k: v for k, v in self.counts.items() if v} != {k: v for k, v in want.items() if v}:
            raise ValueError("gate counts disagree with the circuit")

    def to_text(self) -> str:
        lines = [f"# gateset {self.gateset}", f"# final_permutation {list(self.final_permutation)}"]
        for o in self.circuit.ops:
            args = " ".join(f"{p:.12g}" for p in o.params)
            lines.append(f"{o.label} {' '.join(map(str, o.targets))}" + (f" | {args}" if args else ""))
        return "\n".join(lines) + "\n"


def _split_qaoa(circuit: Circuit):
    """Leading single-qubit layer, gadget list (u, v, phi), trailing single-qubit layer."""
    ops = circuit.ops
    i = 0
    head, gadgets, tail = [], [], []
    while i < len(ops) and len(ops[i].targets) == 1 and not gadgets:
        head.append(ops[i])
        i += 1
    while i + 2 < len(ops) and ops[i].label == "cnot":
        a, b, c = ops[i], ops[i + 1], ops[i + 2]
        if not (b.label == "rz" and c.label == "cnot" and a.targets == c.targets and b.targets == (a.targets[1],)):
            break
        gadgets.append((a.targets[0], a.targets[1], b.params[0]))
        i += 3
    tail = list(ops[i:])
    if any(len(o.targets) != 1 for o in tail):
        raise ValueError("route expects a single-qubit layer, phase gadgets, then a single-qubit layer")
    return head, gadgets, tail


def route(circuit: Circuit, topology: DeviceTopology | None = None, gateset: str = "cz_only") -> CompiledCircuit:
    """Place a QAOA cost layer on ``topology`` with SWAPs and synthesize natively.

    Edges are handled in circuit order. An edge whose qubits already sit on a coupled
    pair becomes an outstanding gadget. Otherwise its endpoints walk toward each
    other one SWAP at a time; between moving the first or the second endpoint the
    router takes the SWAP that exchanges an outstanding gadget's pair (fusing the
    two), and the first endpoint when both or neither qualify. Outstanding gadgets
    never fused are emitted on their own.
    """
    if gateset not in GATESETS:
        raise ValueError(f"gateset must be one of {GATESETS}, got {gateset!r}")
    n = circuit.space.n_sites
    topology = topology or DeviceTopology.line(n)
    if topology.n_qubits < n:
        raise ValueError("topology has fewer qubits than the circuit")
    head, gadgets, tail = _split_qaoa(circuit)
    phys = list(range(n))  # logical -> physical
    at = {p: q for q, p in enumerate(phys)}  # physical -> logical

    # events: ("gadget", logical_pair, phi, physical_pair) or ("swap", physical_pair, fused_gadget_or_None)
    events: list = []
    outstanding: dict = {}  # frozenset(logical pair) -> event index

    def do_swap(pa: int, pb: int):
        la, lb = at[pa], at[pb]
        key = frozenset((la, lb))
        fused = None
        if key in outstanding:
            idx = outstanding.pop(key)
            ev = events[idx]
            events[idx] = None
            # gadget acts on logical (u, v); orient it to the physical pair now
            u = ev[1][0]
            fused = (phys[u], phys[ev[1][1]], ev[2])
        events.append(("swap", (pa, pb), fused))
        phys[la], phys[lb] = pb, pa
        at[pa], at[pb] = lb, la

    for u, v, phi in gadgets:
        while not topology.adjacent(phys[u], phys[v]):
            cand = []
            for mover, other in ((u, v), (v, u)):
                step = topology.next_hop(phys[mover], phys[other])
                cand.append((phys[mover], step))
            fuses = [frozenset((at[a], at[b])) in outstanding for a, b in cand]
            a, b = cand[1] if (fuses[1] and not fuses[0]) else cand[0]
            do_swap(a, b)
        outstanding[frozenset((u, v))] = len(events)
        events.append(("gadget", (u, v), phi, (phys[u], phys[v])))

    ops: list[Op] = [Op(o.label, o.params, (o.targets[0],)) for o in head]
    for ev in events:
        if ev is None:
            continue
        if ev[0] == "gadget":
            ops += gadget_ops(ev[3][0], ev[3][1], ev[2])
        elif ev[2] is None:
            ops += swap_ops(*ev[1], gateset)
        else:
            ops += gadget_swap_ops(ev[2][0], ev[2][1], ev[2][2], gateset)
    ops += [Op(o.label, o.params, (phys[o.targets[0]],)) for o in tail]
    out = Circuit(QuditSpace.qubits(topology.n_qubits), tuple(ops))
    counts = {"CZ": out.count("cz")}
    if out.count("xy"):
        counts["XY"] = out.count("xy")
    return CompiledCircuit(out, tuple(phys), counts, gateset)


def permutation_matrix(perm, n: int) -> np.ndarray:
    """Unitary sending logical qubit ``q`` to physical position ``perm[q]``."""
    d = 2**n
    m = np.zeros((d, d))
    for x in range(d):
        bits = [(x >> (n - 1 - q)) & 1 for q in range(n)]
        y = 0
        for q in range(n):
            y |= bits[q] << (n - 1 - perm[q])
        m[y, x] = 1
    return m


def verify_compiled(compiled: CompiledCircuit, graph: WeightedGraph, angles: QAOAAngles) -> float:
    logical = circuit_unitary(build_qaoa_circuit(graph, angles)).matrix
    n = graph.n_vertices
    c = circuit_unitary(compiled.circuit).matrix
    p = permutation_matrix(compiled.final_permutation, n)
    return distance_global_phase(p.T @ c, logical)


def gate_counts(graph: WeightedGraph, gateset: str, angles: QAOAAngles | None = None) -> dict:
    angles = angles or QAOAAngles(0.3, 0.2)
    return route(build_qaoa_circuit(graph, angles), gateset=gateset).counts


# -- expectation values ----------------------------------------------------------------

def cut_values(graph: WeightedGraph) -> np.ndarray:
    return np.array([graph.cut_value(x) for x in range(2**graph.n_vertices)])


def qaoa_state(graph: WeightedGraph, angles: QAOAAngles) -> np.ndarray:
    u = circuit_unitary(build_qaoa_circuit(graph, angles)).matrix
    psi = np.zeros(2**graph.n_vertices, dtype=complex)
    psi[0] = 1
    return u @ psi


def expected_cut(graph: WeightedGraph, angles: QAOAAngles) -> float:
    probs = np.abs(qaoa_state(graph, angles)) ** 2
    return float(probs @ cut_values(graph))


def expected_cut_enumeration(graph: WeightedGraph, angles: QAOAAngles) -> float:
    """Independent route: diagonal cost phases on all bitstrings, then the mixer."""
    n = graph.n_vertices
    amps = np.empty(2**n, dtype=complex)
    for x in range(2**n):
        z = [1 - 2 * ((x >> (n - 1 - q)) & 1) for q in range(n)]
        phase = sum(w * z[u] * z[v] for u, v, w in graph.edges)
        amps[x] = np.exp(-0.5j * angles.gamma * phase) / math.sqrt(2**n)
    mixer = reduce(np.kron, [rx(2 * angles.beta_mix).matrix] * n)
    probs = np.abs(mixer @ amps) ** 2
    return float(sum(probs[x] * graph.cut_value(x) for x in range(2**n)))


def sampled_cut(graph: WeightedGraph, angles: QAOAAngles, shots: int, rng: np.random.Generator) -> float:
    probs = np.abs(qaoa_state(graph, angles)) ** 2
    counts = rng.multinomial(shots, probs / probs.sum())
    return float(counts @ cut_values(graph) / shots)


def noisy_expected_cut(compiled: CompiledCircuit, graph: WeightedGraph, model) -> float:
    """Density-matrix execution of a compiled circuit under a bench noise model."""
    from .bench.noise import decoherence_superop

    n = compiled.circuit.space.n_sites
    d = 2**n
    rho = np.zeros((d, d), dtype=complex)
    rho[0, 0] = 1
    for op in compiled.circuit.ops:
        u = embed(gate_matrix(op), op.targets, compiled.circuit.space).matrix
        rho = u @ rho @ u.conj().T
        s = decoherence_superop(model, model.duration(op.label), n)
        rho = (s @ rho.reshape(-1)).reshape(d, d)
    p = permutation_matrix(compiled.final_permutation, n)
    probs = np.real(np.diag(p.T @ rho @ p))
    return float(probs @ cut_values(graph))


def landscape(graph: WeightedGraph, gamma_grid, beta_grid, shots: int | None = None, seed=None) -> np.ndarray:
    """``<C>`` on the grid, rows indexed by gamma; exact unless ``shots`` is given.

    In shot mode every grid point owns a child stream of ``seed``.
    """
    g = np.asarray(gamma_grid, float)
    b = np.asarray(beta_grid, float)
    if g.size == 0 or b.size == 0:
        raise ValueError("landscape grids must be non-empty")
    out = np.empty((g.size, b.size))
    streams = np.random.SeedSequence(seed).spawn(g.size * b.size) if shots is not None else None
    for i, gam in enumerate(g):
        for j, bet in enumerate(b):
            ang = QAOAAngles(float(gam), float(bet))
            if shots is None:
                out[i, j] = expected_cut(graph, ang)
            else:
                out[i, j] = sampled_cut(graph, ang, shots, np.random.default_rng(streams[i * b.size + j]))
    return out


def optimal_angles(graph: WeightedGraph, n_grid: int = 41) -> tuple[QAOAAngles, float]:
    """Grid maximum of the exact landscape, refined by a local optimizer."""
    gam = np.linspace(0, 2 * PI, n_grid, endpoint=False)
    bet = np.linspace(0, PI, n_grid, endpoint=False)
    grid = landscape(graph, gam, bet)
    i, j = np.unravel_index(np.argmax(grid), grid.shape)
    res = minimize(lambda x: -expected_cut(graph, QAOAAngles(*x)), [gam[i], bet[j]], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
    best = QAOAAngles(float(res.x[0]), float(res.x[1]))
    return best, expected_cut(graph, best)
