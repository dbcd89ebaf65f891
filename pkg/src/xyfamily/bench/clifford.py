"""
Two-qubit Clifford group as Pauli tableaus.

A Pauli is a triple ``(x, z, p)`` of bit masks and a phase exponent, standing for
``i**p * prod_q X_q**x_q Z_q**z_q`` with bit ``q`` of each mask addressing qubit ``q``
(qubit 0 is the most significant tensor factor, as in :mod:`xyfamily.qcore`). A
tableau stores the images of ``X_0 .. X_{n-1}, Z_0 .. Z_{n-1}`` under conjugation
``P -> U P U^dag``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from ..qcore import Circuit, Op, QuditSpace, circuit_unitary, gate_matrix

Pauli = tuple[int, int, int]

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0 + 0j, -1.0])


def pauli_mul(a: Pauli, b: Pauli) -> Pauli:
    # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
    return a[0] ^ b[0], a[1] ^ b[1], (a[2] + b[2] + 2 * bin(a[1] & b[0]).count("1")) % 4


def pauli_matrix(p: Pauli, n: int) -> np.ndarray:
    x, z, ph = p
    factors = []
    for q in range(n):
        m = _I2
        if (x >> q) & 1:
            m = m @ _X
        if (z >> q) & 1:
            m = m @ _Z
        factors.append(m)
    return (1j**ph) * reduce(np.kron, factors)


def _generator(k: int, n: int) -> Pauli:
    return (1 << k, 0, 0) if k < n else (0, 1 << (k - n), 0)


def _commute(a: Pauli, b: Pauli) -> bool:
    return (bin(a[0] & b[1]).count("1") + bin(a[1] & b[0]).count("1")) % 2 == 0


def _hermitian(p: Pauli) -> bool:
    return p[2] % 2 == bin(p[0] & p[1]).count("1") % 2


@dataclass(frozen=True)
class CliffordElement:
    n: int
    images: tuple[Pauli, ...]

    def __post_init__(self):
        if len(self.images) != 2 * self.n:
            raise ValueError("tableau needs images of every X and Z generator")
        for p in self.images:
            if not _hermitian(p) or (p[0] == 0 and p[1] == 0):
                raise ValueError(f"image {p} is not a non-identity Hermitian Pauli")
        for i in range(2 * self.n):
            for j in range(i + 1, 2 * self.n):
                want = _commute(_generator(i, self.n), _generator(j, self.n))
                if _commute(self.images[i], self.images[j]) != want:
                    raise ValueError("tableau violates the symplectic condition")

    @classmethod
    def _trusted(cls, n: int, images: tuple) -> "CliffordElement":
        # products of valid tableaus are valid; skips the O(n^2) checks
        el = object.__new__(cls)
        object.__setattr__(el, "n", n)
        object.__setattr__(el, "images", images)
        return el

    @classmethod
    def identity(cls, n: int = 2) -> "CliffordElement":
        return cls(n, tuple(_generator(k, n) for k in range(2 * n)))

    @classmethod
    def from_unitary(cls, u, n: int = 2, atol: float = 1e-8) -> "CliffordElement":
        """Tableau of ``u``; raises ``ValueError`` if ``u`` is not Clifford."""
        u = np.asarray(u)
        d = 2**n
        paulis = [(x, z, 0) for x in range(d) for z in range(d)]
        mats = [pauli_matrix(p, n) for p in paulis]
        images = []
        for k in range(2 * n):
            g = u @ pauli_matrix(_generator(k, n), n) @ u.conj().T
            found = None
            for p, m in zip(paulis, mats):
                c = np.trace(m.conj().T @ g) / d
                if abs(abs(c) - 1) < atol:
                    ph = int(round(np.angle(c) / (math.pi / 2))) % 4
                    if abs(c - 1j**ph) < atol:
                        found = (p[0], p[1], ph)
                    break
            if found is None:
                raise ValueError("unitary does not map Paulis to Paulis (not a Clifford)")
            images.append(found)
        return cls(n, tuple(images))

    @classmethod
    def from_circuit(cls, c: Circuit) -> "CliffordElement":
        return cls.from_unitary(circuit_unitary(c).matrix, c.space.n_sites)

    def apply(self, p: Pauli) -> Pauli:
        x, z, ph = p
        out: Pauli = (0, 0, ph)
        for q in range(self.n):
            if (x >> q) & 1:
                out = pauli_mul(out, self.images[q])
        for q in range(self.n):
            if (z >> q) & 1:
                out = pauli_mul(out, self.images[self.n + q])
        return out

    def then(self, other: "CliffordElement") -> "CliffordElement":
        """Apply ``self`` first, then ``other``."""
        return CliffordElement._trusted(self.n, tuple(other.apply(p) for p in self.images))

    def inverse(self) -> "CliffordElement":
        n = self.n
        m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        for k, (x, z, _) in enumerate(self.images):
            for q in range(n):
                m[q, k] = (x >> q) & 1
                m[n + q, k] = (z >> q) & 1
        minv = _gf2_inverse(m)
        cand = []
        for k in range(2 * n):
            col = minv[:, k]
            x = sum(int(col[q]) << q for q in range(n))
            z = sum(int(col[n + q]) << q for q in range(n))
            cand.append((x, z, bin(x & z).count("1") % 4))
        cand = CliffordElement(n, tuple(cand))
        # cand then self is a Pauli frame (+-1 on each generator); fold its signs in
        frame = cand.then(self)
        fixed = tuple((c[0], c[1], (c[2] + f[2]) % 4) for c, f in zip(cand.images, frame.images))
        return CliffordElement(n, fixed)

    def unitary(self, native: str = "cz") -> np.ndarray:
        return circuit_unitary(self.to_circuit(native)).matrix

    def to_circuit(self, native: str = "iswap") -> Circuit:
        if self.n != 2:
            raise ValueError("native synthesis is tabulated for two qubits")
        ops = synthesis_table(native)[self.images]
        return Circuit(QuditSpace.qubits(2), ops)

    @property
    def key(self) -> tuple[Pauli, ...]:
        return self.images


def compose(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    """Clifford for ``a`` followed by ``b`` (unitary ``U_b U_a``)."""
    return a.then(b)


def invert(a: CliffordElement) -> CliffordElement:
    return a.inverse()


def _gf2_inverse(m: np.ndarray) -> np.ndarray:
    k = m.shape[0]
    aug = np.concatenate([m % 2, np.eye(k, dtype=np.uint8)], axis=1)
    for col in range(k):
        piv = next((r for r in range(col, k) if aug[r, col]), None)
        if piv is None:
            raise ValueError("tableau is singular over GF(2)")
        aug[[col, piv]] = aug[[piv, col]]
        for r in range(k):
            if r != col and aug[r, col]:
                aug[r] ^= aug[col]
    return aug[:, k:]


# -- group enumeration ------------------------------------------------------------

def _gate_clifford(label: str, params: tuple, targets: tuple) -> CliffordElement:
    c = Circuit(QuditSpace.qubits(2), (Op(label, params, targets),))
    return CliffordElement.from_circuit(c)


GENERATOR_OPS = (
    ("h", (), (0,)),
    ("h", (), (1,)),
    ("s", (), (0,)),
    ("s", (), (1,)),
    ("cz", (), (0, 1)),
)


@lru_cache(maxsize=1)
def clifford_group() -> tuple[CliffordElement, ...]:
    """All two-qubit Cliffords modulo global phase, by closure over {H, S, CZ}."""
    gens = [_gate_clifford(*g) for g in GENERATOR_OPS]
    start = CliffordElement.identity(2)
    seen = {start.key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for el in frontier:
            for g in gens:
                c = el.then(g)
                if c.key not in seen:
                    seen[c.key] = c
                    nxt.append(c)
        frontier = nxt
    return tuple(seen.values())


def sample_clifford(rng: np.random.Generator) -> CliffordElement:
    group = clifford_group()
    return group[int(rng.integers(len(group)))]


# -- native synthesis ---------------------------------------------------------------

GATE_COST = {"rz": 0, "rx": 1, "iswap": 10, "cz": 10}


def native_moves(native: str) -> list[tuple[str, tuple, tuple]]:
    if native not in ("iswap", "cz"):
        raise ValueError(f"native two-qubit gate must be 'iswap' or 'cz', got {native!r}")
    moves = []
    for q in (0, 1):
        for a in (math.pi / 2, -math.pi / 2, math.pi):
            moves.append(("rz", (a,), (q,)))
        for a in (math.pi / 2, -math.pi / 2):
            moves.append(("rx", (a,), (q,)))
    moves.append((native, (), (0, 1)))
    return moves


@lru_cache(maxsize=2)
def synthesis_table(native: str = "iswap") -> dict:
    """Cheapest native circuit per Clifford (Dijkstra; rz free, rx 1, two-qubit 10)."""
    moves = [(m, _gate_clifford(*m), GATE_COST[m[0]]) for m in native_moves(native)]
    start = CliffordElement.identity(2)
    best = {start.key: (0, ())}
    heap = [(0, 0, start.key, start)]
    counter = 1
    done = set()
    while heap:
        cost, _, key, el = heapq.heappop(heap)
        if key in done:
            continue
        done.add(key)
        path = best[key][1]
        for m, g, w in moves:
            c = el.then(g)
            nc = cost + w
            if c.key not in best or nc < best[c.key][0]:
                best[c.key] = (nc, path + (m,))
                heapq.heappush(heap, (nc, counter, c.key, c))
                counter += 1
    return {k: tuple(Op(*m) for m in v[1]) for k, v in best.items()}


def two_qubit_gate_counts(native: str = "iswap") -> dict[int, int]:
    """Histogram of native two-qubit gates per synthesized Clifford."""
    hist: dict[int, int] = {}
    for ops in synthesis_table(native).values():
        k = sum(o.label == native for o in ops)
        hist[k] = hist.get(k, 0) + 1
    return dict(sorted(hist.items()))
