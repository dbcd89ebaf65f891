"""
Dense linear algebra over small qudit spaces, the gate zoo and distance metrics.

Conventions used throughout the package:

* basis states are indexed in mixed radix with site 0 as the most significant digit,
  so ``|01>`` on two qubits is index 1 (site 0 in ``|0>``, site 1 in ``|1>``);
* ``rz(phi) = diag(exp(-i phi/2), exp(+i phi/2))``;
* a :class:`Circuit` lists operations in application order, so the first op acts on
  the state first and ``circuit_unitary`` returns ``U_n ... U_2 U_1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

UNITARITY_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when operator and space dimensions do not agree."""


@dataclass(frozen=True)
class QuditSpace:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ValueError("a space needs at least one site")
        if any(d < 2 for d in dims):
            raise ValueError(f"every site dimension must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def qubits(cls, n: int) -> "QuditSpace":
        return cls((2,) * n)

    @classmethod
    def qutrits(cls, n: int) -> "QuditSpace":
        return cls((3,) * n)

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, levels: Sequence[int]) -> int:
        """Basis index of the product state with the given per-site levels."""
        if len(levels) != self.n_sites:
            raise DimensionError(f"expected {self.n_sites} levels, got {len(levels)}")
        idx = 0
        for lvl, d in zip(levels, self.dims):
            if not 0 <= lvl < d:
                raise DimensionError(f"level {lvl} out of range for a {d}-level site")
            idx = idx * d + lvl
        return idx

    def levels(self, index: int) -> tuple[int, ...]:
        out = []
        for d in reversed(self.dims):
            out.append(index % d)
            index //= d
        return tuple(reversed(out))

    def subspace_indices(self, max_level: int = 1) -> np.ndarray:
        """Indices of basis states with every site at level <= ``max_level``."""
        return np.array([i for i in range(self.dim) if max(self.levels(i)) <= max_level])


@dataclass(frozen=True)
class Unitary:
    """A square complex matrix tagged with the qudit space it acts on."""

    matrix: np.ndarray
    space: QuditSpace
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (self.space.dim, self.space.dim):
            raise DimensionError(f"matrix shape {m.shape} does not match space {self.space.dims}")
        if self.check:
            err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
            if err > UNITARITY_TOL * max(1, m.shape[0]):
                raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3g})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __matmul__(self, other: "Unitary") -> "Unitary":
        if self.space != other.space:
            raise DimensionError("cannot multiply operators on different spaces")
        return Unitary(self.matrix @ other.matrix, self.space, check=False)

    @property
    def dag(self) -> "Unitary":
        return Unitary(self.matrix.conj().T, self.space, check=False)

    @property
    def shape(self):
        return self.matrix.shape


def _qubit(m) -> Unitary:
    return Unitary(np.asarray(m, dtype=complex), QuditSpace((2,)))


def _two_qubit(m) -> Unitary:
    return Unitary(np.asarray(m, dtype=complex), QuditSpace((2, 2)))


def identity(space: QuditSpace) -> Unitary:
    return Unitary(np.eye(space.dim), space, check=False)


# -- single-qubit gates -----------------------------------------------------------

def rz(phi: float) -> Unitary:
    return _qubit(np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)]))


def rx(phi: float) -> Unitary:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return _qubit([[c, -1j * s], [-1j * s, c]])


def ry(phi: float) -> Unitary:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return _qubit([[c, -s], [s, c]])


def rx_phased(beta: float, phi: float) -> Unitary:
    """X rotation about the equatorial axis at azimuth ``beta``.

    Equals the time-ordered sequence rz(-beta), rx(phi), rz(beta), i.e. the matrix
    ``rz(beta) @ rx(phi) @ rz(-beta)``.
    """
    return rz(beta) @ rx(phi) @ rz(-beta)


def hadamard() -> Unitary:
    return _qubit(np.array([[1, 1], [1, -1]]) / np.sqrt(2))


def phase_s() -> Unitary:
    return _qubit(np.diag([1, 1j]))


def pauli_x() -> Unitary:
    return _qubit([[0, 1], [1, 0]])


def pauli_y() -> Unitary:
    return _qubit([[0, -1j], [1j, 0]])


def pauli_z() -> Unitary:
    return _qubit(np.diag([1, -1]))


# -- two-qubit gates -------------------------------------------------------------

def xy_unitary(beta: float, theta: float) -> Unitary:
    """The XY(beta, theta) rotation in the |01>, |10> subspace."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    m = np.eye(4, dtype=complex)
    m[1, 1] = m[2, 2] = c
    m[1, 2] = 1j * s * np.exp(1j * beta)
    m[2, 1] = 1j * s * np.exp(-1j * beta)
    return _two_qubit(m)


def iswap() -> Unitary:
    return xy_unitary(0.0, np.pi)


def sqrt_iswap() -> Unitary:
    return xy_unitary(0.0, np.pi / 2)


def cphase(theta: float) -> Unitary:
    return _two_qubit(np.diag([1, 1, 1, np.exp(1j * theta)]))


def cz() -> Unitary:
    return _two_qubit(np.diag([1, 1, 1, -1]))


def cnot() -> Unitary:
    """Controlled-NOT with site 0 as control."""
    return _two_qubit([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])


def swap() -> Unitary:
    return _two_qubit([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def zz_phase(phi: float) -> Unitary:
    """exp(-i phi/2 Z⊗Z), the action of a CNOT-RZ(phi)-CNOT phase gadget."""
    return _two_qubit(np.diag(np.exp(-0.5j * phi * np.array([1, -1, -1, 1]))))


def ccphase(theta: float) -> Unitary:
    d = np.ones(8, dtype=complex)
    d[7] = np.exp(1j * theta)
    return Unitary(np.diag(d), QuditSpace.qubits(3))


# -- qutrit exchange gates -------------------------------------------------------

def _qutrit_exchange(beta: float, theta: float, lo: tuple[int, int], hi: tuple[int, int]) -> Unitary:
    space = QuditSpace((3, 3))
    a, b = space.index(lo), space.index(hi)
    h = np.zeros((9, 9), dtype=complex)
    h[a, b] = np.exp(1j * beta)
    h[b, a] = np.exp(-1j * beta)
    # closed form of exp(-i theta/2 h); h squares to the projector on {a, b}
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    m = np.eye(9, dtype=complex)
    m[a, a] = m[b, b] = c
    m -= 1j * s * h
    return Unitary(m, space)


def xy02_unitary(beta: float, theta: float) -> Unitary:
    """Exchange between |11> and |02> of two transmons (qutrits)."""
    return _qutrit_exchange(beta, theta, (1, 1), (0, 2))


def xy20_unitary(beta: float, theta: float) -> Unitary:
    """Exchange between |11> and |20> of two transmons (qutrits)."""
    return _qutrit_exchange(beta, theta, (1, 1), (2, 0))


def qutrit_exchange_generator(beta: float, kind: str = "02") -> np.ndarray:
    """Hermitian generator for the 11/02 (or 11/20) exchange, used by oracles."""
    hi = (0, 2) if kind == "02" else (2, 0)
    space = QuditSpace((3, 3))
    a, b = space.index((1, 1)), space.index(hi)
    h = np.zeros((9, 9), dtype=complex)
    h[a, b] = np.exp(1j * beta)
    h[b, a] = np.exp(-1j * beta)
    return h


# -- embedding and circuits ------------------------------------------------------

def lift(gate: Unitary, dims: Sequence[int]) -> Unitary:
    """Pad a qubit gate to act on higher-dimensional sites, identity above |1>."""
    dims = tuple(dims)
    if gate.space.dims == dims:
        return gate
    if len(dims) != gate.space.n_sites or any(g > d for g, d in zip(gate.space.dims, dims)):
        raise DimensionError(f"cannot lift {gate.space.dims} onto {dims}")
    small, big = gate.space, QuditSpace(dims)
    m = np.eye(big.dim, dtype=complex)
    idx = [big.index(small.levels(i)) for i in range(small.dim)]
    m[np.ix_(idx, idx)] = gate.matrix
    return Unitary(m, big, check=False)


def embed(gate: Unitary, sites: Sequence[int], space: QuditSpace) -> Unitary:
    """Act with ``gate`` on ``sites`` of ``space`` (in that order), identity elsewhere."""
    sites = list(sites)
    n = space.n_sites
    if len(set(sites)) != len(sites):
        raise DimensionError(f"repeated site in {sites}")
    for s in sites:
        if not 0 <= s < n:
            raise IndexError(f"site {s} out of range for {n} sites")
    target_dims = tuple(space.dims[s] for s in sites)
    if gate.space.dims != target_dims:
        raise DimensionError(f"gate dims {gate.space.dims} do not match sites dims {target_dims}")
    k = len(sites)
    rest = [s for s in range(n) if s not in sites]
    g = gate.matrix.reshape(target_dims * 2)
    # contract gate input legs against the listed sites of an identity tensor
    full = np.eye(space.dim, dtype=complex).reshape(space.dims * 2)
    out = np.tensordot(g, full, axes=(list(range(k, 2 * k)), sites))
    # out axes: gate outputs (k), then the remaining row axes of `full` in order, then columns
    order = sites + rest
    perm = [order.index(s) for s in range(n)] + list(range(n, 2 * n))
    out = np.transpose(out, perm)
    return Unitary(out.reshape(space.dim, space.dim), space, check=False)


@dataclass(frozen=True)
class Op:
    label: str
    params: tuple[float, ...]
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))


# label -> (constructor taking params, number of target sites)
GATES: dict[str, tuple[Callable[..., Unitary], int]] = {
    "id": (lambda: _qubit(np.eye(2)), 1),
    "x": (pauli_x, 1),
    "y": (pauli_y, 1),
    "z": (pauli_z, 1),
    "h": (hadamard, 1),
    "s": (phase_s, 1),
    "sdg": (lambda: phase_s().dag, 1),
    "rz": (rz, 1),
    "rx": (rx, 1),
    "ry": (ry, 1),
    "rx_phased": (rx_phased, 1),
    "cz": (cz, 2),
    "cnot": (cnot, 2),
    "swap": (swap, 2),
    "iswap": (iswap, 2),
    "cphase": (cphase, 2),
    "zz": (zz_phase, 2),
    "xy": (xy_unitary, 2),
    "xy02": (xy02_unitary, 2),
    "xy20": (xy20_unitary, 2),
    "ccphase": (ccphase, 3),
}


def gate_matrix(op: Op) -> Unitary:
    try:
        ctor, arity = GATES[op.label]
    except KeyError:
        raise KeyError(f"unknown gate label {op.label!r}") from None
    if len(op.targets) != arity:
        raise DimensionError(f"{op.label} acts on {arity} sites, got targets {op.targets}")
    return ctor(*op.params)


@dataclass(frozen=True)
class Circuit:
    space: QuditSpace
    ops: tuple[Op, ...] = ()

    def __post_init__(self):
        ops = tuple(o if isinstance(o, Op) else Op(*o) for o in self.ops)
        for o in ops:
            if o.label not in GATES:
                raise KeyError(f"unknown gate label {o.label!r}")
            if any(not 0 <= t < self.space.n_sites for t in o.targets):
                raise IndexError(f"op {o} targets a site outside {self.space.n_sites} sites")
        object.__setattr__(self, "ops", ops)

    def append(self, label: str, params: Sequence[float] = (), targets: Sequence[int] = ()) -> "Circuit":
        return Circuit(self.space, self.ops + (Op(label, tuple(params), tuple(targets)),))

    def extend(self, ops) -> "Circuit":
        return Circuit(self.space, self.ops + tuple(ops))

    def __len__(self):
        return len(self.ops)

    def count(self, label: str) -> int:
        return sum(o.label == label for o in self.ops)


def circuit_unitary(c: Circuit) -> Unitary:
    u = np.eye(c.space.dim, dtype=complex)
    for op in c.ops:
        g = gate_matrix(op)
        g = lift(g, [c.space.dims[t] for t in op.targets])
        u = embed(g, op.targets, c.space).matrix @ u
    return Unitary(u, c.space, check=False)


def distance_global_phase(u, v) -> float:
    """sqrt(1 - |tr(U^dag V)| / d); zero iff U and V agree up to a global phase."""
    a, b = np.asarray(u), np.asarray(v)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    d = a.shape[0]
    tr = np.trace(a.conj().T @ b)
    if abs(tr) == 0.0:
        return 1.0
    # for unitaries, 1 - |tr|/d == ||A - e^{-i arg tr} B||_F^2 / (2d); the norm form
    # avoids the cancellation that floors the direct formula near 1e-8
    diff = a - (np.conj(tr) / abs(tr)) * b
    return float(min(1.0, np.linalg.norm(diff) / np.sqrt(2 * d)))


def restrict(u, space: QuditSpace, max_level: int = 1) -> np.ndarray:
    """Block of ``u`` on the subspace with every site at level <= ``max_level``."""
    idx = space.subspace_indices(max_level)
    return np.asarray(u)[np.ix_(idx, idx)]


def number_operator(space: QuditSpace) -> np.ndarray:
    """Total excitation number, diagonal in the computational basis."""
    return np.diag([float(sum(space.levels(i))) for i in range(space.dim)])


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    return expm(-1j * t * np.asarray(h))


# -- debug dump ---------------------------------------------------------------

def to_json(u) -> str:
    """Row-major JSON array of [re, im] pairs."""
    m = np.asarray(u)
    return json.dumps([[[float(z.real), float(z.imag)] for z in row] for row in m])


def from_json(text: str, space: QuditSpace | None = None) -> Unitary:
    rows = json.loads(text)
    m = np.array([[complex(re, im) for re, im in row] for row in rows])
    if space is None:
        n = int(round(np.log2(m.shape[0])))
        space = QuditSpace.qubits(n)
    return Unitary(m, space, check=False)
