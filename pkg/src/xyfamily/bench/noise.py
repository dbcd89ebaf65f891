"""Incoherent noise: T1/T2 channels, depolarizing, readout assignment."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ..qcore import QuditSpace

DEFAULT_DURATIONS = {
    # virtual Z rotations are frame updates
    "rz": 0.0,
    "s": 0.0,
    "sdg": 0.0,
    "z": 0.0,
    "id": 0.0,
    "rx": 40e-9,
    "ry": 40e-9,
    "x": 40e-9,
    "y": 40e-9,
    "h": 40e-9,
    "rx_phased": 40e-9,
    "iswap": 240e-9,
    "cz": 240e-9,
    "xy": 152e-9,
}


@dataclass(frozen=True)
class NoiseModel:
    """Per-qubit T1/T2 plus optional per-gate depolarizing and readout error.

    ``t1``/``t2`` of ``None`` turn decoherence off. ``depolarizing`` maps a gate label
    to the probability ``lam`` of the channel ``rho -> (1 - lam) rho + lam I/d`` on
    the gate's support, applied after the gate. The key ``"clifford"`` adds a
    gate-independent two-qubit depolarizing step after every benchmarking Clifford.
    """

    t1: tuple[float, ...] | None = None
    t2: tuple[float, ...] | None = None
    durations: dict = field(default_factory=lambda: dict(DEFAULT_DURATIONS))
    depolarizing: dict = field(default_factory=dict)
    readout: tuple[float, float] | None = None

    def __post_init__(self):
        if (self.t1 is None) != (self.t2 is None):
            raise ValueError("give both t1 and t2 or neither")
        if self.t1 is not None:
            if len(self.t1) != len(self.t2):
                raise ValueError("t1 and t2 need one entry per qubit")
            for a, b in zip(self.t1, self.t2):
                if a <= 0 or b <= 0:
                    raise ValueError("coherence times must be positive")
                if b > 2 * a * (1 + 1e-12):
                    raise ValueError(f"T2 = {b} exceeds 2*T1 = {2 * a}")
        for k, lam in self.depolarizing.items():
            if not 0 <= lam <= 1:
                raise ValueError(f"depolarizing probability for {k!r} outside [0, 1]")
        if self.readout is not None and not all(0 <= p <= 1 for p in self.readout):
            raise ValueError("readout error probabilities must lie in [0, 1]")

    @classmethod
    def table1(cls, **kw) -> "NoiseModel":
        """Coherence under flux modulation: T1 = 24/26 us, T2* = 13/14 us."""
        return cls(t1=(24e-6, 26e-6), t2=(13e-6, 14e-6), **kw)

    def duration(self, label: str) -> float:
        return float(self.durations.get(label, 0.0))

    @property
    def has_decoherence(self) -> bool:
        return self.t1 is not None


def depolarizing_for_fidelity(f_avg: float, d: int = 4) -> float:
    """Depolarizing probability whose average gate fidelity is ``f_avg``."""
    return (1 - f_avg) * d / (d - 1)


# -- density matrices ---------------------------------------------------------------

class DensityMatrix:
    __slots__ = ("space", "elements")

    def __init__(self, space: QuditSpace, elements, check: bool = True):
        m = np.array(elements, dtype=complex)
        if m.shape != (space.dim, space.dim):
            raise ValueError(f"density matrix shape {m.shape} does not fit space of dim {space.dim}")
        if check:
            if not np.allclose(m, m.conj().T, atol=1e-12):
                raise ValueError("density matrix is not Hermitian")
            if abs(np.trace(m) - 1) > 1e-12:
                raise ValueError(f"density matrix trace {np.trace(m).real:.15g} != 1")
            if np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min() < -1e-10:
                raise ValueError("density matrix is not positive semidefinite")
        m.setflags(write=False)
        self.space = space
        self.elements = m

    @classmethod
    def pure(cls, psi, space: QuditSpace) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(space, np.outer(psi, psi.conj()))

    @classmethod
    def ground(cls, space: QuditSpace) -> "DensityMatrix":
        psi = np.zeros(space.dim)
        psi[0] = 1
        return cls.pure(psi, space)

    def evolve(self, u) -> "DensityMatrix":
        u = np.asarray(u)
        return DensityMatrix(self.space, u @ self.elements @ u.conj().T, check=False)

    def populations(self) -> np.ndarray:
        return np.clip(np.real(np.diag(self.elements)), 0.0, None)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.elements, dtype=dtype)


# -- channels as Kraus lists and superoperators -----------------------------------

def t1t2_kraus(t1: float, t2: float, duration: float) -> list[np.ndarray]:
    """Amplitude damping then pure dephasing; coherences decay as exp(-t/T2)."""
    gamma = 1 - math.exp(-duration / t1)
    rate_phi = 1 / t2 - 1 / (2 * t1)
    c = math.exp(-duration * rate_phi)
    ad = [np.array([[1, 0], [0, math.sqrt(1 - gamma)]]), np.array([[0, math.sqrt(gamma)], [0, 0]])]
    dp = [math.sqrt((1 + c) / 2) * np.eye(2), math.sqrt((1 - c) / 2) * np.diag([1.0, -1.0])]
    return [b @ a for b in dp for a in ad]


def kraus_to_superop(kraus) -> np.ndarray:
    """Row-major vectorisation: vec(K rho K^dag) = (K ⊗ K*) vec(rho)."""
    return sum(np.kron(k, k.conj()) for k in kraus)


def unitary_superop(u) -> np.ndarray:
    u = np.asarray(u)
    return np.kron(u, u.conj())


def depolarizing_superop(lam: float, d: int) -> np.ndarray:
    eye = np.eye(d).reshape(-1)
    return (1 - lam) * np.eye(d * d) + lam / d * np.outer(eye, eye)


def local_superop(per_qubit: list[np.ndarray]) -> np.ndarray:
    """Tensor single-qubit superoperators into the row-major joint vectorisation."""
    n = len(per_qubit)
    # (ij),(kl) per qubit -> reorder to (i1..in j1..jn),(k1..kn l1..ln)
    s = reduce(np.kron, per_qubit).reshape([2] * (4 * n))
    ins = [2 * q for q in range(n)] + [2 * q + 1 for q in range(n)]
    outs = [2 * n + 2 * q for q in range(n)] + [2 * n + 2 * q + 1 for q in range(n)]
    return s.transpose(ins + outs).reshape(4**n, 4**n)


def decoherence_superop(model: NoiseModel, duration: float, n_qubits: int) -> np.ndarray:
    d2 = 4**n_qubits
    if not model.has_decoherence or duration == 0:
        return np.eye(d2)
    if len(model.t1) < n_qubits:
        raise ValueError("noise model has fewer qubits than the register")
    singles = [kraus_to_superop(t1t2_kraus(model.t1[q], model.t2[q], duration)) for q in range(n_qubits)]
    return local_superop(singles)


def apply_decoherence(rho: DensityMatrix, model: NoiseModel, duration: float) -> DensityMatrix:
    if duration < 0:
        raise ValueError("duration must be non-negative")
    n = rho.space.n_sites
    if any(d != 2 for d in rho.space.dims):
        raise ValueError("decoherence channels are defined on qubit registers")
    DensityMatrix(rho.space, rho.elements)  # validates input
    s = decoherence_superop(model, duration, n)
    out = (s @ rho.elements.reshape(-1)).reshape(rho.space.dim, rho.space.dim)
    return DensityMatrix(rho.space, out, check=False)


def choi_matrix(superop: np.ndarray) -> np.ndarray:
    """Choi matrix sum_ij |i><j| ⊗ E(|i><j|) of a row-major superoperator."""
    d = int(round(math.sqrt(superop.shape[0])))
    return superop.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def readout_probabilities(pops: np.ndarray, readout: tuple[float, float] | None) -> np.ndarray:
    """Apply an independent per-qubit assignment matrix to computational populations."""
    if readout is None:
        return pops
    e01, e10 = readout
    a = np.array([[1 - e01, e10], [e01, 1 - e10]])
    n = int(round(math.log2(len(pops))))
    return reduce(np.kron, [a] * n) @ pops
