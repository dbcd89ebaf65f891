"""Coherence-limited gate fidelity: closed form and a Lindblad propagation oracle."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .noise import NoiseModel, choi_matrix


def process_fidelity_single(t1: float, t2: float, t: float) -> float:
    """Process fidelity of one qubit's T1/T2 channel with the identity."""
    return (1 + math.exp(-t / t1) + 2 * math.exp(-t / t2)) / 4


def coherence_limited_fidelity(model: NoiseModel, gate_duration: float) -> float:
    """Average gate fidelity of an otherwise perfect gate lasting ``gate_duration``.

    Both qubits decohere independently, so process fidelities multiply;
    ``F_avg = (d F_pro + 1) / (d + 1)``.
    """
    if gate_duration <= 0:
        if gate_duration == 0:
            return 1.0
        raise ValueError("gate duration must be positive")
    if not model.has_decoherence:
        return 1.0
    f_pro = 1.0
    for t1, t2 in zip(model.t1, model.t2):
        f_pro *= process_fidelity_single(t1, t2, gate_duration)
    d = 2 ** len(model.t1)
    return (d * f_pro + 1) / (d + 1)


def _lindblad_ops(model: NoiseModel) -> list[np.ndarray]:
    n = len(model.t1)
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    ops = []
    for q, (t1, t2) in enumerate(zip(model.t1, model.t2)):
        gamma_phi = 1 / t2 - 1 / (2 * t1)
        for local, rate in ((lower, 1 / t1), (z, gamma_phi / 2)):
            if rate <= 0:
                continue
            factors = [np.eye(2, dtype=complex)] * n
            factors[q] = local
            full = factors[0]
            for f in factors[1:]:
                full = np.kron(full, f)
            ops.append(math.sqrt(rate) * full)
    return ops


def lindblad_fidelity(model: NoiseModel, gate_duration: float, rtol: float = 1e-11, atol: float = 1e-13) -> float:
    """Average fidelity from integrating the master equation on all matrix units."""
    n = len(model.t1)
    d = 2**n
    ls = _lindblad_ops(model)
    lsum = sum(l.conj().T @ l for l in ls)

    def rhs(_, y):
        rho = y.reshape(d, d)
        out = -0.5 * (lsum @ rho + rho @ lsum)
        for l in ls:
            out += l @ rho @ l.conj().T
        return out.reshape(-1)

    cols = []
    for k in range(d * d):
        e = np.zeros(d * d, dtype=complex)
        e[k] = 1
        sol = solve_ivp(rhs, (0, gate_duration), e, method="DOP853", rtol=rtol, atol=atol)
        cols.append(sol.y[:, -1])
    superop = np.array(cols).T
    choi = choi_matrix(superop)
    phi = np.eye(d).reshape(-1) / math.sqrt(d)
    f_pro = float(np.real(phi.conj() @ choi @ phi)) / d
    return (d * f_pro + 1) / (d + 1)
