"""Interleaved randomized benchmarking on a two-qubit density-matrix simulator."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import curve_fit

from ..qcore import Circuit, Op, QuditSpace, embed, gate_matrix
from .clifford import CliffordElement, clifford_group
from .noise import (
    NoiseModel,
    decoherence_superop,
    depolarizing_superop,
    local_superop,
    readout_probabilities,
    unitary_superop,
)

D = 4
DEFAULT_LENGTHS = (2, 4, 8, 16, 32, 64)


class FitError(RuntimeError):
    """Decay fit did not converge or the data cannot identify the decay."""


@dataclass(frozen=True)
class DecayFit:
    A: float
    B: float
    p: float
    stderr: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError(f"decay parameter p = {self.p} outside (0, 1]")

    def model(self, lengths) -> np.ndarray:
        return self.B + self.A * self.p ** np.asarray(lengths, float)

    def to_dict(self) -> dict:
        return {"A": self.A, "B": self.B, "p": self.p, "stderr": dict(self.stderr)}


def _decay(m, a, b, p):
    return b + a * p**m


def fit_decay(lengths, means, sigma=None, restarts: int = 4) -> DecayFit:
    """Bounded least squares for ``B + A p**m``.

    The starting point comes from a log-linear fit of ``means - B0`` with ``B0``
    the mean at the longest length (nudged below the data); ``sigma`` are per-point
    standard errors.
    """
    m = np.asarray(lengths, float)
    y = np.asarray(means, float)
    if len(np.unique(m)) < 3:
        raise ValueError("need at least three distinct lengths")
    if np.ptp(y) < 1e-12:
        raise FitError("constant survival data leave the decay unidentifiable")
    order = np.argsort(m)
    b0 = y[order[-1]] - 0.05 * np.ptp(y)
    keep = y - b0 > 0
    slope, icpt = np.polyfit(m[keep], np.log(y[keep] - b0), 1)
    p0 = float(np.clip(np.exp(slope), 1e-3, 1 - 1e-9))
    starts = [(float(np.exp(icpt)), float(np.clip(b0, 0, 1)), p0)]
    starts += [(float(np.ptp(y)), float(np.clip(b0, 0, 1)), q) for q in (0.5, 0.9, 0.99)][:restarts]
    lo, hi = [-2.0, 0.0, 1e-9], [2.0, 1.0, 1.0 - 1e-12]
    last = None
    for start in starts:
        try:
            popt, pcov = curve_fit(
                _decay, m, y, p0=start, sigma=sigma, absolute_sigma=sigma is not None,
                bounds=(lo, hi), method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000,
            )
        except (RuntimeError, ValueError) as exc:
            last = exc
            continue
        err = np.sqrt(np.clip(np.diag(pcov), 0, None))
        if np.all(np.isfinite(popt)):
            return DecayFit(float(popt[0]), float(popt[1]), float(popt[2]),
                            {"A": float(err[0]), "B": float(err[1]), "p": float(err[2])})
    raise FitError(f"decay fit failed after {len(starts)} starts: {last}")


@dataclass(frozen=True)
class IRBResult:
    reference: DecayFit
    interleaved: DecayFit
    r: float
    r_stderr: float
    n_pulses: int = 1
    survivals: tuple = field(default=(), compare=False, repr=False)
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def fidelity(self) -> float:
        return 1 - self.r

    @property
    def ratio(self) -> float:
        return self.interleaved.p / self.reference.p

    @property
    def ratio_stderr(self) -> float:
        ref, il = self.reference, self.interleaved
        return self.ratio * math.hypot(il.stderr.get("p", 0) / il.p, ref.stderr.get("p", 0) / ref.p)

    def to_dict(self) -> dict:
        out = {
            "reference": self.reference.to_dict(),
            "interleaved": self.interleaved.to_dict(),
            "r": self.r,
            "r_stderr": self.r_stderr,
            "fidelity": self.fidelity,
            "n_pulses": self.n_pulses,
        }
        out.update(self.meta)
        return out


def irb_error(p: float, p_il: float, d: int = D) -> float:
    """Average error of the interleaved gate, ``(d - 1)/d * (1 - p_il/p)``."""
    return (d - 1) / d * (1 - p_il / p)


def scaled_fidelity(result: IRBResult, n: int | None = None) -> tuple[float, float]:
    """Single-pulse fidelity from an ``n``-pulse interleaved unit, with its stderr."""
    n = result.n_pulses if n is None else n
    if n < 1:
        raise ValueError("pulse count must be >= 1")
    q = result.ratio
    if q <= 0:
        raise ValueError("decay ratio must be positive")
    q1 = q ** (1 / n)
    r1 = (D - 1) / D * (1 - q1)
    err = (D - 1) / D * q1 / (n * q) * result.ratio_stderr
    return 1 - r1, err


# -- simulation -----------------------------------------------------------------------

_SPACE = QuditSpace.qubits(2)


class ChannelCache:
    """Noisy superoperators of native gates, Cliffords and units under one model."""

    def __init__(self, model: NoiseModel, native: str):
        self.model = model
        self.native = native
        self._ops: dict = {}
        self._cliffords: dict = {}

    def op(self, op: Op) -> np.ndarray:
        key = (op.label, op.params, op.targets)
        s = self._ops.get(key)
        if s is None:
            u = embed(gate_matrix(op), op.targets, _SPACE).matrix
            s = unitary_superop(u)
            lam = self.model.depolarizing.get(op.label, 0.0)
            if lam:
                if len(op.targets) == 2:
                    dep = depolarizing_superop(lam, 4)
                else:
                    one = depolarizing_superop(lam, 2)
                    ident = np.eye(4)
                    dep = local_superop([one, ident] if op.targets[0] == 0 else [ident, one])
                s = dep @ s
            s = decoherence_superop(self.model, self.model.duration(op.label), 2) @ s
            self._ops[key] = s
        return s

    def circuit(self, c: Circuit) -> np.ndarray:
        s = np.eye(16, dtype=complex)
        for op in c.ops:
            s = self.op(op) @ s
        return s

    def clifford(self, el: CliffordElement) -> np.ndarray:
        s = self._cliffords.get(el.key)
        if s is None:
            s = self.circuit(el.to_circuit(self.native))
            lam = self.model.depolarizing.get("clifford", 0.0)
            if lam:
                s = depolarizing_superop(lam, 4) @ s
            self._cliffords[el.key] = s
        return s


def _survival(cache: ChannelCache, seq: list, rho0: np.ndarray) -> float:
    v = rho0
    for s in seq:
        v = s @ v
    pops = np.real(np.diag(v.reshape(4, 4)))
    pops = readout_probabilities(np.clip(pops, 0, None), cache.model.readout)
    return float(min(max(pops[0], 0.0), 1.0))


def _run_one(args):
    model, native, unit, unit_clifford, length, interleave, seed_seq, shots = args
    cache = _worker_cache(model, native)
    rng = np.random.default_rng(seed_seq)
    group = clifford_group()
    unit_s = cache.circuit(unit) if interleave else None
    net = CliffordElement.identity(2)
    seq = []
    for _ in range(length):
        c = group[int(rng.integers(len(group)))]
        seq.append(cache.clifford(c))
        net = net.then(c)
        if interleave:
            seq.append(unit_s)
            net = net.then(unit_clifford)
    seq.append(cache.clifford(net.inverse()))
    rho0 = np.zeros(16, dtype=complex)
    rho0[0] = 1
    prob = _survival(cache, seq, rho0)
    est = prob if shots is None else rng.binomial(shots, prob) / shots
    return prob, est


_CACHES: dict = {}


def _worker_cache(model, native) -> ChannelCache:
    # keyed by value: worker processes receive a fresh copy of the model per task
    key = (repr(model), native)
    c = _CACHES.get(key)
    if c is None:
        _CACHES.clear()
        c = _CACHES[key] = ChannelCache(model, native)
    return c


def run_irb(interleaved_unit: Circuit, model: NoiseModel, lengths=DEFAULT_LENGTHS, randomizations: int = 32,
            shots: int | None = 500, rng=None, *, native: str = "iswap", n_pulses: int | None = None,
            jobs: int = 1) -> IRBResult:
    """Reference and interleaved RB decays and the interleaved-gate error.

    ``rng`` is a seed, a :class:`numpy.random.SeedSequence` or ``None``; each circuit
    draws its own child stream, so results do not depend on ``jobs`` or order.
    """
    if interleaved_unit.space.dims != (2, 2):
        raise ValueError("interleaved unit must act on two qubits")
    try:
        unit_clifford = CliffordElement.from_circuit(interleaved_unit)
    except ValueError:
        raise ValueError("interleaved unit is not a Clifford; compose XY pulses into a Clifford first") from None
    ss = rng if isinstance(rng, np.random.SeedSequence) else np.random.SeedSequence(rng)
    lengths = tuple(int(m) for m in lengths)
    specs = [(il, m, k) for il in (False, True) for m in lengths for k in range(randomizations)]
    children = ss.spawn(len(specs) + 1)
    # execution order is shuffled as on hardware; each circuit owns its stream
    order = np.random.default_rng(children[-1]).permutation(len(specs))
    args = [(model, native, interleaved_unit, unit_clifford, specs[i][1], specs[i][0], children[i], shots)
            for i in order]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_run_one, args, chunksize=max(1, len(args) // (4 * jobs))))
    else:
        outs = [_run_one(a) for a in args]
    table = {}
    for i, out in zip(order, outs):
        table[specs[i]] = out
    fits = []
    rows = []
    for il in (False, True):
        means, sig = [], []
        for m in lengths:
            vals = np.array([table[(il, m, k)][1] for k in range(randomizations)])
            means.append(vals.mean())
            floor = math.sqrt(0.25 / ((shots or 10**6) * randomizations))
            sig.append(max(vals.std(ddof=1) / math.sqrt(randomizations), floor))
            rows += [("interleaved" if il else "reference", m, k, table[(il, m, k)][0], table[(il, m, k)][1])
                     for k in range(randomizations)]
        fits.append(_fit_or_flat(lengths, means, sig))
    ref, inter = fits
    q = inter.p / ref.p
    q_err = q * math.hypot(inter.stderr["p"] / inter.p, ref.stderr["p"] / ref.p)
    meta = {"lengths": list(lengths), "randomizations": randomizations, "shots": shots,
            "native": native, "seed_entropy": str(ss.entropy)}
    return IRBResult(ref, inter, irb_error(ref.p, inter.p), (D - 1) / D * q_err,
                     n_pulses or _count_pulses(interleaved_unit), tuple(rows), meta)


def _fit_or_flat(lengths, means, sig) -> DecayFit:
    if np.all(np.asarray(means) >= 1 - 1e-12):
        # no decay at all: every sequence returned to |00>
        return DecayFit(0.75, 0.25, 1.0, {"A": 0.0, "B": 0.0, "p": 0.0})
    return fit_decay(lengths, means, sig)


def _count_pulses(c: Circuit) -> int:
    return sum(o.label in ("xy", "iswap", "cz") for o in c.ops)


def iswap_composition(n: int, thetas=None) -> Circuit:
    """iSWAP as ``n`` XY pulses with rotation angles summing to pi."""
    if n < 1:
        raise ValueError("need at least one pulse")
    if thetas is None:
        thetas = [math.pi / n] * n
    thetas = list(thetas)
    if len(thetas) == n - 1:
        thetas.append(math.pi - sum(thetas))
    if len(thetas) != n or abs(sum(thetas) - math.pi) > 1e-12:
        raise ValueError("pulse angles must sum to pi")
    return Circuit(_SPACE, tuple(Op("xy", (0.0, t), (0, 1)) for t in thetas))
