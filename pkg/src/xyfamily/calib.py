"""
Simulated phase calibration of the flux-driven XY gate family.

A :class:`CalibrationScenario` hides a constant offset ``phi0`` between the
single-qubit and flux drives and a pair of per-pulse Z phases. Its single pulse knob
``phi_p`` plays

.. math:: (R_Z(h_0) \\otimes R_Z(h_1))\\, XY(2(\\phi_p + \\phi_0), \\pi/2)

either exactly (``device=None``) or through the time-domain pulse model. The three
procedures only ever call :meth:`CalibrationScenario.pulse` and measurement helpers;
they never touch the hidden attributes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .decomp import FrameStep, PulseProgram
from .qcore import distance_global_phase, hadamard, rz, xy_unitary

PI = math.pi


class CalibrationError(ValueError):
    """Sweep signal too weak or malformed to locate the calibration point."""


@dataclass(frozen=True)
class CalibrationScenario:
    hidden_phi0: float
    hidden_rz_pair: tuple[float, float] = (0.0, 0.0)
    device: object | None = None  # pulsesim DeviceProfile, or None for exact pulses
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def seeded(cls, seed: int, device=None, rz_scale: float = 0.5) -> "CalibrationScenario":
        rng = np.random.default_rng(seed)
        phi0 = float(rng.uniform(-PI / 2, PI / 2))
        h = tuple(float(x) for x in rng.uniform(-rz_scale, rz_scale, 2))
        return cls(phi0, h, device)

    def pulse(self, phi_p: float) -> np.ndarray:
        """4x4 unitary of one half-swap flux pulse played at flux phase ``phi_p``."""
        key = round(float(phi_p), 14)
        u = self._cache.get(key)
        if u is None:
            h0, h1 = self.hidden_rz_pair
            post = np.kron(rz(h0).matrix, rz(h1).matrix)
            if self.device is None:
                core = xy_unitary(2 * (phi_p + self.hidden_phi0), PI / 2).matrix
            else:
                from .pulsesim import realize_pulse

                # the flux knob runs opposite to beta on this device
                ex = realize_pulse(self.device, "half", -(phi_p + self.hidden_phi0))
                core = np.eye(4, dtype=complex)
                core[1:3, 1:3] = ex.block
            u = post @ core
            u.setflags(write=False)
            self._cache[key] = u
        return u


@dataclass(frozen=True)
class CalibrationResult:
    phi0_estimate: float
    second_pulse_phase: float
    final_rz_pair: tuple[float, float]
    residual: float
    sweeps: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.residual < 0:
            raise ValueError("residual is a distance and cannot be negative")

    @property
    def rz_per_pulse(self) -> tuple[float, float]:
        return (-self.final_rz_pair[0] / 2, -self.final_rz_pair[1] / 2)

    def to_dict(self) -> dict:
        return {
            "phi0_estimate": self.phi0_estimate,
            "second_pulse_phase": self.second_pulse_phase,
            "final_rz_pair": list(self.final_rz_pair),
            "residual": self.residual,
        }


# -- measurement -----------------------------------------------------------------

def _estimate(probs: np.ndarray, shots: int | None, rng: np.random.Generator | None) -> np.ndarray:
    probs = np.clip(np.real(probs), 0.0, None)
    probs = probs / probs.sum()
    if shots is None:
        return probs
    if rng is None:
        raise ValueError("shot sampling needs an rng")
    return rng.multinomial(shots, probs) / shots


def fit_sinusoid(x: np.ndarray, y: np.ndarray, k: float = 2.0) -> tuple[float, float, float, float]:
    """Least-squares ``y = c + a cos(kx) + b sin(kx)``; returns ``(c, a, b, rms)``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    design = np.column_stack([np.ones_like(x), np.cos(k * x), np.sin(k * x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - y) ** 2)))
    return float(coef[0]), float(coef[1]), float(coef[2]), rms


def _wrap(x: float, period: float = 2 * PI) -> float:
    """Map into ``[-period/2, period/2)``."""
    return float((x + period / 2) % period - period / 2)


def default_grid(n: int = 32) -> np.ndarray:
    """One full period (pi) of flux phase."""
    return np.arange(n) * PI / n


# -- step 1: constant drive offset ------------------------------------------------

_PHI0_INPUT = 0.5 * np.array([1, 1, 1j, 1j])  # (|0> + i|1>) ⊗ (|0> + |1>)
_ZI_MINUS_IZ = np.array([0.0, 2.0, -2.0, 0.0])


def _zi_minus_iz(scenario, phi_p, shots, rng) -> float:
    psi = scenario.pulse(phi_p) @ _PHI0_INPUT
    return float(_estimate(np.abs(psi) ** 2, shots, rng) @ _ZI_MINUS_IZ)


def phi0_scan(scenario, phi_p_grid=None, shots=None, rng=None) -> tuple[np.ndarray, np.ndarray]:
    grid = default_grid() if phi_p_grid is None else np.asarray(phi_p_grid, float)
    return grid, np.array([_zi_minus_iz(scenario, p, shots, rng) for p in grid])


def calibrate_phi0(scenario, phi_p_grid=None, shots=None, rng=None, *, scan=None) -> float:
    """Estimate ``phi0`` from <ZI> - <IZ> = -cos(2(phi_p + phi0)).

    Returns a value in ``[-pi/2, pi/2)``. ``phi0`` and ``phi0 + pi`` give the same
    pulses, so nothing finer is observable.
    """
    grid, y = scan if scan is not None else phi0_scan(scenario, phi_p_grid, shots, rng)
    if len(grid) < 8 or np.ptp(grid) * 2 < 2 * PI * (1 - 1.5 / len(grid)):
        raise ValueError("grid must hold >= 8 points spanning one period of cos(2 phi_p)")
    _, a, b, _ = fit_sinusoid(grid, y)
    amp = math.hypot(a, b)
    if amp < 0.2:
        raise CalibrationError(f"phi0 signal amplitude {amp:.3g} is too small to fit")
    # y = -R cos(2 phi_p + 2 phi0) => a = -R cos 2phi0, b = R sin 2phi0
    est = _wrap(0.5 * math.atan2(b, -a), PI)
    # follow-up point: at phi_p = -phi0 the signal sits at its minimum
    check = _zi_minus_iz(scenario, -est, shots, rng)
    if check > 0:
        est = _wrap(est + PI / 2, PI)
    return est


# -- step 2: second-pulse phase ---------------------------------------------------

_KET01 = np.array([0, 1, 0, 0], dtype=complex)


def _p01_after_pair(scenario, phi1, phi2, shots, rng) -> float:
    psi = scenario.pulse(phi2) @ (scenario.pulse(phi1) @ _KET01)
    probs = np.abs(psi) ** 2
    if shots is None:
        return float(probs[1] / probs.sum())
    if rng is None:
        raise ValueError("shot sampling needs an rng")
    return float(rng.binomial(shots, min(1.0, probs[1])) / shots)


def second_pulse_scan(scenario, phi0, grid=None, shots=None, rng=None):
    grid = default_grid() if grid is None else np.asarray(grid, float)
    return grid, np.array([_p01_after_pair(scenario, -phi0, p, shots, rng) for p in grid])


def _quadratic_peak(grid: np.ndarray, y: np.ndarray) -> float:
    n = len(grid)
    i = int(np.argmax(y))
    y0, y1, y2 = y[(i - 1) % n], y[i], y[(i + 1) % n]
    den = y0 - 2 * y1 + y2
    if den >= 0:
        raise CalibrationError("no clear maximum in the second-pulse sweep")
    h = grid[1] - grid[0]
    return float(grid[i] + 0.5 * h * (y0 - y2) / den)


def calibrate_second_pulse_phase(scenario, phi0, grid=None, shots=None, rng=None, *,
                                 method="fit", scan=None) -> float:
    """Flux phase of the second half pulse that cancels the first into XY(0).

    ``method="fit"`` takes the maximum of a least-squares sinusoid through the whole
    sweep; ``"quadratic"`` interpolates a parabola through the grid peak and its two
    neighbours.
    """
    grid, y = scan if scan is not None else second_pulse_scan(scenario, phi0, grid, shots, rng)
    c, a, b, _ = fit_sinusoid(grid, y)
    amp = math.hypot(a, b)
    if amp < 0.2 or c + amp < 0.5:
        raise CalibrationError("no clear maximum in the second-pulse sweep")
    if method == "quadratic":
        return _wrap(_quadratic_peak(grid, y), PI)
    if method != "fit":
        raise ValueError(f"unknown peak method {method!r}")
    return _wrap(0.5 * math.atan2(b, a), PI)


# -- step 3: final Z pair -----------------------------------------------------------

def _nominal_xy0(scenario, phi0, phi2) -> np.ndarray:
    return scenario.pulse(phi2) @ scenario.pulse(-phi0)


def _plus_on(q: int) -> np.ndarray:
    plus = np.array([1, 1]) / math.sqrt(2)
    zero = np.array([1, 0])
    return np.kron(plus, zero) if q == 0 else np.kron(zero, plus)


def final_rz_scan(scenario, phi0, phi2, qubit, n=32, shots=None, rng=None):
    """P(+) on ``qubit`` after the nominal XY(0) and an analysis rotation ``rz(psi)``."""
    u = _nominal_xy0(scenario, phi0, phi2)
    psi0 = u @ _plus_on(qubit)
    grid = np.arange(n) * 2 * PI / n
    h = hadamard().matrix
    y = []
    for ang in grid:
        g = rz(ang).matrix
        local = np.kron(h @ g, np.eye(2)) if qubit == 0 else np.kron(np.eye(2), h @ g)
        probs = np.abs(local @ psi0) ** 2
        marg = probs.reshape(2, 2).sum(axis=1 - qubit)
        y.append(_estimate(marg, shots, rng)[0])
    return grid, np.array(y)


def calibrate_final_rz(scenario, phi0, phi2, shots=None, rng=None, n=32, *, scans=None) -> tuple[float, float]:
    """Per-qubit Z rotations that null the phase picked up through a nominal XY(0)."""
    out = []
    for q in (0, 1):
        grid, y = scans[q] if scans is not None else final_rz_scan(scenario, phi0, phi2, q, n, shots, rng)
        # P(+) = (1 + v cos(phase + psi)) / 2
        _, a, b, _ = fit_sinusoid(grid, y, k=1.0)
        phase = math.atan2(-b, a)
        out.append(_wrap(-phase))
    return out[0], out[1]


# -- end to end -----------------------------------------------------------------------

def calibrated_xy0(scenario, phi0, phi2, rz_pair) -> np.ndarray:
    return np.kron(rz(rz_pair[0]).matrix, rz(rz_pair[1]).matrix) @ _nominal_xy0(scenario, phi0, phi2)


def run_calibration(scenario: CalibrationScenario, shots: int | None = None, seed: int | None = None,
                    n_points: int = 32, method: str = "fit") -> CalibrationResult:
    rng = np.random.default_rng(seed) if shots is not None else None
    s1 = phi0_scan(scenario, default_grid(n_points), shots, rng)
    phi0 = calibrate_phi0(scenario, shots=shots, rng=rng, scan=s1)
    s2 = second_pulse_scan(scenario, phi0, default_grid(n_points), shots, rng)
    phi2 = calibrate_second_pulse_phase(scenario, phi0, method=method, scan=s2)
    s3 = [final_rz_scan(scenario, phi0, phi2, q, n_points, shots, rng) for q in (0, 1)]
    pair = calibrate_final_rz(scenario, phi0, phi2, scans=s3)
    u = calibrated_xy0(scenario, phi0, phi2, pair)
    res = distance_global_phase(u, np.eye(4))
    sweeps = {"phi0": s1, "second_pulse": s2, "final_rz_q0": s3[0], "final_rz_q1": s3[1]}
    return CalibrationResult(phi0, phi2, pair, float(res), sweeps)


def execute_program(scenario, result: CalibrationResult, prog: PulseProgram) -> np.ndarray:
    """Play a half-pulse program on the scenario using only calibrated constants.

    Pulse ``k`` (0-based) is shifted by ``k`` times the per-pulse Z mismatch learned
    in the second-pulse step, and the accumulated per-pulse Z phases are removed with
    the program's own trailing frame updates.
    """
    pulses = prog.pulses
    if prog.space.dims != (2, 2) or any(p.kind != "xy_half" or p.targets != (0, 1) for p in pulses):
        raise ValueError("calibrated execution covers two-qubit xy_half programs")
    seen_frame = False
    for s in prog.steps:
        if isinstance(s, FrameStep):
            seen_frame = True
        elif seen_frame:
            raise ValueError("frame updates must follow all pulses")
    phi0, phi2 = result.phi0_estimate, result.second_pulse_phase
    delta = PI - 2 * (phi2 + phi0)  # h0 - h1
    u = np.eye(4, dtype=complex)
    for k, p in enumerate(pulses):
        u = scenario.pulse((p.phase - k * delta) / 2 - phi0) @ u
    h0, h1 = result.rz_per_pulse
    n = len(pulses)
    frame = {0: -n * h0, 1: -n * h1}
    for s in prog.frame_steps:
        frame[s.qubit] += s.angle
    return np.kron(rz(frame[0]).matrix, rz(frame[1]).matrix) @ u


def with_phi0_correction(scenario: CalibrationScenario, phi0: float) -> CalibrationScenario:
    """Scenario whose knob already includes the estimated offset (for idempotence checks)."""
    return CalibrationScenario(scenario.hidden_phi0 - phi0, scenario.hidden_rz_pair, scenario.device)


__all__ = [
    "CalibrationError",
    "CalibrationResult",
    "CalibrationScenario",
    "calibrate_final_rz",
    "calibrate_phi0",
    "calibrate_second_pulse_phase",
    "calibrated_xy0",
    "default_grid",
    "execute_program",
    "final_rz_scan",
    "fit_sinusoid",
    "phi0_scan",
    "run_calibration",
    "second_pulse_scan",
    "with_phi0_correction",
]
