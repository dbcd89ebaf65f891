"""
Rotating-frame bookkeeping for a fixed/tunable transmon pair.

Site 0 is the fixed qubit, site 1 the tunable one. A flux pulse carries a phase
``phi_p`` defined against the two-qubit frame; the interaction phase it realizes in
the qubit frames is :func:`effective_beta`. Z rotations never touch the hardware:
:func:`apply_rz_update` shifts the frame phases so that later pulses, still addressed
through :func:`effective_beta`, land on the rotated axis.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from .qcore import QuditSpace, Unitary, embed, rz, xy_unitary

TWO_PI = 2.0 * math.pi

# Fixed and tunable idle frequencies of the default pair; their difference is 937.76 MHz.
DEFAULT_FIXED_HZ = 3.82124e9
DEFAULT_TUNABLE_HZ = 4.759e9


@dataclass(frozen=True)
class Frame:
    frequency: float
    phase: float = 0.0
    epoch: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.frequency):
            raise ValueError("frame frequency must be finite")


def frame_phase_at(f: Frame, t: float) -> float:
    """Unreduced phase of ``f`` at time ``t``; times before the epoch extrapolate linearly."""
    return f.phase + TWO_PI * f.frequency * (t - f.epoch)


@dataclass(frozen=True)
class FrameSet:
    """Two qubit frames plus the two-qubit frame the flux phase is defined against.

    ``offset`` is the constant interaction-phase offset of the hardware (zero once
    calibrated). ``sign`` multiplies the flux phase; it is ``-1`` when the tunable
    qubit sits above the fixed one, matching ``beta = -2 phi_p + alpha``.
    """

    qubit_frames: tuple[Frame, Frame]
    two_qubit_frame: Frame
    sign: int = -1
    offset: float = 0.0

    def __post_init__(self):
        if len(self.qubit_frames) != 2:
            raise ValueError("a FrameSet tracks exactly two qubits")
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        object.__setattr__(self, "qubit_frames", tuple(self.qubit_frames))

    @classmethod
    def from_frequencies(
        cls,
        f_fixed: float = DEFAULT_FIXED_HZ,
        f_tunable: float = DEFAULT_TUNABLE_HZ,
        two_qubit_frequency: float | None = None,
        epoch: float = 0.0,
        offset: float = 0.0,
    ) -> "FrameSet":
        if two_qubit_frequency is None:
            two_qubit_frequency = abs(f_fixed - f_tunable)
        sign = -1 if f_tunable >= f_fixed else 1
        return cls(
            (Frame(f_fixed, 0.0, epoch), Frame(f_tunable, 0.0, epoch)),
            Frame(two_qubit_frequency, 0.0, epoch),
            sign,
            offset,
        )

    @property
    def detuning(self) -> float:
        return self.qubit_frames[1].frequency - self.qubit_frames[0].frequency


def apply_rz_update(fs: FrameSet, qubit: int, angle: float) -> FrameSet:
    """Record rz(angle) on ``qubit`` as a frame update."""
    if qubit not in (0, 1):
        raise IndexError(f"qubit must be 0 or 1, got {qubit}")
    frames = list(fs.qubit_frames)
    frames[qubit] = replace(frames[qubit], phase=frames[qubit].phase + angle)
    # keeps effective_beta(phi_p) fixed: pulses addressed by beta follow the new axis
    shift = fs.sign * angle if qubit == 0 else -fs.sign * angle
    tq = replace(fs.two_qubit_frame, phase=fs.two_qubit_frame.phase + shift)
    return replace(fs, qubit_frames=tuple(frames), two_qubit_frame=tq)


def effective_beta(fs: FrameSet, phi_p: float, t: float) -> float:
    """Interaction phase, in the qubit frames, of a flux pulse with phase ``phi_p`` at ``t``."""
    f0, f1 = fs.qubit_frames
    return (
        fs.sign * (2.0 * phi_p + frame_phase_at(fs.two_qubit_frame, t))
        + frame_phase_at(f1, t)
        - frame_phase_at(f0, t)
        + fs.offset
    )


def phase_for_beta(fs: FrameSet, beta: float, t: float) -> float:
    """Flux phase ``phi_p`` whose :func:`effective_beta` at ``t`` equals ``beta``."""
    base = effective_beta(fs, 0.0, t)
    return fs.sign * (beta - base) / 2.0


def lab_beta(fs: FrameSet, phi_p: float, t: float) -> float:
    """Interaction phase relative to frames that were never updated.

    Equals ``effective_beta`` plus the accumulated frame phases ``p0 - p1``; this is
    the phase the hardware actually imprints.
    """
    p0, p1 = (fr.phase for fr in fs.qubit_frames)
    return effective_beta(fs, phi_p, t) + p0 - p1


@dataclass(frozen=True)
class FrameInstruction:
    kind: str  # "rz_update" | "advance" | "flux_event"
    qubit: int = 0
    angle: float = 0.0
    duration: float = 0.0
    phi_p: float = 0.0
    theta: float = math.pi / 2

    def __post_init__(self):
        if self.kind not in ("rz_update", "advance", "flux_event"):
            raise ValueError(f"unknown frame instruction {self.kind!r}")
        if self.duration < 0:
            raise ValueError("durations must be non-negative")


@dataclass
class FrameTrace:
    """Result of running a frame program: the lab-level gate and the final frames."""

    unitary: Unitary
    frames: FrameSet
    lab_betas: list[float] = field(default_factory=list)


def run_frame_program(fs: FrameSet, program: Sequence[FrameInstruction], t0: float = 0.0) -> FrameTrace:
    """Execute frame instructions and return the physical (never-updated frame) unitary.

    The returned unitary excludes the pending frame rotations; apply
    :func:`frame_correction` to compare against a circuit with explicit RZs.
    """
    space = QuditSpace.qubits(2)
    u = np.eye(4, dtype=complex)
    t = t0
    betas = []
    for ins in program:
        if ins.kind == "rz_update":
            fs = apply_rz_update(fs, ins.qubit, ins.angle)
        elif ins.kind == "advance":
            t += ins.duration
        else:
            b = lab_beta(fs, ins.phi_p, t)
            betas.append(b)
            u = xy_unitary(b, ins.theta).matrix @ u
            t += ins.duration
    return FrameTrace(Unitary(u, space, check=False), fs, betas)


def frame_correction(fs: FrameSet) -> Unitary:
    """Pending Z rotations rz(p0) ⊗ rz(p1) held in the frames."""
    p0, p1 = (fr.phase for fr in fs.qubit_frames)
    return Unitary(np.kron(rz(p0).matrix, rz(p1).matrix), QuditSpace.qubits(2), check=False)


def compile_to_frames(fs: FrameSet, ops, t0: float = 0.0, spacing: float = 0.0) -> list[FrameInstruction]:
    """Translate ``[("rz", q, angle) | ("xy", beta, theta)]`` into frame instructions.

    Each XY is addressed through :func:`phase_for_beta` at its own start time, so the
    result is independent of ``t0`` and ``spacing``.
    """
    out = []
    t = t0
    for op in ops:
        if op[0] == "rz":
            _, q, a = op
            ins = FrameInstruction("rz_update", qubit=q, angle=a)
            out.append(ins)
            fs = apply_rz_update(fs, q, a)
        elif op[0] == "xy":
            _, beta, theta = op
            out.append(FrameInstruction("flux_event", phi_p=phase_for_beta(fs, beta, t), theta=theta))
            if spacing:
                out.append(FrameInstruction("advance", duration=spacing))
                t += spacing
        else:
            raise ValueError(f"unknown op {op[0]!r}")
    return out


def explicit_unitary(ops) -> Unitary:
    """Same ops as :func:`compile_to_frames`, with RZs applied as matrices."""
    space = QuditSpace.qubits(2)
    u = np.eye(4, dtype=complex)
    for op in ops:
        if op[0] == "rz":
            g = embed(rz(op[2]), [op[1]], space).matrix
        else:
            g = xy_unitary(op[1], op[2]).matrix
        u = g @ u
    return Unitary(u, space, check=False)


# -- Ramsey-style frame experiment ------------------------------------------------

def ramsey_populations(fs: FrameSet, f_f: float, delays: Sequence[float], phi_p: float = 0.0) -> np.ndarray:
    """P(tunable qubit in |1>) after |01> -> XY(pi/2) -> idle(delay) -> XY(pi/2).

    Both pulses carry the same flux phase against a two-qubit frame running at
    ``2 f_f`` (the flux line is second-order in the sideband), so any mismatch with
    the true detuning shows up as a phase slip between the pulses.
    """
    fs = replace(fs, two_qubit_frame=replace(fs.two_qubit_frame, frequency=2.0 * f_f))
    b0 = effective_beta(fs, phi_p, 0.0)
    psi0 = np.zeros(4, dtype=complex)
    psi0[1] = 1.0
    first = xy_unitary(b0, math.pi / 2).matrix @ psi0
    out = np.empty(len(delays))
    for i, d in enumerate(delays):
        psi = xy_unitary(effective_beta(fs, phi_p, d), math.pi / 2).matrix @ first
        # tunable qubit is site 1: |01> and |11>
        out[i] = abs(psi[1]) ** 2 + abs(psi[3]) ** 2
    return out


@dataclass(frozen=True)
class RamseyFit:
    frequency: float
    stderr: float
    amplitude: float


def fit_oscillation(t: np.ndarray, y: np.ndarray, flat_tol: float = 1e-9) -> RamseyFit:
    """Fit ``c + a cos(2 pi f t + phi)``; a flat trace returns frequency 0."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(t) < 20:
        raise ValueError("need at least 20 points to fit an oscillation")
    if np.ptp(y) < flat_tol:
        return RamseyFit(0.0, 0.0, 0.0)
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-6):
        raise ValueError("delays must be uniformly spaced")
    spec = np.abs(np.fft.rfft(y - y.mean(), n=8 * len(y)))
    freqs = np.fft.rfftfreq(8 * len(y), dt[0])
    k = int(np.argmax(spec[1:]) + 1)
    f_guess = freqs[k]
    if f_guess * (t[-1] - t[0]) < 2.0:
        raise RuntimeError("fewer than two oscillation periods in the sweep; cannot fit")
    # shift time origin to decorrelate phase and frequency
    tc = t - t.mean()

    def model(x, c, a, f, ph):
        return c + a * np.cos(TWO_PI * f * x + ph)

    a0 = 0.5 * np.ptp(y)
    best = None
    for ph0 in np.linspace(0, TWO_PI, 4, endpoint=False):
        try:
            # noiseless traces give a singular covariance; stderr is reported as nan then
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", OptimizeWarning)
                popt, pcov = curve_fit(model, tc, y, p0=[y.mean(), a0, f_guess, ph0], maxfev=20000)
        except RuntimeError:
            continue
        res = np.sum((model(tc, *popt) - y) ** 2)
        if best is None or res < best[0]:
            best = (res, popt, pcov)
    if best is None:
        raise RuntimeError("oscillation fit did not converge")
    _, popt, pcov = best
    err = float(np.sqrt(abs(pcov[2, 2]))) if np.all(np.isfinite(pcov)) else float("nan")
    return RamseyFit(abs(float(popt[2])), err, abs(float(popt[1])))


def simulate_frame_ramsey(fs: FrameSet, f_f: float, delays: Sequence[float]) -> float:
    """Fitted oscillation frequency (Hz) of the frame Ramsey experiment."""
    return fit_oscillation(np.asarray(delays), ramsey_populations(fs, f_f, delays)).frequency


def default_delays(f_f: float, fs: FrameSet | None = None, periods: float = 6.0, points_per_period: float = 40.0):
    """Uniform delay grid spanning a few periods of the expected slip frequency."""
    fs = fs or FrameSet.from_frequencies()
    expected = abs(abs(fs.detuning) - 2.0 * f_f)
    if expected == 0:
        return np.linspace(0.0, 20e-9, 201)
    n = int(periods * points_per_period) + 1
    return np.linspace(0.0, periods / expected, n)
