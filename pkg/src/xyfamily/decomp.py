"""
Composite-pulse compiler.

Every two-qubit gate here is built from a handful of calibrated pulse shapes whose
only free parameter is the phase, plus Z rotations that live in the frames.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from . import frames as fr
from .qcore import (
    QuditSpace,
    Unitary,
    ccphase,
    cphase,
    distance_global_phase,
    embed,
    lift,
    restrict,
    rx_phased,
    rz,
    xy02_unitary,
    xy20_unitary,
    xy_unitary,
)

PI = math.pi


@dataclass(frozen=True)
class CalibratedPulseKind:
    kind: str
    nominal_theta: float
    duration: float
    n_sites: int
    template: object | None = None  # a pulsesim FluxPulse, bound at execution time

    def __post_init__(self):
        if not any(math.isclose(self.nominal_theta, v) for v in (PI / 2, PI)):
            raise ValueError("calibrated pulses rotate by pi/2 or pi")


PULSE_KINDS: dict[str, CalibratedPulseKind] = {
    "xy_half": CalibratedPulseKind("xy_half", PI / 2, 152e-9, 2),
    "xy_pi": CalibratedPulseKind("xy_pi", PI, 240e-9, 2),
    "xy02_pi": CalibratedPulseKind("xy02_pi", PI, 240e-9, 2),
    "xy20_pi": CalibratedPulseKind("xy20_pi", PI, 240e-9, 2),
    "x_half": CalibratedPulseKind("x_half", PI / 2, 20e-9, 1),
}


@dataclass(frozen=True)
class FluxStep:
    kind: str
    phase: float
    targets: tuple[int, ...]


@dataclass(frozen=True)
class FrameStep:
    qubit: int
    angle: float


Step = Union[FluxStep, FrameStep]


@dataclass(frozen=True)
class PulseProgram:
    space: QuditSpace
    steps: tuple[Step, ...]
    declared: Unitary | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            if isinstance(s, FluxStep):
                spec = PULSE_KINDS.get(s.kind)
                if spec is None:
                    raise KeyError(f"unknown pulse kind {s.kind!r}")
                if len(s.targets) != spec.n_sites:
                    raise ValueError(f"{s.kind} needs {spec.n_sites} targets, got {s.targets}")
                if any(not 0 <= t < self.space.n_sites for t in s.targets):
                    raise IndexError(f"target outside space in {s}")
            elif not 0 <= s.qubit < self.space.n_sites:
                raise IndexError(f"frame update on missing site {s.qubit}")

    @property
    def pulses(self) -> list[FluxStep]:
        return [s for s in self.steps if isinstance(s, FluxStep)]

    @property
    def frame_steps(self) -> list[FrameStep]:
        return [s for s in self.steps if isinstance(s, FrameStep)]

    @property
    def duration(self) -> float:
        return sum(PULSE_KINDS[p.kind].duration for p in self.pulses)

    def to_dict(self) -> dict:
        steps = []
        for s in self.steps:
            if isinstance(s, FluxStep):
                steps.append({"flux_pulse": s.kind, "phase": _sig12(s.phase), "targets": list(s.targets)})
            else:
                steps.append({"rz_frame": s.qubit, "angle": _sig12(s.angle)})
        return {"dims": list(self.space.dims), "steps": steps}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "PulseProgram":
        steps = []
        for s in d["steps"]:
            if "flux_pulse" in s:
                steps.append(FluxStep(s["flux_pulse"], float(s["phase"]), tuple(s["targets"])))
            else:
                steps.append(FrameStep(int(s["rz_frame"]), float(s["angle"])))
        return cls(QuditSpace(tuple(d["dims"])), tuple(steps))


def _sig12(x: float) -> float:
    return float(f"{x:.12g}")


# -- pulse execution -----------------------------------------------------------

PulseExecutor = Callable[[FluxStep], Unitary]


def ideal_pulse(step: FluxStep) -> Unitary:
    k, b = step.kind, step.phase
    if k == "xy_half":
        return xy_unitary(b, PI / 2)
    if k == "xy_pi":
        return xy_unitary(b, PI)
    if k == "xy02_pi":
        return xy02_unitary(b, PI)
    if k == "xy20_pi":
        return xy20_unitary(b, PI)
    if k == "x_half":
        return rx_phased(b, PI / 2)
    raise KeyError(f"unknown pulse kind {k!r}")


def reconstruct(p: PulseProgram, executor: PulseExecutor = ideal_pulse) -> Unitary:
    """Multiply out a program; frame updates become explicit Z rotations."""
    space = p.space
    u = np.eye(space.dim, dtype=complex)
    for s in p.steps:
        if isinstance(s, FluxStep):
            g = executor(s)
            g = lift(g, [space.dims[t] for t in s.targets])
            u = embed(g, s.targets, space).matrix @ u
        else:
            g = lift(rz(s.angle), [space.dims[s.qubit]])
            u = embed(g, [s.qubit], space).matrix @ u
    return Unitary(u, space, check=False)


def reconstruct_via_frames(p: PulseProgram, fs: fr.FrameSet | None = None, t0: float = 0.0) -> Unitary:
    """Two-qubit XY programs executed as frame updates and phase-addressed flux pulses."""
    if p.space.dims != (2, 2):
        raise ValueError("frame execution covers two-qubit programs only")
    fs = fs or fr.FrameSet.from_frequencies()
    ops = []
    for s in p.steps:
        if isinstance(s, FrameStep):
            ops.append(("rz", s.qubit, s.angle))
        elif s.kind in ("xy_half", "xy_pi") and s.targets == (0, 1):
            ops.append(("xy", s.phase, PULSE_KINDS[s.kind].nominal_theta))
        else:
            raise ValueError(f"pulse {s} cannot be frame-addressed")
    prog = []
    fset = fs
    t = t0
    for op in ops:
        if op[0] == "rz":
            prog.append(fr.FrameInstruction("rz_update", qubit=op[1], angle=op[2]))
            fset = fr.apply_rz_update(fset, op[1], op[2])
        else:
            dur = PULSE_KINDS["xy_half"].duration if op[2] == PI / 2 else PULSE_KINDS["xy_pi"].duration
            prog.append(fr.FrameInstruction("flux_event", phi_p=fr.phase_for_beta(fset, op[1], t), theta=op[2], duration=dur))
            t += dur
    trace = fr.run_frame_program(fs, prog, t0=t0)
    return fr.frame_correction(trace.frames) @ trace.unitary


# -- decompositions -------------------------------------------------------------

def decompose_xy(theta: float, beta: float = 0.0) -> PulseProgram:
    """XY(beta, theta) from two sqrt(iSWAP)-class pulses plus a frame-update Z pair.

    The pulses act in time order with phases ``beta - pi/2`` and
    ``beta + pi/2 - theta``; the closing frame pair ``(-theta/2, +theta/2)`` is the
    01/10-subspace Z rotation. Only the phases depend on ``theta``.
    """
    steps = (
        FluxStep("xy_half", beta - PI / 2, (0, 1)),
        FluxStep("xy_half", beta + PI / 2 - theta, (0, 1)),
        FrameStep(0, -theta / 2),
        FrameStep(1, theta / 2),
    )
    return PulseProgram(QuditSpace.qubits(2), steps, xy_unitary(beta, theta))


def iswap_phase_absorption(beta: float) -> tuple[PulseProgram, tuple[float, float]]:
    """Single iSWAP pulse plus the post-gate frame pair that turns it into XY(beta, pi).

    ``(rz(-beta) ⊗ rz(beta)) · iSWAP == XY(beta, pi)`` holds exactly, not just up to a
    global phase.
    """
    prog = PulseProgram(QuditSpace.qubits(2), (FluxStep("xy_pi", 0.0, (0, 1)),), xy_unitary(0.0, PI))
    return prog, (-beta, beta)


def with_post_frames(prog: PulseProgram, pair: Sequence[float]) -> PulseProgram:
    steps = prog.steps + tuple(FrameStep(q, a) for q, a in enumerate(pair) if a != 0.0)
    return PulseProgram(prog.space, steps)


def decompose_cphase(theta: float) -> PulseProgram:
    """CPHASE(theta) from two XY02(pi) pulses on two transmons.

    Each pulse maps |11> -> -i e^{-i b}|02>, so the round trip picks up
    ``-exp(i(b2 - b1))``; the relative phase ``theta - pi`` sets the conditional phase.
    No frame corrections are needed.
    """
    steps = (
        FluxStep("xy02_pi", 0.0, (0, 1)),
        FluxStep("xy02_pi", theta - PI, (0, 1)),
    )
    return PulseProgram(QuditSpace.qutrits(2), steps, cphase(theta))


# Phases found by symbolic phase-polynomial analysis of the pulse order below. The
# XY02 sequence alone yields phase ``(b4 - b1 + pi) q0 q1 + (b3 - b2 + pi) q1 q2 (1 - q0)``;
# flipping q0 around it with two X(pi) drives turns the second term into CCPHASE.
CCPHASE_B1 = 0.0
CCPHASE_B2 = 0.0
CCPHASE_B4 = CCPHASE_B1 - PI


def decompose_ccphase(theta: float) -> PulseProgram:
    """CCPHASE(theta) on three transmons in a line using four XY02(pi) pulses.

    Sequence: X(pi) on q0, XY02 on (0,1), XY02 on (1,2) twice, XY02 on (0,1), X(pi) on
    q0. The X(pi) rotations are pairs of the calibrated single-qubit half pulses.
    """
    x_pi = (FluxStep("x_half", 0.0, (0,)), FluxStep("x_half", 0.0, (0,)))
    steps = (
        *x_pi,
        FluxStep("xy02_pi", CCPHASE_B1, (0, 1)),
        FluxStep("xy02_pi", CCPHASE_B2, (1, 2)),
        FluxStep("xy02_pi", CCPHASE_B2 + theta - PI, (1, 2)),
        FluxStep("xy02_pi", CCPHASE_B4, (0, 1)),
        *x_pi,
    )
    return PulseProgram(QuditSpace.qutrits(3), steps, ccphase(theta))


class PulsesimExecutor:
    """Runs ``xy_half`` / ``xy_pi`` steps through the time-domain pulse model.

    The reference phase and the constant Z content of each pulse shape are measured
    once at flux phase zero; a requested interaction phase ``beta`` is then played at
    ``phi_p = (beta_ref - beta) / 2`` and the constant Z content is removed, as the
    calibrated frame corrections would do on hardware.
    """

    def __init__(self, profile=None):
        from . import pulsesim

        self._ps = pulsesim
        self.profile = profile or pulsesim.default_profile()
        self._ref = {}
        for kind in ("half", "full"):
            ex = pulsesim.realize_pulse(self.profile, kind, 0.0)
            self._ref[kind] = (ex.beta, -float(np.angle(ex.block[0, 0])))

    def __call__(self, step: FluxStep) -> Unitary:
        kinds = {"xy_half": "half", "xy_pi": "full"}
        if step.kind not in kinds:
            return ideal_pulse(step)
        kind = kinds[step.kind]
        beta_ref, zeta = self._ref[kind]
        ex = self._ps.realize_pulse(self.profile, kind, (beta_ref - step.phase) / 2)
        # undo the symmetric Z content diag(e^{-i zeta/2}, e^{i zeta/2}) on both sides
        d = np.diag([np.exp(0.5j * zeta), np.exp(-0.5j * zeta)])
        m = np.eye(4, dtype=complex)
        m[1:3, 1:3] = d @ ex.block @ d
        return Unitary(m, QuditSpace.qubits(2), check=False)


def qubit_block(p: PulseProgram, executor: PulseExecutor = ideal_pulse) -> np.ndarray:
    """Reconstructed unitary restricted to the all-levels-<=1 subspace."""
    return restrict(reconstruct(p, executor), p.space, 1)


def leakage(p: PulseProgram, executor: PulseExecutor = ideal_pulse) -> float:
    """Largest population that leaves the qubit subspace from any qubit basis input."""
    blk = qubit_block(p, executor)
    return float(np.max(1.0 - np.sum(np.abs(blk) ** 2, axis=0)))


def verify(p: PulseProgram, target=None, executor: PulseExecutor = ideal_pulse) -> float:
    """Distance between a program and its declared (or given) unitary, up to global phase."""
    target = p.declared if target is None else target
    if target is None:
        raise ValueError("program declares no target unitary")
    tgt = np.asarray(target)
    if tgt.shape[0] == p.space.dim:
        return distance_global_phase(reconstruct(p, executor), tgt)
    return distance_global_phase(qubit_block(p, executor), tgt)
