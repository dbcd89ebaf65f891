import math

import numpy as np
import pytest

from xyfamily import frames as fr
from xyfamily.qcore import distance_global_phase


def test_detuning_and_sign():
    fs = fr.FrameSet.from_frequencies()
    assert math.isclose(fs.detuning, 937.76e6, rel_tol=1e-12)
    assert fs.sign == -1
    assert fr.FrameSet.from_frequencies(5e9, 4e9).sign == 1


def test_phase_for_beta_inverts_effective_beta():
    fs = fr.FrameSet.from_frequencies()
    for beta, t in [(0.3, 0.0), (-1.2, 37e-9), (2.9, 1.3e-6)]:
        phi = fr.phase_for_beta(fs, beta, t)
        assert math.isclose(fr.effective_beta(fs, phi, t), beta, abs_tol=1e-9)


def test_rz_update_keeps_addressed_beta():
    fs = fr.FrameSet.from_frequencies()
    fs2 = fr.apply_rz_update(fs, 0, 0.7)
    assert math.isclose(fr.effective_beta(fs2, 0.2, 0.0), fr.effective_beta(fs, 0.2, 0.0), abs_tol=1e-12)
    with pytest.raises(IndexError):
        fr.apply_rz_update(fs, 2, 0.1)


def test_frame_program_matches_explicit_rz():
    rng = np.random.default_rng(11)
    fs = fr.FrameSet.from_frequencies()
    for _ in range(20):
        ops = []
        for _ in range(6):
            if rng.random() < 0.5:
                ops.append(("rz", int(rng.integers(2)), float(rng.uniform(-3, 3))))
            else:
                ops.append(("xy", float(rng.uniform(-3, 3)), float(rng.uniform(0, 3))))
        prog = fr.compile_to_frames(fs, ops, t0=float(rng.uniform(0, 1e-6)), spacing=40e-9)
        trace = fr.run_frame_program(fs, prog, t0=0.0)
        got = fr.frame_correction(trace.frames) @ trace.unitary
        assert distance_global_phase(got, fr.explicit_unitary(ops)) < 1e-10


def test_instruction_validation():
    with pytest.raises(ValueError):
        fr.FrameInstruction("jump")
    with pytest.raises(ValueError):
        fr.FrameInstruction("advance", duration=-1.0)


def test_ramsey_line_single_point():
    fs = fr.FrameSet.from_frequencies()
    d = fr.default_delays(40e6, fs)
    assert math.isclose(fr.simulate_frame_ramsey(fs, 40e6, d), 857.76e6, rel_tol=1e-6)


def test_ramsey_flat_when_frame_matches():
    fs = fr.FrameSet.from_frequencies()
    f_f = fs.detuning / 2
    assert fr.simulate_frame_ramsey(fs, f_f, fr.default_delays(f_f, fs)) == 0.0


def test_fit_oscillation_recovers_frequency_with_noise():
    rng = np.random.default_rng(5)
    t = np.linspace(0, 2e-6, 400)
    y = 0.5 + 0.4 * np.cos(2 * np.pi * 3.3e6 * t + 0.2) + rng.normal(0, 0.01, t.size)
    fit = fr.fit_oscillation(t, y)
    assert abs(fit.frequency - 3.3e6) < 5 * fit.stderr + 1e3


def test_fit_oscillation_rejects_bad_input():
    with pytest.raises(ValueError):
        fr.fit_oscillation(np.arange(5.0), np.arange(5.0))
    t = np.linspace(0, 1, 50)
    with pytest.raises(RuntimeError):
        fr.fit_oscillation(t, np.cos(2 * np.pi * 0.5 * t))
