import math

import numpy as np
import pytest

from xyfamily import calib, decomp
from xyfamily.qcore import distance_global_phase, xy_unitary

PI = math.pi


def _phase_err(a, b, period=PI):
    return abs((a - b + period / 2) % period - period / 2)


def test_fit_sinusoid_exact():
    x = np.linspace(0, PI, 16, endpoint=False)
    y = 0.3 + 0.5 * np.cos(2 * x) - 0.2 * np.sin(2 * x)
    c, a, b, rms = calib.fit_sinusoid(x, y)
    assert np.allclose([c, a, b], [0.3, 0.5, -0.2], atol=1e-14)
    assert rms < 1e-14


@pytest.mark.parametrize("seed", range(6))
def test_noiseless_recovery_ideal_device(seed):
    sc = calib.CalibrationScenario.seeded(seed)
    res = calib.run_calibration(sc)
    assert _phase_err(res.phi0_estimate, sc.hidden_phi0) < 1e-10
    assert res.residual < 1e-10
    # per-pulse Z pair is recovered too (h0 - h1 is what the second step sees)
    h0, h1 = res.rz_per_pulse
    assert math.isclose(h0 - h1, sc.hidden_rz_pair[0] - sc.hidden_rz_pair[1], abs_tol=1e-9)


def test_phi0_scan_signal_shape():
    sc = calib.CalibrationScenario(0.3, (0.1, -0.2))
    grid, y = calib.phi0_scan(sc, calib.default_grid(16))
    np.testing.assert_allclose(y, -np.cos(2 * (grid + 0.3)), atol=1e-14)


def test_phi0_estimate_resolves_half_period_ambiguity():
    for phi0 in (-1.5, -0.8, 0.0, 0.9, 1.5):
        sc = calib.CalibrationScenario(phi0)
        assert _phase_err(calib.calibrate_phi0(sc), phi0) < 1e-10


def test_phi0_grid_validation():
    sc = calib.CalibrationScenario(0.2)
    with pytest.raises(ValueError):
        calib.calibrate_phi0(sc, np.linspace(0, 0.5, 16))


def test_weak_signal_raises():
    grid = calib.default_grid()
    with pytest.raises(calib.CalibrationError):
        calib.calibrate_phi0(calib.CalibrationScenario(0.0), scan=(grid, 0.01 * np.cos(2 * grid)))


def test_quadratic_method_close_but_biased():
    sc = calib.CalibrationScenario.seeded(4)
    phi0 = calib.calibrate_phi0(sc)
    fit = calib.calibrate_second_pulse_phase(sc, phi0)
    quad = calib.calibrate_second_pulse_phase(sc, phi0, method="quadratic")
    assert _phase_err(fit, quad) < 2e-2
    with pytest.raises(ValueError):
        calib.calibrate_second_pulse_phase(sc, phi0, method="spline")


def test_shot_noise_run_is_seed_deterministic():
    sc = calib.CalibrationScenario.seeded(2)
    a = calib.run_calibration(sc, shots=500, seed=7)
    b = calib.run_calibration(sc, shots=500, seed=7)
    assert a == b
    assert a.residual < 5e-2


def test_execute_program_uses_only_calibration_constants():
    sc = calib.CalibrationScenario.seeded(5)
    res = calib.run_calibration(sc)
    rng = np.random.default_rng(0)
    for _ in range(10):
        theta, beta = rng.uniform(0, 2 * PI), rng.uniform(-PI, PI)
        u = calib.execute_program(sc, res, decomp.decompose_xy(theta, beta))
        assert distance_global_phase(u, xy_unitary(beta, theta)) < 1e-9


def test_execute_program_rejects_other_pulses():
    sc = calib.CalibrationScenario(0.1)
    res = calib.run_calibration(sc)
    with pytest.raises(ValueError):
        calib.execute_program(sc, res, decomp.decompose_cphase(1.0))


def test_correction_is_idempotent():
    sc = calib.CalibrationScenario.seeded(8)
    phi0 = calib.calibrate_phi0(sc)
    again = calib.calibrate_phi0(calib.with_phi0_correction(sc, phi0))
    assert _phase_err(again, 0.0) < 1e-10


def test_result_rejects_negative_residual():
    with pytest.raises(ValueError):
        calib.CalibrationResult(0.0, 0.0, (0.0, 0.0), -1.0)
