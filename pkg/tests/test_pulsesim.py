import math

import numpy as np
import pytest

from xyfamily import pulsesim as ps


@pytest.fixture(scope="module")
def prof():
    return ps.default_profile()


def test_squid_curve_endpoints():
    tr = ps.TunableTransmon.from_squid_curve()
    assert math.isclose(tr.frequency_hz(0.0), ps.F_MAX_HZ, rel_tol=1e-6)
    assert math.isclose(tr.frequency_hz(math.pi), ps.F_MIN_HZ, rel_tol=1e-6)


def test_bessel_expansion_matches_direct_waveform(prof):
    # harmonic series via J_k against the flux waveform fed through f(phi)
    p = prof.full_pulse(0.37)
    t = np.linspace(0, p.duration, 57)
    np.testing.assert_allclose(ps.omega_T(prof.pair, p, t), ps.omega_T_direct(prof.pair, p, t), rtol=0, atol=2 * math.pi * 2e3)


def test_envelope_shape(prof):
    p = prof.full_pulse()
    env = ps.envelope(p, np.array([0.0, p.t_rise + p.tau / 2, p.duration]))
    assert env[0] < 1e-3 and env[2] < 1e-3
    assert math.isclose(env[1], 1.0, abs_tol=1e-6)
    with pytest.raises(ValueError):
        ps.FluxPulse(1.0, 1.0, t_rise=0.0)


def test_sideband_weights_normalised(prof):
    w = ps.sideband_weights(prof.pair, prof.full_pulse(), n_max=40)
    assert math.isclose(sum(abs(v) ** 2 for v in w.values()), 1.0, rel_tol=1e-9)


def test_g_eff_value(prof):
    assert math.isclose(ps.g_eff(prof.pair, prof.pulse), 1.7319e6, rel_tol=1e-3)


def test_full_pulse_is_swap(prof):
    ex = ps.evolve(prof.pair, prof.full_pulse())
    assert math.isclose(ex.theta, math.pi, abs_tol=1e-6)
    np.testing.assert_allclose(ex.block.conj().T @ ex.block, np.eye(2), atol=1e-8)


def test_half_pulse_rotates_quarter_turn(prof):
    ex = ps.evolve(prof.pair, prof.half_pulse())
    assert math.isclose(ex.theta, math.pi / 2, abs_tol=1e-6)


def test_phase_law_on_default_profile(prof):
    for phi in (0.0, 1.3, -2.2):
        p = prof.full_pulse(phi)
        ex = ps.evolve(prof.pair, p)
        d = (ex.beta - ps.predicted_beta(prof.pair, p) + math.pi) % (2 * math.pi) - math.pi
        assert abs(d) < 1e-4


def test_printed_alpha_differs_from_ramp_integral(prof):
    p = prof.full_pulse()
    assert abs(ps.alpha(prof.pair, p, "printed") - ps.alpha(prof.pair, p)) > 1.0
    with pytest.raises(ValueError):
        ps.alpha(prof.pair, p, "guess")


def test_analytic_dynamical_phase_in_window(prof):
    p = prof.full_pulse(0.4)
    t = p.t_rise + p.tau / 2 + 3e-9
    a = ps.dynamical_phase(prof.pair, p, t, "analytic")
    n = ps.dynamical_phase(prof.pair, p, t, "numeric")
    assert abs(a - n) < 1e-3


def test_transfer_trace_order_independent(prof):
    t = np.array([200e-9, 50e-9, 120e-9])
    a = ps.transfer_trace(prof.pair, prof.pulse, t)
    b = ps.transfer_trace(prof.pair, prof.pulse, np.sort(t))
    np.testing.assert_allclose(a[np.argsort(t)], b, atol=1e-12)


def test_sideband_chevron_rabi_and_parallel_equal(prof):
    f0 = ps.resonance_omega_p(prof.pair, prof.pulse.phi_ac) / (2 * math.pi)
    fg = f0 + np.array([-2e6, -1e6, 0.0, 1e6, 2e6])
    tg = np.linspace(0, 600e-9, 31)
    m = ps.chevron(prof.pair, prof.pulse, fg, tg, model="sideband")
    assert np.argmax(m.max(axis=1)) == 2
    ge = ps.g_eff(prof.pair, ps.FluxPulse(prof.pulse.phi_ac, 2 * math.pi * f0))
    np.testing.assert_allclose(m[2], np.sin(2 * math.pi * ge * tg) ** 2, atol=1e-12)
    m2 = ps.chevron(prof.pair, prof.pulse, fg, tg, model="sideband", jobs=2)
    np.testing.assert_array_equal(m, m2)
    with pytest.raises(ValueError):
        ps.chevron(prof.pair, prof.pulse, fg, tg, model="magic")


def test_profile_roundtrip_and_hash(prof, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(prof.dumps())
    back = ps.load_profile(path)
    assert back == prof
    assert back.hash == prof.hash
    assert ps.half_flux_profile().hash != prof.hash


def test_realize_pulse_kind_check(prof):
    with pytest.raises(ValueError):
        ps.realize_pulse(prof, "third", 0.0)


def test_default_profile_rederived():
    built = ps.build_default_profile().to_dict()
    frozen = ps.DEFAULT_PROFILE_DATA
    for k, v in frozen.items():
        np.testing.assert_allclose(built[k], v, rtol=1e-7, err_msg=k)


def test_unreachable_mean_frequency():
    tr = ps.TunableTransmon.from_squid_curve()
    with pytest.raises(ValueError):
        ps.solve_phi_ac(tr, 1e9)
