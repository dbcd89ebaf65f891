"""Acceptance criteria 1-11. Each test prints one ``criterion N: PASS|FAIL`` line."""
import math
import time
from dataclasses import replace

import numpy as np
import pytest

from xyfamily import calib, decomp, frames, pulsesim, qaoa
from xyfamily.bench import (
    NoiseModel,
    clifford_group,
    coherence_limited_fidelity,
    compose,
    depolarizing_for_fidelity,
    invert,
    iswap_composition,
    lindblad_fidelity,
    run_irb,
    scaled_fidelity,
)
from xyfamily.bench.clifford import CliffordElement
from xyfamily.qcore import (
    Circuit,
    Op,
    QuditSpace,
    ccphase,
    cphase,
    cz,
    distance_global_phase,
    iswap,
    rz,
    xy_unitary,
)

PI = math.pi


@pytest.fixture
def report(capsys):
    def _report(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    return _report


def test_criterion_01_identities(report):
    rng = np.random.default_rng(101)
    worst = {"conjugation": 0.0, "two_pulse": 0.0, "iswap_absorption": 0.0}
    for _ in range(1000):
        beta, theta = rng.uniform(-2 * PI, 2 * PI, 2)
        a = np.kron(rz(-beta / 2).matrix, rz(beta / 2).matrix)
        conj = a @ xy_unitary(0.0, theta).matrix @ a.conj().T
        worst["conjugation"] = max(worst["conjugation"], distance_global_phase(conj, xy_unitary(beta, theta)))
    for _ in range(1000):
        beta, theta = rng.uniform(-2 * PI, 2 * PI), rng.uniform(0, 2 * PI)
        prog = decomp.decompose_xy(theta, beta)
        worst["two_pulse"] = max(worst["two_pulse"], decomp.verify(prog, xy_unitary(beta, theta)))
    for _ in range(1000):
        beta = rng.uniform(-2 * PI, 2 * PI)
        u = np.kron(rz(-beta).matrix, rz(beta).matrix) @ iswap().matrix
        worst["iswap_absorption"] = max(worst["iswap_absorption"], distance_global_phase(u, xy_unitary(beta, PI)))
    ok = all(v < 1e-10 for v in worst.values())
    report(1, ok, ", ".join(f"{k} max {v:.1e}" for k, v in worst.items()))
    assert ok


def test_criterion_02_ramsey_line(report):
    fs = frames.FrameSet.from_frequencies()
    f_values = np.array([5, 40, 80, 120, 170, 220, 300, 380, 520, 700]) * 1e6
    worst = 0.0
    for f_f in f_values:
        got = frames.simulate_frame_ramsey(fs, f_f, frames.default_delays(f_f, fs))
        want = abs(937.76e6 - 2 * f_f)
        worst = max(worst, abs(got - want) / want)
    at40 = frames.simulate_frame_ramsey(fs, 40e6, frames.default_delays(40e6, fs))
    ok = worst < 1e-4 and abs(at40 - 857.76e6) / 857.76e6 < 1e-4
    report(2, ok, f"max relative error {worst:.1e} over 10 frame frequencies; f_f = 40 MHz -> {at40 / 1e6:.4f} MHz")
    assert ok


def test_criterion_03_phase_law(report):
    t0 = time.perf_counter()
    prof = pulsesim.half_flux_profile()
    rng = np.random.default_rng(303)
    phis = rng.uniform(0, 2 * PI, 20)
    beta_err = []
    theta_op = []
    theta_edge = []
    t_edge = 2 / prof.pulse.f_p
    for phi in phis:
        pulse = prof.full_pulse(phi)
        ex = pulsesim.evolve(prof.pair, pulse)
        want = pulsesim.predicted_beta(prof.pair, pulse)
        beta_err.append(abs((ex.beta - want + PI) % (2 * PI) - PI))
        theta_op.append(ex.theta)
        theta_edge.append(pulsesim.evolve(prof.pair, replace(pulse, t_rise=t_edge)).theta)
    elapsed = time.perf_counter() - t0
    spread_op, spread_edge = float(np.ptp(theta_op)), float(np.ptp(theta_edge))
    ok = max(beta_err) < 1e-2 and spread_op < 1e-3 and spread_edge < 1e-3 and elapsed <= 60
    report(3, ok, f"f_p = {prof.pulse.f_p / 1e6:.2f} MHz; beta max error {max(beta_err):.1e} rad; "
                  f"theta spread {spread_op:.1e} rad at t_rise = {prof.pulse.t_rise * 1e9:.0f} ns, "
                  f"{spread_edge:.1e} rad at t_rise = 2/f_p; {elapsed:.0f} s")
    assert max(beta_err) < 1e-2
    assert spread_op < 1e-3
    assert spread_edge < 1e-3
    assert elapsed <= 60


def test_criterion_04_chevron(report):
    t0 = time.perf_counter()
    prof = pulsesim.default_profile()
    pair, pulse = prof.pair, prof.pulse
    f_res = pulsesim.resonance_omega_p(pair, pulse.phi_ac) / (2 * PI)
    step = 0.5e6
    f_grid = f_res + step * np.arange(-5, 6)
    durations = np.linspace(0, 600e-9, 121)
    grid = pulsesim.chevron(pair, pulse, f_grid, durations)
    f_peak = f_grid[int(np.argmax(grid.max(axis=1)))]
    # on-resonance trace at the tuned modulation frequency; two-level Rabi oracle
    t = np.linspace(0, 1.2e-6, 481)
    trace = pulsesim.transfer_trace(pair, pulse, t)
    keep = t >= pulse.t_rise
    period = 1 / frames.fit_oscillation(t[keep], trace[keep]).frequency
    oracle = 1 / (2 * pulsesim.g_eff(pair, pulse))  # pi / g_eff with g_eff in rad/s
    rel = period / oracle - 1
    elapsed = time.perf_counter() - t0
    ok = abs(f_peak - f_res) <= step and abs(rel) < 0.01 and elapsed <= 60
    report(4, ok, f"peak at {f_peak / 1e6:.3f} MHz vs resonance {f_res / 1e6:.3f} MHz (step {step / 1e6} MHz); "
                  f"period {period * 1e9:.2f} ns vs pi/g_eff {oracle * 1e9:.2f} ns ({rel:+.2%}); {elapsed:.0f} s")
    assert abs(f_peak - f_res) <= step
    assert abs(rel) < 0.01
    assert elapsed <= 60


def test_criterion_05_irb(report):
    t0 = time.perf_counter()
    target = 0.9798
    model = NoiseModel(depolarizing={"iswap": depolarizing_for_fidelity(target),
                                     "clifford": depolarizing_for_fidelity(0.99)})
    unit = Circuit(QuditSpace.qubits(2), (Op("iswap", (), (0, 1)),))
    res = run_irb(unit, model, randomizations=32, shots=500, rng=20200505, native="cz")
    recovered = abs(res.fidelity - target) <= 0.003

    scale_model = NoiseModel(depolarizing={"xy": depolarizing_for_fidelity(0.99),
                                           "clifford": depolarizing_for_fidelity(0.99)})
    units = {1: iswap_composition(1), 2: iswap_composition(2, [0.7]), 3: iswap_composition(3, [0.7, 1.1])}
    scaled = {}
    for n, u in units.items():
        r = run_irb(u, scale_model, randomizations=32, shots=500, rng=100 + n, native="iswap")
        scaled[n] = scaled_fidelity(r)
    pairs_ok = all(abs(scaled[a][0] - scaled[b][0]) <= 2 * math.hypot(scaled[a][1], scaled[b][1])
                   for a in scaled for b in scaled if a < b)
    truth_ok = all(abs(f - 0.99) <= 2 * e for f, e in scaled.values())
    elapsed = time.perf_counter() - t0
    ok = recovered and pairs_ok and truth_ok and elapsed <= 300
    detail = ", ".join(f"n={n}: {f:.4f}+-{e:.4f}" for n, (f, e) in scaled.items())
    report(5, ok, f"recovered F = {res.fidelity:.4f} (injected {target}); per-pulse {detail}; {elapsed:.0f} s")
    assert recovered
    assert pairs_ok and truth_ok
    assert elapsed <= 300


def test_criterion_06_coherence_limit(report):
    model = NoiseModel.table1()
    out = {}
    for dur, want in ((240e-9, 0.9815), (304e-9, 0.9765)):
        closed = coherence_limited_fidelity(model, dur)
        lind = lindblad_fidelity(model, dur)
        out[dur] = (closed, lind, want)
    ok = all(abs(c - w) <= 0.003 and abs(c - l) < 1e-6 for c, l, w in out.values())
    report(6, ok, "; ".join(f"{d * 1e9:.0f} ns: {c:.4%} (target {w:.2%}), Lindblad diff {abs(c - l):.1e}"
                            for d, (c, l, w) in out.items()))
    assert ok


def test_criterion_07_qaoa_counts(report):
    expect = {("ring4", "cz_only"): {"CZ": 10}, ("ring4", "cz_and_xy"): {"CZ": 6, "XY": 2},
              ("k4", "cz_only"): {"CZ": 17}, ("k4", "cz_and_xy"): {"CZ": 7, "XY": 5}}
    rng = np.random.default_rng(707)
    worst = 0.0
    counts_ok = True
    for (name, gs), want in expect.items():
        for g in (qaoa.GRAPHS[name](), qaoa.GRAPHS[name]().with_random_weights()):
            for gamma, beta in rng.uniform(-PI, PI, (3, 2)):
                ang = qaoa.QAOAAngles(float(gamma), float(beta))
                comp = qaoa.route(qaoa.build_qaoa_circuit(g, ang), gateset=gs)
                got = {k: v for k, v in comp.counts.items() if v}
                counts_ok &= got == want
                worst = max(worst, qaoa.verify_compiled(comp, g, ang))
    ok = counts_ok and worst < 1e-10
    report(7, ok, f"counts {'match' if counts_ok else 'MISMATCH'} in all 4 cases; max verify distance {worst:.1e}")
    assert counts_ok
    assert worst < 1e-10


def test_criterion_08_landscape_oracle(report):
    gam = np.linspace(0, 2 * PI, 24, endpoint=False)
    bet = np.linspace(0, PI, 12, endpoint=False)
    worst = 0.0
    for g in (qaoa.ring_graph(), qaoa.complete_graph(), qaoa.ring_graph().with_random_weights(),
              qaoa.complete_graph().with_random_weights()):
        land = qaoa.landscape(g, gam, bet)
        oracle = np.array([[qaoa.expected_cut_enumeration(g, qaoa.QAOAAngles(a, b)) for b in bet] for a in gam])
        worst = max(worst, float(np.max(np.abs(land - oracle))))
    ok = worst < 1e-12
    report(8, ok, f"max |landscape - enumeration| = {worst:.1e} over 4 graphs x {gam.size * bet.size} points")
    assert ok


def test_criterion_09_qutrit_constructions(report):
    rng = np.random.default_rng(909)
    w2 = w3 = 0.0
    for theta in rng.uniform(-2 * PI, 2 * PI, 100):
        w2 = max(w2, decomp.verify(decomp.decompose_cphase(theta), cphase(theta)))
        w3 = max(w3, decomp.verify(decomp.decompose_ccphase(theta), ccphase(theta)))
    ccz = np.diag([1, 1, 1, 1, 1, 1, 1, -1]).astype(complex)
    d_cz = decomp.verify(decomp.decompose_cphase(PI), cz())
    d_ccz = decomp.verify(decomp.decompose_ccphase(PI), ccz)
    leak = max(decomp.leakage(decomp.decompose_cphase(PI)), decomp.leakage(decomp.decompose_ccphase(PI)))
    ok = max(w2, w3, d_cz, d_ccz) < 1e-10 and leak < 1e-12
    report(9, ok, f"cphase max {w2:.1e}, ccphase max {w3:.1e}, CZ {d_cz:.1e}, CCZ {d_ccz:.1e}, leakage {leak:.1e}")
    assert ok


def _phase_err(a, b):
    return abs((a - b + PI / 2) % PI - PI / 2)


def test_criterion_10_calibration(report):
    t0 = time.perf_counter()
    ideal = calib.CalibrationScenario.seeded(10)
    r_ideal = calib.run_calibration(ideal)
    device = calib.CalibrationScenario.seeded(10, device=pulsesim.half_flux_profile())
    r_dev = calib.run_calibration(device, n_points=16)
    # 128-point scans at 500 shots per setting, every seed must pass
    shot_res = [calib.run_calibration(ideal, shots=500, seed=s, n_points=128) for s in range(20)]
    r_shots = max(shot_res, key=lambda r: r.residual)
    elapsed = time.perf_counter() - t0
    phi_err = _phase_err(r_ideal.phi0_estimate, ideal.hidden_phi0)
    ok = (r_ideal.residual < 1e-6 and r_dev.residual < 1e-6 and phi_err < 1e-6
          and r_shots.residual < 1e-2 and elapsed <= 60)
    report(10, ok, f"noiseless residual {r_ideal.residual:.1e} (ideal), {r_dev.residual:.1e} (pulse model); "
                   f"phi0 error {phi_err:.1e}; 500 shots x 20 seeds: worst residual {r_shots.residual:.1e}, "
                   f"phi0 error {_phase_err(r_shots.phi0_estimate, ideal.hidden_phi0):.1e}; {elapsed:.0f} s")
    assert r_ideal.residual < 1e-6 and phi_err < 1e-6
    assert r_dev.residual < 1e-6
    assert r_shots.residual < 1e-2
    assert elapsed <= 60


def test_criterion_11_clifford(report):
    group = clifford_group()
    ident = CliffordElement.identity(2)
    rng = np.random.default_rng(1111)
    exact = True
    worst = 0.0
    for k in range(1000):
        a, b = group[int(rng.integers(len(group)))], group[int(rng.integers(len(group)))]
        ab = compose(a, b)
        exact &= compose(ab, invert(ab)) == ident and invert(invert(ab)) == ab
        exact &= compose(compose(ab, invert(b)), invert(a)) == ident
        if k % 10 == 0:
            # independent route: dense unitaries
            worst = max(worst, distance_global_phase(invert(ab).unitary() @ ab.unitary(), np.eye(4)))
    ok = len(group) == 11520 and exact and worst < 1e-10
    report(11, ok, f"group order {len(group)}; 1000 round-trips {'exact' if exact else 'BROKEN'}; "
                   f"unitary check {worst:.1e}")
    assert len(group) == 11520
    assert exact and worst < 1e-10
