"""Command-line front end.

Every subcommand writes its artifacts plus ``manifest.json`` into ``--out`` and prints
the main JSON result. Exit status: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__

PROFILE_ENV = "XYFAMILY_PROFILE"


class DomainError(Exception):
    pass


# -- shared plumbing ------------------------------------------------------------------

def _load_profile(spec: str | None):
    from . import pulsesim

    spec = spec or os.environ.get(PROFILE_ENV) or "default"
    if spec == "default":
        return pulsesim.default_profile()
    if spec == "half-flux":
        return pulsesim.half_flux_profile()
    try:
        return pulsesim.load_profile(spec)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DomainError(f"--profile: cannot read device profile {spec!r}: {exc}") from None


class Run:
    """Output directory, seed bookkeeping and the manifest for one invocation."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        if args.seed is None:
            args.seed = int(np.random.SeedSequence().entropy % (2**63))
        self.seed = args.seed
        self.out = Path(args.out or Path("out") / command)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: list[str] = []
        self.profile_hash = None

    def write_json(self, name: str, obj) -> Path:
        p = self.out / name
        p.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")
        self.files.append(name)
        return p

    def write_csv(self, name: str, header, rows) -> Path:
        p = self.out / name
        with open(p, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for r in rows:
                w.writerow([_fmt(x) for x in r])
        self.files.append(name)
        return p

    def finish(self, result) -> int:
        params = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        manifest = {
            "command": self.command,
            "parameters": params,
            "seed": self.seed,
            "profile_hash": self.profile_hash,
            "version": __version__,
            "outputs": sorted(self.files),
            "created": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n")
        if not self.args.quiet:
            print(json.dumps(result, indent=2, sort_keys=True, default=_json_default))
        return 0


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return x


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


# -- subcommands --------------------------------------------------------------------------

def cmd_chevron(args) -> int:
    from . import pulsesim

    run = Run(args, "chevron")
    prof = _load_profile(args.profile)
    run.profile_hash = prof.hash
    f0 = prof.pulse.f_p
    lo = args.fp_min_mhz * 1e6 if args.fp_min_mhz is not None else f0 - 5e6
    hi = args.fp_max_mhz * 1e6 if args.fp_max_mhz is not None else f0 + 5e6
    if hi <= lo:
        raise UsageError("--fp-max-mhz must exceed --fp-min-mhz")
    fgrid = np.linspace(lo, hi, args.fp_points)
    durations = np.linspace(0.0, args.duration_max_ns * 1e-9, args.duration_points)
    grid = pulsesim.chevron(prof.pair, prof.pulse, fgrid, durations, model=args.model, jobs=args.jobs)
    run.write_csv("chevron.csv", ["f_p_hz", "duration_s", "p_transfer"],
                  [(float(f), float(d), float(grid[i, j])) for i, f in enumerate(fgrid) for j, d in enumerate(durations)])
    peak = int(np.argmax(grid.max(axis=1)))
    ge = pulsesim.g_eff(prof.pair, prof.pulse)
    result = {
        "resonance_estimate_hz": float(fgrid[peak]),
        "resonance_predicted_hz": pulsesim.resonance_omega_p(prof.pair, prof.pulse.phi_ac) / (2 * math.pi),
        "grid_step_hz": float(fgrid[1] - fgrid[0]) if len(fgrid) > 1 else 0.0,
        "g_eff_hz": ge,
        "predicted_period_s": 1 / (2 * ge),
        "model": args.model,
    }
    run.write_json("chevron.json", result)
    return run.finish(result)


def cmd_ramsey(args) -> int:
    from . import frames

    run = Run(args, "ramsey")
    fs = frames.FrameSet.from_frequencies()
    entries = []
    rows = []
    for f_mhz in args.frame_freq_mhz:
        f_f = f_mhz * 1e6
        delays = frames.default_delays(f_f, fs)
        pops = frames.ramsey_populations(fs, f_f, delays)
        fit = frames.fit_oscillation(delays, pops)
        entries.append({
            "frame_freq_hz": f_f,
            "fitted_frequency_hz": fit.frequency,
            "fitted_stderr_hz": fit.stderr,
            "predicted_hz": abs(abs(fs.detuning) - 2 * f_f),
        })
        rows += [(f_f, float(t), float(p)) for t, p in zip(delays, pops)]
    run.write_csv("ramsey.csv", ["frame_freq_hz", "delay_s", "p_tunable_excited"], rows)
    result = entries[0] if len(entries) == 1 else {"results": entries}
    run.write_json("ramsey.json", result)
    return run.finish(result)


def _build_program(gate: str, theta: float, beta: float):
    from . import decomp
    from .qcore import xy_unitary

    if gate == "xy":
        return decomp.decompose_xy(theta, beta), None
    if gate == "iswap":
        prog, pair = decomp.iswap_phase_absorption(beta)
        return decomp.with_post_frames(prog, pair), xy_unitary(beta, math.pi)
    if gate == "cphase":
        return decomp.decompose_cphase(theta), None
    if gate == "ccphase":
        return decomp.decompose_ccphase(theta), None
    raise UsageError(f"--gate: unknown gate {gate!r}")


def _target(gate: str, theta: float, beta: float):
    from .qcore import ccphase, cphase, xy_unitary

    return {"xy": lambda: xy_unitary(beta, theta), "iswap": lambda: xy_unitary(beta, math.pi),
            "cphase": lambda: cphase(theta), "ccphase": lambda: ccphase(theta)}[gate]()


def _executor(name: str, args):
    from . import decomp

    if name == "ideal":
        return decomp.ideal_pulse
    if name == "pulsesim":
        return decomp.PulsesimExecutor(_load_profile(args.profile))
    raise UsageError(f"--executor: unknown executor {name!r}")


def cmd_decompose(args) -> int:
    from . import decomp

    run = Run(args, "decompose")
    prog, target = _build_program(args.gate, args.theta, args.beta)
    run.write_json("program.json", prog.to_dict())
    result = {"gate": args.gate, "theta": args.theta, "beta": args.beta, "program": prog.to_dict(),
              "duration_s": prog.duration}
    if args.check:
        tgt = _target(args.gate, args.theta, args.beta) if target is None else target
        result["distance"] = decomp.verify(prog, tgt)
    return run.finish(result)


def cmd_verify(args) -> int:
    from . import decomp

    run = Run(args, "verify")
    try:
        prog = decomp.PulseProgram.from_dict(json.loads(Path(args.program).read_text()))
    except (OSError, ValueError, KeyError) as exc:
        raise DomainError(f"--program: cannot read pulse program: {exc}") from None
    executor = _executor(args.executor, args)
    if args.executor == "pulsesim":
        run.profile_hash = executor.profile.hash
    tgt = _target(args.gate, args.theta, args.beta)
    dist = decomp.verify(prog, tgt, executor)
    result = {"program": args.program, "gate": args.gate, "theta": args.theta, "beta": args.beta,
              "executor": args.executor, "distance": dist, "leakage": decomp.leakage(prog, executor)}
    run.write_json("verify.json", result)
    return run.finish(result)


def cmd_calibrate(args) -> int:
    from . import calib

    run = Run(args, "calibrate-sim")
    device = None
    if args.device == "pulsesim":
        device = _load_profile(args.profile)
        run.profile_hash = device.hash
    scenario = calib.CalibrationScenario.seeded(run.seed, device)
    shots = args.shots or None
    res = calib.run_calibration(scenario, shots=shots, seed=run.seed + 1, n_points=args.points)
    out = res.to_dict()
    out.update({"device": args.device, "shots": shots, "points": args.points})
    run.write_json("calibration.json", out)
    for name, (x, y) in res.sweeps.items():
        run.write_csv(f"sweep_{name}.csv", ["phase_rad", "signal"], zip(map(float, x), map(float, y)))
    return run.finish(out)


def cmd_irb(args) -> int:
    from .bench import NoiseModel, depolarizing_for_fidelity, iswap_composition, run_irb, scaled_fidelity

    run = Run(args, "irb")
    dep = {}
    if args.inject_fidelity is not None:
        dep["xy"] = depolarizing_for_fidelity(args.inject_fidelity)
    if args.clifford_fidelity is not None:
        dep["clifford"] = depolarizing_for_fidelity(args.clifford_fidelity)
    model = NoiseModel.table1(depolarizing=dep) if args.noise == "table1" else NoiseModel(depolarizing=dep)
    thetas = [float(t) for t in args.thetas.split(",")] if args.thetas else None
    unit = iswap_composition(args.pulses, thetas)
    res = run_irb(unit, model, lengths=args.lengths, randomizations=args.randomizations,
                  shots=args.shots or None, rng=run.seed, native=args.native, jobs=args.jobs)
    f1, f1_err = scaled_fidelity(res)
    out = res.to_dict()
    out.update({"seed": run.seed, "single_pulse_fidelity": f1, "single_pulse_fidelity_stderr": f1_err,
                "noise": args.noise})
    run.write_json("irb.json", out)
    run.write_csv("irb_survival.csv", ["curve", "length", "randomization", "p_exact", "p_measured"], res.survivals)
    return run.finish(out)


_GATESET_ALIASES = {"cz": "cz_only", "cz_only": "cz_only", "xy": "cz_and_xy", "cz_xy": "cz_and_xy",
                    "cz_and_xy": "cz_and_xy"}


def _graph(args):
    from . import qaoa

    g = qaoa.GRAPHS[args.graph]()
    if args.weights == "random":
        g = g.with_random_weights(args.weight_seed)
    return g


def cmd_counts(args) -> int:
    from . import qaoa

    run = Run(args, "counts")
    counts = qaoa.gate_counts(_graph(args), _GATESET_ALIASES[args.gateset])
    run.write_json("counts.json", counts)
    return run.finish(counts)


def cmd_qaoa(args) -> int:
    from . import qaoa

    if args.action == "counts":
        return cmd_counts(args)
    run = Run(args, "qaoa")
    g = _graph(args)
    gam = np.linspace(0, 2 * math.pi, args.gamma_points, endpoint=False)
    bet = np.linspace(0, math.pi, args.beta_points, endpoint=False)
    shots = args.shots or None
    land = qaoa.landscape(g, gam, bet, shots=shots, seed=run.seed)
    run.write_csv("landscape.csv", ["gamma", "beta_mix", "expected_cut"],
                  [(float(a), float(b), float(land[i, j])) for i, a in enumerate(gam) for j, b in enumerate(bet)])
    best, value = qaoa.optimal_angles(g)
    out = {
        "graph": g.to_dict(),
        "weights": args.weights,
        "weight_seed": args.weight_seed if args.weights == "random" else None,
        "seed": run.seed,
        "shots": shots,
        "counts": {gs: qaoa.gate_counts(g, gs) for gs in qaoa.GATESETS},
        "optimal_angles": {"gamma": best.gamma, "beta_mix": best.beta_mix, "expected_cut": value},
        "max_cut": max(g.cut_value(x) for x in range(2**g.n_vertices)),
    }
    comp = qaoa.route(qaoa.build_qaoa_circuit(g, best), gateset=_GATESET_ALIASES[args.gateset])
    (run.out / "compiled.txt").write_text(comp.to_text())
    run.files.append("compiled.txt")
    run.write_json("qaoa.json", out)
    return run.finish(out)


# -- parser ---------------------------------------------------------------------------------

class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None, help="master seed (generated and recorded if omitted)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--profile", default=None,
                   help=f"device profile: 'default', 'half-flux' or a JSON path (env {PROFILE_ENV})")
    p.add_argument("--out", default=None, help="output directory (default out/<command>)")
    p.add_argument("--quiet", action="store_true", help="do not print the result")


def _lengths(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("lengths are comma-separated integers") from None
    if any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("lengths must be positive")
    return vals


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xyfamily", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chevron", help="population-transfer map versus modulation frequency and duration")
    _common(p)
    p.add_argument("--fp-min-mhz", type=float)
    p.add_argument("--fp-max-mhz", type=float)
    p.add_argument("--fp-points", type=int, default=11)
    p.add_argument("--duration-max-ns", type=float, default=600.0)
    p.add_argument("--duration-points", type=int, default=121)
    p.add_argument("--model", choices=("ode", "sideband"), default="ode")
    p.set_defaults(func=cmd_chevron)

    p = sub.add_parser("ramsey", help="frame Ramsey frequency for one or more flux-frame frequencies")
    _common(p)
    p.add_argument("--frame-freq-mhz", type=float, nargs="+", required=True)
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("decompose", help="compile a gate into calibrated pulses and frame updates")
    _common(p)
    p.add_argument("--gate", choices=("xy", "iswap", "cphase", "ccphase"), default="xy")
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--check", action="store_true", help="report the reconstruction distance")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify", help="reconstruct a saved pulse program and compare to a gate")
    _common(p)
    p.add_argument("--program", required=True)
    p.add_argument("--gate", choices=("xy", "iswap", "cphase", "ccphase"), default="xy")
    p.add_argument("--theta", type=float, default=math.pi / 2)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--executor", choices=("ideal", "pulsesim"), default="ideal")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("calibrate-sim", help="simulated three-step phase calibration with hidden offsets")
    _common(p)
    p.add_argument("--device", choices=("ideal", "pulsesim"), default="ideal")
    p.add_argument("--shots", type=int, default=0, help="shots per point (0 = noiseless)")
    p.add_argument("--points", type=int, default=32)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("irb", help="interleaved randomized benchmarking of an n-pulse iSWAP")
    _common(p)
    p.add_argument("--pulses", type=int, default=1)
    p.add_argument("--thetas", default=None, help="comma-separated pulse angles (radians), summing to pi")
    p.add_argument("--inject-fidelity", type=float, default=None, help="depolarizing fidelity per XY pulse")
    p.add_argument("--clifford-fidelity", type=float, default=None, help="gate-independent Clifford fidelity")
    p.add_argument("--noise", choices=("table1", "none"), default="table1")
    p.add_argument("--native", choices=("iswap", "cz"), default="iswap")
    p.add_argument("--lengths", type=_lengths, default=(2, 4, 8, 16, 32, 64))
    p.add_argument("--randomizations", type=int, default=32)
    p.add_argument("--shots", type=int, default=500, help="shots per circuit (0 = exact probabilities)")
    p.set_defaults(func=cmd_irb)

    for name, helptext in (("qaoa", "MaxCut QAOA landscape and compilation"), ("counts", "routed two-qubit gate counts")):
        p = sub.add_parser(name, help=helptext)
        _common(p)
        if name == "qaoa":
            p.add_argument("action", nargs="?", choices=("landscape", "counts"), default="landscape")
            p.add_argument("--gamma-points", type=int, default=32)
            p.add_argument("--beta-points", type=int, default=16)
            p.add_argument("--shots", type=int, default=0, help="shots per grid point (0 = exact)")
        p.add_argument("--graph", choices=("ring4", "k4"), default="ring4")
        p.add_argument("--gateset", choices=sorted(_GATESET_ALIASES), default="cz")
        p.add_argument("--weights", choices=("unit", "random"), default="unit")
        p.add_argument("--weight-seed", type=int, default=20200131)
        p.set_defaults(func=cmd_qaoa if name == "qaoa" else cmd_counts)
    return ap


def _validate(ap, args):
    for flag in ("jobs", "fp_points", "duration_points", "randomizations", "points", "pulses",
                 "gamma_points", "beta_points"):
        v = getattr(args, flag, None)
        if v is not None and v < 1:
            ap.error(f"--{flag.replace('_', '-')} must be >= 1")
    for flag in ("shots",):
        v = getattr(args, flag, None)
        if v is not None and v < 0:
            ap.error("--shots must be >= 0")
    if getattr(args, "points", None) is not None and args.points < 8:
        ap.error("--points must be >= 8 to cover the calibration sinusoid")
    for flag in ("inject_fidelity", "clifford_fidelity"):
        v = getattr(args, flag, None)
        if v is not None and not 0.25 <= v <= 1:
            ap.error(f"--{flag.replace('_', '-')} must lie in [0.25, 1]")


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    _validate(ap, args)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.error(str(exc))
    except (DomainError, ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
