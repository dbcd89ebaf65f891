"""Flux-modulation phase sets the XY interaction phase.

Sweeps the modulation phase on the half-flux device profile, extracts (theta, beta)
from the simulated two-qubit propagator and compares beta with the closed-form
prediction. The swap angle stays put while beta follows the modulation phase.

    python3 demos/phase_law.py
"""
import math

import numpy as np

from xyfamily import pulsesim


def wrap(x):
    return (x + math.pi) % (2 * math.pi) - math.pi


def main():
    prof = pulsesim.half_flux_profile()
    print(f"f_p = {prof.pulse.f_p / 1e6:.2f} MHz, t_rise = {prof.pulse.t_rise * 1e9:.0f} ns")
    print(f"{'phi_p':>8} {'theta':>10} {'beta sim':>10} {'beta pred':>10}")
    for phi in np.linspace(0, math.pi, 6, endpoint=False):
        pulse = prof.full_pulse(phi)
        ex = pulsesim.evolve(prof.pair, pulse)
        pred = pulsesim.predicted_beta(prof.pair, pulse)
        print(f"{phi:8.3f} {ex.theta:10.6f} {wrap(ex.beta):10.6f} {wrap(pred):10.6f}")


if __name__ == "__main__":
    main()
