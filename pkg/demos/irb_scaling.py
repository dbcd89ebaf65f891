"""Interleaved RB of iSWAP built from one, two or three XY pulses.

Each XY pulse carries the same depolarizing error, so the iRB fidelity of the
composite iSWAP degrades with the pulse count while the per-pulse fidelity
(1/n scaling) stays constant.

    python3 demos/irb_scaling.py
"""
from xyfamily.bench import NoiseModel, depolarizing_for_fidelity, iswap_composition, run_irb, scaled_fidelity


def main():
    model = NoiseModel(depolarizing={"xy": depolarizing_for_fidelity(0.99),
                                     "clifford": depolarizing_for_fidelity(0.99)})
    for n, thetas in ((1, None), (2, [0.7]), (3, [0.7, 1.1])):
        res = run_irb(iswap_composition(n, thetas), model, randomizations=16, shots=500, rng=n, native="iswap")
        f, err = scaled_fidelity(res)
        print(f"{n} pulse(s): iSWAP F = {res.fidelity:.4f}, per pulse {f:.4f} +- {err:.4f}")


if __name__ == "__main__":
    main()
