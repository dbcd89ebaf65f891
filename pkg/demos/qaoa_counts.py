"""MaxCut QAOA on a line of four qubits, with and without native XY gates.

Routing inserts SWAPs; where a SWAP meets a pending ZZ gadget on the same pair the
two fuse into one XY-based block. Prints native gate counts and the optimal p = 1
expected cut for the ring and the complete graph.

    python3 demos/qaoa_counts.py
"""
from xyfamily import qaoa


def main():
    for name in ("ring4", "k4"):
        g = qaoa.GRAPHS[name]()
        angles, cut = qaoa.optimal_angles(g, n_grid=33)
        print(f"{name}: best <cut> = {cut:.4f} at gamma={angles.gamma:.3f}, beta={angles.beta_mix:.3f}")
        for gs in qaoa.GATESETS:
            comp = qaoa.route(qaoa.build_qaoa_circuit(g, angles), gateset=gs)
            counts = {k: v for k, v in comp.counts.items() if v}
            print(f"  {gs:10s} {counts}  verify {qaoa.verify_compiled(comp, g, angles):.1e}")


if __name__ == "__main__":
    main()
