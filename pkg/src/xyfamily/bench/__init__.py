"""Noise models, two-qubit Clifford machinery and interleaved randomized benchmarking."""
from .clifford import CliffordElement, clifford_group, compose, invert, sample_clifford, synthesis_table
from .coherence import coherence_limited_fidelity, lindblad_fidelity
from .noise import DensityMatrix, NoiseModel, apply_decoherence, depolarizing_for_fidelity
from .rb import DecayFit, FitError, IRBResult, fit_decay, irb_error, iswap_composition, run_irb, scaled_fidelity

__all__ = [
    "CliffordElement",
    "DecayFit",
    "DensityMatrix",
    "FitError",
    "IRBResult",
    "NoiseModel",
    "apply_decoherence",
    "clifford_group",
    "coherence_limited_fidelity",
    "compose",
    "depolarizing_for_fidelity",
    "fit_decay",
    "invert",
    "irb_error",
    "iswap_composition",
    "lindblad_fidelity",
    "run_irb",
    "sample_clifford",
    "scaled_fidelity",
    "synthesis_table",
]
