"""Split-operator quantum dynamics of a particle in 1-D potentials.

The package propagates a position-register wavefunction with the symmetric
split-operator factorization, compiles each step into an explicit gate list
(QFT plus Walsh-synthesized diagonal phases), and emulates an
ancilla-resolved spectral readout of the site probabilities, including a
coarse coherence-decay model.
"""

from .circuit import (
    Circuit,
    Gate,
    apply_circuit,
    centered_dft_circuit,
    centering_conjugation,
    circuit_to_matrix,
    diagonal_circuit,
    format_gates,
    parse_gates,
    qft_circuit,
    step_circuit,
    walsh_coefficients,
)
from .grid import (
    GridSpec,
    Wavefunction,
    delta_state,
    make_grid,
    momentum_of,
    position_of,
    probabilities,
)
from .nmr import (
    DeviationState,
    SpectrumLine,
    SpinSystemSpec,
    all_lines,
    ancilla_line_frequency,
    apply_register_unitary,
    decay_model,
    default_spin_system,
    equilibrium_deviation,
    experiment_pair,
    invert_transition,
    line_frequency,
    pops,
    readout_intensities,
    state_energy,
)
from .potential import PotentialSpec, PotentialTable, Scenario, builtin_scenario, tabulate
from .splitop import (
    EvolutionRecord,
    TrotterPlan,
    apply_half_potential,
    apply_kinetic,
    centered_dft,
    centered_idft,
    evolve,
    exact_propagator,
    make_plan,
    normalize_columns,
    rms_error,
    trotter_step,
)

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "Wavefunction",
    "make_grid",
    "position_of",
    "momentum_of",
    "delta_state",
    "probabilities",
    "PotentialSpec",
    "PotentialTable",
    "Scenario",
    "tabulate",
    "builtin_scenario",
    "TrotterPlan",
    "EvolutionRecord",
    "make_plan",
    "centered_dft",
    "centered_idft",
    "apply_half_potential",
    "apply_kinetic",
    "trotter_step",
    "evolve",
    "exact_propagator",
    "rms_error",
    "normalize_columns",
    "Gate",
    "Circuit",
    "qft_circuit",
    "centering_conjugation",
    "centered_dft_circuit",
    "walsh_coefficients",
    "diagonal_circuit",
    "step_circuit",
    "circuit_to_matrix",
    "apply_circuit",
    "format_gates",
    "parse_gates",
    "SpinSystemSpec",
    "DeviationState",
    "SpectrumLine",
    "default_spin_system",
    "state_energy",
    "line_frequency",
    "ancilla_line_frequency",
    "all_lines",
    "equilibrium_deviation",
    "invert_transition",
    "pops",
    "apply_register_unitary",
    "readout_intensities",
    "experiment_pair",
    "decay_model",
    "__version__",
]
