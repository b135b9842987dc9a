"""Ancilla-assisted spectral readout emulation for a five-spin register.

The device model is a weakly-coupled spin system with secular Hamiltonian

    H_int = -pi * sum_i nu_i sigma_z(i) + (pi/2) * sum_{i<j} D_ij sigma_z(i) sigma_z(j)

(angular frequency units; nu_i and D_ij in Hz).  Spin 0 is the detection
ancilla; spins 1..4 carry the position register with spin 1 the most
significant bit.  Bit value 0 corresponds to m = +1.

Readout works on deviation populations: a (2, 16) table indexed by the
ancilla bit and the register state.  Each ancilla line is split into 16
resolved components, one per register state, and the observable intensity
of component s is the population difference across the ancilla transition.
Preparation uses pairs of one-transition population inversions: subtracting
the inverted experiment from the equilibrium one isolates a single register
state, and propagating both through the same redistribution matrix |U|^2
makes the intensity differences proportional to |U[j, s]|^2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "STEP_WALL_SECONDS",
    "T2_EFFECTIVE_SECONDS",
    "SpinSystemSpec",
    "DeviationState",
    "SpectrumLine",
    "make_spin_system",
    "default_spin_system",
    "state_energy",
    "line_frequency",
    "register_m_values",
    "ancilla_line_frequency",
    "all_lines",
    "ancilla_spectrum",
    "equilibrium_deviation",
    "invert_transition",
    "pops",
    "apply_register_unitary",
    "readout_intensities",
    "experiment_signals",
    "experiment_pair",
    "decay_model",
]

# Wall-clock cost of one compiled step and the effective transverse
# relaxation constant of the register spins used by the decay model.
STEP_WALL_SECONDS = 0.024
T2_EFFECTIVE_SECONDS = 0.055


@dataclass(frozen=True, eq=False)
class SpinSystemSpec:
    """Chemical shifts, effective couplings, and relaxation constants.

    ``t1_seconds`` is carried for documentation only; the decay model uses a
    single effective T2.
    """

    nu_hz: np.ndarray
    couplings_hz: np.ndarray
    t2_seconds: np.ndarray
    t1_seconds: np.ndarray

    @property
    def n_spins(self) -> int:
        return self.nu_hz.shape[0]

    @property
    def n_register_states(self) -> int:
        return 2 ** (self.n_spins - 1)


def make_spin_system(nu_hz, couplings_hz, t2_seconds=None, t1_seconds=None) -> SpinSystemSpec:
    """Validate and assemble a spin system; couplings must be symmetric."""
    nu = np.asarray(nu_hz, dtype=float)
    d = np.asarray(couplings_hz, dtype=float)
    n = nu.shape[0]
    if nu.ndim != 1 or n < 2:
        raise ValueError("need a 1-D list of at least two spin frequencies")
    if d.shape != (n, n):
        raise ValueError(f"couplings must be shape ({n}, {n}), got {d.shape}")
    if np.max(np.abs(d - d.T)) > 0.0 or np.max(np.abs(np.diag(d))) > 0.0:
        raise ValueError("couplings must be symmetric with a zero diagonal")
    t2 = np.full(n, T2_EFFECTIVE_SECONDS) if t2_seconds is None else np.asarray(t2_seconds, float)
    t1 = np.full(n, np.inf) if t1_seconds is None else np.asarray(t1_seconds, float)
    if t2.shape != (n,) or t1.shape != (n,):
        raise ValueError("relaxation constants must have one entry per spin")
    return SpinSystemSpec(nu_hz=nu, couplings_hz=d, t2_seconds=t2, t1_seconds=t1)


def default_spin_system() -> SpinSystemSpec:
    """The oriented five-spin system (three F-19, two H-1) the emulator models.

    Frequencies and effective ZZ couplings in Hz; T2 entries are
    representative midpoints of the measured ranges, T1 as measured.
    """
    nu = [6029.0, -3680.0, -6743.0, 50.0, 29.0]
    pairs = {
        (0, 1): 277.0,
        (0, 2): 116.0,
        (0, 3): 54.0,
        (0, 4): 1556.0,
        (1, 2): -26.0,
        (1, 3): 106.0,
        (1, 4): 1270.0,
        (2, 3): 1532.0,
        (2, 4): 55.0,
        (3, 4): -7.6,
    }
    d = np.zeros((5, 5))
    for (i, j), value in pairs.items():
        d[i, j] = d[j, i] = value
    t2 = [0.095, 0.055, 0.055, 0.150, 0.150]
    t1 = [0.7, 0.4, 0.5, 1.4, 1.3]
    return make_spin_system(nu, d, t2, t1)


def _check_m_values(m: np.ndarray) -> None:
    if not np.all(np.isin(m, (-1.0, 1.0))):
        raise ValueError("spin projections must be +1 or -1")


def state_energy(spec: SpinSystemSpec, m_values) -> float:
    """Angular-frequency energy of a product state with projections ``m_values``."""
    m = np.asarray(m_values, dtype=float)
    if m.shape != (spec.n_spins,):
        raise ValueError(f"expected {spec.n_spins} projections, got shape {m.shape}")
    _check_m_values(m)
    zeeman = -np.pi * float(spec.nu_hz @ m)
    coupling = 0.5 * np.pi * 0.5 * float(m @ spec.couplings_hz @ m)
    return zeeman + coupling


def line_frequency(spec: SpinSystemSpec, spin: int, neighbor_m) -> float:
    """Transition frequency (Hz) of ``spin`` given its neighbors' projections.

    ``neighbor_m`` lists the remaining spins' m values in ascending spin
    order.  f = nu_spin - (1/2) sum_j D(spin, j) m_j.
    """
    if not 0 <= spin < spec.n_spins:
        raise ValueError(f"spin {spin} out of range for {spec.n_spins} spins")
    m = np.asarray(neighbor_m, dtype=float)
    if m.shape != (spec.n_spins - 1,):
        raise ValueError(f"expected {spec.n_spins - 1} neighbor projections, got shape {m.shape}")
    _check_m_values(m)
    others = [j for j in range(spec.n_spins) if j != spin]
    return float(spec.nu_hz[spin] - 0.5 * spec.couplings_hz[spin, others] @ m)


def register_m_values(spec: SpinSystemSpec, state: int) -> np.ndarray:
    """Projections of the register spins for a register basis state.

    The first register spin is the most significant bit of ``state``; bit
    value 0 maps to m = +1.
    """
    bits = spec.n_spins - 1
    if not 0 <= state < spec.n_register_states:
        raise ValueError(f"register state {state} out of range")
    return np.array(
        [1.0 if (state >> (bits - 1 - i)) & 1 == 0 else -1.0 for i in range(bits)]
    )


def ancilla_line_frequency(spec: SpinSystemSpec, state: int) -> float:
    """Frequency of the ancilla component tagged by register state ``state``."""
    return line_frequency(spec, 0, register_m_values(spec, state))


@dataclass(frozen=True)
class SpectrumLine:
    """A single resolved transition: observed spin, neighbor state, frequency."""

    spin: int
    neighbor_state: int
    frequency_hz: float
    intensity: float = 0.0


def all_lines(spec: SpinSystemSpec) -> list[SpectrumLine]:
    """Every first-order line: one per spin per neighbor configuration.

    Neighbor states number the remaining spins in ascending order, first
    spin as most significant bit, bit 0 meaning m = +1.
    """
    lines = []
    half = spec.n_register_states
    for spin in range(spec.n_spins):
        for state in range(half):
            bits = spec.n_spins - 1
            m = [1.0 if (state >> (bits - 1 - i)) & 1 == 0 else -1.0 for i in range(bits)]
            lines.append(SpectrumLine(spin, state, line_frequency(spec, spin, m)))
    return lines


def ancilla_spectrum(spec: SpinSystemSpec, intensities: np.ndarray) -> list[SpectrumLine]:
    """Ancilla lines annotated with the given per-register-state intensities."""
    intensities = np.asarray(intensities, dtype=float)
    if intensities.shape != (spec.n_register_states,):
        raise ValueError(f"expected {spec.n_register_states} intensities")
    return [
        SpectrumLine(0, s, ancilla_line_frequency(spec, s), float(intensities[s]))
        for s in range(spec.n_register_states)
    ]


@dataclass
class DeviationState:
    """Deviation populations indexed by (ancilla bit, register state).

    Rows sum against each other to zero for any state reachable from
    equilibrium by inversions and unital redistribution.
    """

    populations: np.ndarray

    def copy(self) -> "DeviationState":
        return DeviationState(self.populations.copy())


def equilibrium_deviation(spec: SpinSystemSpec) -> DeviationState:
    """Thermal deviation populations, normalized to unit maximum.

    Level (a, s) holds (n - 2 * ones) / n where ``ones`` counts set bits of
    the full level label; levels with equal up/down counts are degenerate.
    """
    n = spec.n_spins
    pop = np.empty((2, spec.n_register_states))
    for a in (0, 1):
        for s in range(spec.n_register_states):
            ones = a + bin(s).count("1")
            pop[a, s] = (n - 2 * ones) / n
    return DeviationState(pop)


def invert_transition(dev: DeviationState, state: int) -> DeviationState:
    """Swap the two ancilla populations of one register state (an ideal
    selective inversion pulse on that single transition)."""
    pop = dev.populations
    if not 0 <= state < pop.shape[1]:
        raise ValueError(f"register state {state} out of range")
    out = pop.copy()
    out[0, state], out[1, state] = pop[1, state], pop[0, state]
    return DeviationState(out)


def pops(a: DeviationState, b: DeviationState) -> DeviationState:
    """Pair-of-states difference; isolates the levels where a and b differ."""
    if a.populations.shape != b.populations.shape:
        raise ValueError("deviation states have different shapes")
    return DeviationState(a.populations - b.populations)


def apply_register_unitary(dev: DeviationState, u: np.ndarray) -> DeviationState:
    """Redistribute register populations through |U|^2 for each ancilla bit.

    ``u`` must be unitary on the register space; populations move as
    new[a, j] = sum_s |U[j, s]|^2 old[a, s], which is doubly stochastic and
    preserves the population sum within each ancilla subspace.
    """
    u = np.asarray(u, dtype=complex)
    dim = dev.populations.shape[1]
    if u.shape != (dim, dim):
        raise ValueError(f"unitary must be shape ({dim}, {dim}), got {u.shape}")
    defect = np.max(np.abs(u.conj().T @ u - np.eye(dim)))
    if defect > 1e-10:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
    weights = np.abs(u) ** 2
    return DeviationState(dev.populations @ weights.T)


def readout_intensities(dev: DeviationState) -> np.ndarray:
    """Per-register-state ancilla line intensities (population differences)."""
    return dev.populations[0] - dev.populations[1]


def experiment_signals(spec: SpinSystemSpec, u: np.ndarray, start_state: int) -> np.ndarray:
    """Raw intensity differences of the two-experiment protocol.

    Runs the register unitary on the equilibrium state and on a copy with
    the ``start_state`` transition inverted, reads out both ancilla spectra,
    and returns their difference (proportional to |U[:, start_state]|^2,
    unnormalized).
    """
    eq = equilibrium_deviation(spec)
    inverted = invert_transition(eq, start_state)
    sig_eq = readout_intensities(apply_register_unitary(eq, u))
    sig_inv = readout_intensities(apply_register_unitary(inverted, u))
    return sig_eq - sig_inv


def experiment_pair(spec: SpinSystemSpec, u: np.ndarray, start_state: int) -> np.ndarray:
    """Normalized site probabilities recovered by the two-experiment protocol."""
    diff = experiment_signals(spec, u, start_state)
    total = diff.sum()
    if total <= 0.0:
        raise ValueError("non-positive total signal; readout is degenerate")
    return diff / total


def decay_model(
    intensities: np.ndarray,
    steps: int,
    step_wall_seconds: float = STEP_WALL_SECONDS,
    t2_effective: float = T2_EFFECTIVE_SECONDS,
) -> np.ndarray:
    """Scale intensities by exp(-steps * wall_time / T2).

    A deliberately coarse model: every compiled step costs the same wall
    time and all register coherences share one effective T2.
    """
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    if not t2_effective > 0.0:
        raise ValueError(f"t2_effective must be positive, got {t2_effective}")
    if step_wall_seconds < 0.0:
        raise ValueError(f"step_wall_seconds must be non-negative, got {step_wall_seconds}")
    scale = np.exp(-steps * step_wall_seconds / t2_effective)
    return np.asarray(intensities, dtype=float) * scale
