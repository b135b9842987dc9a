"""Symmetric split-operator propagation and a dense-propagator oracle.

One step of duration dt factors as

    exp(-i V dt/2) . Finv . exp(-i k^2 dt/2) . F . exp(-i V dt/2)

where F is a centered discrete Fourier transform.  The factorization is
exact to third order in dt per step (second order over a fixed interval).

The transform kernel is F[l, j] = exp(+i 2 pi (l - c)(j - c) / N) / sqrt(N)
with c = (N - 1)/2, which is unitary for every N and maps the site-centered
lattice onto the momentum-centered one.  The kinetic phases can use either
of two momentum spacings, selected by ``momentum_convention``:

    "box": dk = 2 pi / L, the continuum spacing for domain length L
    "dft": dk = 2 pi / (N dx), exactly conjugate to the discrete transform

The two differ by a factor N/(N-1) because L = (N-1) dx.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec, Wavefunction, probabilities
from .potential import PotentialTable

__all__ = [
    "MOMENTUM_CONVENTIONS",
    "TrotterPlan",
    "EvolutionRecord",
    "momentum_grid",
    "make_plan",
    "centered_dft",
    "centered_idft",
    "centered_dft_matrix",
    "apply_half_potential",
    "apply_kinetic",
    "trotter_step",
    "step_matrix",
    "evolve",
    "exact_propagator",
    "rms_error",
    "normalize_columns",
]

MOMENTUM_CONVENTIONS = ("box", "dft")

# Dense-matrix routes (oracle, step_matrix) build N x N arrays; past 12 qubits
# that is no longer a sane thing to materialize.
MAX_DENSE_QUBITS = 12


def momentum_grid(grid: GridSpec, convention: str = "box") -> np.ndarray:
    """Momentum lattice under the chosen spacing convention (see module doc)."""
    if convention == "box":
        return grid.momenta()
    if convention == "dft":
        dk = 2.0 * np.pi / (grid.n_sites * grid.dx)
        return (np.arange(grid.n_sites) - grid.center) * dk
    raise ValueError(
        f"unknown momentum convention {convention!r}; expected one of {MOMENTUM_CONVENTIONS}"
    )


@dataclass(frozen=True, eq=False)
class TrotterPlan:
    """Precomputed per-site phase factors for one split-operator step."""

    grid: GridSpec
    vtable: PotentialTable
    dt: float
    momentum_convention: str
    momenta: np.ndarray
    half_potential_phases: np.ndarray
    kinetic_phases: np.ndarray


def make_plan(
    grid: GridSpec,
    vtable: PotentialTable,
    dt: float,
    momentum_convention: str = "box",
) -> TrotterPlan:
    """Precompute the diagonal phase factors for ``trotter_step``.

    ``dt`` may be any finite real; zero gives identity phases and negative
    values propagate backwards (useful for reversal checks).
    """
    if vtable.grid != grid:
        raise ValueError("potential table was tabulated on a different grid")
    dt = float(dt)
    if not np.isfinite(dt):
        raise ValueError(f"dt must be finite, got {dt}")
    k = momentum_grid(grid, momentum_convention)
    return TrotterPlan(
        grid=grid,
        vtable=vtable,
        dt=dt,
        momentum_convention=momentum_convention,
        momenta=k,
        half_potential_phases=np.exp(-0.5j * dt * vtable.values),
        kinetic_phases=np.exp(-0.5j * dt * k**2),
    )


def _centering_phases(n_sites: int) -> tuple[np.ndarray, complex]:
    c = (n_sites - 1) / 2.0
    pre = np.exp(-2j * np.pi * c * np.arange(n_sites) / n_sites)
    gphase = np.exp(2j * np.pi * c * c / n_sites)
    return pre, gphase


def _centered_dft(amp: np.ndarray) -> np.ndarray:
    n = amp.shape[0]
    pre, gphase = _centering_phases(n)
    return gphase * pre * (np.sqrt(n) * np.fft.ifft(pre * amp))


def _centered_idft(amp: np.ndarray) -> np.ndarray:
    n = amp.shape[0]
    pre, gphase = _centering_phases(n)
    return np.conj(gphase) * np.conj(pre) * (np.fft.fft(np.conj(pre) * amp) / np.sqrt(n))


def centered_dft(psi: Wavefunction) -> Wavefunction:
    """Map position amplitudes to momentum amplitudes (unitary, FFT-based)."""
    return Wavefunction(psi.grid, _centered_dft(psi.amplitudes))


def centered_idft(psi: Wavefunction) -> Wavefunction:
    """Inverse of :func:`centered_dft`."""
    return Wavefunction(psi.grid, _centered_idft(psi.amplitudes))


def centered_dft_matrix(n_sites: int) -> np.ndarray:
    """Explicit transform matrix; reference for tests and dense routes."""
    if n_sites < 1:
        raise ValueError("n_sites must be at least 1")
    c = (n_sites - 1) / 2.0
    idx = np.arange(n_sites)
    l, j = np.meshgrid(idx - c, idx - c, indexing="ij")
    return np.exp(2j * np.pi * l * j / n_sites) / np.sqrt(n_sites)


def _check_grid(plan: TrotterPlan, psi: Wavefunction) -> None:
    if psi.grid != plan.grid:
        raise ValueError("wavefunction grid does not match the plan grid")


def apply_half_potential(plan: TrotterPlan, psi: Wavefunction) -> Wavefunction:
    """Multiply by exp(-i V dt/2) in the position basis."""
    _check_grid(plan, psi)
    return Wavefunction(psi.grid, plan.half_potential_phases * psi.amplitudes)


def apply_kinetic(plan: TrotterPlan, psi: Wavefunction) -> Wavefunction:
    """Multiply by exp(-i k^2 dt/2); ``psi`` must hold momentum amplitudes."""
    _check_grid(plan, psi)
    return Wavefunction(psi.grid, plan.kinetic_phases * psi.amplitudes)


def trotter_step(plan: TrotterPlan, psi: Wavefunction) -> Wavefunction:
    """Advance one step of ``plan.dt`` with the symmetric factorization."""
    _check_grid(plan, psi)
    a = plan.half_potential_phases * psi.amplitudes
    a = _centered_dft(a)
    a *= plan.kinetic_phases
    a = _centered_idft(a)
    a *= plan.half_potential_phases
    return Wavefunction(psi.grid, a)


def step_matrix(plan: TrotterPlan) -> np.ndarray:
    """Dense unitary for one step; limited to MAX_DENSE_QUBITS qubits."""
    if plan.grid.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"step_matrix is limited to {MAX_DENSE_QUBITS} qubits")
    f = centered_dft_matrix(plan.grid.n_sites)
    kin = (f.conj().T * plan.kinetic_phases) @ f
    half = plan.half_potential_phases
    return (half[:, None] * kin) * half[None, :]


@dataclass
class EvolutionRecord:
    """States of every step of a propagation, m = 0 .. steps inclusive."""

    grid: GridSpec
    dt: float
    label: str
    states: list[Wavefunction]

    @property
    def n_steps(self) -> int:
        return len(self.states) - 1

    def probability_table(self) -> np.ndarray:
        """Site-by-step table P[j, m] with one column per recorded state."""
        return np.column_stack([probabilities(s) for s in self.states])


def evolve(
    plan: TrotterPlan,
    psi0: Wavefunction,
    steps: int,
    label: str = "",
    fuse_half_steps: bool = False,
) -> EvolutionRecord:
    """Propagate ``steps`` steps, recording the state after each one.

    ``fuse_half_steps`` merges the adjacent half-potential factors of
    consecutive steps into a single full-step phase (the usual split-operator
    optimization); recorded states match the unfused route to rounding.
    """
    _check_grid(plan, psi0)
    if steps < 0:
        raise ValueError(f"steps must be non-negative, got {steps}")
    states = [Wavefunction(plan.grid, psi0.amplitudes.copy())]
    if not fuse_half_steps:
        psi = states[0]
        for _ in range(steps):
            psi = trotter_step(plan, psi)
            states.append(psi)
        return EvolutionRecord(plan.grid, plan.dt, label, states)

    half = plan.half_potential_phases
    full = half * half
    phi = half * psi0.amplitudes  # state just before the kinetic factor
    for _ in range(steps):
        g = _centered_idft(plan.kinetic_phases * _centered_dft(phi))
        states.append(Wavefunction(plan.grid, half * g))
        phi = full * g
    return EvolutionRecord(plan.grid, plan.dt, label, states)


def exact_propagator(
    grid: GridSpec,
    vtable: PotentialTable,
    dt: float,
    momentum_convention: str = "box",
) -> np.ndarray:
    """Dense exp(-i H dt) via eigendecomposition of the assembled Hamiltonian.

    H = Fdag . diag(k^2/2) . F + diag(V) on the lattice, with the same
    transform and momentum convention the stepper uses, so the only
    difference from ``trotter_step`` is the missing factorization error.
    Limited to MAX_DENSE_QUBITS qubits.
    """
    if grid.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"exact_propagator is limited to {MAX_DENSE_QUBITS} qubits")
    if vtable.grid != grid:
        raise ValueError("potential table was tabulated on a different grid")
    k = momentum_grid(grid, momentum_convention)
    f = centered_dft_matrix(grid.n_sites)
    h = (f.conj().T * (0.5 * k**2)) @ f + np.diag(vtable.values)
    asym = np.max(np.abs(h - h.conj().T))
    if asym > 1e-9:
        raise ValueError(f"assembled Hamiltonian is not Hermitian (max asymmetry {asym:.3e})")
    h = 0.5 * (h + h.conj().T)
    w, q = np.linalg.eigh(h)
    return (q * np.exp(-1j * w * float(dt))) @ q.conj().T


def rms_error(p: np.ndarray, q: np.ndarray) -> float:
    """Root-mean-square difference of two equal-length probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    return float(np.sqrt(np.mean((p - q) ** 2)))


def normalize_columns(table: np.ndarray) -> np.ndarray:
    """Rescale each column of a site-by-step table to unit sum."""
    table = np.asarray(table, dtype=float)
    if table.ndim != 2:
        raise ValueError(f"expected a 2-D table, got shape {table.shape}")
    sums = table.sum(axis=0)
    if np.any(sums <= 0.0) or not np.all(np.isfinite(sums)):
        raise ValueError("every column must have a positive finite sum")
    return table / sums
