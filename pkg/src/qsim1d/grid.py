"""Discretized position and momentum lattices for an n-qubit register.

A register of ``n`` qubits indexes N = 2**n lattice sites.  Qubit 0 is the
least significant bit of the site index.  Positions span [-L/2, +L/2]
inclusive, so the spacing is dx = L/(N-1) and the first and last sites sit
exactly on the domain endpoints.  The conjugate momentum lattice has spacing
dk = 2*pi/L and is symmetric about zero.  Everything is dimensionless
(hbar = mass = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "MAX_QUBITS",
    "GridSpec",
    "Wavefunction",
    "make_grid",
    "position_of",
    "momentum_of",
    "delta_state",
    "probabilities",
]

MAX_QUBITS = 24


@dataclass(frozen=True)
class GridSpec:
    """Uniform lattice of ``n_sites = 2**n_qubits`` sites on a length-L domain."""

    n_qubits: int
    n_sites: int
    length: float
    dx: float
    x0: float
    dk: float
    k0: float
    center: float

    def positions(self) -> np.ndarray:
        """All site positions x_j = x0 + j*dx, ordered by site index."""
        return self.x0 + self.dx * np.arange(self.n_sites)

    def momenta(self) -> np.ndarray:
        """All momentum values k_l = k0 + l*dk, ordered by momentum index."""
        return self.k0 + self.dk * np.arange(self.n_sites)


def make_grid(n_qubits: int, length: float) -> GridSpec:
    """Build the lattice bookkeeping for ``2**n_qubits`` sites on [-L/2, L/2].

    Raises ValueError if ``n_qubits`` is outside [1, MAX_QUBITS] or ``length``
    is not a positive finite number.
    """
    if not isinstance(n_qubits, (int, np.integer)) or isinstance(n_qubits, bool):
        raise ValueError(f"n_qubits must be an integer, got {n_qubits!r}")
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    length = float(length)
    if not np.isfinite(length) or length <= 0.0:
        raise ValueError(f"length must be positive and finite, got {length}")
    n_sites = 2**n_qubits
    dx = length / (n_sites - 1)
    dk = 2.0 * np.pi / length
    return GridSpec(
        n_qubits=n_qubits,
        n_sites=n_sites,
        length=length,
        dx=dx,
        x0=-length / 2.0,
        dk=dk,
        k0=-(n_sites - 1) * dk / 2.0,
        center=(n_sites - 1) / 2.0,
    )


def position_of(grid: GridSpec, j: int) -> float:
    """Position of site ``j``; raises IndexError for j outside [0, N-1]."""
    if not 0 <= j < grid.n_sites:
        raise IndexError(f"site index {j} out of range [0, {grid.n_sites - 1}]")
    return grid.x0 + j * grid.dx


def momentum_of(grid: GridSpec, l: int) -> float:
    """Momentum value of lattice index ``l``; raises IndexError when out of range."""
    if not 0 <= l < grid.n_sites:
        raise IndexError(f"momentum index {l} out of range [0, {grid.n_sites - 1}]")
    return grid.k0 + l * grid.dk


@dataclass
class Wavefunction:
    """Complex amplitudes over the position sites of a grid.

    Treated as a value: propagation operations return new instances rather
    than mutating ``amplitudes`` in place.
    """

    grid: GridSpec
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def delta_state(grid: GridSpec, j: int) -> Wavefunction:
    """Unit-norm state localized on site ``j`` (amplitude exactly 1 there)."""
    if not 0 <= j < grid.n_sites:
        raise IndexError(f"site index {j} out of range [0, {grid.n_sites - 1}]")
    amp = np.zeros(grid.n_sites, dtype=complex)
    amp[j] = 1.0
    return Wavefunction(grid, amp)


def probabilities(psi: Wavefunction) -> np.ndarray:
    """Site occupation probabilities |psi_j|**2."""
    return np.abs(psi.amplitudes) ** 2
