"""Gate-level form of the split-operator step.

The step compiles into a QFT (plus centering phases) and diagonal phase
blocks synthesized from Walsh-Hadamard coefficients.  Gate kinds and their
action on a state indexed by j (qubit q is bit q of j, qubit 0 least
significant):

    H q            Hadamard on qubit q
    P q a          diag(1, exp(i a)) on qubit q
    CP q1 q2 a     phase exp(i a) on the |11> subspace of q1, q2
    SWAP q1 q2     exchange qubits q1 and q2
    MZR mask a     exp(-i a Z_mask); Z_mask has eigenvalue (-1)**popcount(mask & j)
    GPHASE a       multiply the whole state by exp(i a)

A circuit is a list of gates in application order (first gate acts first).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec
from .splitop import MAX_DENSE_QUBITS, TrotterPlan

__all__ = [
    "GATE_KINDS",
    "PRUNE_THRESHOLD",
    "Gate",
    "Circuit",
    "hadamard",
    "phase",
    "controlled_phase",
    "swap_gate",
    "multi_z_rotation",
    "global_phase",
    "apply_circuit",
    "circuit_to_matrix",
    "qft_circuit",
    "centering_conjugation",
    "centered_dft_circuit",
    "walsh_coefficients",
    "walsh_reconstruct",
    "diagonal_circuit",
    "step_circuit",
    "format_gates",
    "parse_gates",
    "lowered_gate_counts",
]

GATE_KINDS = ("H", "P", "CP", "SWAP", "MZR", "GPHASE")

# Walsh coefficients below this magnitude are dropped during synthesis.
PRUNE_THRESHOLD = 1e-14


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...] = ()
    angle: float = 0.0
    mask: int = 0


def hadamard(q: int) -> Gate:
    return Gate("H", (q,))


def phase(q: int, angle: float) -> Gate:
    return Gate("P", (q,), float(angle))


def controlled_phase(q1: int, q2: int, angle: float) -> Gate:
    return Gate("CP", (q1, q2), float(angle))


def swap_gate(q1: int, q2: int) -> Gate:
    return Gate("SWAP", (q1, q2))


def multi_z_rotation(mask: int, angle: float) -> Gate:
    return Gate("MZR", (), float(angle), int(mask))


def global_phase(angle: float) -> Gate:
    return Gate("GPHASE", (), float(angle))


def _validate_gate(gate: Gate, n_qubits: int) -> None:
    if gate.kind not in GATE_KINDS:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    for q in gate.qubits:
        if not 0 <= q < n_qubits:
            raise ValueError(f"qubit {q} out of range for {n_qubits}-qubit circuit")
    if gate.kind in ("CP", "SWAP") and gate.qubits[0] == gate.qubits[1]:
        raise ValueError(f"{gate.kind} needs two distinct qubits, got {gate.qubits}")
    if gate.kind == "MZR" and not 1 <= gate.mask < 2**n_qubits:
        raise ValueError(f"MZR mask {gate.mask} out of range for {n_qubits} qubits")


@dataclass
class Circuit:
    """An ordered gate list on a fixed number of qubits."""

    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not 1 <= self.n_qubits <= 24:
            raise ValueError(f"n_qubits must be in [1, 24], got {self.n_qubits}")
        for gate in self.gates:
            _validate_gate(gate, self.n_qubits)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def add(self, gate: Gate) -> None:
        _validate_gate(gate, self.n_qubits)
        self.gates.append(gate)

    def extend(self, other: "Circuit") -> None:
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot extend with a circuit on a different qubit count")
        self.gates.extend(other.gates)

    def inverse(self) -> "Circuit":
        """Reversed gate order with every angle negated."""
        inv = []
        for gate in reversed(self.gates):
            if gate.kind in ("H", "SWAP"):
                inv.append(gate)
            else:
                inv.append(Gate(gate.kind, gate.qubits, -gate.angle, gate.mask))
        return Circuit(self.n_qubits, inv)

    def gate_counts(self) -> dict[str, int]:
        counts = {kind: 0 for kind in GATE_KINDS}
        for gate in self.gates:
            counts[gate.kind] += 1
        return counts


def _bit_parity(values: np.ndarray) -> np.ndarray:
    """Parity of the set bits of each entry (works for any 24-bit value)."""
    v = values.copy()
    for shift in (16, 8, 4, 2, 1):
        v ^= v >> shift
    return v & 1


def apply_circuit(circuit: Circuit, state: np.ndarray) -> np.ndarray:
    """Apply a circuit to a state vector of shape (N,) or a batch (N, B)."""
    n = circuit.n_qubits
    dim = 2**n
    arr = np.asarray(state, dtype=complex)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[:, None]
    if arr.shape[0] != dim:
        raise ValueError(f"state has {arr.shape[0]} rows, circuit needs {dim}")
    arr = arr.copy()
    indices = np.arange(dim)
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for gate in circuit.gates:
        if gate.kind == "H":
            q = gate.qubits[0]
            view = arr.reshape(-1, 2, 2**q, arr.shape[1])
            lo = view[:, 0].copy()
            hi = view[:, 1].copy()
            view[:, 0] = (lo + hi) * inv_sqrt2
            view[:, 1] = (lo - hi) * inv_sqrt2
        elif gate.kind == "P":
            q = gate.qubits[0]
            rows = (indices >> q) & 1 == 1
            arr[rows] *= np.exp(1j * gate.angle)
        elif gate.kind == "CP":
            q1, q2 = gate.qubits
            rows = ((indices >> q1) & (indices >> q2) & 1) == 1
            arr[rows] *= np.exp(1j * gate.angle)
        elif gate.kind == "SWAP":
            q1, q2 = gate.qubits
            diff = ((indices >> q1) ^ (indices >> q2)) & 1
            perm = indices ^ (diff << q1) ^ (diff << q2)
            arr = arr[perm]
        elif gate.kind == "MZR":
            signs = 1.0 - 2.0 * _bit_parity(indices & gate.mask)
            arr *= np.exp(-1j * gate.angle * signs)[:, None]
        elif gate.kind == "GPHASE":
            arr *= np.exp(1j * gate.angle)
        else:  # pragma: no cover - blocked by validation
            raise ValueError(f"unknown gate kind {gate.kind!r}")
    return arr[:, 0] if squeeze else arr


def circuit_to_matrix(circuit: Circuit) -> np.ndarray:
    """Dense unitary of the whole circuit; limited to MAX_DENSE_QUBITS qubits."""
    if circuit.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"circuit_to_matrix is limited to {MAX_DENSE_QUBITS} qubits")
    return apply_circuit(circuit, np.eye(2**circuit.n_qubits, dtype=complex))


def qft_circuit(n_qubits: int) -> Circuit:
    """Fourier transform circuit for kernel exp(+2 pi i j l / N) / sqrt(N).

    Uses the textbook ladder: a Hadamard on each qubit from the most
    significant down, controlled phases from every lower qubit, then a
    mirror layer of swaps.  Gate count is n(n+1)/2 + floor(n/2).
    """
    if not 1 <= n_qubits <= MAX_DENSE_QUBITS:
        raise ValueError(f"qft_circuit supports 1..{MAX_DENSE_QUBITS} qubits, got {n_qubits}")
    gates: list[Gate] = []
    for target in range(n_qubits - 1, -1, -1):
        gates.append(hadamard(target))
        for control in range(target - 1, -1, -1):
            gates.append(controlled_phase(control, target, math.pi / 2 ** (target - control)))
    for q in range(n_qubits // 2):
        gates.append(swap_gate(q, n_qubits - 1 - q))
    return Circuit(n_qubits, gates)


def centering_conjugation(grid: GridSpec) -> tuple[Circuit, Circuit, float]:
    """Diagonal dressing that turns the plain QFT into the centered transform.

    Returns (pre, post, global_angle): one phase gate per qubit on each side,
    with angle -2 pi c 2**q / N on qubit q, plus a global angle +2 pi c^2 / N.
    The centered transform is then GPHASE(global_angle) . post . QFT . pre.
    """
    n = grid.n_qubits
    n_sites = grid.n_sites
    c = grid.center
    angles = [-2.0 * math.pi * c * 2**q / n_sites for q in range(n)]
    pre = Circuit(n, [phase(q, a) for q, a in enumerate(angles)])
    post = Circuit(n, [phase(q, a) for q, a in enumerate(angles)])
    return pre, post, 2.0 * math.pi * c * c / n_sites


def centered_dft_circuit(grid: GridSpec) -> Circuit:
    """Full circuit matching :func:`qsim1d.splitop.centered_dft_matrix`."""
    pre, post, gangle = centering_conjugation(grid)
    circ = Circuit(grid.n_qubits, list(pre.gates))
    circ.extend(qft_circuit(grid.n_qubits))
    circ.extend(post)
    circ.add(global_phase(gangle))
    return circ


def walsh_coefficients(theta: np.ndarray) -> np.ndarray:
    """Walsh-Hadamard coefficients of a length-2**n real phase vector.

    Coefficient a satisfies theta_j = sum_a coeff_a * (-1)**popcount(a & j);
    computed with the in-place butterfly in O(N log N).
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[0]
    if theta.ndim != 1 or n < 1 or n & (n - 1):
        raise ValueError(f"expected a 1-D vector with power-of-two length, got shape {theta.shape}")
    out = theta.copy()
    h = 1
    while h < n:
        out = out.reshape(-1, 2, h)
        lo = out[:, 0].copy()
        hi = out[:, 1].copy()
        out[:, 0] = lo + hi
        out[:, 1] = lo - hi
        out = out.reshape(-1)
        h *= 2
    return out / n


def walsh_reconstruct(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of :func:`walsh_coefficients` (no 1/N factor)."""
    coeffs = np.asarray(coeffs, dtype=float)
    return walsh_coefficients(coeffs) * coeffs.shape[0]


def diagonal_circuit(phases: np.ndarray, prune: float = PRUNE_THRESHOLD) -> Circuit:
    """Circuit for diag(exp(-i phases_j)) from Walsh coefficients.

    Emits GPHASE(-c_0) for the mean phase and one MZR per surviving mask in
    ascending mask order; coefficients below ``prune`` are dropped.
    """
    coeffs = walsh_coefficients(phases)
    n = int(coeffs.shape[0]).bit_length() - 1
    if n == 0:
        raise ValueError("diagonal_circuit needs at least a 1-qubit phase vector")
    circ = Circuit(n)
    if abs(coeffs[0]) >= prune:
        circ.add(global_phase(-coeffs[0]))
    for mask in range(1, coeffs.shape[0]):
        if abs(coeffs[mask]) >= prune:
            circ.add(multi_z_rotation(mask, coeffs[mask]))
    return circ


def step_circuit(plan: TrotterPlan) -> Circuit:
    """Gate realization of one split-operator step of ``plan``.

    Layout: half-potential diagonal, centered transform, kinetic diagonal,
    inverse centered transform, half-potential diagonal.  The matrix agrees
    with :func:`qsim1d.splitop.trotter_step` to rounding.
    """
    grid = plan.grid
    if grid.n_qubits > MAX_DENSE_QUBITS:
        raise ValueError(f"step_circuit is limited to {MAX_DENSE_QUBITS} qubits")
    half_v = 0.5 * plan.dt * plan.vtable.values
    kin = 0.5 * plan.dt * plan.momenta**2
    forward = centered_dft_circuit(grid)
    circ = Circuit(grid.n_qubits)
    circ.extend(diagonal_circuit(half_v))
    circ.extend(forward)
    circ.extend(diagonal_circuit(kin))
    circ.extend(forward.inverse())
    circ.extend(diagonal_circuit(half_v))
    return circ


def format_gates(circuit: Circuit) -> str:
    """Render a circuit as the line-oriented gate-list format.

    One gate per line, angles with 17 significant digits, MZR masks as
    binary strings (rightmost digit is qubit 0).  Starts with a qubit-count
    directive and ends with a gate-count summary, both as comments.
    """
    n = circuit.n_qubits
    lines = [f"# qubits {n}"]
    for gate in circuit.gates:
        if gate.kind == "H":
            lines.append(f"H {gate.qubits[0]}")
        elif gate.kind == "P":
            lines.append(f"P {gate.qubits[0]} {gate.angle:.17g}")
        elif gate.kind == "CP":
            lines.append(f"CP {gate.qubits[0]} {gate.qubits[1]} {gate.angle:.17g}")
        elif gate.kind == "SWAP":
            lines.append(f"SWAP {gate.qubits[0]} {gate.qubits[1]}")
        elif gate.kind == "MZR":
            lines.append(f"MZR {gate.mask:0{n}b} {gate.angle:.17g}")
        else:
            lines.append(f"GPHASE {gate.angle:.17g}")
    counts = circuit.gate_counts()
    summary = " ".join(f"{kind}={counts[kind]}" for kind in GATE_KINDS)
    lines.append(f"# gates {summary}")
    return "\n".join(lines) + "\n"


def parse_gates(text: str) -> Circuit:
    """Parse the gate-list format back into a Circuit.

    Requires the ``# qubits n`` directive before the first gate; other
    comment lines and blank lines are ignored.
    """
    n_qubits: int | None = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "qubits":
                n_qubits = int(fields[1])
            continue
        if n_qubits is None:
            raise ValueError(f"line {lineno}: gate before '# qubits n' directive")
        fields = line.split()
        kind = fields[0]
        try:
            if kind == "H" and len(fields) == 2:
                gates.append(hadamard(int(fields[1])))
            elif kind == "P" and len(fields) == 3:
                gates.append(phase(int(fields[1]), float(fields[2])))
            elif kind == "CP" and len(fields) == 4:
                gates.append(controlled_phase(int(fields[1]), int(fields[2]), float(fields[3])))
            elif kind == "SWAP" and len(fields) == 3:
                gates.append(swap_gate(int(fields[1]), int(fields[2])))
            elif kind == "MZR" and len(fields) == 3:
                gates.append(multi_z_rotation(int(fields[1], 2), float(fields[2])))
            elif kind == "GPHASE" and len(fields) == 2:
                gates.append(global_phase(float(fields[1])))
            else:
                raise ValueError("bad field count")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
    if n_qubits is None:
        raise ValueError("missing '# qubits n' directive")
    return Circuit(n_qubits, gates)


def lowered_gate_counts(circuit: Circuit) -> dict[str, int]:
    """Gate counts after lowering each MZR to a CNOT ladder plus one RZ.

    A weight-w mask costs 2(w-1) CNOTs and a single z rotation; the other
    kinds pass through unchanged.  Counting only, no circuit is built.
    """
    counts = {"H": 0, "P": 0, "CP": 0, "SWAP": 0, "RZ": 0, "CX": 0, "GPHASE": 0}
    for gate in circuit.gates:
        if gate.kind == "MZR":
            weight = bin(gate.mask).count("1")
            counts["RZ"] += 1
            counts["CX"] += 2 * (weight - 1)
        else:
            counts[gate.kind] += 1
    return counts
