"""Circuit intermediate representation and random-circuit generators.

Seeding convention: every generator takes an integer seed and draws from
``numpy.random.default_rng(seed)`` (the PCG64 generator), so a given
(parameters, seed) pair always yields the same circuit, and published
result files are reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from . import gates
from .errors import GateError, ShapeError


@dataclass(frozen=True)
class Gate:
    """A one- or two-qubit unitary applied to specific qubits.

    ``targets`` are 0-based qubit indices; for two-qubit gates the matrix
    acts on |q_targets[0] q_targets[1]> with the first target as the
    high-order bit.
    """

    matrix: np.ndarray
    targets: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        if len(self.targets) not in (1, 2):
            raise GateError(f"gates act on 1 or 2 qubits, got targets {self.targets}")
        if len(set(self.targets)) != len(self.targets):
            raise GateError(f"gate targets must be distinct, got {self.targets}")
        gates.require_unitary(self.matrix, 2 ** len(self.targets))

    @property
    def num_qubits(self) -> int:
        return len(self.targets)


@dataclass
class Circuit:
    """An ordered gate list over ``num_qubits`` named qubits."""

    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for g in self.gates:
            self._check_targets(g)

    def _check_targets(self, g: Gate) -> None:
        if any(not 0 <= t < self.num_qubits for t in g.targets):
            raise ShapeError(
                f"gate targets {g.targets} out of range for {self.num_qubits} qubits"
            )

    def append(self, g: Gate) -> None:
        self._check_targets(g)
        self.gates.append(g)

    def __len__(self) -> int:
        return len(self.gates)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary via QR of a complex Ginibre matrix,
    with the R diagonal's phases folded into Q to fix the distribution.
    """
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def shallow_random_circuit(num_qubits: int, seed: int, two_qubit: str = "haar") -> Circuit:
    """Shallow circuit of exactly ``num_qubits`` two-qubit gates, each on a
    uniformly drawn adjacent pair (so gate placement is random and can be
    nonuniform across qubits).

    ``two_qubit`` selects the gate body: "haar" for independent Haar-random
    4x4 unitaries, "cx" to probe a Clifford variant with CX everywhere.
    """
    if num_qubits < 2:
        raise ShapeError(f"need at least 2 qubits, got {num_qubits}")
    if two_qubit not in ("haar", "cx"):
        raise ValueError(f"unknown two_qubit kind {two_qubit!r}")
    rng = np.random.default_rng(seed)
    circ = Circuit(
        num_qubits,
        metadata={"generator": "shallow_random", "seed": seed, "two_qubit": two_qubit},
    )
    for k in range(num_qubits):
        i = int(rng.integers(0, num_qubits - 1))
        mat = gates.CX if two_qubit == "cx" else haar_unitary(4, rng)
        circ.append(Gate(mat, (i, i + 1), label=f"g{k}"))
    return circ


def quantum_volume_circuit(num_qubits: int, depth: int, seed: int) -> Circuit:
    """Quantum-volume-style circuit: ``depth`` layers, each pairing the
    qubits by a fresh random permutation and applying an independent
    Haar-random two-qubit unitary to every pair (one idle qubit per layer
    when ``num_qubits`` is odd). Each block stays a single two-qubit gate.
    """
    if num_qubits < 2:
        raise ShapeError(f"need at least 2 qubits, got {num_qubits}")
    if depth < 1:
        raise ShapeError(f"depth must be >= 1, got {depth}")
    rng = np.random.default_rng(seed)
    circ = Circuit(
        num_qubits,
        metadata={"generator": "quantum_volume", "seed": seed, "depth": depth},
    )
    for layer in range(depth):
        perm = rng.permutation(num_qubits)
        for k in range(num_qubits // 2):
            a, b = int(perm[2 * k]), int(perm[2 * k + 1])
            circ.append(Gate(haar_unitary(4, rng), (a, b), label=f"su4_L{layer}P{k}"))
    return circ
