"""Shared helpers: independent dense oracles and random-circuit builders."""

import os

# Cap BLAS threads before numpy loads its backend: the benchmark criteria
# time sub-millisecond kernels on tiny matrices, and thread-pool spin makes
# those timings noisy. Single-threaded is also what the runtime-scaling
# figures assume.
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

from pathlib import Path

import numpy as np
import pytest

from tnqsim.circuit import Circuit, Gate, haar_unitary

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def dense_gate_matrix(num_qubits: int, gate: Gate) -> np.ndarray:
    """Full 2^n x 2^n matrix of a gate by explicit bit arithmetic; deliberately
    loop-based and independent of any tensor machinery under test.
    """
    dim = 2**num_qubits
    full = np.zeros((dim, dim), dtype=complex)
    ts = gate.targets
    for col in range(dim):
        bits = [(col >> (num_qubits - 1 - q)) & 1 for q in range(num_qubits)]
        sub_in = 0
        for t in ts:
            sub_in = sub_in * 2 + bits[t]
        for sub_out in range(2 ** len(ts)):
            out_bits = bits.copy()
            tmp = sub_out
            for t in reversed(ts):
                out_bits[t] = tmp & 1
                tmp >>= 1
            row = 0
            for b in out_bits:
                row = row * 2 + b
            full[row, col] += gate.matrix[sub_out, sub_in]
    return full


def dense_circuit_matrix(circ: Circuit) -> np.ndarray:
    """Product of the dense per-gate matrices, in application order."""
    dim = 2**circ.num_qubits
    full = np.eye(dim, dtype=complex)
    for g in circ.gates:
        full = dense_gate_matrix(circ.num_qubits, g) @ full
    return full


def random_mixed_circuit(
    num_qubits: int,
    num_gates: int,
    rng: np.random.Generator,
    long_range: bool = True,
) -> Circuit:
    """Random mix of Haar one-qubit, adjacent two-qubit, and (optionally)
    long-range two-qubit gates.
    """
    circ = Circuit(num_qubits, metadata={"generator": "random_mixed"})
    for _ in range(num_gates):
        r = rng.random()
        if r < 0.3 or num_qubits < 2:
            circ.append(Gate(haar_unitary(2, rng), (int(rng.integers(num_qubits)),)))
        elif r < 0.7 or num_qubits == 2 or not long_range:
            i = int(rng.integers(num_qubits - 1))
            circ.append(Gate(haar_unitary(4, rng), (i, i + 1)))
        else:
            a, b = rng.choice(num_qubits, size=2, replace=False)
            circ.append(Gate(haar_unitary(4, rng), (int(a), int(b))))
    return circ
