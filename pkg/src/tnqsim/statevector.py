"""Exact dense state-vector simulation, the ground-truth oracle.

States are flat complex arrays of length 2**n with qubit 0 as the most
significant index position, i.e. amplitude index b_0 b_1 ... b_{n-1} read
as a binary number. A hard cap of 30 qubits guards against accidental
out-of-memory allocations.
"""

import numpy as np

from . import gates
from .circuit import Circuit, Gate
from .errors import CapacityError, ShapeError

MAX_QUBITS = 30


def _check_capacity(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise CapacityError(f"state vector supports 1..{MAX_QUBITS} qubits, got {n}")


def zero_state(num_qubits: int) -> np.ndarray:
    """|00...0> on ``num_qubits`` qubits."""
    _check_capacity(num_qubits)
    amp = np.zeros(2**num_qubits, dtype=complex)
    amp[0] = 1.0
    return amp


def num_qubits(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.size != 2**n:
        raise ShapeError(f"amplitude count {state.size} is not a power of two")
    return n


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Apply a one- or two-qubit unitary; returns a new array."""
    n = num_qubits(state)
    if any(not 0 <= t < n for t in gate.targets):
        raise ShapeError(f"gate targets {gate.targets} out of range for {n} qubits")
    gates.require_unitary(gate.matrix, 2 ** len(gate.targets))
    psi = state.reshape((2,) * n)
    if len(gate.targets) == 1:
        (q,) = gate.targets
        out = np.tensordot(gate.matrix, psi, axes=([1], [q]))
        out = np.moveaxis(out, 0, q)
    else:
        q0, q1 = gate.targets
        g4 = gate.matrix.reshape(2, 2, 2, 2)
        out = np.tensordot(g4, psi, axes=([2, 3], [q0, q1]))
        out = np.moveaxis(out, (0, 1), (q0, q1))
    return np.ascontiguousarray(out).reshape(-1)


def run_circuit(circ: Circuit) -> np.ndarray:
    state = zero_state(circ.num_qubits)
    for g in circ.gates:
        state = apply_gate(state, g)
    return state


def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """<a|b> with conjugation on ``a``."""
    if a.size != b.size:
        raise ShapeError(f"state sizes differ: {a.size} vs {b.size}")
    return complex(np.vdot(a, b))


def from_mps(mps) -> np.ndarray:
    """Contract a matrix product state back into dense amplitudes.

    Accepts anything exposing ``plain_sites()`` (both MPS engines do); Vidal
    bond weights are absorbed by that call.
    """
    sites = mps.plain_sites()
    _check_capacity(len(sites))
    acc = np.ones((1, 1), dtype=complex)
    for s in sites:
        acc = np.tensordot(acc, s, axes=([1], [1]))  # (prefix, sigma, right)
        acc = acc.reshape(acc.shape[0] * 2, -1)
    return acc.reshape(-1)
