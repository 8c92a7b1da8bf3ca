"""MPS quantum circuit simulation with canonical-form and simple-update
tensor-update engines, an exact state-vector oracle, an OpenQASM 2.0
frontend, and a benchmark harness for runtime-scaling and fidelity
experiments.
"""

from .canonical import CanonicalMps, fidelity, overlap
from .circuit import Circuit, Gate, haar_unitary, quantum_volume_circuit, shallow_random_circuit
from .errors import (
    CapacityError,
    GateError,
    NumericError,
    QasmError,
    ShapeError,
    TnqsimError,
    UnsupportedFeatureError,
)
from .qasm import parse_qasm, parse_qasm_file
from .simple_update import VidalMps
from .tensor import SvdTriple, TruncationPolicy

__version__ = "0.1.0"

__all__ = [
    "CanonicalMps",
    "VidalMps",
    "Circuit",
    "Gate",
    "TruncationPolicy",
    "SvdTriple",
    "haar_unitary",
    "shallow_random_circuit",
    "quantum_volume_circuit",
    "parse_qasm",
    "parse_qasm_file",
    "overlap",
    "fidelity",
    "TnqsimError",
    "ShapeError",
    "CapacityError",
    "GateError",
    "NumericError",
    "QasmError",
    "UnsupportedFeatureError",
    "__version__",
]
