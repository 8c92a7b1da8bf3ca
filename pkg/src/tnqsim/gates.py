"""Standard one- and two-qubit gate matrices.

Two-qubit matrices act on the basis |q_first q_second> with the first target
as the high-order bit, matching the amplitude ordering used throughout the
package (qubit 0 is the most significant index position).
"""

import numpy as np

from .errors import GateError

_SQ2 = 1.0 / np.sqrt(2.0)

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
TDG = T.conj().T
SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)

CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def rx(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.array([[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=complex)


def phase(lam: float) -> np.ndarray:
    """diag(1, e^{i lam}); the u1/p gate."""
    return np.array([[1, 0], [0, np.exp(1j * lam)]], dtype=complex)


def u3(theta: float, phi: float, lam: float) -> np.ndarray:
    """General single-qubit rotation in the u3/u convention."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array(
        [
            [c, -np.exp(1j * lam) * s],
            [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def u2(phi: float, lam: float) -> np.ndarray:
    return u3(np.pi / 2, phi, lam)


def unitarity_defect(m: np.ndarray) -> float:
    """Max-abs deviation of m†m from the identity."""
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def require_unitary(m: np.ndarray, dim: int, tol: float = 1e-8) -> None:
    """Reject matrices of the wrong shape or further than ``tol`` from unitary."""
    if m.shape != (dim, dim):
        raise GateError(f"expected a {dim}x{dim} matrix, got shape {m.shape}")
    defect = unitarity_defect(m)
    if defect > tol:
        raise GateError(f"matrix is not unitary (deviation {defect:.3e} > {tol:.0e})")


def exchange_targets(m: np.ndarray) -> np.ndarray:
    """Rewrite a two-qubit matrix for swapped tensor-factor roles: SWAP m SWAP."""
    return SWAP @ m @ SWAP
