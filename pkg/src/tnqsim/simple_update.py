"""Simple-update MPS engine on the Vidal form.

Site tensors carry axes (physical, left, right) and every interior bond
stores its singular-value vector explicitly. A two-qubit update touches only
the two site tensors and the three surrounding weight vectors, so no global
canonicalization sweep is ever needed; that locality is the point of the
method.
"""

import warnings

import numpy as np

from . import gates, tensor
from .canonical import CanonicalMps
from .circuit import Gate
from .errors import ShapeError
from .tensor import TruncationPolicy

# Relative scale below which a bond weight is treated as exactly removable:
# its inverse is zeroed rather than divided, and newly produced spectra are
# floored here even when the policy itself would keep everything, so stored
# weights stay safely invertible.
PINV_FLOOR = 1e-12

_ONE = np.ones(1, dtype=float)


class VidalMps:
    """Finite MPS in Vidal form: site tensors plus per-bond weight vectors.

    Bond weights are kept sorted, strictly positive, and normalized to unit
    squared sum; the boundary weights are implicit (1). Operations mutate in
    place; use ``copy()`` to snapshot.
    """

    def __init__(self, sites: list[np.ndarray], weights: list[np.ndarray]):
        if len(weights) != len(sites) - 1:
            raise ShapeError(
                f"{len(sites)} sites need {len(sites) - 1} bond weights, got {len(weights)}"
            )
        for i, w in enumerate(weights):
            if sites[i].shape[2] != w.size or sites[i + 1].shape[1] != w.size:
                raise ShapeError(f"weight vector {i} inconsistent with its site tensors")
        self.sites = sites
        self.weights = weights
        self.discarded_weight = 0.0
        self.max_bond = max((w.size for w in weights), default=1)
        self.two_site_updates = 0
        self.pinv_floor_hits = 0

    @classmethod
    def zero_state(cls, num_qubits: int) -> "VidalMps":
        """|00...0>: every site [1],[0] and every bond weight (1)."""
        if num_qubits < 1:
            raise ShapeError(f"need at least 1 qubit, got {num_qubits}")
        sites = [np.array([[[1.0]], [[0.0]]], dtype=complex) for _ in range(num_qubits)]
        weights = [np.ones(1, dtype=float) for _ in range(num_qubits - 1)]
        return cls(sites, weights)

    @property
    def num_qubits(self) -> int:
        return len(self.sites)

    def copy(self) -> "VidalMps":
        dup = VidalMps([s.copy() for s in self.sites], [w.copy() for w in self.weights])
        dup.discarded_weight = self.discarded_weight
        dup.max_bond = self.max_bond
        dup.two_site_updates = self.two_site_updates
        dup.pinv_floor_hits = self.pinv_floor_hits
        return dup

    def _left_weight(self, site: int) -> np.ndarray:
        return self.weights[site - 1] if site > 0 else _ONE

    def _right_weight(self, site: int) -> np.ndarray:
        return self.weights[site] if site < self.num_qubits - 1 else _ONE

    def _safe_inverse(self, w: np.ndarray) -> np.ndarray:
        floor = PINV_FLOOR * w[0] if w.size else 0.0
        small = w < floor
        if small.any():
            self.pinv_floor_hits += int(np.count_nonzero(small))
            warnings.warn(
                "bond weight below the pseudo-inverse floor; its inverse was zeroed",
                RuntimeWarning,
                stacklevel=3,
            )
            inv = np.zeros_like(w)
            np.divide(1.0, w, out=inv, where=~small)
            return inv
        return 1.0 / w

    # -- gate application -------------------------------------------------

    def apply_one_qubit(self, matrix: np.ndarray, site: int) -> None:
        """Contract a 2x2 unitary into one site; weights untouched."""
        if not 0 <= site < self.num_qubits:
            raise ShapeError(f"site {site} out of range")
        gates.require_unitary(matrix, 2)
        self.sites[site] = np.tensordot(matrix, self.sites[site], axes=([1], [0]))

    def apply_two_site(self, matrix: np.ndarray, site: int, policy: TruncationPolicy) -> None:
        """Apply a 4x4 unitary to the adjacent pair (site, site+1):
        contract the weighted environment block with the gate, split it by a
        truncated SVD, store the new spectrum on the bond, and divide the
        environment weights back out of the outer factors.
        """
        if not 0 <= site < self.num_qubits - 1:
            raise ShapeError(f"adjacent pair ({site}, {site + 1}) out of range")
        gates.require_unitary(matrix, 4)
        wl = self._left_weight(site)
        wc = self.weights[site]
        wr = self._right_weight(site + 1)
        a = self.sites[site] * wl[None, :, None] * wc[None, None, :]
        b = self.sites[site + 1] * wr[None, None, :]
        theta = np.tensordot(a, b, axes=([2], [1]))
        g4 = matrix.reshape(2, 2, 2, 2)
        theta = np.tensordot(g4, theta, axes=([2, 3], [0, 2]))  # (s_i', s_j', l, r)
        dl, dr = theta.shape[2], theta.shape[3]
        mat = theta.transpose(2, 0, 1, 3).reshape(dl * 2, 2 * dr)
        (u, s, vh), dw = tensor.truncate(
            tensor.svd(mat), policy.with_min_cutoff(PINV_FLOOR)
        )
        k = s.size
        inv_l = self._safe_inverse(wl)
        inv_r = self._safe_inverse(wr)
        self.sites[site] = (inv_l[:, None] * u.reshape(dl, 2 * k)).reshape(dl, 2, k).transpose(1, 0, 2)
        self.sites[site + 1] = (vh.reshape(k * 2, dr) * inv_r[None, :]).reshape(k, 2, dr).transpose(1, 0, 2)
        self.weights[site] = s
        self.discarded_weight += dw
        self.max_bond = max(self.max_bond, k)
        self.two_site_updates += 1

    def apply_long_range(
        self, matrix: np.ndarray, low: int, high: int, policy: TruncationPolicy
    ) -> None:
        """Distant gate via the same swap network as the canonical engine:
        2(high-low-1) swap updates around one gate update, all of them plain
        adjacent simple updates.
        """
        if not 0 <= low < high < self.num_qubits:
            raise ShapeError(f"bad long-range pair ({low}, {high})")
        for k in range(low, high - 1):
            self.apply_two_site(gates.SWAP, k, policy)
        self.apply_two_site(matrix, high - 1, policy)
        for k in range(high - 2, low - 1, -1):
            self.apply_two_site(gates.SWAP, k, policy)

    def apply_gate(self, gate: Gate, policy: TruncationPolicy) -> None:
        if gate.num_qubits == 1:
            self.apply_one_qubit(gate.matrix, gate.targets[0])
            return
        a, b = gate.targets
        matrix = gate.matrix if a < b else gates.exchange_targets(gate.matrix)
        low, high = min(a, b), max(a, b)
        if high - low == 1:
            self.apply_two_site(matrix, low, policy)
        else:
            self.apply_long_range(matrix, low, high, policy)

    # -- conversions and checks -------------------------------------------

    def plain_sites(self) -> list[np.ndarray]:
        """Plain MPS tensors: each bond weight absorbed into its right neighbor."""
        out = [self.sites[0].copy()]
        for i in range(1, self.num_qubits):
            out.append(self.sites[i] * self.weights[i - 1][None, :, None])
        return out

    def to_mps(self) -> CanonicalMps:
        """Plain-form CanonicalMps representing the same vector."""
        return CanonicalMps(self.plain_sites(), center=None)

    def vidal_defect(self) -> float:
        """Max-abs deviation of the derived canonical conditions: for every
        site, (left weights . tensor) must be left-normalized and
        (tensor . right weights) right-normalized, so the weight vectors are
        genuine Schmidt spectra. Zero for exact simple updates with unitary
        gates and no truncation.
        """
        worst = 0.0
        for i in range(self.num_qubits):
            a = self.sites[i] * self._left_weight(i)[None, :, None]
            m = a.reshape(-1, a.shape[2])
            worst = max(worst, float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1])))))
            b = (self.sites[i] * self._right_weight(i)[None, None, :]).transpose(1, 0, 2)
            m = b.reshape(b.shape[0], -1)
            worst = max(worst, float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))))
        return worst


def run_circuit(circ, policy: TruncationPolicy) -> VidalMps:
    state = VidalMps.zero_state(circ.num_qubits)
    for g in circ.gates:
        state.apply_gate(g, policy)
    return state
