"""Canonical-form MPS engine.

Stores a chain of rank-3 site tensors with axes (physical, left, right) and
maintains a mixed canonical form around an orthogonality center: tensors
left of the center are left-normalized, tensors right of it right-normalized,
and the center site carries the state's full weight. The center is moved by
QR sweeps at a cost linear in the distance, and it is moved lazily: only when
a two-qubit gate actually needs it somewhere else.
"""

import numpy as np

from . import gates, tensor
from .circuit import Gate
from .errors import ShapeError
from .tensor import TruncationPolicy


class CanonicalMps:
    """Finite MPS with open boundaries and an optional orthogonality center.

    ``center is None`` means plain form (no normalization structure claimed).
    Operations mutate the state in place; use ``copy()`` to snapshot.
    """

    def __init__(self, sites: list[np.ndarray], center: int | None = None):
        if not sites:
            raise ShapeError("an MPS needs at least one site")
        if sites[0].shape[1] != 1 or sites[-1].shape[2] != 1:
            raise ShapeError("boundary bond extents must be 1")
        for i in range(len(sites) - 1):
            if sites[i].shape[2] != sites[i + 1].shape[1]:
                raise ShapeError(
                    f"bond mismatch between sites {i} and {i + 1}: "
                    f"{sites[i].shape[2]} vs {sites[i + 1].shape[1]}"
                )
        self.sites = sites
        self.center = center
        self.discarded_weight = 0.0
        self.max_bond = max(s.shape[2] for s in sites)
        self.two_site_updates = 0
        self.swap_truncation = True

    @classmethod
    def zero_state(cls, num_qubits: int) -> "CanonicalMps":
        """|00...0> as a product MPS; trivially canonical with center 0."""
        if num_qubits < 1:
            raise ShapeError(f"need at least 1 qubit, got {num_qubits}")
        sites = [np.array([[[1.0]], [[0.0]]], dtype=complex) for _ in range(num_qubits)]
        return cls(sites, center=0)

    @property
    def num_qubits(self) -> int:
        return len(self.sites)

    def copy(self) -> "CanonicalMps":
        dup = CanonicalMps([s.copy() for s in self.sites], self.center)
        dup.discarded_weight = self.discarded_weight
        dup.max_bond = self.max_bond
        dup.two_site_updates = self.two_site_updates
        dup.swap_truncation = self.swap_truncation
        return dup

    def plain_sites(self) -> list[np.ndarray]:
        """Site tensors whose plain product is the represented vector."""
        return list(self.sites)

    def bond_dims(self) -> list[int]:
        return [s.shape[2] for s in self.sites[:-1]]

    def norm_sq(self) -> float:
        if self.center is not None:
            c = self.sites[self.center]
            return float(np.vdot(c, c).real)
        return float(overlap(self, self).real)

    # -- canonical form maintenance -------------------------------------

    def _push_right(self, k: int) -> None:
        """Left-normalize site k, absorbing the QR remainder into site k+1."""
        a = self.sites[k]
        d, dl, dr = a.shape
        q, r = np.linalg.qr(a.reshape(d * dl, dr))
        self.sites[k] = q.reshape(d, dl, -1)
        self.sites[k + 1] = np.matmul(r, self.sites[k + 1])

    def _push_left(self, k: int) -> None:
        """Right-normalize site k, absorbing the remainder into site k-1."""
        a = self.sites[k]
        d, dl, dr = a.shape
        m = a.transpose(1, 0, 2).reshape(dl, d * dr)
        q, r = np.linalg.qr(m.T)
        self.sites[k] = q.T.reshape(-1, d, dr).transpose(1, 0, 2)
        self.sites[k - 1] = np.matmul(self.sites[k - 1], r.T)

    def move_center(self, m_new: int) -> None:
        """Move the orthogonality center to site ``m_new`` by QR sweeps.

        From plain form this canonicalizes the whole chain; from canonical
        form the cost is one QR step per site of distance. The represented
        vector is unchanged.
        """
        n = self.num_qubits
        if not 0 <= m_new < n:
            raise ShapeError(f"center {m_new} out of range for {n} sites")
        if self.center is None:
            for k in range(0, m_new):
                self._push_right(k)
            for k in range(n - 1, m_new, -1):
                self._push_left(k)
        elif m_new >= self.center:
            for k in range(self.center, m_new):
                self._push_right(k)
        else:
            for k in range(self.center, m_new, -1):
                self._push_left(k)
        self.center = m_new

    def canonical_defect(self) -> float:
        """Max-abs deviation of the canonical conditions from the identity,
        over all sites left (right) of the center. Plain form has no claim
        and returns inf when uncanonicalized sites exist.
        """
        if self.center is None:
            return float("inf") if self.num_qubits > 1 else 0.0
        worst = 0.0
        for k in range(self.center):
            a = self.sites[k]
            m = a.reshape(-1, a.shape[2])
            worst = max(worst, float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1])))))
        for k in range(self.num_qubits - 1, self.center, -1):
            b = self.sites[k].transpose(1, 0, 2)
            m = b.reshape(b.shape[0], -1)
            worst = max(worst, float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))))
        return worst

    # -- gate application -------------------------------------------------

    def apply_one_qubit(self, matrix: np.ndarray, site: int) -> None:
        """Contract a 2x2 unitary into one site; preserves the canonical form."""
        if not 0 <= site < self.num_qubits:
            raise ShapeError(f"site {site} out of range")
        gates.require_unitary(matrix, 2)
        self.sites[site] = np.tensordot(matrix, self.sites[site], axes=([1], [0]))

    def apply_two_site(self, matrix: np.ndarray, site: int, policy: TruncationPolicy) -> None:
        """Apply a 4x4 unitary to the adjacent pair (site, site+1).

        Moves the center onto the pair if needed, contracts the two site
        tensors with the gate, splits them again by a truncated SVD, and
        leaves the center on ``site + 1`` (the singular values are absorbed
        into the right factor).
        """
        if not 0 <= site < self.num_qubits - 1:
            raise ShapeError(f"adjacent pair ({site}, {site + 1}) out of range")
        gates.require_unitary(matrix, 4)
        if self.center is None or not site <= self.center <= site + 1:
            self.move_center(site)
        theta = np.tensordot(self.sites[site], self.sites[site + 1], axes=([2], [1]))
        g4 = matrix.reshape(2, 2, 2, 2)
        theta = np.tensordot(g4, theta, axes=([2, 3], [0, 2]))  # (s_i', s_j', l, r)
        dl, dr = theta.shape[2], theta.shape[3]
        mat = theta.transpose(2, 0, 1, 3).reshape(dl * 2, 2 * dr)
        (u, s, vh), dw = tensor.truncate(tensor.svd(mat), policy)
        k = s.size
        self.sites[site] = u.reshape(dl, 2, k).transpose(1, 0, 2)
        self.sites[site + 1] = (s[:, None] * vh).reshape(k, 2, dr).transpose(1, 0, 2)
        self.center = site + 1
        self.discarded_weight += dw
        self.max_bond = max(self.max_bond, k)
        self.two_site_updates += 1

    def apply_long_range(
        self, matrix: np.ndarray, low: int, high: int, policy: TruncationPolicy
    ) -> None:
        """Apply a 4x4 unitary to distant qubits (low < high) by swapping the
        low qubit's physical index next to the high one, applying the gate,
        and swapping back; 2(high-low-1) swap updates plus one gate update.
        Swaps truncate under the same policy unless ``swap_truncation`` is off.
        """
        if not 0 <= low < high < self.num_qubits:
            raise ShapeError(f"bad long-range pair ({low}, {high})")
        swap_policy = policy if self.swap_truncation else tensor.TruncationPolicy.exact()
        for k in range(low, high - 1):
            self.apply_two_site(gates.SWAP, k, swap_policy)
        self.apply_two_site(matrix, high - 1, policy)
        for k in range(high - 2, low - 1, -1):
            self.apply_two_site(gates.SWAP, k, swap_policy)

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

    def schmidt_spectrum(self, bond: int) -> np.ndarray:
        """Singular values across the cut between sites ``bond`` and
        ``bond + 1`` (moves the center onto ``bond`` as a side effect).
        """
        if not 0 <= bond < self.num_qubits - 1:
            raise ShapeError(f"bond {bond} out of range")
        self.move_center(bond)
        c = self.sites[bond]
        return tensor.svd(c.reshape(-1, c.shape[2])).s


def run_circuit(circ, policy: TruncationPolicy, swap_truncation: bool = True) -> CanonicalMps:
    state = CanonicalMps.zero_state(circ.num_qubits)
    state.swap_truncation = swap_truncation
    for g in circ.gates:
        state.apply_gate(g, policy)
    return state


def overlap(a: CanonicalMps, b: CanonicalMps) -> complex:
    """<a|b> by transfer-matrix contraction, O(N D^3)."""
    if a.num_qubits != b.num_qubits:
        raise ShapeError(f"qubit counts differ: {a.num_qubits} vs {b.num_qubits}")
    env = np.ones((1, 1), dtype=complex)
    for sa, sb in zip(a.plain_sites(), b.plain_sites()):
        x = np.tensordot(env, sa.conj(), axes=([0], [1]))  # (rb_prev, sigma, ra)
        env = np.tensordot(x, sb, axes=([0, 1], [1, 0]))  # (ra, rb)
    return complex(env[0, 0])


def fidelity(a: CanonicalMps, b: CanonicalMps) -> float:
    """Squared overlap of the two states as rays: |<a|b>|^2 / (<a|a><b|b>).

    The absolute value is taken before squaring so values near zero cannot go
    negative through numerical noise, and the norms divide out the small
    norm drift a truncating simple-update run accumulates, keeping the value
    in [0, 1].
    """
    return abs(overlap(a, b)) ** 2 / (a.norm_sq() * b.norm_sq())
