"""Canonical-form engine tests: gate application, center movement, fidelity."""

import numpy as np
import pytest

from conftest import random_mixed_circuit
from tnqsim import CanonicalMps, TruncationPolicy, gates
from tnqsim.canonical import fidelity, overlap, run_circuit
from tnqsim.circuit import Circuit, Gate, haar_unitary
from tnqsim.errors import GateError, ShapeError
from tnqsim.statevector import from_mps, inner
from tnqsim.statevector import run_circuit as run_sv

EXACT = TruncationPolicy.exact()


def random_state(num_qubits, seed, max_kept=16):
    """A random (possibly truncated) circuit state in canonical form."""
    rng = np.random.default_rng(seed)
    circ = random_mixed_circuit(num_qubits, 3 * num_qubits, rng)
    return run_circuit(circ, TruncationPolicy(max_kept=max_kept))


class TestZeroState:
    def test_amplitudes(self):
        np.testing.assert_array_equal(
            from_mps(CanonicalMps.zero_state(2)), [1.0, 0.0, 0.0, 0.0]
        )

    def test_all_bonds_trivial(self):
        state = CanonicalMps.zero_state(5)
        assert state.bond_dims() == [1, 1, 1, 1]

    def test_canonical_conditions_exact(self):
        assert CanonicalMps.zero_state(4).canonical_defect() == 0.0

    def test_zero_qubits_rejected(self):
        with pytest.raises(ShapeError):
            CanonicalMps.zero_state(0)


class TestOneQubitGates:
    def test_x_flips_first_qubit(self):
        state = CanonicalMps.zero_state(2)
        state.apply_one_qubit(gates.X, 0)
        np.testing.assert_allclose(from_mps(state), [0, 0, 1, 0], atol=1e-15)

    def test_hadamard_involution(self):
        state = CanonicalMps.zero_state(3)
        state.apply_one_qubit(gates.H, 1)
        state.apply_one_qubit(gates.H, 1)
        np.testing.assert_allclose(from_mps(state), from_mps(CanonicalMps.zero_state(3)), atol=1e-12)

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_sv_oracle(self, seed):
        rng = np.random.default_rng(seed)
        circ = random_mixed_circuit(4, 10, rng)
        g = Gate(haar_unitary(2, rng), (int(rng.integers(4)),))
        state = run_circuit(circ, EXACT)
        state.apply_gate(g, EXACT)
        sv = run_sv(circ)
        from tnqsim.statevector import apply_gate

        sv = apply_gate(sv, g)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-12

    def test_rejects_non_unitary(self):
        state = CanonicalMps.zero_state(2)
        with pytest.raises(GateError):
            state.apply_one_qubit(np.array([[1.0, 1.0], [0.0, 1.0]]), 0)

    def test_preserves_canonical_form(self):
        state = random_state(6, seed=1)
        state.move_center(3)
        state.apply_one_qubit(gates.H, 2)
        assert state.center == 3
        assert state.canonical_defect() < 1e-10


class TestMoveCenter:
    def test_move_onto_itself_is_identity(self):
        state = random_state(5, seed=2)
        state.move_center(2)
        before = [s.copy() for s in state.sites]
        state.move_center(2)
        assert all(np.array_equal(a, b) for a, b in zip(before, state.sites))

    def test_round_trip_preserves_state(self):
        state = random_state(6, seed=3)
        ref = state.copy()
        state.move_center(0)
        state.move_center(5)
        state.move_center(0)
        assert abs(fidelity(state, ref) - 1.0) < 1e-10

    def test_conditions_hold_at_every_position(self):
        state = random_state(6, seed=4)
        for m in range(6):
            state.move_center(m)
            assert state.canonical_defect() < 1e-10

    def test_canonicalizes_plain_form(self):
        state = random_state(5, seed=5)
        plain = CanonicalMps(state.plain_sites(), center=None)
        plain.move_center(2)
        assert plain.canonical_defect() < 1e-10
        assert abs(fidelity(plain, state) - 1.0) < 1e-10

    def test_out_of_range(self):
        with pytest.raises(ShapeError):
            CanonicalMps.zero_state(3).move_center(3)


class TestTwoQubitGates:
    def test_cx_on_product_state_keeps_bond_one(self):
        # a nonzero cutoff drops the exactly-zero singular value, so the
        # product state stays at bond dimension 1
        state = CanonicalMps.zero_state(2)
        state.apply_one_qubit(gates.X, 0)
        state.apply_two_site(gates.CX, 0, TruncationPolicy(max_kept=5, rel_cutoff=1e-4))
        np.testing.assert_allclose(from_mps(state), [0, 0, 0, 1], atol=1e-15)
        assert state.bond_dims() == [1]

    def test_bell_schmidt_coefficients(self):
        state = CanonicalMps.zero_state(2)
        state.apply_one_qubit(gates.H, 0)
        state.apply_two_site(gates.CX, 0, EXACT)
        np.testing.assert_allclose(
            state.schmidt_spectrum(0), [0.70710678, 0.70710678], atol=1e-8
        )

    @pytest.mark.parametrize("seed", range(4))
    def test_random_gate_matches_sv_oracle(self, seed):
        rng = np.random.default_rng(100 + seed)
        circ = random_mixed_circuit(5, 12, rng)
        i = int(rng.integers(4))
        circ.append(Gate(haar_unitary(4, rng), (i, i + 1)))
        state = run_circuit(circ, EXACT)
        sv = run_sv(circ)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-10

    def test_discarded_weight_accumulates(self):
        rng = np.random.default_rng(50)
        circ = random_mixed_circuit(6, 30, rng)
        state = CanonicalMps.zero_state(6)
        policy = TruncationPolicy(max_kept=2)
        last = 0.0
        for g in circ.gates:
            state.apply_gate(g, policy)
            assert state.discarded_weight >= last
            last = state.discarded_weight
        assert last > 0.0

    def test_norm_stays_one_under_truncation(self):
        rng = np.random.default_rng(51)
        circ = random_mixed_circuit(6, 30, rng)
        state = run_circuit(circ, TruncationPolicy(max_kept=2))
        assert 0.0 < state.norm_sq() <= 1.0 + 1e-9

    def test_raw_mode_norm_decays(self):
        rng = np.random.default_rng(52)
        circ = random_mixed_circuit(6, 30, rng)
        state = run_circuit(circ, TruncationPolicy(max_kept=2, renormalize=False))
        assert state.norm_sq() < 1.0


class TestLongRangeGates:
    def test_cx_1_to_3(self):
        # CX with control qubit 0 and target qubit 2: |100> -> |101>
        state = CanonicalMps.zero_state(3)
        state.apply_one_qubit(gates.X, 0)
        state.apply_gate(Gate(gates.CX, (0, 2)), EXACT)
        np.testing.assert_allclose(from_mps(state), np.eye(8)[0b101], atol=1e-12)

    def test_swap_count(self):
        state = CanonicalMps.zero_state(8)
        rng = np.random.default_rng(1)
        for low, high in [(0, 3), (2, 7), (1, 2)]:
            before = state.two_site_updates
            state.apply_gate(Gate(haar_unitary(4, rng), (low, high)), EXACT)
            d = high - low
            assert state.two_site_updates - before == 2 * (d - 1) + 1

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_sv_oracle(self, seed):
        rng = np.random.default_rng(200 + seed)
        circ = Circuit(3)
        for q in range(3):
            circ.append(Gate(haar_unitary(2, rng), (q,)))
        circ.append(Gate(haar_unitary(4, rng), (0, 2)))
        state = run_circuit(circ, EXACT)
        sv = run_sv(circ)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-10

    def test_reversed_targets_match_oracle(self):
        rng = np.random.default_rng(77)
        circ = Circuit(4)
        circ.append(Gate(gates.H, (3,)))
        circ.append(Gate(haar_unitary(4, rng), (3, 1)))
        state = run_circuit(circ, EXACT)
        sv = run_sv(circ)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-10

    def test_swap_involution(self):
        state = random_state(5, seed=6)
        ref = state.copy()
        state.apply_two_site(gates.SWAP, 2, EXACT)
        state.apply_two_site(gates.SWAP, 2, EXACT)
        assert abs(fidelity(state, ref) - 1.0) < 1e-10

    def test_same_site_rejected(self):
        state = CanonicalMps.zero_state(4)
        with pytest.raises(GateError):
            state.apply_gate(Gate(haar_unitary(4, np.random.default_rng(0)), (2, 2)), EXACT)


class TestFidelity:
    def test_self_fidelity(self):
        state = random_state(6, seed=7)
        assert abs(fidelity(state, state) - 1.0) < 1e-12

    def test_orthogonal_basis_states(self):
        a = CanonicalMps.zero_state(2)
        b = CanonicalMps.zero_state(2)
        b.apply_one_qubit(gates.X, 0)
        b.apply_one_qubit(gates.X, 1)
        assert fidelity(a, b) < 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_sv_inner(self, seed):
        a = random_state(8, seed=300 + seed)
        b = random_state(8, seed=400 + seed)
        want = abs(inner(from_mps(a), from_mps(b))) ** 2 / (a.norm_sq() * b.norm_sq())
        assert abs(fidelity(a, b) - want) < 1e-10

    def test_size_mismatch(self):
        with pytest.raises(ShapeError):
            overlap(CanonicalMps.zero_state(2), CanonicalMps.zero_state(3))


class TestUntruncatedExactness:
    @pytest.mark.parametrize("seed", range(4))
    def test_circuits_up_to_ten_qubits(self, seed):
        rng = np.random.default_rng(500 + seed)
        n = int(rng.integers(2, 11))
        circ = random_mixed_circuit(n, 25, rng)
        policy = TruncationPolicy(max_kept=2 ** ((n + 1) // 2), rel_cutoff=0.0)
        state = run_circuit(circ, policy)
        sv = run_sv(circ)
        f = abs(inner(sv, from_mps(state))) ** 2 / state.norm_sq()
        assert abs(f - 1.0) < 1e-9
