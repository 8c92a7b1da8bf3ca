"""Simple-update engine tests: locality, exactness conditions, conversions."""

import numpy as np
import pytest

from conftest import random_mixed_circuit
from tnqsim import CanonicalMps, TruncationPolicy, VidalMps, gates
from tnqsim.canonical import fidelity
from tnqsim.canonical import run_circuit as run_cf
from tnqsim.circuit import Circuit, Gate, haar_unitary, shallow_random_circuit
from tnqsim.errors import GateError, ShapeError
from tnqsim.simple_update import run_circuit as run_su
from tnqsim.statevector import from_mps, inner
from tnqsim.statevector import run_circuit as run_sv

EXACT = TruncationPolicy.exact()


class TestZeroState:
    def test_paper_initial_data(self):
        state = VidalMps.zero_state(3)
        np.testing.assert_array_equal(from_mps(state), np.eye(8)[0])
        for w in state.weights:
            np.testing.assert_array_equal(w, [1.0])
        for s in state.sites:
            np.testing.assert_array_equal(s, [[[1.0]], [[0.0]]])

    def test_conditions_exact(self):
        assert VidalMps.zero_state(4).vidal_defect() == 0.0

    def test_zero_qubits_rejected(self):
        with pytest.raises(ShapeError):
            VidalMps.zero_state(0)


class TestOneQubitGates:
    def test_x_on_middle_site(self):
        state = VidalMps.zero_state(3)
        state.apply_one_qubit(gates.X, 1)
        np.testing.assert_allclose(from_mps(state), np.eye(8)[0b010], atol=1e-15)

    def test_weights_untouched(self):
        state = run_su(shallow_random_circuit(4, seed=0), EXACT)
        before = [w.copy() for w in state.weights]
        state.apply_one_qubit(gates.H, 2)
        assert all(np.array_equal(a, b) for a, b in zip(before, state.weights))

    def test_norm_preserved(self):
        rng = np.random.default_rng(4)
        state = run_su(random_mixed_circuit(5, 15, rng), EXACT)
        state.apply_one_qubit(haar_unitary(2, rng), 3)
        assert abs(state.to_mps().norm_sq() - 1.0) < 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_sv_oracle(self, seed):
        rng = np.random.default_rng(seed)
        circ = random_mixed_circuit(4, 12, rng)
        circ.append(Gate(haar_unitary(2, rng), (int(rng.integers(4)),)))
        state = run_su(circ, EXACT)
        sv = run_sv(circ)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-12


class TestTwoQubitGates:
    def test_bell_bond_weights(self):
        state = VidalMps.zero_state(2)
        state.apply_one_qubit(gates.H, 0)
        state.apply_two_site(gates.CX, 0, EXACT)
        np.testing.assert_allclose(state.weights[0], [0.70710678, 0.70710678], atol=1e-8)

    @pytest.mark.parametrize("seed", range(3))
    def test_untruncated_matches_sv_oracle(self, seed):
        rng = np.random.default_rng(600 + seed)
        circ = random_mixed_circuit(6, 30, rng)
        state = run_su(circ, EXACT)
        sv = run_sv(circ)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-9

    def test_locality_window(self):
        rng = np.random.default_rng(8)
        state = run_su(random_mixed_circuit(8, 24, rng, long_range=False), EXACT)
        sites_before = [s.copy() for s in state.sites]
        weights_before = [w.copy() for w in state.weights]
        state.apply_two_site(haar_unitary(4, rng), 3, EXACT)
        # gate on sites (3, 4): sites outside {3, 4} and weights outside
        # bond 3 must be bit-identical
        for i in (0, 1, 2, 5, 6, 7):
            assert np.array_equal(state.sites[i], sites_before[i])
        for j in (0, 1, 2, 4, 5, 6):
            assert np.array_equal(state.weights[j], weights_before[j])
        assert not np.array_equal(state.weights[3], weights_before[3])

    def test_rejects_non_unitary(self):
        state = VidalMps.zero_state(3)
        with pytest.raises(GateError):
            state.apply_two_site(np.eye(4) * 1.5, 0, EXACT)


class TestLongRangeGates:
    def test_cx_1_to_4(self):
        state = VidalMps.zero_state(4)
        state.apply_one_qubit(gates.X, 0)
        state.apply_gate(Gate(gates.CX, (0, 3)), EXACT)
        np.testing.assert_allclose(from_mps(state), np.eye(16)[0b1001], atol=1e-12)

    def test_update_count(self):
        state = VidalMps.zero_state(8)
        rng = np.random.default_rng(2)
        for low, high in [(0, 4), (3, 5), (1, 7)]:
            before = state.two_site_updates
            state.apply_gate(Gate(haar_unitary(4, rng), (low, high)), EXACT)
            d = high - low
            assert state.two_site_updates - before == 2 * (d - 1) + 1

    @pytest.mark.parametrize("seed", range(3))
    def test_untruncated_matches_sv_oracle(self, seed):
        rng = np.random.default_rng(700 + seed)
        circ = random_mixed_circuit(6, 20, rng, long_range=True)
        state = run_su(circ, EXACT)
        sv = run_sv(circ)
        assert abs(abs(inner(sv, from_mps(state))) ** 2 - 1.0) < 1e-9

    def test_same_site_rejected(self):
        state = VidalMps.zero_state(4)
        with pytest.raises(ShapeError):
            state.apply_long_range(gates.SWAP, 2, 2, EXACT)


class TestToMps:
    def test_initial_state(self):
        got = VidalMps.zero_state(4).to_mps()
        want = CanonicalMps.zero_state(4)
        assert abs(fidelity(got, want) - 1.0) < 1e-12

    def test_bell_cross_engine(self):
        su = VidalMps.zero_state(2)
        su.apply_one_qubit(gates.H, 0)
        su.apply_two_site(gates.CX, 0, EXACT)
        cf = CanonicalMps.zero_state(2)
        cf.apply_one_qubit(gates.H, 0)
        cf.apply_two_site(gates.CX, 0, EXACT)
        assert abs(fidelity(cf, su.to_mps()) - 1.0) < 1e-12

    def test_same_vector_as_direct_contraction(self):
        rng = np.random.default_rng(12)
        state = run_su(random_mixed_circuit(6, 25, rng), EXACT)
        sv = run_sv(random_mixed_circuit(6, 25, np.random.default_rng(12)))
        f = abs(inner(sv, from_mps(state.to_mps()))) ** 2
        assert abs(f - 1.0) < 1e-9
        np.testing.assert_allclose(from_mps(state), from_mps(state.to_mps()), atol=1e-12)


class TestExactnessConditions:
    @pytest.mark.parametrize("seed", range(3))
    def test_conditions_hold_after_every_gate(self, seed):
        rng = np.random.default_rng(800 + seed)
        circ = random_mixed_circuit(6, 20, rng)
        state = VidalMps.zero_state(6)
        for g in circ.gates:
            state.apply_gate(g, EXACT)
            assert state.vidal_defect() < 1e-8

    def test_norm_stays_one_untruncated(self):
        rng = np.random.default_rng(13)
        state = run_su(random_mixed_circuit(7, 30, rng), EXACT)
        assert abs(state.to_mps().norm_sq() - 1.0) < 1e-9

    def test_truncation_breaks_conditions_only_gently(self):
        # with truncation the theorem's premise fails; the defect becomes
        # nonzero but the weights stay normalized
        rng = np.random.default_rng(14)
        state = run_su(random_mixed_circuit(6, 30, rng), TruncationPolicy(max_kept=2))
        for w in state.weights:
            np.testing.assert_allclose(np.sum(w**2), 1.0, atol=1e-9)
            assert np.all(np.diff(w) <= 0)
            assert np.all(w > 0)


class TestCrossEngineAgreement:
    @pytest.mark.parametrize("n", [16, 48, 64])
    def test_shallow_family_low_entanglement(self, n):
        circ = shallow_random_circuit(n, seed=n)
        policy = TruncationPolicy(max_kept=5, rel_cutoff=1e-4)
        cf = run_cf(circ, policy)
        su = run_su(circ, policy)
        assert fidelity(cf, su.to_mps()) >= 0.9999


class TestPseudoInverseFloor:
    def test_tiny_weight_is_zeroed_with_warning(self):
        # build a Vidal state by hand with one weight at the floor and
        # check the update records the event instead of dividing by it
        w = np.array([1.0, 1e-14])
        w = w / np.linalg.norm(w)
        a = np.zeros((2, 1, 2), dtype=complex)
        a[0, 0, 0] = 1.0
        a[1, 0, 1] = 1.0
        b = np.zeros((2, 2, 1), dtype=complex)
        b[0, 0, 0] = 1.0
        b[1, 1, 0] = 1.0
        c = np.array([[[1.0]], [[0.0]]], dtype=complex)
        state = VidalMps([a, b, c], [w, np.ones(1)])
        with pytest.warns(RuntimeWarning):
            state.apply_two_site(gates.CX, 1, EXACT)
        assert state.pinv_floor_hits > 0
        assert all(np.all(np.isfinite(s)) for s in state.sites)
