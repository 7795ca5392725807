import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from paritynet.circuits import H, apply_gate
from paritynet.protocols import (
    analyzer_protocol,
    bell_analyzer,
    cz_matrix_oracle,
    cz_via_parity,
    flip_vector,
    ghz_chain,
    ghz_chain_protocol,
    ghz_fusion,
    ket_plus_phase,
    prepare_bell,
    single_qubit_state,
    split_teleport_branch,
    teleport,
)
from paritynet.qstate import (
    PureState,
    QubitRegister,
    basis_state,
    bell_state,
    default_register,
    fidelity_up_to_global_phase,
    ghz_state,
    pauli_x,
    apply_pauli_string,
    plus_state,
    random_state,
)

R2 = default_register(2)
FULL = 1 - 1e-9
BITS2 = list(itertools.product((0, 1), repeat=2))


def fid(a, b):
    return fidelity_up_to_global_phase(a, b)


class TestBell:
    @pytest.mark.parametrize("x, y", BITS2)
    def test_raw_state_exact(self, x, y):
        brs = prepare_bell(x, y)
        assert sorted(b.outcomes["p"] for b in brs) == [0, 1]
        for b in brs:
            p = b.outcomes["p"]
            expected = (-1) ** (p * y) * bell_state(p, x ^ y).amplitudes
            assert np.max(np.abs(b.state.amplitudes - expected)) < 1e-10
            assert b.probability == pytest.approx(0.5)
            assert fid(b.corrected, bell_state(0, x ^ y)) > FULL

    def test_00_branches(self):
        brs = {b.outcomes["p"]: b for b in prepare_bell(0, 0)}
        assert np.allclose(brs[0].state.amplitudes, bell_state(0, 0).amplitudes)
        assert np.allclose(brs[1].state.amplitudes, bell_state(1, 0).amplitudes)
        for b in brs.values():
            assert np.allclose(b.corrected.amplitudes, bell_state(0, 0).amplitudes)

    def test_01_branch_1_sign(self):
        (b,) = [b for b in prepare_bell(0, 1) if b.outcomes["p"] == 1]
        assert np.allclose(b.state.amplitudes, -bell_state(1, 1).amplitudes)

    def test_parity_bit_bijection(self):
        targets = set()
        for x, y in itertools.product((0, 1), repeat=2):
            for b in prepare_bell(x, y, parity_bit=x):
                hits = [(i, j) for i in (0, 1) for j in (0, 1) if fid(b.corrected, bell_state(i, j)) > FULL]
                assert len(hits) == 1
                targets.add(hits[0])
        assert len(targets) == 4

    def test_bad_bit(self):
        with pytest.raises(ValueError):
            prepare_bell(2, 0)

    @pytest.mark.parametrize("i, j", BITS2)
    def test_hadamard_pair_swaps_bell_indices(self, i, j):
        st = apply_gate(apply_gate(bell_state(i, j), H("q1")), H("q2"))
        assert np.allclose(st.amplitudes, (-1) ** (i * j) * bell_state(j, i).amplitudes, atol=1e-12)


class TestAnalyzer:
    @pytest.mark.parametrize("variant", ["two_hadamard", "four_hadamard"])
    @pytest.mark.parametrize("i, j", BITS2)
    def test_reads_bell_indices(self, variant, i, j):
        (b,) = bell_analyzer(bell_state(i, j), variant)
        assert (b.outcomes["i"], b.outcomes["j"]) == (i, j)
        assert b.probability == pytest.approx(1, abs=1e-12)
        if variant == "four_hadamard":
            assert fid(b.state, bell_state(i, j)) > FULL
        else:
            assert fid(b.state, bell_state(j, i)) > FULL

    def test_psi_minus(self):
        (b,) = bell_analyzer(bell_state(1, 1))
        assert b.outcomes == {"i": 1, "j": 1}

    def test_two_hadamard_phi_plus(self):
        (b,) = bell_analyzer(bell_state(0, 0), "two_hadamard")
        assert np.allclose(b.state.amplitudes, bell_state(0, 0).amplitudes)

    def test_non_bell_input_probabilities(self):
        st = random_state(R2, np.random.default_rng(2))
        brs = bell_analyzer(st)
        probs = {(b.outcomes["i"], b.outcomes["j"]): b.probability for b in brs}
        for (i, j), p in probs.items():
            overlap = abs(np.vdot(bell_state(i, j).amplitudes, st.amplitudes)) ** 2
            assert p == pytest.approx(overlap, abs=1e-12)

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            analyzer_protocol(bell_state(0, 0), "three_hadamard")


class TestTeleport:
    def test_zero_input_trivial_branch(self):
        brs = {(b.outcomes["p1"], b.outcomes["p2"]): b for b in teleport(single_qubit_state(1, 0))}
        b = brs[(0, 0)]
        alice, bob = split_teleport_branch(b)
        assert fid(bob, basis_state(QubitRegister.of("B"), (0,))) > FULL
        assert fid(alice, bell_state(0, 0, QubitRegister.of("A1", "A2"))) > FULL

    def test_phase_state_all_branches(self):
        psi = ket_plus_phase(math.pi / 3)
        brs = teleport(psi)
        assert len(brs) == 4
        for b in brs:
            assert b.probability == pytest.approx(0.25, abs=1e-12)
            assert fid(b.corrected, psi.relabel(QubitRegister.of("B"))) > FULL

    @pytest.mark.parametrize("seed", range(20))
    def test_random_inputs_exact(self, seed):
        psi = random_state(QubitRegister.of("q"), np.random.default_rng(seed))
        bob_reg = QubitRegister.of("B")
        for b in teleport(psi):
            p1, p2 = b.outcomes["p1"], b.outcomes["p2"]
            bob = psi.relabel(bob_reg).amplitudes
            # X^p1 Z^p2 psi
            bob = np.diag([1, (-1) ** p2]) @ bob
            if p1:
                bob = bob[::-1]
            alice = (-1) ** (p1 * p2) * bell_state(p2, p1, QubitRegister.of("A1", "A2")).amplitudes
            assert np.max(np.abs(b.state.amplitudes - np.kron(alice, bob))) < 1e-10
            assert fid(b.corrected, psi.relabel(bob_reg)) > FULL

    def test_alice_branch_11(self):
        b = teleport(ket_plus_phase(0.4))
        (b11,) = [x for x in b if x.outcomes == {"p1": 1, "p2": 1}]
        alice, _ = split_teleport_branch(b11)
        assert fid(alice, bell_state(1, 1, QubitRegister.of("A1", "A2"))) > FULL

    def test_rejects_two_qubits(self):
        with pytest.raises(ValueError):
            teleport(bell_state(0, 0))


class TestGhzChain:
    def test_n2_is_bell_prep(self):
        chain = {b.outcomes["p2"]: b for b in ghz_chain(2)}
        bell = {b.outcomes["p"]: b for b in prepare_bell(0, 0)}
        for p in (0, 1):
            assert np.allclose(chain[p].state.amplitudes, bell[p].state.amplitudes)
            assert np.allclose(chain[p].corrected.amplitudes, bell[p].corrected.amplitudes)

    def test_n3_branch_10(self):
        b = ghz_chain_protocol(3).branch(p2=1, p3=0)
        assert flip_vector(b.outcomes, 3) == (0, 1, 1)
        expected = np.zeros(8)
        expected[[0b011, 0b100]] = 1 / math.sqrt(2)
        assert np.allclose(b.state.amplitudes, expected)
        assert fid(b.corrected, ghz_state(3)) > FULL

    @pytest.mark.parametrize("n", range(2, 7))
    def test_matches_dense_oracle(self, n):
        steps = [("H", k) for k in range(n)] + [("P", i - 1, i) for i in range(1, n)]
        ref = oracle.enumerate_branches(steps, oracle.ket([0] * n), n)
        got = {tuple(b.outcomes[f"p{i}"] for i in range(2, n + 1)): b for b in ghz_chain(n)}
        assert got.keys() == ref.keys()
        for key, (prob, vec) in ref.items():
            assert got[key].probability == pytest.approx(prob, abs=1e-12)
            assert np.allclose(got[key].state.amplitudes, vec, atol=1e-12)
            # raw state is X(j) GHZ_n
            j = flip_vector(got[key].outcomes, n)
            assert fid(got[key].state, apply_pauli_string(ghz_state(n), pauli_x(j))) > FULL

    def test_n6_all_branches(self):
        brs = ghz_chain(6)
        assert len(brs) == 32
        assert all(fid(b.corrected, ghz_state(6)) > FULL for b in brs)

    @pytest.mark.parametrize("n", [1, 25])
    def test_bounds(self, n):
        with pytest.raises(ValueError):
            ghz_chain(n)


class TestFusion:
    def test_22_p0_direct(self):
        (b,) = [b for b in ghz_fusion(2, 2) if b.outcomes["p"] == 0]
        assert fid(b.state, ghz_state(4, b.state.register)) > FULL

    def test_32_p1_eq(self):
        (b,) = [b for b in ghz_fusion(3, 2) if b.outcomes["p"] == 1]
        reg = b.state.register
        u = apply_pauli_string(ghz_state(5, reg), pauli_x((0, 0, 0, 1, 1)))
        assert np.allclose(b.state.amplitudes, u.amplitudes, atol=1e-12)
        assert fid(b.corrected, ghz_state(5, reg)) > FULL

    @pytest.mark.parametrize("n, m", [(2, 2), (3, 2), (4, 3), (2, 5)])
    def test_both_branches(self, n, m):
        brs = ghz_fusion(n, m)
        assert sorted(b.outcomes["p"] for b in brs) == [0, 1]
        for b in brs:
            assert b.probability == pytest.approx(0.5, abs=1e-12)
            assert fid(b.corrected, ghz_state(n + m, b.state.register)) > FULL

    def test_bounds(self):
        with pytest.raises(ValueError):
            ghz_fusion(1, 2)


class TestCzViaParity:
    def test_plus_plus(self):
        brs = cz_via_parity(plus_state(2))
        assert len(brs) == 8
        for b in brs:
            assert np.allclose(b.corrected.amplitudes * np.conj(b.corrected.amplitudes[0]) / abs(b.corrected.amplitudes[0]),
                               np.array([1, 1, 1, -1]) / 2, atol=1e-12)

    @pytest.mark.parametrize("x, y", BITS2)
    def test_basis(self, x, y):
        for b in cz_via_parity(basis_state(R2, (x, y))):
            expected = (-1) ** (x * y) * basis_state(b.corrected.register, (x, y)).amplitudes
            assert fid(b.corrected, PureState(b.corrected.register, expected)) > FULL

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_inputs(self, seed):
        s = random_state(R2, np.random.default_rng(seed))
        target = oracle.cz_dense() @ s.amplitudes
        brs = cz_via_parity(s)
        assert sum(b.probability for b in brs) == pytest.approx(1)
        for b in brs:
            assert oracle.fidelity(b.corrected.amplitudes, target) > FULL

    def test_oracle_helper(self):
        assert np.allclose(cz_matrix_oracle(basis_state(R2, (1, 1))).amplitudes, [0, 0, 0, -1])
