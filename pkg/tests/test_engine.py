"""State-vector engine: walk operators, measurements, exactness checks."""

import numpy as np
import pytest

from walkqec import engine, oracle
from walkqec.engine import (COIN_H, COIN_HP, COIN_I, COIN_S, COIN_T, COIN_X,
                            COIN_Z, CoinSpec, Layout, all_at_origin,
                            apply_coin, apply_neighbor, apply_particle_unitary,
                            apply_pauli_word, apply_shift, expectation,
                            fidelity, init_state, measure_coin,
                            position_distribution, project_pauli)
from walkqec.pauli import (LOGICAL_X, LOGICAL_Z, PEX, PauliWord, STABILIZERS,
                           from_triples)

from conftest import random_state

FIVE, SIX = engine.FIVE, engine.SIX


def dense_r():
    r = np.zeros((4, 4))
    for v, nxt in engine.V_SUCC.items():
        r[nxt, v] = 1
    return r


class TestLayoutAndInit:
    def test_dimensions(self):
        assert FIVE.dim == 8 ** 5
        assert SIX.dim == 8 ** 6

    def test_empty_layout_rejected(self):
        with pytest.raises(ValueError):
            Layout(0, False)

    def test_init_basis_states(self):
        st = init_state(FIVE, [(p, 0, "00") for p in range(5)])
        assert st.amps[0] == 1.0
        st = init_state(FIVE, [(4, 1, "10"), (2, 1, "10"), (0, 1, "01"),
                               (1, 0, "00"), (3, 0, "00")])
        b4 = 4 + engine.V_OF_LABEL["10"]
        b2 = 4 + engine.V_OF_LABEL["10"]
        b0 = 4 + engine.V_OF_LABEL["01"]
        assert st.amps[(b4 << 12) | (b2 << 6) | b0] == 1.0

    def test_duplicate_and_missing_placements(self):
        with pytest.raises(ValueError):
            init_state(FIVE, [(0, 0, "00"), (0, 1, "00")])
        with pytest.raises(ValueError):
            init_state(FIVE, [(0, 0, "00")])


class TestCoin:
    def test_identity_spec_is_noop(self):
        st = all_at_origin(FIVE)
        out = apply_coin(st, CoinSpec())
        assert np.array_equal(out.amps, st.amps)

    def test_vertex_conditioned_flip(self):
        st = init_state(FIVE, [(1, 0, "10")] + [(p, 0, "00") for p in (0, 2, 3, 4)])
        spec = CoinSpec().set(1, "10", COIN_X)
        out = apply_coin(st, spec)
        expect = init_state(FIVE, [(1, 1, "10")] + [(p, 0, "00") for p in (0, 2, 3, 4)])
        assert fidelity(out, expect) == pytest.approx(1.0, abs=1e-14)

    def test_hadamard_superposition(self):
        st = all_at_origin(FIVE)
        out = apply_coin(st, CoinSpec().set(0, "00", COIN_H))
        assert out.amps[0] == pytest.approx(1 / np.sqrt(2))
        assert out.amps[4] == pytest.approx(1 / np.sqrt(2))

    def test_non_unitary_entry_rejected(self):
        with pytest.raises(ValueError):
            CoinSpec().set(0, "00", np.array([[1, 0], [0, 2]], dtype=complex))

    def test_named_constants_unitary(self):
        for u in (COIN_I, COIN_X, COIN_Z, COIN_H, COIN_HP, COIN_S, COIN_T):
            assert engine.is_unitary(u)
        assert np.allclose(COIN_HP, (COIN_X - COIN_Z) / np.sqrt(2))
        assert np.allclose(COIN_S, np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)]))
        assert np.allclose(COIN_T, np.diag([np.exp(1j * np.pi / 8), np.exp(-1j * np.pi / 8)]))


class TestShift:
    def test_coin_one_advances(self):
        st = init_state(FIVE, [(0, 1, "00")] + [(p, 0, "00") for p in (1, 2, 3, 4)])
        out = apply_shift(st)
        expect = init_state(FIVE, [(0, 1, "10")] + [(p, 0, "00") for p in (1, 2, 3, 4)])
        assert fidelity(out, expect) == pytest.approx(1.0, abs=1e-14)

    def test_coin_zero_stays(self):
        st = init_state(FIVE, [(0, 0, "11")] + [(p, 0, "00") for p in (1, 2, 3, 4)])
        out = apply_shift(st)
        assert fidelity(out, st) == pytest.approx(1.0, abs=1e-14)

    def test_fourth_power_is_identity(self, rng):
        st = random_state(FIVE, rng)
        out = st
        for _ in range(4):
            out = apply_shift(out)
        assert np.max(np.abs(out.amps - st.amps)) < 1e-12

    def test_dense_rotation_relations(self):
        r = dense_r()
        assert np.array_equal(np.linalg.matrix_power(r, 2),
                              np.kron([[0, 1], [1, 0]], [[0, 1], [1, 0]]))
        assert np.array_equal(r.T, np.linalg.matrix_power(r, 3))


class TestNeighbor:
    def test_matching_pair_flips_sign(self):
        st = init_state(FIVE, [(0, 1, "10"), (1, 1, "10")] +
                        [(p, 0, "00") for p in (2, 3, 4)])
        out = apply_neighbor(st)
        # P0/P1 match (-1), P2/P3 and P3/P4 at origin also match (each -1)
        assert np.vdot(st.amps, out.amps).real == pytest.approx(-1.0)

    def test_coin_mismatch_no_phase(self):
        st = init_state(FIVE, [(0, 1, "10"), (1, 0, "10"), (2, 1, "11"),
                               (3, 0, "01"), (4, 1, "01")])
        # engineered so that no adjacent pair matches in both coin and vertex
        out = apply_neighbor(st)
        assert np.vdot(st.amps, out.amps).real == pytest.approx(1.0)

    def test_external_rule(self):
        st = init_state(SIX, [(PEX, 0, "10"), (4, 0, "00"), (0, 0, "01"),
                              (1, 0, "10"), (2, 0, "11"), (3, 0, "01")])
        out = apply_neighbor(st)
        assert np.vdot(st.amps, out.amps).real == pytest.approx(-1.0)
        # vertex pair that is NOT in the external adjacency: no phase
        st2 = init_state(SIX, [(PEX, 0, "00"), (4, 0, "00"), (0, 0, "01"),
                               (1, 0, "10"), (2, 0, "11"), (3, 0, "01")])
        out2 = apply_neighbor(st2)
        assert np.vdot(st2.amps, out2.amps).real == pytest.approx(1.0)

    def test_involution(self, rng):
        st = random_state(FIVE, rng)
        out = apply_neighbor(apply_neighbor(st))
        assert np.array_equal(out.amps, st.amps)

    def test_norm_preserved_by_walk_ops(self, rng):
        st = random_state(FIVE, rng)
        spec = CoinSpec.uniform(range(5), COIN_H)
        for op in (lambda s: apply_coin(s, spec), apply_shift, apply_neighbor):
            st = op(st)
            assert abs(st.norm() - 1) < 1e-12


class TestParticleUnitary:
    def test_identity(self, rng):
        st = random_state(FIVE, rng)
        out = apply_particle_unitary(st, 2, np.eye(8))
        assert np.allclose(out.amps, st.amps)

    def test_dense_pauli_agrees_with_word_application(self, rng):
        st = random_state(FIVE, rng)
        word = from_triples({2: "XZY"}, phase_pow=2)
        u = engine.pauli_word_matrix(word, 2)
        a = apply_particle_unitary(st, 2, u)
        b = apply_pauli_word(st, word)
        assert np.max(np.abs(a.amps - b.amps)) < 1e-12

    def test_r_squared_is_double_bit_flip(self):
        r = dense_r()
        u = np.kron(np.eye(2), np.linalg.matrix_power(r, 2))
        st = init_state(FIVE, [(3, 0, "00")] + [(p, 0, "00") for p in (0, 1, 2, 4)])
        out = apply_particle_unitary(st, 3, u)
        expect = init_state(FIVE, [(3, 0, "11")] + [(p, 0, "00") for p in (0, 1, 2, 4)])
        assert fidelity(out, expect) == pytest.approx(1.0, abs=1e-14)

    def test_non_unitary_rejected(self, rng):
        st = random_state(FIVE, rng)
        with pytest.raises(ValueError):
            apply_particle_unitary(st, 0, np.ones((8, 8)))


class TestPauliWordApplication:
    def test_strided_matches_dense_oracle(self, rng):
        # random single-step words against Kronecker matrices on the data block
        words = [from_triples({4: "ZZI", 2: "ZZI"}),
                 from_triples({2: "XXX", 0: "XXX"}),
                 from_triples({4: "YIZ", 0: "XYI"}, phase_pow=1)]
        for word in words:
            vec = rng.normal(size=512) + 1j * rng.normal(size=512)
            vec /= np.linalg.norm(vec)
            st = oracle.embed_data_vector(FIVE, vec)
            out = apply_pauli_word(st, word)
            dense = oracle.dense_of(word) @ vec
            got = oracle.extract_data_vector(out, require=0.0)
            assert np.max(np.abs(got - dense)) < 1e-12


class TestMeasurement:
    def test_deterministic_coin(self):
        st = all_at_origin(FIVE)
        bit, post, prob = measure_coin(st, 0, forced=0)
        assert bit == 0 and prob == pytest.approx(1.0)
        assert fidelity(post, st) == pytest.approx(1.0)

    def test_plus_state_both_branches(self):
        st = apply_coin(all_at_origin(FIVE), CoinSpec().set(0, "00", COIN_H))
        branches = measure_coin(st, 0, both_branches=True)
        assert len(branches) == 2
        assert all(p == pytest.approx(0.5) for _, _, p in branches)

    def test_forced_impossible_outcome(self):
        st = all_at_origin(FIVE)
        with pytest.raises(ValueError):
            measure_coin(st, 0, forced=1)

    def test_seeded_reproducible(self):
        st = apply_coin(all_at_origin(FIVE), CoinSpec().set(0, "00", COIN_H))
        bits = []
        for _ in range(2):
            rng = np.random.default_rng(11)
            bit, _, _ = measure_coin(st, 0, rng=rng)
            bits.append(bit)
        assert bits[0] == bits[1]


class TestExpectationProjection:
    def test_expectation_on_basis(self):
        st = all_at_origin(FIVE)
        assert expectation(st, PauliWord.single(0, "c", "Z")) == pytest.approx(1.0)

    def test_non_hermitian_rejected(self, rng):
        st = random_state(FIVE, rng)
        with pytest.raises(ValueError):
            expectation(st, PauliWord.single(0, "c", "X").times_i())

    def test_projection_idempotent(self, rng):
        st = random_state(FIVE, rng)
        s0 = STABILIZERS[0]
        once, p1 = project_pauli(st, s0, 1)
        twice, p2 = project_pauli(once, s0, 1)
        assert p2 == pytest.approx(1.0, abs=1e-12)
        assert fidelity(once, twice) == pytest.approx(1.0, abs=1e-12)

    def test_projection_zero_probability(self):
        st = all_at_origin(FIVE)
        with pytest.raises(ValueError):
            project_pauli(st, PauliWord.single(0, "c", "Z"), -1)

    def test_sequential_code_projection(self):
        st = all_at_origin(FIVE)
        for s in STABILIZERS:
            st, prob = project_pauli(st, s, 1)
            assert prob > 0
        st, _ = project_pauli(st, LOGICAL_Z, 1)
        for s in STABILIZERS:
            assert expectation(st, s) == pytest.approx(1.0, abs=1e-12)
        assert expectation(st, LOGICAL_Z) == pytest.approx(1.0, abs=1e-12)
        assert expectation(st, LOGICAL_X) == pytest.approx(0.0, abs=1e-12)


class TestFidelity:
    def test_self_and_global_phase(self, rng):
        st = random_state(FIVE, rng)
        assert fidelity(st, st) == pytest.approx(1.0)
        neg = engine.StateVector(FIVE, -st.amps)
        assert fidelity(st, neg) == pytest.approx(1.0)

    def test_orthogonal(self):
        a = all_at_origin(FIVE)
        b = init_state(FIVE, [(0, 1, "00")] + [(p, 0, "00") for p in (1, 2, 3, 4)])
        assert fidelity(a, b) == pytest.approx(0.0)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(ValueError):
            fidelity(random_state(FIVE, rng), random_state(SIX, rng))


def test_position_distribution():
    st = init_state(FIVE, [(2, 1, "11")] + [(p, 0, "00") for p in (0, 1, 3, 4)])
    dist = position_distribution(st, 2)
    assert dist[engine.V_OF_LABEL["11"]] == pytest.approx(1.0)
