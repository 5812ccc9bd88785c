"""Simulator gate semantics against the dense-matrix oracle."""

import numpy as np
import pytest

from vqcbench.simulator import (QState, apply_cnot, apply_h, apply_rotation,
                                apply_x, expect_z, inner_product,
                                rotation_many, zero_state, zero_states)

from oracles import (HADAMARD, I2, PAULI_X, cnot_matrix, lift,
                     rotation_matrix, z_expectation)

INV_SQRT2 = 1 / np.sqrt(2)


def test_zero_state_definitions():
    assert np.array_equal(zero_state(1).amplitudes, [1, 0])
    assert np.array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])
    s4 = zero_state(4)
    assert s4.amplitudes.shape == (16,)
    assert abs(np.sum(np.abs(s4.amplitudes) ** 2) - 1.0) < 1e-15


@pytest.mark.parametrize("bad", [0, -1, 17])
def test_zero_state_resource_guard(bad):
    with pytest.raises(ValueError):
        zero_state(bad)


def test_hadamard():
    s = apply_h(zero_state(1), 0)
    assert np.allclose(s.amplitudes, [INV_SQRT2, INV_SQRT2])
    assert abs(expect_z(s, 0)) < 1e-12
    apply_h(s, 0)  # involution
    assert np.max(np.abs(s.amplitudes - [1, 0])) < 1e-12


def test_pauli_x():
    s = apply_x(zero_state(1), 0)
    assert np.array_equal(s.amplitudes, [0, 1])
    assert expect_z(s, 0) == -1.0
    apply_x(s, 0)
    assert np.max(np.abs(s.amplitudes - [1, 0])) < 1e-12


def test_rotation_half_turn_y():
    s = apply_rotation(zero_state(1), "y", 0, np.pi)
    assert abs(abs(s.amplitudes[1]) ** 2 - 1.0) < 1e-12


def test_rotation_z_preserves_z_expectation():
    s = apply_rotation(zero_state(1), "z", 0, 0.7321)
    assert abs(expect_z(s, 0) - 1.0) < 1e-12


def test_rotation_x_quarter_turn():
    # oracle: explicit 2x2 matrix product
    expected = rotation_matrix("x", np.pi / 2) @ np.array([1, 0], dtype=complex)
    s = apply_rotation(zero_state(1), "x", 0, np.pi / 2)
    assert np.max(np.abs(s.amplitudes - expected)) < 1e-12
    assert abs(expect_z(s, 0)) < 1e-12


def test_rotation_identity_at_zero_angle():
    for axis in "xyz":
        s = apply_h(zero_state(1), 0)
        before = s.amplitudes.copy()
        apply_rotation(s, axis, 0, 0.0)
        assert np.array_equal(s.amplitudes, before)


def test_rotation_rejects_non_finite_angle():
    with pytest.raises(ValueError):
        apply_rotation(zero_state(1), "x", 0, np.nan)
    with pytest.raises(ValueError):
        apply_rotation(zero_state(1), "y", 0, np.inf)


def test_rotation_matrices_unitary():
    rng = np.random.default_rng(0)
    for axis in "xyz":
        for angle in rng.uniform(-2 * np.pi, 2 * np.pi, 5):
            U = rotation_matrix(axis, angle)
            assert np.max(np.abs(U @ U.conj().T - I2)) < 1e-12


def test_cnot_flips_target_when_control_set():
    s = apply_x(zero_state(2), 0)  # |10>
    apply_cnot(s, 0, 1)
    assert np.max(np.abs(s.amplitudes - [0, 0, 0, 1])) < 1e-15  # |11>


def test_cnot_bell_marginals():
    s = apply_h(zero_state(2), 0)
    apply_cnot(s, 0, 1)
    assert np.allclose(np.abs(s.amplitudes) ** 2, [0.5, 0, 0, 0.5])
    assert abs(expect_z(s, 0)) < 1e-12
    assert abs(expect_z(s, 1)) < 1e-12


def test_cnot_involution():
    rng = np.random.default_rng(1)
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    amps /= np.linalg.norm(amps)
    s = QState(3, amps.copy())
    apply_cnot(s, 2, 0)
    apply_cnot(s, 2, 0)
    assert np.max(np.abs(s.amplitudes - amps)) < 1e-12


def test_cnot_rejects_bad_indices():
    with pytest.raises(ValueError):
        apply_cnot(zero_state(2), 1, 1)
    with pytest.raises(ValueError):
        apply_cnot(zero_state(2), 0, 2)


def test_expect_z_eigenstates():
    assert expect_z(zero_state(1), 0) == 1.0
    assert expect_z(apply_x(zero_state(1), 0), 0) == -1.0


def test_expect_z_known_angle():
    s = apply_rotation(zero_state(1), "y", 0, np.pi / 3)
    assert abs(expect_z(s, 0) - 0.5) < 1e-12  # cos(pi/3)


def test_expect_z_matches_dense_oracle():
    rng = np.random.default_rng(7)
    for n in (1, 2, 3):
        for _ in range(5):
            s = zero_state(n)
            for _ in range(15):
                kind = rng.choice(["h", "x", "rot", "cnot"] if n > 1 else ["h", "x", "rot"])
                q = int(rng.integers(n))
                if kind == "h":
                    apply_h(s, q)
                elif kind == "x":
                    apply_x(s, q)
                elif kind == "rot":
                    apply_rotation(s, str(rng.choice(list("xyz"))), q,
                                   float(rng.uniform(-np.pi, np.pi)))
                else:
                    t = int(rng.integers(n))
                    if t != q:
                        apply_cnot(s, q, t)
            for q in range(n):
                assert abs(expect_z(s, q) - z_expectation(s.amplitudes, q, n)) < 1e-12


def test_expect_z_rejects_bad_index():
    with pytest.raises(ValueError):
        expect_z(zero_state(2), 2)


def test_inner_product_basics():
    rng = np.random.default_rng(3)
    amps = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    amps /= np.linalg.norm(amps)
    s = QState(2, amps)
    assert abs(inner_product(s, s) - 1.0) < 1e-10
    zero, one = zero_state(1), apply_x(zero_state(1), 0)
    assert inner_product(zero, one) == 0.0
    plus = apply_h(zero_state(1), 0)
    assert abs(abs(inner_product(plus, zero_state(1))) ** 2 - 0.5) < 1e-12


def test_inner_product_conjugate_symmetry():
    rng = np.random.default_rng(4)
    for _ in range(10):
        a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        b = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        sa, sb = QState(3, a / np.linalg.norm(a)), QState(3, b / np.linalg.norm(b))
        assert abs(inner_product(sa, sb) - np.conj(inner_product(sb, sa))) < 1e-14


def test_inner_product_dimension_mismatch():
    with pytest.raises(ValueError):
        inner_product(zero_state(1), zero_state(2))


def test_norm_preserved_long_random_sequences():
    rng = np.random.default_rng(11)
    for n in (2, 5, 7):
        s = zero_state(n)
        for _ in range(200):
            kind = rng.choice(["h", "x", "rot", "cnot"])
            q = int(rng.integers(n))
            if kind == "h":
                apply_h(s, q)
            elif kind == "x":
                apply_x(s, q)
            elif kind == "rot":
                apply_rotation(s, str(rng.choice(list("xyz"))), q,
                               float(rng.uniform(-6, 6)))
            else:
                t = int(rng.integers(n))
                if t != q:
                    apply_cnot(s, q, t)
        assert abs(np.sum(np.abs(s.amplitudes) ** 2) - 1.0) < 1e-10


def test_gate_inverse_round_trips():
    rng = np.random.default_rng(13)
    n = 3
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    amps /= np.linalg.norm(amps)
    for axis in "xyz":
        s = QState(n, amps.copy())
        angle = float(rng.uniform(-np.pi, np.pi))
        apply_rotation(s, axis, 1, angle)
        apply_rotation(s, axis, 1, -angle)
        assert np.max(np.abs(s.amplitudes - amps)) < 1e-12
    for gate in (lambda st: apply_h(st, 2), lambda st: apply_x(st, 0),
                 lambda st: apply_cnot(st, 0, 2)):
        s = QState(n, amps.copy())
        gate(s)
        gate(s)
        assert np.max(np.abs(s.amplitudes - amps)) < 1e-12


def test_single_qubit_gates_match_dense_oracle():
    rng = np.random.default_rng(17)
    n = 3
    for q in range(n):
        amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        amps /= np.linalg.norm(amps)
        s = QState(n, amps.copy())
        apply_h(s, q)
        assert np.max(np.abs(s.amplitudes - lift(HADAMARD, q, n) @ amps)) < 1e-12
        s = QState(n, amps.copy())
        apply_x(s, q)
        assert np.max(np.abs(s.amplitudes - lift(PAULI_X, q, n) @ amps)) < 1e-12
        angle = float(rng.uniform(-np.pi, np.pi))
        for axis in "xyz":
            s = QState(n, amps.copy())
            apply_rotation(s, axis, q, angle)
            expected = lift(rotation_matrix(axis, angle), q, n) @ amps
            assert np.max(np.abs(s.amplitudes - expected)) < 1e-12


def test_cnot_matches_dense_oracle_all_pairs():
    rng = np.random.default_rng(19)
    n = 3
    amps = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    amps /= np.linalg.norm(amps)
    for c in range(n):
        for t in range(n):
            if c == t:
                continue
            s = QState(n, amps.copy())
            apply_cnot(s, c, t)
            assert np.max(np.abs(s.amplitudes - cnot_matrix(c, t, n) @ amps)) < 1e-12


def test_batched_rotation_matches_per_state():
    rng = np.random.default_rng(23)
    n = 3
    states = zero_states(n, 5)
    for i in range(5):
        states[i] = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        states[i] /= np.linalg.norm(states[i])
    angles = rng.uniform(-np.pi, np.pi, 5)
    expected = states.copy()
    for i in range(5):
        st = QState(n, expected[i].copy())
        apply_rotation(st, "y", 1, angles[i])
        expected[i] = st.amplitudes
    rotation_many(states, n, "y", 1, angles)
    assert np.max(np.abs(states - expected)) < 1e-14
