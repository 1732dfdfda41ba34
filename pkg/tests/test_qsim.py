import math

import numpy as np
import pytest

from cryptkit.qsim import (
    CNOT,
    Circuit,
    H,
    IndexOutOfRange,
    QuantumState,
    RY,
    W_THETA,
    X,
    Z,
    ZeroProbabilityBranch,
    apply,
    bell_phi_minus,
    bell_phi_plus,
    build_ghz_circuit,
    build_reversed_cnot_circuit,
    build_w_circuit,
    factor_out,
    ghz_state,
    is_product_state,
    measure_prob,
    plus_post_select,
    post_select,
    run,
    schmidt_values,
    w_state,
)

TOL = 1e-12


def random_state(rng, n):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return QuantumState(n, amps / np.linalg.norm(amps))


def states_close(state, expected, tol=TOL):
    return np.max(np.abs(state.amplitudes - np.asarray(expected))) < tol


# ---------------------------------------------------------------------------
# gates


def test_cnot_truth_table():
    for bits, expected in {"00": "00", "01": "01", "10": "11", "11": "10"}.items():
        out = apply(QuantumState.basis(2, bits), CNOT(0, 1))
        assert abs(out.amplitude(expected) - 1) < TOL


def test_hadamard_on_zero():
    out = apply(QuantumState.basis(1, 0), H(0))
    assert states_close(out, [1 / math.sqrt(2), 1 / math.sqrt(2)])


def test_pauli_involutions_on_random_states():
    rng = np.random.default_rng(5)
    for _ in range(20):
        state = random_state(rng, 3)
        for gate in (X(1), Z(2), H(0)):
            twice = apply(apply(state, gate), gate)
            assert states_close(twice, state.amplitudes)


def test_unitarity_on_random_states():
    rng = np.random.default_rng(6)
    gates = [X(0), Z(1), H(2), RY(0, 0.7), CNOT(1, 2), CNOT(2, 0)]
    for i in range(100):
        state = random_state(rng, 3)
        out = apply(state, gates[i % len(gates)])
        assert abs(np.sum(np.abs(out.amplitudes) ** 2) - 1) < TOL


def test_ry_rotation_entries():
    out = apply(QuantumState.basis(1, 0), RY(0, W_THETA))
    assert abs(out.amplitude(0) - 1 / math.sqrt(3)) < TOL
    assert abs(out.amplitude(1) - math.sqrt(2 / 3)) < TOL


def test_gate_index_validation():
    with pytest.raises(IndexOutOfRange):
        apply(QuantumState.basis(2, 0), X(2))
    with pytest.raises(ValueError):
        CNOT(1, 1)


def test_empty_circuit_is_identity():
    state = QuantumState.basis(2, "10")
    assert states_close(run(Circuit(2), state), state.amplitudes)


# ---------------------------------------------------------------------------
# reversed CNOT


def test_reversed_cnot_truth_table():
    circuit = build_reversed_cnot_circuit()
    expected = {"00": "00", "01": "11", "10": "10", "11": "01"}
    for bits, out_bits in expected.items():
        out = run(circuit, bits)
        assert abs(out.amplitude(out_bits) - 1) < TOL
        for other in range(4):
            if format(other, "02b") != out_bits:
                assert abs(out.amplitudes[other]) < TOL


def test_hadamard_sandwich_equals_flipped_cnot():
    sandwich = build_reversed_cnot_circuit()
    flipped = Circuit(2, (CNOT(1, 0),))
    for bits in range(4):
        assert states_close(run(sandwich, bits), run(flipped, bits).amplitudes)


# ---------------------------------------------------------------------------
# GHZ


def test_ghz_state_amplitudes():
    state = ghz_state()
    expected = np.zeros(8, dtype=complex)
    expected[0] = expected[7] = 1 / math.sqrt(2)
    assert states_close(state, expected)


def test_ghz_measurement_probability():
    state = ghz_state()
    assert abs(measure_prob(state, 0, 0) - 0.5) < TOL
    assert abs(measure_prob(state, 2, 1) - 0.5) < TOL


def test_ghz_zero_post_selection_collapses():
    state = post_select(ghz_state(), 0, 0)
    pair = factor_out(state, 0)
    assert states_close(pair, [1, 0, 0, 0])
    separable, _ = is_product_state(pair, [0])
    assert separable


def test_ghz_plus_post_selection_gives_bell_state():
    pair = factor_out(plus_post_select(ghz_state(), 0), 0)
    assert states_close(pair, bell_phi_plus())
    separable, sv = is_product_state(pair, [0])
    assert not separable
    assert abs(sv[0] - sv[1]) < TOL  # maximally entangled


def test_ghz_minus_post_selection_gives_other_bell_state():
    state = post_select(apply(ghz_state(), H(0)), 0, 1)
    pair = factor_out(state, 0)
    assert states_close(pair, bell_phi_minus())


# ---------------------------------------------------------------------------
# W state


def test_w_circuit_amplitudes():
    state = w_state()
    amp = 1 / math.sqrt(3)
    expected = np.zeros(8, dtype=complex)
    for basis in ("001", "010", "100"):
        expected[int(basis, 2)] = amp
    assert states_close(state, expected)
    assert abs(np.sum(np.abs(state.amplitudes) ** 2) - 1) < TOL


def test_w_first_qubit_probability():
    assert abs(measure_prob(w_state(), 0, 0) - 2 / 3) < TOL


def test_w_post_select_one_collapses_to_product():
    pair = factor_out(post_select(w_state(), 0, 1), 0)
    assert states_close(pair, [1, 0, 0, 0])
    separable, _ = is_product_state(pair, [0])
    assert separable


def test_w_post_select_zero_keeps_entanglement():
    pair = factor_out(post_select(w_state(), 0, 0), 0)
    expected = np.zeros(4, dtype=complex)
    expected[1] = expected[2] = 1 / math.sqrt(2)
    assert states_close(pair, expected)
    separable, sv = is_product_state(pair, [0])
    assert not separable
    assert abs(sv[0] - sv[1]) < TOL


def test_w_plus_post_selection_on_third_qubit():
    pair = factor_out(plus_post_select(w_state(), 2), 2)
    amp = 1 / math.sqrt(3)
    assert states_close(pair, [amp, amp, amp, 0])
    separable, _ = is_product_state(pair, [0])
    assert not separable


# ---------------------------------------------------------------------------
# measurement plumbing


def test_basis_state_probability():
    state = QuantumState.basis(3, "101")
    assert measure_prob(state, 1, 0) == 1.0
    assert measure_prob(state, 0, 1) == 1.0


def test_post_select_then_measure_is_certain():
    rng = np.random.default_rng(9)
    for _ in range(20):
        state = random_state(rng, 3)
        for q in range(3):
            for outcome in (0, 1):
                if measure_prob(state, q, outcome) > 1e-6:
                    assert abs(measure_prob(post_select(state, q, outcome), q, outcome) - 1) < TOL


def test_post_select_zero_probability_branch():
    with pytest.raises(ZeroProbabilityBranch):
        post_select(QuantumState.basis(2, "00"), 0, 1)


def test_is_product_state_examples():
    assert is_product_state(QuantumState.basis(2, "00"), [0])[0]
    bell = QuantumState(2, bell_phi_plus())
    separable, sv = is_product_state(bell, [0])
    assert not separable
    assert np.allclose(sv, [1 / math.sqrt(2)] * 2)


def test_product_detection_invariant_under_local_unitaries():
    # unitaries acting within one side of the cut never change the verdict
    rng = np.random.default_rng(12)
    local_gates = [RY(0, 1.1), Z(0), H(1), RY(2, 0.3), X(2)]
    for i in range(10):
        left = random_state(rng, 1)
        right = random_state(rng, 2)
        product = QuantumState(3, np.kron(left.amplitudes, right.amplitudes))
        entangled = apply(apply(product, H(0)), CNOT(0, 1))
        for state, verdict in ((product, True), (entangled, False)):
            assert is_product_state(state, [0])[0] is verdict
            rotated = state
            for g in local_gates:
                rotated = apply(rotated, g)
                assert is_product_state(rotated, [0])[0] is verdict


def test_schmidt_values_partition_validation():
    state = QuantumState.basis(3, "000")
    with pytest.raises(ValueError):
        schmidt_values(state, [])
    with pytest.raises(ValueError):
        schmidt_values(state, [0, 1, 2])


def test_w_circuit_uses_only_primitive_gates():
    kinds = {g.kind for g in build_w_circuit().gates}
    assert kinds <= {"X", "Z", "H", "RY", "CNOT"}
    kinds_ghz = {g.kind for g in build_ghz_circuit().gates}
    assert kinds_ghz <= {"H", "CNOT"}
