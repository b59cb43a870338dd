from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from conftest import random_state
from spinctl.oracle import PAULI, pauli_string
from spinctl.statevector import (
    Gate,
    apply_gate,
    basis_state,
    fidelity_pure,
    run_circuit,
    single_excitation_weight,
    site_populations,
)

KINDS = ["RZ", "RXX", "RYY", "RZZ"]


def brute_force_gate(kind, qubits, angle, n):
    # independent of both backends: scipy expm of the Pauli generator
    P = pauli_string(n, {q: kind[-1] for q in qubits})
    return expm(-1j * angle * P / 2)


def random_gate(rng, n, kind=None):
    kind = kind or KINDS[rng.integers(4)]
    if kind == "RZ":
        qubits = (int(rng.integers(n)),)
    else:
        qubits = tuple(int(q) for q in rng.choice(n, size=2, replace=False))
    return Gate(kind, qubits, float(rng.uniform(-2 * pi, 2 * pi)))


@pytest.mark.parametrize("n, bits, index", [(3, "100", 4), (3, "001", 1), (1, "0", 0), (2, "11", 3)])
def test_basis_state_labels(n, bits, index):
    psi = basis_state(n, bits)
    assert psi[index] == 1
    assert np.count_nonzero(psi) == 1
    assert psi.size == 2**n


@pytest.mark.parametrize("n, bits", [(3, "10"), (2, "012"), (0, "")])
def test_basis_state_rejects_bad_labels(n, bits):
    with pytest.raises(ValueError):
        basis_state(n, bits)


def test_gate_descriptor_validation():
    with pytest.raises(ValueError):
        Gate("RZ", (0, 1), 0.1)
    with pytest.raises(ValueError):
        Gate("RXX", (1, 1), 0.1)
    with pytest.raises(ValueError):
        Gate("CNOT", (0, 1), 0.0)
    with pytest.raises(ValueError):
        apply_gate(basis_state(2, "00"), Gate("RZ", (2,), 0.1))


def test_rz_pi_is_global_phase_on_zero():
    out = apply_gate(basis_state(1, "0"), Gate("RZ", (0,), pi))
    assert np.allclose(out, [np.exp(-1j * pi / 2), 0], atol=1e-15)


def test_rxx_pi_on_00():
    expected = brute_force_gate("RXX", (0, 1), pi, 2) @ basis_state(2, "00")
    assert np.allclose(expected, [0, 0, 0, -1j], atol=1e-12)
    out = apply_gate(basis_state(2, "00"), Gate("RXX", (0, 1), pi))
    assert np.allclose(out, expected, atol=1e-12)


@pytest.mark.parametrize("phi", [0.3, -1.7, pi])
def test_rzz_on_00_is_phase(phi):
    out = apply_gate(basis_state(2, "00"), Gate("RZZ", (0, 1), phi))
    assert np.allclose(out, [np.exp(-1j * phi / 2), 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("n", [2, 3, 4])
def test_gates_match_brute_force_matrices(kind, n, rng):
    for _ in range(5):
        gate = random_gate(rng, n, kind)
        psi = random_state(rng, n)
        expected = brute_force_gate(kind, gate.qubits, gate.angle, n) @ psi
        assert np.allclose(apply_gate(psi, gate), expected, atol=1e-12)


@pytest.mark.parametrize("kind", KINDS)
def test_gate_inverse_restores_state(kind, rng):
    psi = random_state(rng, 3)
    gate = random_gate(rng, 3, kind)
    back = apply_gate(apply_gate(psi, gate), gate.inverse())
    assert np.max(np.abs(back - psi)) < 1e-12


def test_norm_preserved_over_100_gates(rng):
    for n in (2, 3, 5):
        psi = random_state(rng, n)
        psi = run_circuit(psi, [random_gate(rng, n) for _ in range(100)])
        assert abs(np.vdot(psi, psi).real - 1) < 1e-10


@settings(max_examples=50, deadline=None)
@given(
    st.sampled_from(["RXX", "RYY", "RZZ"]),
    st.sampled_from(["RXX", "RYY", "RZZ"]),
    st.floats(-6.3, 6.3),
    st.floats(-6.3, 6.3),
)
def test_disjoint_pairs_commute(k1, k2, a1, a2):
    psi = random_state(np.random.default_rng(7), 4)
    g1, g2 = Gate(k1, (0, 1), a1), Gate(k2, (2, 3), a2)
    assert np.max(np.abs(run_circuit(psi, [g1, g2]) - run_circuit(psi, [g2, g1]))) < 1e-12


def test_run_circuit_order_and_identity(rng):
    psi = random_state(rng, 2)
    assert np.array_equal(run_circuit(psi, []), psi)
    out = run_circuit(psi, [Gate("RZ", (0,), pi / 3), Gate("RZ", (0,), -pi / 3)])
    assert np.max(np.abs(out - psi)) < 1e-12
    # index 0 acts first: RXX then RZ differs from RZ then RXX
    g1, g2 = Gate("RXX", (0, 1), 0.7), Gate("RZ", (0,), 1.1)
    U = brute_force_gate("RZ", (0,), 1.1, 2) @ brute_force_gate("RXX", (0, 1), 0.7, 2)
    assert np.allclose(run_circuit(psi, [g1, g2]), U @ psi, atol=1e-12)


def test_circuit_unitary_is_unitary(rng):
    for n in (1, 2, 3):
        gates = [random_gate(rng, n, "RZ" if n == 1 else None) for _ in range(30)]
        U = np.column_stack([run_circuit(np.eye(1 << n)[:, k], gates) for k in range(1 << n)])
        assert np.max(np.abs(U.conj().T @ U - np.eye(1 << n))) < 1e-10


def test_fidelity_pure_examples(rng):
    assert fidelity_pure(basis_state(3, "100"), basis_state(3, "001")) == 0
    x = random_state(rng, 3)
    assert fidelity_pure(x, x) == pytest.approx(1, abs=1e-12)
    plus = np.array([1, 1]) / sqrt(2)
    assert fidelity_pure(plus, basis_state(1, "0")) == pytest.approx(0.5, abs=1e-15)
    y = random_state(rng, 3)
    assert fidelity_pure(x, y) == pytest.approx(fidelity_pure(y, x), abs=1e-15)
    with pytest.raises(ValueError):
        fidelity_pure(basis_state(2, "00"), basis_state(3, "000"))


def test_site_populations_examples():
    assert np.allclose(site_populations(basis_state(3, "100")), [1, 0, 0])
    mix = (basis_state(3, "100") + basis_state(3, "001")) / sqrt(2)
    assert np.allclose(site_populations(mix), [0.5, 0, 0.5])
    assert np.allclose(site_populations(basis_state(3, "110")), [1, 1, 0])


def test_single_excitation_weight():
    assert single_excitation_weight(basis_state(3, "010")) == 1
    assert single_excitation_weight(basis_state(3, "110")) == 0
    assert single_excitation_weight(np.ones(4) / 2) == pytest.approx(0.5)


def test_pauli_table_is_standard():
    assert np.allclose(PAULI["Y"] @ PAULI["Y"], np.eye(2))
    assert np.allclose(PAULI["X"] @ PAULI["Y"], 1j * PAULI["Z"])
