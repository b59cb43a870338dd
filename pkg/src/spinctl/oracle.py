"""Dense reference evolution used to validate the Trotterized circuits.

Everything here builds full 2^N x 2^N matrices, so it is meant for small
chains only. The simulation backends never import this module.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .chain import ChainSpec, Circuit
from .statevector import Gate

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(n: int, ops: dict[int, str]) -> np.ndarray:
    """Kronecker product with site 0 as the leftmost (most significant) factor."""
    return reduce(np.kron, [PAULI[ops.get(k, "I")] for k in range(n)])


def build_hamiltonian(chain: ChainSpec, u_row) -> np.ndarray:
    n = chain.n_sites
    u_row = np.asarray(u_row, dtype=float)
    if u_row.shape != (n,):
        raise ValueError(f"u_row must have length {n}")
    H = np.zeros((1 << n, 1 << n), dtype=complex)
    for k in range(n - 1):
        for J, p in ((chain.Jx, "X"), (chain.Jy, "Y"), (chain.Jz, "Z")):
            if J:
                H += J * pauli_string(n, {k: p, k + 1: p})
    for j, u in enumerate(u_row):
        if u:
            H += u * pauli_string(n, {j: "Z"})
    return H


def expm_unitary(H: np.ndarray, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H via eigendecomposition."""
    evals, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * evals * t)) @ V.conj().T


def exact_evolution(chain: ChainSpec, controls, T: float) -> np.ndarray:
    """Ordered product of exact slice propagators, slice 1 applied first."""
    u = np.asarray(controls, dtype=float)
    dt = T / u.shape[0]
    U = np.eye(1 << chain.n_sites, dtype=complex)
    for row in u:
        U = expm_unitary(build_hamiltonian(chain, row), dt) @ U
    return U


def gate_matrix(gate: Gate, n: int) -> np.ndarray:
    """Dense unitary of one rotation gate, cos(phi/2) I - i sin(phi/2) P."""
    letter = gate.kind[-1]
    P = pauli_string(n, {q: letter for q in gate.qubits})
    half = 0.5 * gate.angle
    return np.cos(half) * np.eye(1 << n) - 1j * np.sin(half) * P


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    U = np.eye(1 << circuit.n_qubits, dtype=complex)
    for gate in circuit.gates:
        U = gate_matrix(gate, circuit.n_qubits) @ U
    return U


def unitarity_error(U: np.ndarray) -> float:
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))
