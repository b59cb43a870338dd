"""Density-matrix backend with per-qubit depolarizing noise after each layer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import Gate, apply_to_rows, n_qubits_of, pauli_action


@dataclass(frozen=True)
class NoiseSpec:
    """Depolarizing probability ``p`` applied to every qubit after every layer."""

    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"depolarizing probability {self.p} outside [0, 1]")


def from_pure(state: np.ndarray) -> np.ndarray:
    psi = np.asarray(state, dtype=complex)
    return np.outer(psi, psi.conj())


def _n_qubits(rho: np.ndarray) -> int:
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    return n_qubits_of(rho)


def apply_gate_density(rho: np.ndarray, gate: Gate) -> np.ndarray:
    """Unitary conjugation rho -> U rho U^dagger."""
    n = _n_qubits(rho)
    left = apply_to_rows(np.asarray(rho, dtype=complex), gate, n)
    return apply_to_rows(left.conj().T, gate, n).conj().T


def apply_depolarizing(rho: np.ndarray, qubit: int, p: float) -> np.ndarray:
    """Single-qubit depolarizing channel via the Kraus set
    {sqrt(1-3p/4) I, sqrt(p/4) X, sqrt(p/4) Y, sqrt(p/4) Z}.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability {p} outside [0, 1]")
    n = _n_qubits(rho)
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    rho = np.asarray(rho, dtype=complex)
    if p == 0.0:
        return rho
    q = (qubit,)

    def conj_by(pauli: str, m: np.ndarray) -> np.ndarray:
        # Paulis are Hermitian: P m P = (P (P m)^dagger)^dagger
        return pauli_action(pauli_action(m, n, pauli, q).conj().T, n, pauli, q).conj().T

    xrx = conj_by("X", rho)
    zrz = conj_by("Z", rho)
    yry = conj_by("Z", xrx)  # Y rho Y = X Z rho Z X up to cancelling phases
    return (1.0 - 0.75 * p) * rho + 0.25 * p * (xrx + yry + zrz)


def run_noisy_circuit(rho: np.ndarray, circuit, noise: NoiseSpec | None) -> np.ndarray:
    """Conjugate by each layer's gates, then depolarize every qubit."""
    rho = np.asarray(rho, dtype=complex)
    n = _n_qubits(rho)
    if circuit.n_qubits != n:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, state has {n}")
    p = 0.0 if noise is None else noise.p
    layers: dict[int, list[Gate]] = {}
    for gate in circuit.gates:
        layers.setdefault(gate.layer, []).append(gate)
    for layer in range(1, circuit.L + 1):
        for gate in layers.get(layer, ()):
            rho = apply_gate_density(rho, gate)
        if p > 0.0:
            for q in range(n):
                rho = apply_depolarizing(rho, q, p)
    return rho


def fidelity_against_pure(rho: np.ndarray, target: np.ndarray) -> float:
    target = np.asarray(target)
    if rho.shape != (target.shape[0], target.shape[0]):
        raise ValueError(f"dimension mismatch {rho.shape} vs {target.shape}")
    f = np.vdot(target, rho @ target).real
    return float(min(1.0, max(0.0, f)))


def purity(rho: np.ndarray) -> float:
    return float(np.einsum("ij,ji->", rho, rho).real)
