"""Pure-state simulation of rotation-gate circuits.

Basis labelling: site 0 is the leftmost character of a ket label and the
most-significant bit of the basis index, so ``|100>`` on three sites is
index 4.

Rotation conventions (half-angle)::

    RZ(phi)  = exp(-i phi Z/2)
    RXX(phi) = exp(-i phi X(x)X/2)
    RYY(phi) = exp(-i phi Y(x)Y/2)
    RZZ(phi) = exp(-i phi Z(x)Z/2)

Gates act directly on amplitude pairs through cached index tables, so no
2^n x 2^n matrix is ever formed here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

GATE_KINDS = ("RZ", "RXX", "RYY", "RZZ")


@dataclass(frozen=True)
class Gate:
    """One rotation gate: ``kind`` on ``qubits`` by ``angle`` radians."""

    kind: str
    qubits: tuple[int, ...]
    angle: float
    layer: int = 1

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        qubits = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qubits)
        if self.kind == "RZ":
            if len(qubits) != 1:
                raise ValueError("RZ acts on exactly one qubit")
        elif len(qubits) != 2 or qubits[0] == qubits[1]:
            raise ValueError(f"{self.kind} needs two distinct qubits")
        if any(q < 0 for q in qubits):
            raise ValueError("qubit indices must be non-negative")

    def inverse(self) -> "Gate":
        return Gate(self.kind, self.qubits, -self.angle, self.layer)


def n_qubits_of(state: np.ndarray) -> int:
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if dim < 2 or (1 << n) != dim:
        raise ValueError(f"leading dimension {dim} is not a power of two >= 2")
    return n


@lru_cache(maxsize=None)
def _z_signs(n: int, qubit: int) -> np.ndarray:
    idx = np.arange(1 << n)
    bit = (idx >> (n - 1 - qubit)) & 1
    return 1.0 - 2.0 * bit


@lru_cache(maxsize=None)
def _flip_index(n: int, qubits: tuple[int, ...]) -> np.ndarray:
    mask = 0
    for q in qubits:
        mask |= 1 << (n - 1 - q)
    return np.arange(1 << n) ^ mask


def _check_qubits(gate: Gate, n: int) -> None:
    if max(gate.qubits) >= n:
        raise ValueError(f"gate {gate.kind} on qubits {gate.qubits} exceeds {n} qubits")


def _bcast(v: np.ndarray, ndim: int) -> np.ndarray:
    return v.reshape(v.shape + (1,) * (ndim - 1))


def pauli_action(arr: np.ndarray, n: int, pauli: str, qubits: tuple[int, ...]) -> np.ndarray:
    """Apply a Pauli string (same letter on every listed qubit) along axis 0."""
    if pauli == "Z":
        signs = np.ones(1 << n)
        for q in qubits:
            signs = signs * _z_signs(n, q)
        return _bcast(signs, arr.ndim) * arr
    flipped = arr[_flip_index(n, qubits)]
    if pauli == "X":
        return flipped
    if pauli == "Y":
        # Y = i X Z per qubit; evaluate on the flipped (output) labels.
        phase = np.ones(1 << n, dtype=complex)
        for q in qubits:
            phase = phase * (1j * -_z_signs(n, q))
        return _bcast(phase, arr.ndim) * flipped
    raise ValueError(f"unknown Pauli {pauli!r}")


def apply_to_rows(arr: np.ndarray, gate: Gate, n: int) -> np.ndarray:
    """Left-multiply ``arr`` (shape ``(2**n, ...)``) by the gate unitary."""
    _check_qubits(gate, n)
    half = 0.5 * gate.angle
    if half == 0.0:
        return arr
    if gate.kind == "RZ" or gate.kind == "RZZ":
        signs = np.ones(1 << n)
        for q in gate.qubits:
            signs = signs * _z_signs(n, q)
        return _bcast(np.exp(-1j * half * signs), arr.ndim) * arr
    pauli = "X" if gate.kind == "RXX" else "Y"
    return np.cos(half) * arr - 1j * np.sin(half) * pauli_action(arr, n, pauli, gate.qubits)


def basis_state(n_qubits: int, bitstring: str) -> np.ndarray:
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    if len(bitstring) != n_qubits or set(bitstring) - {"0", "1"}:
        raise ValueError(f"bitstring {bitstring!r} is not a {n_qubits}-bit label")
    psi = np.zeros(1 << n_qubits, dtype=complex)
    psi[int(bitstring, 2)] = 1.0
    return psi


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    return apply_to_rows(np.asarray(state, dtype=complex), gate, n_qubits_of(state))


def run_circuit(state: np.ndarray, circuit) -> np.ndarray:
    """Apply gates in list order; ``circuit`` is a Circuit or an iterable of Gates."""
    psi = np.asarray(state, dtype=complex)
    n = n_qubits_of(psi)
    gates: Iterable[Gate] = getattr(circuit, "gates", circuit)
    expected = getattr(circuit, "n_qubits", n)
    if expected != n:
        raise ValueError(f"circuit has {expected} qubits, state has {n}")
    for gate in gates:
        psi = apply_to_rows(psi, gate, n)
    return psi


def fidelity_pure(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) ** 2)


def site_populations(state: np.ndarray) -> np.ndarray:
    """Probability of an excitation (bit 1) on each site."""
    n = n_qubits_of(state)
    probs = np.abs(np.asarray(state)) ** 2
    return np.array([probs @ (1.0 - _z_signs(n, j)) / 2.0 for j in range(n)])


def single_excitation_weight(state: np.ndarray) -> float:
    """Total probability in the subspace with exactly one excitation."""
    n = n_qubits_of(state)
    probs = np.abs(np.asarray(state)) ** 2
    return float(sum(probs[1 << k] for k in range(n)))
