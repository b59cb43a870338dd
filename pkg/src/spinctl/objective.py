"""Terminal-infidelity objective for the compiled control circuit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, Circuit, compile_circuit
from .controls import Scheme
from .density import NoiseSpec, fidelity_against_pure, from_pure, run_noisy_circuit
from .statevector import fidelity_pure, n_qubits_of, run_circuit


@dataclass
class ObjectiveSpec:
    chain: ChainSpec
    scheme: Scheme
    T: float
    psi_in: np.ndarray
    psi_tar: np.ndarray
    noise: NoiseSpec | None = None
    lambda_reg: float = 0.0

    def __post_init__(self):
        if self.T <= 0:
            raise ValueError("T must be positive")
        if self.lambda_reg < 0:
            raise ValueError("lambda_reg must be >= 0")
        self.psi_in = np.asarray(self.psi_in, dtype=complex)
        self.psi_tar = np.asarray(self.psi_tar, dtype=complex)
        if self.psi_in.shape != self.psi_tar.shape:
            raise ValueError("initial and target states differ in dimension")
        if n_qubits_of(self.psi_in) != self.chain.n_sites:
            raise ValueError("state dimension does not match the chain length")
        if self.scheme.n_sites != self.chain.n_sites:
            raise ValueError("scheme and chain disagree on the number of sites")
        for psi in (self.psi_in, self.psi_tar):
            if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
                raise ValueError("states must be normalized")

    @property
    def dt(self) -> float:
        return self.T / self.scheme.L

    def controls(self, params) -> np.ndarray:
        x = np.asarray(params, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("parameters must be finite")
        return self.scheme.unpack(x)

    def circuit(self, params) -> Circuit:
        return compile_circuit(self.chain, self.controls(params), self.T)

    def fidelity(self, params) -> float:
        circuit = self.circuit(params)
        # p = 0 is the identity channel; the pure-state path is exact and cheaper
        if self.noise is None or self.noise.p == 0.0:
            return fidelity_pure(self.psi_tar, run_circuit(self.psi_in, circuit))
        rho = run_noisy_circuit(from_pure(self.psi_in), circuit, self.noise)
        return fidelity_against_pure(rho, self.psi_tar)

    def penalty(self, params) -> float:
        """Rectangle-rule control effort ``dt * sum u^2``."""
        return self.dt * float(np.sum(self.controls(params) ** 2))

    def __call__(self, params) -> float:
        J = 1.0 - self.fidelity(params)
        if self.lambda_reg:
            J += self.lambda_reg * self.penalty(params)
        return J


def objective(params, spec: ObjectiveSpec) -> float:
    return spec(params)


def layer_states(spec: ObjectiveSpec, params) -> list[np.ndarray]:
    """Noiseless state at every layer boundary t_0 .. t_L."""
    circuit = spec.circuit(params)
    states = [spec.psi_in.copy()]
    for ell in range(1, circuit.L + 1):
        states.append(run_circuit(states[-1], circuit.layer(ell)))
    return states
