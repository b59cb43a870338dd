"""XXZ chain description and first-order Trotter compilation to a layered circuit.

Each layer is the drift block (RXX, RYY, RZZ on every edge, left to right)
followed by one RZ per site. Layers are numbered from 1 and layer 1 acts
first on the state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .statevector import Gate


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    Jx: float = 1.0
    Jy: float = 1.0
    Jz: float = 0.2

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("a chain needs at least two sites")


@dataclass
class Circuit:
    n_qubits: int
    L: int
    dt: float
    gates: list[Gate] = field(default_factory=list)

    def layer(self, index: int) -> list[Gate]:
        return [g for g in self.gates if g.layer == index]


def drift_layer(chain: ChainSpec, dt: float, layer_index: int = 1) -> list[Gate]:
    if dt <= 0:
        raise ValueError("dt must be positive")
    gates = []
    for k in range(chain.n_sites - 1):
        edge = (k, k + 1)
        gates.append(Gate("RXX", edge, 2.0 * chain.Jx * dt, layer_index))
        gates.append(Gate("RYY", edge, 2.0 * chain.Jy * dt, layer_index))
        gates.append(Gate("RZZ", edge, 2.0 * chain.Jz * dt, layer_index))
    return gates


def control_layer(u_row, dt: float, layer_index: int = 1) -> list[Gate]:
    return [Gate("RZ", (j,), 2.0 * float(u) * dt, layer_index) for j, u in enumerate(u_row)]


def compile_circuit(chain: ChainSpec, controls: np.ndarray, T: float) -> Circuit:
    """Compile an ``(L, n_sites)`` array of slice controls into a Circuit."""
    u = np.asarray(controls, dtype=float)
    if u.ndim != 2 or u.shape[1] != chain.n_sites or u.shape[0] < 1:
        raise ValueError(f"controls must have shape (L, {chain.n_sites}), got {u.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("controls must be finite")
    if T <= 0:
        raise ValueError("T must be positive")
    L = u.shape[0]
    dt = T / L
    circuit = Circuit(chain.n_sites, L, dt)
    for ell in range(1, L + 1):
        circuit.gates.extend(drift_layer(chain, dt, ell))
        circuit.gates.extend(control_layer(u[ell - 1], dt, ell))
    return circuit


def gates_per_layer(n_sites: int) -> int:
    return 3 * (n_sites - 1) + n_sites


def dumps_circuit(circuit: Circuit) -> str:
    """Line format ``layer kind q0 [q1] angle`` with 17 significant digits."""
    lines = []
    for g in circuit.gates:
        qubits = " ".join(str(q) for q in g.qubits)
        lines.append(f"{g.layer} {g.kind} {qubits} {g.angle:.17g}")
    return "".join(line + "\n" for line in lines)


def loads_circuit(text: str, n_qubits: int, dt: float = float("nan")) -> Circuit:
    gates = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        try:
            layer, kind = int(parts[0]), parts[1]
            qubits = tuple(int(q) for q in parts[2:-1])
            gates.append(Gate(kind, qubits, float(parts[-1]), layer))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from exc
    L = max((g.layer for g in gates), default=0)
    return Circuit(n_qubits, L, dt, gates)
