"""Trotterized variational control for single-excitation transfer on XXZ chains."""

from .chain import ChainSpec, Circuit, compile_circuit, control_layer, drift_layer
from .controls import GlobalScheme, LocalScheme, harmonic_profile, make_scheme, param_count
from .density import NoiseSpec, apply_depolarizing, apply_gate_density, fidelity_against_pure, from_pure, run_noisy_circuit
from .objective import ObjectiveSpec, objective
from .optimize import OptTrace, StopRule, eval_cost_check, fd_gradient, minimize, optimize, time_to_threshold
from .statevector import Gate, apply_gate, basis_state, fidelity_pure, run_circuit, site_populations

__version__ = "0.1.0"
