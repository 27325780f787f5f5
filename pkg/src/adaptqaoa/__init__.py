"""ADAPT-QAOA and standard QAOA for weighted Max-Cut, with entanglement diagnostics."""

from .adapt import build_pool, grow_and_optimize, select_mixer
from .ansatz import AnsatzProgram, Reference, standard_qaoa
from .harness import ExperimentConfig, run_sweep
from .problem import ProblemInstance, brute_force, build_hamiltonian, generate_instance

__all__ = [
    "AnsatzProgram", "ExperimentConfig", "ProblemInstance", "Reference", "brute_force",
    "build_hamiltonian", "build_pool", "generate_instance", "grow_and_optimize",
    "run_sweep", "select_mixer", "standard_qaoa",
]
