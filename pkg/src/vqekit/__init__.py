"""Variational quantum eigensolver engine for molecular ground-state energies."""

__version__ = "0.1.0"

from .ansatz import AnsatzSpec, Circuit, Gate, build_ansatz, decompose, gate_counts
from .fcidump import MolecularIntegrals, load_fcidump, parse_fcidump, save_fcidump, write_fcidump
from .fermion import ActiveSpace, FermionOperator, build_hamiltonian, compute_noons, frozen_core
from .mappings import bravyi_kitaev, jordan_wigner
from .mitigation import MitigationPolicy, calibrate_noise_floor, mitigated_energy, postselect_symmetry
from .pauli import PauliString, QubitOperator
from .problem import MolecularProblem
from .resources import ResourceReport, resource_report
from .scan import ExperimentConfig, ScanRow, emit_results, run_scan
from .simulator import Histogram, Statevector, apply, exact_ground_energy, expectation, sampled_energy
from .tapering import find_symmetries, taper
from .vqe import AdaptConfig, VqeConfig, VqeResult, run_adapt, run_tapered_vqe, run_vqe

__all__ = [
    "ActiveSpace", "AdaptConfig", "AnsatzSpec", "Circuit", "ExperimentConfig", "FermionOperator", "Gate",
    "Histogram", "MitigationPolicy", "MolecularIntegrals", "MolecularProblem", "PauliString",
    "QubitOperator", "ResourceReport", "ScanRow", "Statevector", "VqeConfig", "VqeResult", "apply",
    "bravyi_kitaev", "build_ansatz", "build_hamiltonian", "calibrate_noise_floor", "compute_noons",
    "decompose", "emit_results", "exact_ground_energy", "expectation", "find_symmetries", "frozen_core",
    "gate_counts", "jordan_wigner", "load_fcidump", "mitigated_energy", "parse_fcidump",
    "postselect_symmetry", "resource_report", "run_adapt", "run_scan", "run_tapered_vqe", "run_vqe",
    "sampled_energy", "save_fcidump", "taper", "write_fcidump",
]
