"""scikit-learn style wrappers around the functional API.

Each stage is an estimator: ``fit`` learns from integrals or histograms,
``transform`` maps inputs forward and the VQE estimators ``predict``
energies for given parameter vectors. Hyperparameters live in ``__init__``
so ``get_params``/``set_params``/``clone`` work as usual.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .ansatz import AnsatzSpec
from .fermion import reduce_integrals
from .mitigation import THRESHOLD_GRID, apply_threshold, calibrate_noise_floor, postselect_symmetry
from .problem import MolecularProblem, resolve_active_space
from .simulator import Statevector, apply, expectation
from .validation import check_histograms, check_integrals, check_parameters
from .vqe import AdaptConfig, VqeConfig, run_adapt, run_tapered_vqe, run_vqe


class ActiveSpaceSelector(BaseEstimator, TransformerMixin):
    """Choose frozen/active orbitals; ``transform`` returns the reduced integrals."""

    def __init__(self, active="full"):
        self.active = active

    def fit(self, X, y=None):
        mi = check_integrals(X)
        self.space_ = resolve_active_space(mi, self.active)
        self.n_orbitals_in_ = mi.n_orbitals
        return self

    def transform(self, X):
        check_is_fitted(self, "space_")
        mi = check_integrals(X)
        if mi.n_orbitals != self.n_orbitals_in_:
            raise ValueError(f"fitted on {self.n_orbitals_in_} orbitals, got {mi.n_orbitals}")
        return reduce_integrals(mi, self.space_)


class QubitHamiltonian(BaseEstimator, TransformerMixin):
    """Integrals to a qubit operator under a mapping (or the pair encoding)."""

    def __init__(self, mapping="jw", active="full", pairing=False):
        self.mapping = mapping
        self.active = active
        self.pairing = pairing

    def fit(self, X, y=None):
        self.problem_ = MolecularProblem.build(check_integrals(X), self.active, self.mapping, self.pairing)
        self.n_qubits_ = self.problem_.n_qubits
        return self

    def transform(self, X):
        check_is_fitted(self, "problem_")
        return MolecularProblem.build(check_integrals(X), self.problem_.space, self.mapping,
                                      self.pairing).hamiltonian


class _VqeBase(BaseEstimator):
    def _vqe_config(self) -> VqeConfig:
        return VqeConfig(optimizer=self.optimizer, max_iterations=self.max_iterations,
                         energy_tolerance=self.tolerance, shots=self.shots, seed=self.seed,
                         timeout=self.timeout)

    def _finish(self, problem, result):
        self.problem_ = problem
        self.result_ = result
        self.energy_ = result.energy
        self.parameters_ = np.asarray(result.parameters)
        self.converged_ = result.converged
        return self

    def predict(self, X=None):
        """Exact energies at each parameter row of ``X``; ``X=None`` gives the fitted energy."""
        check_is_fitted(self, "result_")
        if X is None:
            return np.array([self.energy_])
        thetas = check_parameters(X, self.circuit_.n_parameters)
        h = self.problem_.hamiltonian if self.hamiltonian_ is None else self.hamiltonian_
        return np.array([expectation(apply(self.circuit_, t), h) for t in thetas])

    def transform(self, X=None) -> list[Statevector]:
        """Trial states at each parameter row (default: the fitted parameters)."""
        check_is_fitted(self, "result_")
        rows = self.parameters_.reshape(1, -1) if X is None else check_parameters(X, self.circuit_.n_parameters)
        return [apply(self.circuit_, t) for t in rows]

    def score(self, X=None, y=None):
        """Negative absolute error against the exact ground energy."""
        check_is_fitted(self, "result_")
        ref = self.problem_.fci_energy() if y is None else float(y)
        return -abs(self.energy_ - ref)


class VQE(_VqeBase):
    def __init__(self, ansatz="uccsd", depth=1, mapping="jw", active="full", optimizer=None, shots=None,
                 seed=0, max_iterations=200, tolerance=1e-6, timeout=None):
        self.ansatz = ansatz
        self.depth = depth
        self.mapping = mapping
        self.active = active
        self.optimizer = optimizer
        self.shots = shots
        self.seed = seed
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.timeout = timeout

    def fit(self, X, y=None):
        spec = AnsatzSpec(self.ansatz, self.depth)
        problem = MolecularProblem.build(check_integrals(X), self.active, self.mapping, spec.pairing)
        self.circuit_ = problem.ansatz(spec)
        self.hamiltonian_ = None
        return self._finish(problem, run_vqe(problem.hamiltonian, self.circuit_, cfg=self._vqe_config()))


class AdaptVQE(_VqeBase):
    def __init__(self, pool="singles_and_doubles", gradient_threshold=1e-3, max_operators=20, mapping="jw",
                 active="full", optimizer="bfgs", shots=None, seed=0, max_iterations=200, tolerance=1e-6,
                 timeout=None):
        self.pool = pool
        self.gradient_threshold = gradient_threshold
        self.max_operators = max_operators
        self.mapping = mapping
        self.active = active
        self.optimizer = optimizer
        self.shots = shots
        self.seed = seed
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.timeout = timeout

    def fit(self, X, y=None):
        from .ansatz import excitation_circuit
        from .vqe import operator_pool

        problem = MolecularProblem.build(check_integrals(X), self.active, self.mapping)
        cfg = AdaptConfig(self.pool, self.gradient_threshold, self.max_operators)
        result, selected = run_adapt(problem.hamiltonian, problem.n_electrons, cfg, self._vqe_config(),
                                     problem.mapping, problem.reference)
        pool = {op.label(): op for op in operator_pool(cfg.pool, problem.n_qubits, problem.n_electrons)}
        self.operators_ = list(selected)
        self.circuit_ = excitation_circuit([[pool[k]] for k in selected], problem.n_qubits, problem.reference,
                                           problem.mapping, "adapt")
        self.hamiltonian_ = None
        return self._finish(problem, result)


class TaperedVQE(_VqeBase):
    def __init__(self, depth=2, mapping="jw", active="full", optimizer=None, shots=None, seed=0,
                 max_iterations=200, tolerance=1e-6, timeout=None):
        self.depth = depth
        self.mapping = mapping
        self.active = active
        self.optimizer = optimizer
        self.shots = shots
        self.seed = seed
        self.max_iterations = max_iterations
        self.tolerance = tolerance
        self.timeout = timeout

    def fit(self, X, y=None):
        from .ansatz import build_hardware
        from .tapering import find_symmetries, taper

        problem = MolecularProblem.build(check_integrals(X), self.active, self.mapping)
        result, sector = run_tapered_vqe(problem.hamiltonian, self._vqe_config(), self.depth)
        t = find_symmetries(problem.hamiltonian)
        self.sector_ = sector
        self.hamiltonian_ = taper(problem.hamiltonian, t, sector) if t.symmetries else problem.hamiltonian
        self.circuit_ = build_hardware(self.hamiltonian_.n_qubits, self.depth)
        return self._finish(problem, result)


class SymmetryPostSelector(BaseEstimator, TransformerMixin):
    """Keep bitstrings with the expected Hamming weight, then renormalize."""

    def __init__(self, expected_hamming_weight=0):
        self.expected_hamming_weight = expected_hamming_weight

    def fit(self, X=None, y=None):
        if self.expected_hamming_weight < 0:
            raise ValueError("expected_hamming_weight must be non-negative")
        self.fitted_ = True
        return self

    def transform(self, X):
        check_is_fitted(self, "fitted_")
        return [postselect_symmetry(h, self.expected_hamming_weight) for h in check_histograms(X)]


class NoiseFloorThreshold(BaseEstimator, TransformerMixin):
    """Drop outcomes below a probability floor.

    ``threshold="auto"`` calibrates the floor in ``fit`` from the
    theta=0 (Hartree-Fock) histogram, whose ideal output is
    ``ideal_bitstring``.
    """

    def __init__(self, threshold="auto", ideal_bitstring=None, grid=THRESHOLD_GRID):
        self.threshold = threshold
        self.ideal_bitstring = ideal_bitstring
        self.grid = grid

    def fit(self, X=None, y=None):
        if self.threshold == "auto":
            if X is None or self.ideal_bitstring is None:
                raise ValueError("auto threshold needs a calibration histogram and ideal_bitstring")
            self.calibration_ = calibrate_noise_floor(check_histograms(X)[0], self.ideal_bitstring, self.grid)
            self.threshold_ = self.calibration_.recommended_threshold
        else:
            if not 0.0 <= float(self.threshold) <= 1.0:
                raise ValueError("threshold must lie in [0, 1]")
            self.threshold_ = float(self.threshold)
        return self

    def transform(self, X):
        check_is_fitted(self, "threshold_")
        return [apply_threshold(h, self.threshold_) for h in check_histograms(X)]
