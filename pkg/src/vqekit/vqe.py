"""Variational drivers: standard VQE, ADAPT-VQE and tapered VQE over all symmetry sectors."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ansatz import Circuit, Excitation, build_hardware, excitation_circuit, paired_double, uccsd_excitations
from .gradients import parameter_shift_gradient
from .optimizers import OptimizerOptions, get_optimizer
from .pauli import DimensionError, QubitOperator
from .simulator import (
    Statevector,
    apply,
    expectation,
    make_rng,
    measurement_groups,
    reference_state,
    sampled_energy,
)
from .tapering import find_symmetries, taper

# Exact-mode defaults per ansatz family; sampled runs default to BFGS.
FAMILY_OPTIMIZER = {
    "uccsd": "powell",
    "kupccgsd": "powell",
    "hardware": "powell",
    "puccd": "bfgs",
    "hardware_conserving": "bfgs",
    "adapt": "bfgs",
}
RANDOM_INIT_FAMILIES = frozenset({"hardware", "hardware_conserving"})


@dataclass(frozen=True)
class VqeConfig:
    """Optimizer settings.

    ``shots=None`` evaluates energies exactly. ``initial_parameters`` is
    ``"auto"`` (zeros for chemistry ansatze, ``random`` for hardware ones),
    ``"zeros"`` or ``"random"`` (uniform on ``[-init_scale, init_scale]``).
    """

    optimizer: str | None = None
    max_iterations: int = 200
    energy_tolerance: float = 1e-6
    shots: int | None = None
    seed: int = 0
    initial_parameters: str = "auto"
    init_scale: float = 0.01
    timeout: float | None = None
    workers: int = 1

    def __post_init__(self):
        if not self.energy_tolerance > 0:
            raise ValueError("energy_tolerance must be positive")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots must be a positive integer or None for exact mode")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.initial_parameters not in ("auto", "zeros", "random"):
            raise ValueError("initial_parameters must be auto, zeros or random")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def optimizer_for(self, family: str) -> str:
        if self.optimizer:
            return self.optimizer.lower().replace("-", "_")
        if self.shots is not None:
            return "bfgs"
        return FAMILY_OPTIMIZER.get(family, "bfgs")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class VqeResult:
    energy: float
    parameters: np.ndarray
    iterations: int
    trace: list[float]
    converged: bool
    wall_time: float
    std_error: float = 0.0
    shots: int | None = None
    noiseless_energy: float | None = None
    optimizer: str = ""
    evaluations: int = 0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "energy": self.energy,
            "std_error": self.std_error,
            "parameters": [float(t) for t in self.parameters],
            "iterations": self.iterations,
            "trace": [float(e) for e in self.trace],
            "converged": self.converged,
            "wall_time": self.wall_time,
            "shots": self.shots,
            "noiseless_energy": self.noiseless_energy,
            "optimizer": self.optimizer,
            "evaluations": self.evaluations,
        }
        d.update(self.extra)
        return d

    def to_json(self, timings: bool = True) -> str:
        d = self.to_dict()
        if not timings:
            d.pop("wall_time")
        return json.dumps(d, sort_keys=True)


def initial_parameters(circuit: Circuit, cfg: VqeConfig, stream: Sequence[int] = ()) -> np.ndarray:
    mode = cfg.initial_parameters
    if mode == "auto":
        mode = "random" if circuit.family in RANDOM_INIT_FAMILIES else "zeros"
    if mode == "zeros":
        return np.zeros(circuit.n_parameters)
    rng = make_rng(cfg.seed, 1, *stream)
    return rng.uniform(-cfg.init_scale, cfg.init_scale, circuit.n_parameters)


class _Energy:
    """Objective ``theta -> E`` in exact or sampled mode."""

    def __init__(self, h: QubitOperator, circuit: Circuit, reference: Statevector | None, cfg: VqeConfig,
                 stream: Sequence[int] = ()):
        self.h, self.circuit, self.reference, self.cfg = h, circuit, reference, cfg
        self.stream = tuple(stream)
        self.calls = 0
        self.groups = measurement_groups(h) if cfg.shots is not None else None

    def state(self, theta) -> Statevector:
        return apply(self.circuit, theta, self.reference)

    def of_state(self, state: Statevector) -> float:
        if self.cfg.shots is None:
            return expectation(state, self.h)
        self.calls += 1
        seed = int(make_rng(self.cfg.seed, 2, *self.stream, self.calls).integers(2 ** 63))
        return sampled_energy(state, self.h, self.cfg.shots, seed, self.groups).value

    def __call__(self, theta) -> float:
        return self.of_state(self.state(theta))

    def gradient(self, theta) -> np.ndarray:
        return parameter_shift_gradient(self.circuit, self.h, theta, self.reference, self.of_state)


def run_vqe(h: QubitOperator, ansatz: Circuit, reference: Statevector | None = None,
            cfg: VqeConfig | None = None, theta0: Sequence[float] | None = None,
            stream: Sequence[int] = ()) -> VqeResult:
    """Minimize ``<ref| U(theta)^+ H U(theta) |ref>``.

    ``reference`` defaults to the circuit's reference basis state. In sampled
    mode the reported energy is a fresh estimate at the final parameters
    (with its standard error); ``noiseless_energy`` holds the exact value
    there for diagnostics.
    """
    cfg = cfg or VqeConfig()
    start = time.monotonic()
    if h.n_qubits != ansatz.n_qubits:
        raise DimensionError(f"Hamiltonian has {h.n_qubits} qubits, ansatz has {ansatz.n_qubits}")
    if reference is not None and reference.n_qubits != ansatz.n_qubits:
        raise DimensionError("reference state width differs from the ansatz")
    if not h.is_hermitian():
        raise ValueError("VQE needs a Hermitian Hamiltonian")
    name = cfg.optimizer_for(ansatz.family)
    objective = _Energy(h, ansatz, reference, cfg, stream)
    x0 = initial_parameters(ansatz, cfg, stream) if theta0 is None else np.asarray(theta0, dtype=float)
    if x0.size != ansatz.n_parameters:
        raise DimensionError(f"theta0 has {x0.size} entries, ansatz has {ansatz.n_parameters} parameters")
    opts = OptimizerOptions(
        max_iterations=cfg.max_iterations,
        tolerance=cfg.energy_tolerance,
        deadline=None if cfg.timeout is None else start + cfg.timeout,
        gradient=objective.gradient if name == "bfgs" else None,
        noisy=cfg.shots is not None,
    )
    out = get_optimizer(name)(objective, x0, opts)
    theta = np.asarray(out.theta, dtype=float)
    energy, sigma, noiseless = out.value, 0.0, None
    state = objective.state(theta)
    if cfg.shots is not None:
        final_seed = int(make_rng(cfg.seed, 3, *stream).integers(2 ** 63))
        est = sampled_energy(state, h, cfg.shots, final_seed, objective.groups)
        energy, sigma = est.value, est.std_error
        noiseless = expectation(state, h)
    else:
        energy = expectation(state, h)
        noiseless = energy
    trace = list(out.trace)
    if trace[-1] != energy:
        trace.append(energy)
    return VqeResult(energy, theta, out.iterations, trace, out.converged, time.monotonic() - start,
                     sigma, cfg.shots, noiseless, name, out.evaluations,
                     {"family": ansatz.family, "n_parameters": ansatz.n_parameters})


# ---------------------------------------------------------------------------
# ADAPT

@dataclass(frozen=True)
class AdaptConfig:
    pool: str = "singles_and_doubles"
    gradient_threshold: float = 1e-3
    max_operators: int = 20

    def __post_init__(self):
        if not self.gradient_threshold > 0:
            raise ValueError("gradient_threshold must be positive")
        if self.pool not in ("singles_and_doubles", "paired_doubles"):
            raise ValueError("pool must be singles_and_doubles or paired_doubles")
        if self.max_operators < 0:
            raise ValueError("max_operators must be >= 0")


def operator_pool(kind: str, n_spin_orbitals: int, n_electrons: int) -> list[Excitation]:
    if kind == "singles_and_doubles":
        return uccsd_excitations(n_spin_orbitals, n_electrons)
    n_pairs, n_spatial = n_electrons // 2, n_spin_orbitals // 2
    return [paired_double(i, a) for i in range(n_pairs) for a in range(n_pairs, n_spatial)]


def _map_ordered(fn, items, workers: int):
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def pool_gradients(h: QubitOperator, state: Statevector, fragments: Sequence[Circuit], workers: int = 1) -> np.ndarray:
    """``dE/dtheta_new`` at ``theta_new = 0`` for each one-parameter fragment appended after ``state``."""
    def grad(frag):
        return float(parameter_shift_gradient(frag, h, [0.0], state)[0])
    return np.array(_map_ordered(grad, fragments, workers))


def run_adapt(h: QubitOperator, n_electrons: int, cfg: AdaptConfig | None = None,
              vqe_cfg: VqeConfig | None = None, mapping: str = "jw",
              reference: Sequence[int] | None = None, pool: Sequence[Excitation] | None = None):
    """Grow an ansatz one pool operator per round, re-optimizing every angle.

    Returns ``(VqeResult, operators)``. Round energies are kept monotone by
    warm-starting from the previous optimum (new angle at zero) and keeping
    the best point seen.
    """
    from .ansatz import reference_occupation

    cfg = cfg or AdaptConfig()
    vqe_cfg = vqe_cfg or VqeConfig(optimizer="bfgs")
    start = time.monotonic()
    n = h.n_qubits
    pool = list(pool) if pool is not None else operator_pool(cfg.pool, n, n_electrons)
    if not pool:
        raise ValueError("ADAPT operator pool is empty")
    ref = tuple(reference) if reference is not None else reference_occupation(n, n_electrons, mapping)
    fragments = [excitation_circuit([[op]], n, ref, mapping, "adapt") for op in pool]
    circuit = Circuit(n, (), 0, ref, "adapt")
    theta = np.zeros(0)
    energy = expectation(reference_state(circuit), h)
    rounds = [{"operator": None, "gradient": None, "energy": energy}]
    trace = [energy]
    selected: list[str] = []
    iterations = evaluations = 0
    converged = False
    first_gradients = None
    deadline = None if vqe_cfg.timeout is None else start + vqe_cfg.timeout
    while True:
        state = apply(circuit, theta)
        grads = pool_gradients(h, state, fragments, vqe_cfg.workers)
        if first_gradients is None:
            first_gradients = grads
        k = int(np.argmax(np.abs(grads)))
        if abs(grads[k]) < cfg.gradient_threshold:
            converged = True
            break
        if len(selected) >= cfg.max_operators:
            break
        circuit = circuit + fragments[k]
        selected.append(pool[k].label())
        x0 = np.concatenate([theta, [0.0]])
        remaining = None if deadline is None else max(deadline - time.monotonic(), 1e-9)
        sub_cfg = VqeConfig(**{**vqe_cfg.to_dict(), "timeout": remaining})
        res = run_vqe(h, circuit, None, sub_cfg, theta0=x0, stream=(len(selected),))
        iterations += res.iterations
        evaluations += res.evaluations
        if res.energy <= energy or vqe_cfg.shots is not None:
            theta, energy = res.parameters, res.energy
        else:
            theta = x0
        trace.extend(res.trace[1:])
        rounds.append({"operator": pool[k].label(), "gradient": float(grads[k]), "energy": energy})
    result = VqeResult(energy, theta, iterations, trace, converged, time.monotonic() - start,
                       optimizer=vqe_cfg.optimizer_for("adapt"), evaluations=evaluations,
                       noiseless_energy=expectation(apply(circuit, theta), h))
    result.extra = {
        "family": "adapt",
        "operators": list(selected),
        "round_energies": [r["energy"] for r in rounds],
        "rounds": rounds,
        "initial_pool_gradients": [float(g) for g in first_gradients],
        "pool": [op.label() for op in pool],
    }
    return result, selected


# ---------------------------------------------------------------------------
# tapered VQE

def run_tapered_vqe(h: QubitOperator, cfg: VqeConfig | None = None, layers: int = 2):
    """Taper ``h``, run hardware-ansatz VQE in every sector, keep the lowest.

    Returns ``(VqeResult, sector)``. With no symmetries the single untapered
    problem is solved and the sector is ``()``.
    """
    cfg = cfg or VqeConfig()
    start = time.monotonic()
    t = find_symmetries(h)
    sectors = t.sectors() if t.symmetries else [()]

    def solve(item):
        idx, sector = item
        hs = taper(h, t, sector) if t.symmetries else h
        circ = build_hardware(hs.n_qubits, layers)
        remaining = None if cfg.timeout is None else max(cfg.timeout - (time.monotonic() - start), 1e-9)
        sub = VqeConfig(**{**cfg.to_dict(), "timeout": remaining})
        return run_vqe(hs, circ, None, sub, stream=(idx,))

    results = _map_ordered(solve, list(enumerate(sectors)), cfg.workers)
    energies = [r.energy for r in results]
    best = int(np.argmin(energies))
    res = results[best]
    res.wall_time = time.monotonic() - start
    res.extra = {
        **res.extra,
        "family": "hardware",
        "sector": list(sectors[best]),
        "sector_energies": [float(e) for e in energies],
        "n_runs": len(results),
        "tapering": t.to_dict(),
    }
    return res, tuple(sectors[best])
