"""Parameter-shift gradients."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .ansatz import Circuit, expand_givens
from .pauli import DimensionError, QubitOperator
from .simulator import Statevector, UnsupportedGateError, apply_gate, expectation, reference_state

SHIFTABLE = frozenset({"RX", "RY", "RZ", "ExpPauli"})


def parameter_shift_gradient(circuit: Circuit, h: QubitOperator, theta: Sequence[float],
                             state: Statevector | None = None, energy=None) -> np.ndarray:
    """``dE/dtheta`` from two-point shifts of every parameterized gate occurrence.

    Each occurrence computes ``angle = scale * theta_j + offset``, so it
    contributes ``scale * (E(angle + pi/2) - E(angle - pi/2)) / 2``. Givens
    gates are first split into their two commuting ExpPauli factors.
    ``energy(state)`` replaces the exact expectation, e.g. with a sampled
    estimate.
    """
    if energy is None:
        def energy(s):
            return expectation(s, h)

    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != circuit.n_parameters:
        raise DimensionError(f"expected {circuit.n_parameters} parameters, got {theta.size}")
    circ = expand_givens(circuit)
    for g in circ.gates:
        if g.param is not None and g.kind not in SHIFTABLE:
            raise UnsupportedGateError(f"{g.kind} does not obey the two-point shift rule")
    n = circ.n_qubits
    psi = (state if state is not None else reference_state(circ)).amplitudes
    grad = np.zeros(circuit.n_parameters)
    gates = circ.gates
    for k, g in enumerate(gates):
        if g.param is not None:
            diff = 0.0
            for sign in (1.0, -1.0):
                shifted = g.__class__(g.kind, g.qubits, None, g.resolved_angle(theta) + sign * math.pi / 2,
                                      1.0, g.pauli)
                phi = apply_gate(psi, n, shifted, theta)
                for rest in gates[k + 1:]:
                    phi = apply_gate(phi, n, rest, theta)
                diff += sign * energy(Statevector(phi, n))
            grad[g.param] += g.scale * diff / 2.0
        psi = apply_gate(psi, n, g, theta)
    return grad


def finite_difference_gradient(f, theta: Sequence[float], step: float = 1e-5) -> np.ndarray:
    """Central differences; used as an independent check."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    for j in range(theta.size):
        e = np.zeros_like(theta)
        e[j] = step
        out[j] = (f(theta + e) - f(theta - e)) / (2 * step)
    return out
