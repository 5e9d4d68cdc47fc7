import math

import numpy as np
import pytest

from vqekit.ansatz import Circuit, Gate, build_ansatz, AnsatzSpec, build_uccsd, expand_givens
from vqekit.fermion import build_hamiltonian
from vqekit.gradients import finite_difference_gradient, parameter_shift_gradient
from vqekit.mappings import jordan_wigner
from vqekit.pauli import DimensionError, QubitOperator
from vqekit.simulator import UnsupportedGateError, apply, expectation

from test_simulator import random_circuit


def test_single_ry():
    z = QubitOperator.from_label("Z")
    c = Circuit(1, (Gate("RY", (0,), 0),), 1)
    for t in (0.0, 0.4, 2.1):
        assert parameter_shift_gradient(c, z, [t])[0] == pytest.approx(-math.sin(t), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_random_circuits_match_finite_differences(seed):
    circ, theta = random_circuit(4, 25, seed)
    rng = np.random.default_rng(seed)
    h = QubitOperator.from_labels([("".join(rng.choice(list("IXYZ"), 4)), rng.normal()) for _ in range(8)])
    h = (h + h.adjoint()) * 0.5
    ps = parameter_shift_gradient(circ, h, theta)
    fd = finite_difference_gradient(lambda t: expectation(apply(circ, t), h), theta)
    np.testing.assert_allclose(ps, fd, atol=1e-6)


@pytest.mark.parametrize("family", ["uccsd", "kupccgsd", "puccd", "hardware_conserving"])
def test_ansatz_gradients(h2, family):
    spec = AnsatzSpec(family, 2)
    circ = build_ansatz(spec, 2, 2) if not spec.pairing else build_ansatz(spec, 2, 2)
    if spec.pairing:
        from vqekit.ansatz import restrict_to_hardcore_boson
        h = restrict_to_hardcore_boson(h2)
    else:
        h = jordan_wigner(build_hamiltonian(h2)).real()
    theta = np.random.default_rng(0).normal(size=circ.n_parameters) * 0.3
    ps = parameter_shift_gradient(circ, h, theta)
    fd = finite_difference_gradient(lambda t: expectation(apply(circ, t), h), theta)
    np.testing.assert_allclose(ps, fd, atol=1e-6)


def test_uccsd_singles_vanish_at_hf(h2):
    # Brillouin: canonical HF orbitals give zero singles gradients
    h = jordan_wigner(build_hamiltonian(h2)).real()
    c = build_uccsd(4, 2)
    g = parameter_shift_gradient(c, h, np.zeros(c.n_parameters))
    np.testing.assert_allclose(g[:2], 0.0, atol=1e-10)
    assert abs(g[2]) > 1e-3


def test_givens_expanded():
    c = Circuit(2, (Gate("X", (0,)), Gate("Givens", (0, 1), 0)), 1)
    h = QubitOperator.from_label("ZI")
    assert any(g.kind == "ExpPauli" for g in expand_givens(c).gates)
    g = parameter_shift_gradient(c, h, [0.7])
    fd = finite_difference_gradient(lambda t: expectation(apply(c, t), h), np.array([0.7]))
    np.testing.assert_allclose(g, fd, atol=1e-8)


def test_wrong_length():
    with pytest.raises(DimensionError):
        parameter_shift_gradient(build_uccsd(4, 2), QubitOperator.from_label("ZIII"), [0.0])
