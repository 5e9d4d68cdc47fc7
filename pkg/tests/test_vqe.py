import numpy as np
import pytest

from vqekit.ansatz import AnsatzSpec, build_hardware
from vqekit.optimizers import OptimizerTimeout
from vqekit.pauli import DimensionError, QubitOperator
from vqekit.problem import MolecularProblem, resolve_active_space
from vqekit.simulator import exact_ground_energy
from vqekit.vqe import AdaptConfig, VqeConfig, operator_pool, pool_gradients, run_adapt, run_tapered_vqe, run_vqe

from conftest import H2_EQ_FCI


@pytest.fixture(scope="module")
def h2_problem(h2):
    return MolecularProblem.build(h2)


@pytest.mark.parametrize("family, optimizer", [("uccsd", None), ("uccsd", "bfgs"), ("uccsd", "nelder-mead"),
                                               ("kupccgsd", None)])
def test_exact_vqe_reaches_fci(h2_problem, family, optimizer):
    c = h2_problem.ansatz(AnsatzSpec(family))
    res = run_vqe(h2_problem.hamiltonian, c, cfg=VqeConfig(optimizer=optimizer))
    assert res.energy == pytest.approx(H2_EQ_FCI, abs=1e-6)
    assert res.energy >= H2_EQ_FCI - 1e-9
    assert res.converged
    assert res.noiseless_energy == res.energy


def test_bfgs_trace_non_increasing(h2_problem):
    c = h2_problem.ansatz(AnsatzSpec("uccsd"))
    res = run_vqe(h2_problem.hamiltonian, c, cfg=VqeConfig(optimizer="bfgs"))
    assert np.all(np.diff(res.trace) <= 1e-12)


def test_variational_bound_on_random_starts(lih):
    p = MolecularProblem.build(lih, "frozen-core")
    fci = p.fci_energy()
    c = p.ansatz(AnsatzSpec("uccsd"))
    res = run_vqe(p.hamiltonian, c, cfg=VqeConfig(optimizer="bfgs", initial_parameters="random", init_scale=0.5,
                                                  seed=3))
    assert res.energy >= fci - 1e-9
    assert res.energy - fci < 1e-4


def test_puccd_pair_encoding(h2):
    p = MolecularProblem.build(h2, pairing=True)
    res = run_vqe(p.hamiltonian, p.ansatz(AnsatzSpec("puccd")))
    # one pair in two orbitals: seniority-zero space is exact for H2/STO-3G
    assert res.energy == pytest.approx(H2_EQ_FCI, abs=1e-8)


def test_sampled_vqe_deterministic(h2_problem):
    c = h2_problem.ansatz(AnsatzSpec("uccsd"))
    cfg = VqeConfig(shots=2000, seed=11, max_iterations=30)
    a = run_vqe(h2_problem.hamiltonian, c, cfg=cfg)
    b = run_vqe(h2_problem.hamiltonian, c, cfg=cfg)
    assert a.to_json(timings=False) == b.to_json(timings=False)
    assert a.optimizer == "bfgs" and a.shots == 2000 and a.std_error > 0
    assert a.noiseless_energy >= H2_EQ_FCI - 1e-9


def test_timeout_raises(h2_problem):
    c = h2_problem.ansatz(AnsatzSpec("uccsd"))
    with pytest.raises(OptimizerTimeout):
        run_vqe(h2_problem.hamiltonian, c, cfg=VqeConfig(timeout=1e-9))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        run_vqe(QubitOperator.from_label("ZZ"), build_hardware(3, 1))


def test_config_validation():
    with pytest.raises(ValueError):
        VqeConfig(shots=0)
    with pytest.raises(ValueError):
        VqeConfig(energy_tolerance=0)
    assert VqeConfig().optimizer_for("uccsd") == "powell"
    assert VqeConfig(shots=10).optimizer_for("uccsd") == "bfgs"


def test_active_space_specs(lih, tmp_path):
    assert resolve_active_space(lih, "frozen-core").n_active == 5
    assert resolve_active_space(lih, "full").n_active == 6
    f = tmp_path / "space.json"
    f.write_text('{"frozen": [0], "active": [1, 2, 5]}')
    assert resolve_active_space(lih, f"manual:{f}").active == (1, 2, 5)
    assert resolve_active_space(lih, {"frozen": [0], "active": [1, 2]}).active == (1, 2)
    assert resolve_active_space(lih, "noons:0.002").n_active <= 6
    with pytest.raises(ValueError):
        resolve_active_space(lih, "bogus")


# ADAPT ---------------------------------------------------------------------

def test_adapt_h2(h2_problem):
    res, ops = run_adapt(h2_problem.hamiltonian, 2)
    energies = res.extra["round_energies"]
    assert np.all(np.diff(energies) <= 1e-8)
    assert res.energy == pytest.approx(H2_EQ_FCI, abs=1e-6)
    grads = res.extra["initial_pool_gradients"]
    assert ops[0] == res.extra["pool"][int(np.argmax(np.abs(grads)))]
    assert res.converged


def test_adapt_first_gradient_matches_enumeration(h2_problem):
    from vqekit.ansatz import excitation_circuit
    from vqekit.simulator import Statevector
    pool = operator_pool("singles_and_doubles", 4, 2)
    frags = [excitation_circuit([[op]], 4, (0, 1), "jw", "adapt") for op in pool]
    g1 = pool_gradients(h2_problem.hamiltonian, Statevector.basis(4, (0, 1)), frags, workers=1)
    g4 = pool_gradients(h2_problem.hamiltonian, Statevector.basis(4, (0, 1)), frags, workers=4)
    np.testing.assert_array_equal(g1, g4)
    res, ops = run_adapt(h2_problem.hamiltonian, 2)
    np.testing.assert_allclose(res.extra["initial_pool_gradients"], g1, atol=1e-12)


def test_adapt_operator_cap(lih):
    p = MolecularProblem.build(lih, "frozen-core")
    res, ops = run_adapt(p.hamiltonian, p.n_electrons, AdaptConfig(max_operators=2))
    assert len(ops) == 2 and not res.converged


def test_adapt_config_validation():
    with pytest.raises(ValueError):
        AdaptConfig(pool="triples")
    with pytest.raises(ValueError):
        AdaptConfig(gradient_threshold=0)


# tapered -------------------------------------------------------------------

def test_tapered_vqe_h2(h2_problem):
    res, sector = run_tapered_vqe(h2_problem.hamiltonian, VqeConfig(optimizer="bfgs"), layers=2)
    assert len(sector) == 3
    assert res.energy == pytest.approx(exact_ground_energy(h2_problem.hamiltonian), abs=1e-6)
    assert res.extra["n_runs"] == 8
