import math
from itertools import product

import numpy as np
import pytest

from vqekit.ansatz import (
    AnsatzSpec,
    Circuit,
    EmptyAnsatzError,
    Gate,
    build_ansatz,
    build_hardware,
    build_kupccgsd,
    build_puccd,
    build_uccsd,
    decompose,
    expand_givens,
    gate_counts,
    restrict_to_hardcore_boson,
    uccsd_excitations,
)
from vqekit.fcidump import MolecularIntegrals
from vqekit.fermion import build_hamiltonian, frozen_core, hartree_fock_energy
from vqekit.mappings import jordan_wigner
from vqekit.pauli import PauliString
from vqekit.simulator import apply, expectation, reference_state, sector_indices

from conftest import random_integrals


def count_uccsd(nso, ne):
    """Spin-conserving singles and doubles counted combinatorially."""
    na = nb = ne // 2
    va = vb = nso // 2 - na
    singles = na * va + nb * vb
    doubles = math.comb(na, 2) * math.comb(va, 2) + math.comb(nb, 2) * math.comb(vb, 2) + na * va * nb * vb
    return singles + doubles


@pytest.mark.parametrize("nso, ne", [(4, 2), (8, 2), (8, 4), (10, 2), (12, 4)])
def test_uccsd_counts(nso, ne):
    assert build_uccsd(nso, ne).n_parameters == count_uccsd(nso, ne)
    assert len(uccsd_excitations(nso, ne)) == count_uccsd(nso, ne)


def test_uccsd_h2():
    c = build_uccsd(4, 2)
    assert c.n_parameters == 3
    assert build_uccsd(4, 2, depth=2).n_parameters == 6


def test_kupccgsd_h2():
    c = build_kupccgsd(4, 2, 1)
    assert c.metadata["n_doubles"] == 1
    assert c.metadata["n_singles"] == 2
    assert c.n_parameters == 2
    assert build_kupccgsd(4, 2, 3).n_parameters == 3 * c.n_parameters


def test_puccd_paper_scale():
    c = build_puccd(11, 7)
    counts = gate_counts(c)
    assert c.n_parameters == 28
    assert counts["entangling"] == 56
    assert counts["single_qubit"] <= 253


@pytest.mark.parametrize("n, p", [(2, 1), (4, 2), (5, 2), (6, 1), (9, 4)])
def test_puccd_counting_rule(n, p):
    c = build_puccd(n, p)
    assert c.n_parameters == p * (n - p)
    assert gate_counts(c)["entangling"] == 2 * c.n_parameters


def test_puccd_rejects_empty():
    with pytest.raises(EmptyAnsatzError):
        build_puccd(3, 3)


def test_hardware_counts():
    assert build_hardware(4, 2).n_parameters == 16
    with pytest.raises(ValueError):
        build_hardware(4, 0)


ALL = [("uccsd", "jw"), ("uccsd", "bk"), ("kupccgsd", "jw"), ("kupccgsd", "bk"), ("puccd", "jw"),
       ("hardware", "jw"), ("hardware_conserving", "jw")]


@pytest.mark.parametrize("family, mapping", ALL)
def test_theta_zero_fixes_reference(family, mapping):
    c = build_ansatz(AnsatzSpec(family, 2), 3, 2, mapping)
    ref = reference_state(c)
    assert apply(c, np.zeros(c.n_parameters)).fidelity(ref) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("family", ["uccsd", "kupccgsd", "hardware_conserving"])
def test_particle_conservation(family):
    c = build_ansatz(AnsatzSpec(family, 2), 3, 2, "jw")
    rng = np.random.default_rng(1)
    for _ in range(5):
        psi = apply(c, rng.uniform(-math.pi, math.pi, c.n_parameters))
        assert psi.hamming_weight_leakage(2) < 1e-10


def test_puccd_pair_number_conserved():
    c = build_puccd(5, 2)
    psi = apply(c, np.random.default_rng(2).normal(size=c.n_parameters))
    assert psi.hamming_weight_leakage(2) < 1e-10


@pytest.mark.parametrize("family", ["uccsd", "kupccgsd", "puccd", "hardware", "hardware_conserving"])
def test_gate_counts_monotone_in_depth(family):
    prev = None
    for d in (1, 2, 3):
        g = gate_counts(build_ansatz(AnsatzSpec(family, d), 3, 2))
        cur = (g["single_qubit"], g["entangling"])
        if prev is not None:
            assert cur[0] >= prev[0] and cur[1] >= prev[1]
        prev = cur


@pytest.mark.parametrize("family, mapping", ALL)
def test_decomposition_preserves_state(family, mapping):
    c = build_ansatz(AnsatzSpec(family, 1), 3, 2, mapping)
    theta = np.random.default_rng(4).normal(size=c.n_parameters)
    a = apply(c, theta)
    b = apply(decompose(c), theta)
    c2 = apply(expand_givens(c), theta)
    assert abs(np.vdot(a.amplitudes, b.amplitudes)) == pytest.approx(1.0, abs=1e-10)
    np.testing.assert_allclose(c2.amplitudes, a.amplitudes, atol=1e-12)
    assert all(g.kind in {"X", "H", "S", "RX", "RY", "RZ", "CNOT"} for g in decompose(c).gates)


def test_givens_convention():
    c = Circuit(2, (Gate("Givens", (0, 1), 0),), 1, (0,))
    psi = apply(c, [0.8]).amplitudes
    # |1_0 0_1> is index 1, |0_0 1_1> is index 2
    np.testing.assert_allclose([psi[1], psi[2]], [math.cos(0.4), math.sin(0.4)], atol=1e-12)


def test_circuit_json_round_trip():
    c = build_uccsd(4, 2)
    assert Circuit.from_json(c.to_json()).to_dict() == c.to_dict()


def test_circuit_concatenation_shifts_parameters():
    a, b = build_hardware(2, 1), build_hardware(2, 1)
    ab = a + b
    assert ab.n_parameters == 8
    assert max(g.param for g in ab.gates if g.param is not None) == 7


def test_circuit_validation():
    with pytest.raises(ValueError):
        Circuit(2, (Gate("CNOT", (0, 2)),), 0)
    with pytest.raises(ValueError):
        Circuit(2, (Gate("RX", (0,), 3),), 1)


def test_spec_normalization():
    assert AnsatzSpec("hardware-conserving").family == "hardware_conserving"
    with pytest.raises(ValueError):
        AnsatzSpec("qaoa")
    with pytest.raises(ValueError):
        AnsatzSpec("uccsd", 0)


def test_first_double_label():
    assert uccsd_excitations(4, 2)[-1].label() == "[1, 0]->[3, 2]"


# hard-core boson form ------------------------------------------------------

def test_hcb_single_orbital():
    mi = MolecularIntegrals(1, 2, 0, 0.0, [[-1.25]], np.full((1, 1, 1, 1), 0.68))
    np.testing.assert_allclose(restrict_to_hardcore_boson(mi).to_dense(), np.diag([0.0, -1.82]), atol=1e-12)


def seniority_zero_indices(n_spatial, n_pairs):
    out = []
    for occ in product((0, 1), repeat=n_spatial):
        if sum(occ) == n_pairs:
            out.append(sum(3 << (2 * p) for p, o in enumerate(occ) if o))
    return sorted(out)


def pair_to_spin_index(n_spatial, idx):
    return sum(3 << (2 * p) for p in range(n_spatial) if (idx >> p) & 1)


@pytest.mark.parametrize("name", ["h2", "lih", "random"])
def test_hcb_equals_seniority_zero_projection(request, name):
    if name == "random":
        mi, space = random_integrals(3, 2, 8), None
    else:
        mi = request.getfixturevalue(name)
        space = frozen_core(mi) if name == "lih" else None
    hcb = restrict_to_hardcore_boson(mi, space)
    n = hcb.n_qubits
    full = jordan_wigner(build_hamiltonian(mi, space)).to_dense()
    # full dense map between pair basis and seniority-zero spin basis
    idx = [pair_to_spin_index(n, i) for i in range(1 << n)]
    np.testing.assert_allclose(hcb.to_dense(), full[np.ix_(idx, idx)], atol=1e-10)
    pairs = (space.n_active_electrons if space else mi.n_electrons) // 2
    sz = seniority_zero_indices(n, pairs)
    sec = sector_indices(n, pairs)
    e_hcb = np.linalg.eigvalsh(hcb.to_dense()[np.ix_(sec, sec)])[0]
    assert e_hcb == pytest.approx(np.linalg.eigvalsh(full[np.ix_(sz, sz)])[0], abs=1e-10)


def test_hcb_hf_pair_state(h2, lih):
    for mi in (h2, lih):
        hcb = restrict_to_hardcore_boson(mi)
        c = build_puccd(mi.n_orbitals, mi.n_electrons // 2)
        assert expectation(reference_state(c), hcb) == pytest.approx(hartree_fock_energy(mi), abs=1e-10)
