import itertools

import numpy as np
import pytest

from vqekit.fcidump import MolecularIntegrals
from vqekit.fermion import (
    ActiveSpace,
    ActiveSpaceError,
    FermionOperator,
    SingularDenominatorError,
    UnsupportedSystemError,
    build_hamiltonian,
    compute_noons,
    frozen_core,
    hartree_fock_energy,
    mp2_density,
    number_operator,
    orbital_energies,
)
from vqekit.mappings import jordan_wigner
from vqekit.problem import resolve_active_space

from conftest import H2_EQ_FCI, random_integrals
from oracles import fermion_hamiltonian_dense, popcount_indices


def dense(op: FermionOperator) -> np.ndarray:
    return jordan_wigner(op).to_dense()


def test_single_orbital_pair_energy():
    mi = MolecularIntegrals(1, 2, 0, 0.0, [[-1.25]], np.full((1, 1, 1, 1), 0.68))
    H = dense(build_hamiltonian(mi))
    assert H[3, 3].real == pytest.approx(2 * -1.25 + 0.68)


def test_full_space_constant_is_core_energy(h2):
    assert build_hamiltonian(h2).constant == h2.core_energy


@pytest.mark.parametrize("n, ne, seed", [(2, 2, 0), (3, 2, 1), (3, 4, 2)])
def test_matches_occupation_basis_oracle(n, ne, seed):
    mi = random_integrals(n, ne, seed)
    np.testing.assert_allclose(dense(build_hamiltonian(mi)),
                               fermion_hamiltonian_dense(mi.core_energy, mi.one_body, mi.two_body), atol=1e-10)


def test_h2_dense_ground_energy(h2):
    H = dense(build_hamiltonian(h2))
    idx = popcount_indices(4, 2)
    assert np.linalg.eigvalsh(H[np.ix_(idx, idx)])[0] == pytest.approx(H2_EQ_FCI, abs=1e-10)


@pytest.mark.parametrize("n, ne, frozen, seed", [(3, 4, (0,), 0), (3, 4, (0,), 5), (4, 4, (0,), 1), (4, 6, (0, 1), 2)])
def test_frozen_core_projection(n, ne, frozen, seed):
    """Active-space spectrum equals the full spectrum restricted to a doubly occupied core."""
    mi = random_integrals(n, ne, seed)
    active = tuple(i for i in range(n) if i not in frozen)
    space = ActiveSpace.manual(mi, frozen, active)
    Hf = fermion_hamiltonian_dense(mi.core_energy, mi.one_body, mi.two_body)
    core_mask = sum(3 << (2 * k) for k in frozen)
    keep = [s for s in range(1 << (2 * n)) if s & core_mask == core_mask and bin(s).count("1") == ne]
    ref = np.linalg.eigvalsh(Hf[np.ix_(keep, keep)])
    Ha = dense(build_hamiltonian(mi, space))
    idx = popcount_indices(2 * len(active), ne - 2 * len(frozen))
    got = np.linalg.eigvalsh(Ha[np.ix_(idx, idx)])
    np.testing.assert_allclose(got, ref, atol=1e-9)


def test_frozen_core_hf_energy_unchanged(lih, ch3f):
    for mi in (lih, ch3f):
        assert hartree_fock_energy(mi, frozen_core(mi)) == pytest.approx(hartree_fock_energy(mi), abs=1e-10)


def test_hermitian_and_number_conserving(lih):
    op = build_hamiltonian(lih, frozen_core(lih))
    assert op.is_hermitian()
    assert op.is_number_conserving()
    mi = random_integrals(3, 2, 7)
    H = dense(build_hamiltonian(mi))
    N = dense(number_operator(6))
    assert np.linalg.norm(H @ N - N @ H) < 1e-10


def test_hf_energy_matches_determinant_expectation(h2, lih):
    for mi in (h2, lih):
        H = jordan_wigner(build_hamiltonian(mi)).to_sparse()
        occ = (1 << mi.n_electrons) - 1
        assert H[occ, occ].real == pytest.approx(hartree_fock_energy(mi), abs=1e-10)


@pytest.mark.parametrize("mi_name, n_frozen, n_active", [("ch3f", 2, 11), ("h2", 0, 2), ("lih", 1, 5)])
def test_frozen_core_counts(request, mi_name, n_frozen, n_active):
    space = frozen_core(request.getfixturevalue(mi_name))
    assert len(space.frozen) == n_frozen and space.n_active == n_active


def test_frozen_core_explicit_elements(ch3f):
    assert frozen_core(ch3f, ["C", "H", "H", "H", "F"]).frozen == (0, 1)
    with pytest.raises(KeyError):
        frozen_core(ch3f, ["Xx"])


def test_active_space_validation(lih):
    with pytest.raises(ActiveSpaceError):
        ActiveSpace.manual(lih, [0], [0, 1])
    with pytest.raises(ActiveSpaceError):
        ActiveSpace(( ), (0,), 4).validate(lih)
    with pytest.raises(ActiveSpaceError):
        resolve_active_space(lih, "bogus")


def spin_orbital_mp2_density(mi):
    """MP2 unrelaxed density from antisymmetrized spin-orbital amplitudes, summed over spin."""
    n = mi.n_orbitals
    nso = 2 * n
    eps = np.repeat(orbital_energies(mi), 2)
    g = mi.two_body

    def phys(p, q, r, s):  # <pq|rs>
        if p % 2 != r % 2 or q % 2 != s % 2:
            return 0.0
        return g[p // 2, r // 2, q // 2, s // 2]

    occ = list(range(mi.n_electrons))
    vir = list(range(mi.n_electrons, nso))
    t = {}
    for i, j in itertools.product(occ, repeat=2):
        for a, b in itertools.product(vir, repeat=2):
            t[i, j, a, b] = (phys(i, j, a, b) - phys(i, j, b, a)) / (eps[i] + eps[j] - eps[a] - eps[b])
    gam = np.zeros((nso, nso))
    for i, j in itertools.product(occ, repeat=2):
        gam[i, j] = (i == j) - 0.5 * sum(t[i, k, a, b] * t[j, k, a, b] for k in occ for a in vir for b in vir)
    for a, b in itertools.product(vir, repeat=2):
        gam[a, b] = 0.5 * sum(t[i, j, a, c] * t[i, j, b, c] for i in occ for j in occ for c in vir)
    return gam[0::2, 0::2] + gam[1::2, 1::2]


@pytest.mark.parametrize("which", ["h2", "lih", "random"])
def test_mp2_density_matches_spin_orbital_oracle(request, which):
    mi = random_integrals(4, 4, 9, scale=0.05) if which == "random" else request.getfixturevalue(which)
    np.testing.assert_allclose(mp2_density(mi), spin_orbital_mp2_density(mi), atol=1e-10)


def test_noons_hf_exact_system():
    mi = MolecularIntegrals(3, 2, 0, 0.0, np.diag([-1.0, 0.5, 1.0]), np.zeros((3, 3, 3, 3)))
    report, space = compute_noons(mi, 0.002)
    np.testing.assert_allclose(report.occupations, [2, 0, 0], atol=0)
    assert space.frozen == (0,) and space.active == ()


def test_noons_h2(h2):
    report, _ = compute_noons(h2)
    occ = report.occupations
    delta = occ[1]
    assert 0 < delta < 0.1
    assert occ[0] == pytest.approx(2 - delta, abs=1e-12)
    assert occ.sum() == pytest.approx(2, abs=1e-8)
    ref = np.sort(np.linalg.eigvalsh(spin_orbital_mp2_density(h2)))[::-1]
    np.testing.assert_allclose(occ, ref, atol=1e-10)


def test_noons_trace_and_bounds(lih, ch3f):
    for mi in (lih, ch3f):
        occ = compute_noons(mi)[0].occupations
        assert occ.sum() == pytest.approx(mi.n_electrons, abs=1e-8)
        assert np.all(occ > -1e-12) and np.all(occ < 2 + 1e-12)


def test_noons_threshold_zero_keeps_everything(lih):
    space = compute_noons(lih, 0.0)[1]
    assert space.frozen == () and space.active == tuple(range(lih.n_orbitals))


def test_noons_threshold_selects(lih):
    report, space = compute_noons(lih, 0.002)
    occ = report.occupations
    assert len(space.frozen) == int(np.sum(occ > 2 - 0.002))
    assert space.n_active == int(np.sum((occ <= 2 - 0.002) & (occ >= 0.002)))


def test_noons_open_shell_rejected():
    mi = MolecularIntegrals(2, 1, 1, 0.0, np.eye(2), np.zeros((2, 2, 2, 2)))
    with pytest.raises(UnsupportedSystemError):
        compute_noons(mi)


def test_noons_singular_denominator():
    mi = MolecularIntegrals(2, 2, 0, 0.0, np.zeros((2, 2)), np.zeros((2, 2, 2, 2)), orbital_energies=[0.0, 0.0])
    with pytest.raises(SingularDenominatorError):
        compute_noons(mi)
