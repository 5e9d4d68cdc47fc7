import numpy as np
import pytest

from vqekit.fermion import build_hamiltonian, frozen_core
from vqekit.mappings import bravyi_kitaev, jordan_wigner
from vqekit.pauli import DimensionError, PauliString, QubitOperator
from vqekit.simulator import exact_ground_energy
from vqekit.tapering import find_symmetries, gf2_kernel, reference_sector, taper

from conftest import H2_EQ_FCI
from oracles import gf2_rank


def _row(p: PauliString):
    n = p.n_qubits
    return [(p.x >> q) & 1 for q in range(n)] + [(p.z >> q) & 1 for q in range(n)]


def in_span(gens, p):
    rows = [_row(g) for g in gens]
    return gf2_rank(np.array(rows + [_row(p)])) == gf2_rank(np.array(rows))


@pytest.fixture(scope="module")
def h2_jw(h2):
    return jordan_wigner(build_hamiltonian(h2)).real()


def test_z0z1_kernel_contains_z_strings():
    # the commutant also holds XX, but tapering generators must commute pairwise
    t = find_symmetries(QubitOperator.from_label("ZZ"))
    assert len(t.symmetries) == 2
    for lab in ("ZI", "IZ"):
        assert in_span(t.symmetries, PauliString.from_label(lab))


def test_random_diagonal_kernel():
    rng = np.random.default_rng(0)
    h = QubitOperator.from_labels([(l, rng.normal()) for l in ("ZII", "IZI", "ZZZ", "IZZ")])
    t = find_symmetries(h)
    assert len(t.symmetries) >= 3
    for lab in ("ZII", "IZI", "IIZ"):
        assert in_span(t.symmetries, PauliString.from_label(lab))


def test_h2_three_generators(h2_jw):
    t = find_symmetries(h2_jw)
    assert len(t.symmetries) == 3 and t.sector_count == 8
    assert gf2_rank(np.array([_row(s) for s in t.symmetries])) == 3
    for s in t.symmetries:
        for p, _ in h2_jw.items():
            assert s.commutes(p)
    for sigma, s in zip(t.paulis, t.symmetries):
        assert not sigma.commutes(s)
        assert all(sigma.commutes(o) for o in t.symmetries if o is not s)


def test_h2_sector_minimum_is_fci(h2_jw):
    t = find_symmetries(h2_jw)
    energies = [exact_ground_energy(taper(h2_jw, t, s)) for s in t.sectors()]
    assert all(taper(h2_jw, t, s).n_qubits == 1 for s in t.sectors())
    assert min(energies) == pytest.approx(H2_EQ_FCI, abs=1e-9)
    hf_sector = reference_sector(t, (0, 1))
    assert exact_ground_energy(taper(h2_jw, t, hf_sector)) == pytest.approx(H2_EQ_FCI, abs=1e-9)


@pytest.mark.parametrize("mapping", [jordan_wigner, bravyi_kitaev])
def test_sector_spectra_reconstruct_full_spectrum(lih, mapping):
    h = mapping(build_hamiltonian(lih, frozen_core(lih))).real()
    t = find_symmetries(h)
    assert t.symmetries
    parts = np.concatenate([np.linalg.eigvalsh(taper(h, t, s).to_dense()) for s in t.sectors()])
    np.testing.assert_allclose(np.sort(parts), np.linalg.eigvalsh(h.to_dense()), atol=1e-9)


def test_identity_operator_unchanged():
    h = QubitOperator.constant(3, 2.5)
    t = find_symmetries(h)
    for s in t.sectors()[:4]:
        out = taper(h, t, s)
        assert out.constant_term == pytest.approx(2.5) and len(out) == 1


def test_no_symmetry():
    h = QubitOperator.from_labels([("X", 1.0), ("Z", 1.0)])
    assert find_symmetries(h).symmetries == []


def test_sector_length_checked(h2_jw):
    t = find_symmetries(h2_jw)
    with pytest.raises(DimensionError):
        taper(h2_jw, t, (0, 1))


def test_deterministic(h2_jw):
    a, b = find_symmetries(h2_jw), find_symmetries(h2_jw.copy())
    assert a.to_dict() == b.to_dict()
    assert a.tapered_qubit_indices == [1, 2, 3]


def test_gf2_kernel_against_rank():
    rng = np.random.default_rng(5)
    m = rng.integers(0, 2, size=(6, 9))
    k = gf2_kernel(m)
    assert k.shape[0] == 9 - gf2_rank(m)
    assert not np.any((m @ k.T) % 2)
