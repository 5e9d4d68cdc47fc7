import io
import itertools

import numpy as np
import pytest

from vqekit.fcidump import (
    FcidumpConsistencyError,
    FcidumpFormatError,
    FcidumpRangeError,
    MolecularIntegrals,
    parse_fcidump,
    write_fcidump,
)
from vqekit.simulator import exact_ground_energy
from vqekit.fermion import build_hamiltonian
from vqekit.mappings import jordan_wigner

from conftest import H2_EQ_FCI

MINIMAL = """ &FCI NORB=1,NELEC=2,MS2=0,
  ORBSYM=1,
  ISYM=1,
 &END
  0.6800 1 1 1 1
 -1.2500 1 1 0 0
  0.7100 0 0 0 0
"""


def test_minimal_instance():
    mi = parse_fcidump(MINIMAL)
    assert mi.n_orbitals == 1 and mi.n_electrons == 2 and mi.ms2 == 0
    assert mi.two_body[0, 0, 0, 0] == 0.68
    assert mi.one_body[0, 0] == -1.25
    assert mi.core_energy == 0.71


def test_one_body_symmetry_expansion():
    text = " &FCI NORB=2,NELEC=2,MS2=0 &END\n 0.5 1 2 0 0\n"
    mi = parse_fcidump(text)
    assert mi.one_body[0, 1] == mi.one_body[1, 0] == 0.5


def test_two_body_eightfold_expansion():
    mi = parse_fcidump(" &FCI NORB=2,NELEC=2,MS2=0 &END\n 0.3 2 1 1 1\n")
    for key in set(itertools.permutations((1, 0, 0, 0))):
        assert mi.two_body[key] == 0.3


def test_round_trip_minimal():
    mi = parse_fcidump(MINIMAL)
    assert parse_fcidump(write_fcidump(mi)) == mi


def _exact_symmetric(n, seed):
    rng = np.random.default_rng(seed)
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            h[i, j] = h[j, i] = rng.normal()
    g = np.zeros((n, n, n, n))
    for i, j, k, l in itertools.product(range(n), repeat=4):
        if (i, j, k, l) != min([(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                                 (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)]):
            continue
        v = rng.normal()
        for key in [(i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                    (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i)]:
            g[key] = v
    return MolecularIntegrals(n, 2, 0, float(rng.normal()), h, g, orbital_energies=rng.normal(size=n))


@pytest.mark.parametrize("seed", range(5))
def test_round_trip_random(seed):
    mi = _exact_symmetric(3, seed)
    assert parse_fcidump(write_fcidump(mi)) == mi


def test_record_order_insensitive():
    mi = _exact_symmetric(3, 11)
    text = write_fcidump(mi)
    head, body = text.split("&END\n")
    lines = body.splitlines()
    np.random.default_rng(0).shuffle(lines)
    assert parse_fcidump(head + "&END\n" + "\n".join(lines) + "\n") == mi


def test_orbital_energy_records():
    mi = MolecularIntegrals(2, 2, 0, 0.0, np.eye(2), np.zeros((2, 2, 2, 2)), orbital_energies=[-0.5, 0.25])
    text = write_fcidump(mi)
    assert any(line.split()[1:] == ["1", "0", "0", "0"] for line in text.splitlines())
    np.testing.assert_array_equal(parse_fcidump(text).orbital_energies, [-0.5, 0.25])


def test_zero_two_body_elided():
    mi = MolecularIntegrals(2, 2, 0, 0.0, np.eye(2), np.zeros((2, 2, 2, 2)))
    records = [l.split() for l in write_fcidump(mi).split("&END\n")[1].splitlines()]
    assert not any(r[3] != "0" for r in records)


def test_elements_comment(ch3f):
    assert ch3f.elements == ("C", "H", "H", "H", "F")
    assert parse_fcidump(write_fcidump(ch3f)).elements == ch3f.elements


def test_stream_input():
    assert parse_fcidump(io.StringIO(MINIMAL)) == parse_fcidump(MINIMAL)


def test_h2_fixture_ground_energy(h2):
    e = exact_ground_energy(jordan_wigner(build_hamiltonian(h2)), 2)
    assert e == pytest.approx(H2_EQ_FCI, abs=1e-10)
    assert e == pytest.approx(-1.137, abs=1e-3)


@pytest.mark.parametrize("text, exc, where", [
    ("NORB=1 &END\n", FcidumpFormatError, "line 1"),
    (" &FCI NORB=1,NELEC=2\n 0.1 1 1 1 1\n", FcidumpFormatError, "not terminated"),
    (" &FCI NORB=1,NELEC=2 &END\n 0.1 1 1 1\n", FcidumpFormatError, "line 2"),
    (" &FCI NORB=1,NELEC=2 &END\n abc 1 1 1 1\n", FcidumpFormatError, "line 2"),
    (" &FCI NORB=1,NELEC=2 &END\n 0.1 2 1 1 1\n", FcidumpRangeError, "line 2"),
    (" &FCI NORB=1,NELEC=2 &END\n 0.1 1 1 1 1\n 0.2 1 1 1 1\n", FcidumpConsistencyError, "line 3"),
    (" &FCI NORB=2,NELEC=2 &END\n 0.1 1 2 0 0\n 0.3 2 1 0 0\n", FcidumpConsistencyError, "line 3"),
])
def test_errors_carry_line_context(text, exc, where):
    with pytest.raises(exc, match=where):
        parse_fcidump(text)


def test_duplicate_within_tolerance_accepted():
    mi = parse_fcidump(" &FCI NORB=1,NELEC=2 &END\n 0.1 1 1 1 1\n 0.10000000000001 1 1 1 1\n")
    assert mi.two_body[0, 0, 0, 0] == pytest.approx(0.1)


def test_validate_rejects_asymmetric():
    with pytest.raises(ValueError):
        MolecularIntegrals(2, 2, 0, 0.0, np.array([[0, 1], [0, 0.0]]), np.zeros((2, 2, 2, 2))).validate()
