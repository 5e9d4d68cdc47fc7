import json

import pytest

from vqekit.resources import resource_report


def test_h2_counts(h2):
    r = resource_report(h2)
    assert (r.qubits, r.hamiltonian_terms) == (4, 15)
    assert resource_report(h2, tapered=True).qubits == 1


def test_ch3f_puccd(ch3f):
    r = resource_report(ch3f, "frozen-core", ansatz="puccd")
    assert (r.qubits, r.parameters) == (11, 28)
    assert r.active_space["frozen"] == [0, 1] and len(r.active_space["active"]) == 11
    assert r.gates["entangling"] == 56 and r.gates["single_qubit"] <= 253
    assert json.loads(r.to_json())["parameters"] == 28


@pytest.mark.parametrize("mapping", ["jw", "bk"])
def test_lih_frozen_core(lih, mapping):
    r = resource_report(lih, "frozen-core", mapping, "uccsd")
    assert r.qubits == 10 and r.parameters == 24 and r.mapping == mapping
