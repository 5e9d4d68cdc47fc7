"""Qubit, Hamiltonian-term and parameter counts without running a simulation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .ansatz import AnsatzSpec, build_hardware, gate_counts
from .fcidump import MolecularIntegrals
from .problem import MolecularProblem
from .tapering import find_symmetries, reference_sector, taper


@dataclass
class ResourceReport:
    qubits: int
    hamiltonian_terms: int
    parameters: int | None
    mapping: str
    ansatz: str | None
    depth: int | None
    active_space: dict
    n_electrons: int
    tapered_qubits: int = 0
    gates: dict | None = field(default=None)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def resource_report(mi: MolecularIntegrals, active="full", mapping: str = "jw",
                    ansatz: AnsatzSpec | str | None = None, depth: int = 1,
                    tapered: bool = False) -> ResourceReport:
    """Counts for a configuration; ``tapered`` applies qubit tapering in the HF sector.

    Tapering breaks particle-number structure, so only the hardware ansatz is
    sized on a tapered register.
    """
    spec = AnsatzSpec(ansatz, depth) if isinstance(ansatz, str) else ansatz
    pairing = spec is not None and spec.pairing
    problem = MolecularProblem.build(mi, active, mapping, pairing=pairing)
    h = problem.hamiltonian
    removed = 0
    circuit = None
    if tapered:
        if pairing:
            raise ValueError("tapering applies to spin-orbital encodings, not pUCCD")
        if spec is not None and spec.family != "hardware":
            raise ValueError("a tapered register only supports the hardware ansatz")
        t = find_symmetries(h)
        if t.symmetries:
            try:
                sector = reference_sector(t, problem.reference)
            except ValueError:
                sector = (0,) * len(t.symmetries)
            h = taper(h, t, sector)
            removed = len(t.symmetries)
        if spec is not None:
            circuit = build_hardware(h.n_qubits, spec.depth)
    elif spec is not None:
        circuit = problem.ansatz(spec)
    return ResourceReport(
        qubits=h.n_qubits,
        hamiltonian_terms=len(h),
        parameters=None if circuit is None else circuit.n_parameters,
        mapping=problem.mapping,
        ansatz=None if spec is None else spec.family,
        depth=None if spec is None else spec.depth,
        active_space=problem.space.to_dict(),
        n_electrons=problem.n_electrons,
        tapered_qubits=removed,
        gates=None if circuit is None else gate_counts(circuit),
    )
