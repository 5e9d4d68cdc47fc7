"""Assemble a qubit problem (Hamiltonian, reference, ansatz) from molecular integrals."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .ansatz import AnsatzSpec, Circuit, build_ansatz, reference_occupation, restrict_to_hardcore_boson
from .fcidump import MolecularIntegrals
from .fermion import (
    ActiveSpace,
    ActiveSpaceError,
    build_hamiltonian,
    compute_noons,
    frozen_core,
    hartree_fock_energy,
)
from .mappings import get_mapping, jordan_wigner
from .pauli import QubitOperator
from .simulator import exact_ground_energy


def resolve_active_space(mi: MolecularIntegrals, spec: str | ActiveSpace | dict | None = "full") -> ActiveSpace:
    """``full``, ``frozen-core``, ``noons:<tau>``, ``manual:<json file>``, a dict or an ActiveSpace."""
    if spec is None:
        spec = "full"
    if isinstance(spec, ActiveSpace):
        spec.validate(mi)
        return spec
    if isinstance(spec, dict):
        return ActiveSpace.manual(mi, spec.get("frozen", ()), spec["active"])
    text = str(spec).strip()
    kind, _, arg = text.partition(":")
    kind = kind.lower().replace("_", "-")
    if kind == "full":
        return ActiveSpace.full(mi)
    if kind == "frozen-core":
        return frozen_core(mi)
    if kind == "noons":
        tau = float(arg) if arg else 0.002
        return compute_noons(mi, tau)[1]
    if kind == "manual":
        if not arg:
            raise ActiveSpaceError("manual active space needs a file: manual:<path>")
        data = json.loads(Path(arg).read_text())
        return ActiveSpace.manual(mi, data.get("frozen", ()), data["active"])
    raise ActiveSpaceError(f"unknown active-space selector {spec!r}")


@dataclass
class MolecularProblem:
    """Qubit Hamiltonian and reference for one geometry.

    ``encoding`` is ``"spin"`` (one qubit per spin orbital, JW or BK) or
    ``"pair"`` (one qubit per spatial orbital, hard-core bosons).
    """

    mi: MolecularIntegrals
    space: ActiveSpace
    mapping: str
    encoding: str
    hamiltonian: QubitOperator
    reference: tuple[int, ...]
    metadata: dict = field(default_factory=dict)

    @classmethod
    def build(cls, mi: MolecularIntegrals, active="full", mapping: str = "jw",
              pairing: bool = False) -> "MolecularProblem":
        space = resolve_active_space(mi, active)
        mapping = mapping.lower()
        get_mapping(mapping)
        n_el = space.n_active_electrons
        if pairing:
            h = restrict_to_hardcore_boson(mi, space)
            ref = tuple(range(n_el // 2))
            return cls(mi, space, mapping, "pair", h, ref)
        h = get_mapping(mapping)(build_hamiltonian(mi, space)).real()
        ref = reference_occupation(2 * space.n_active, n_el, mapping)
        return cls(mi, space, mapping, "spin", h, ref)

    @property
    def n_qubits(self) -> int:
        return self.hamiltonian.n_qubits

    @property
    def n_electrons(self) -> int:
        return self.space.n_active_electrons

    @property
    def n_spatial(self) -> int:
        return self.space.n_active

    @property
    def particle_weight(self) -> int | None:
        """Hamming weight of physical basis states, when the encoding fixes one."""
        if self.encoding == "pair":
            return self.n_electrons // 2
        return self.n_electrons if self.mapping == "jw" else None

    def hf_energy(self) -> float:
        return hartree_fock_energy(self.mi, self.space)

    def fci_energy(self) -> float:
        """Exact ground energy of the active-space Hamiltonian at the right electron count.

        Always uses the spin-orbital JW form so the particle sector is a
        Hamming-weight sector, whatever the working encoding.
        """
        cached = self.metadata.get("fci")
        if cached is None:
            if self.encoding == "spin" and self.mapping == "jw":
                h = self.hamiltonian
            else:
                h = jordan_wigner(build_hamiltonian(self.mi, self.space)).real()
            cached = exact_ground_energy(h, self.n_electrons)
            self.metadata["fci"] = cached
        return cached

    def ansatz(self, spec: AnsatzSpec) -> Circuit:
        if spec.pairing != (self.encoding == "pair"):
            raise ValueError("pUCCD needs the pair encoding, and the pair encoding only supports pUCCD")
        return build_ansatz(spec, self.n_spatial, self.n_electrons, self.mapping)
