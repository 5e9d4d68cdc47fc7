"""Gate-level circuit IR and ansatz builders.

Rotation conventions: ``RX(a) = exp(-i a X / 2)`` (likewise RY, RZ),
``ExpPauli(a) = exp(-i a P / 2)``, and ``Givens(a)`` on ``(i, j)`` maps
``|1_i 0_j> -> cos(a/2)|1_i 0_j> + sin(a/2)|0_i 1_j>``, which equals
``exp(-i a (X_i Y_j - Y_i X_j) / 4)``. A gate's angle is
``scale * theta[param] + angle`` when it is parameterized, else ``angle``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Iterable, Sequence

from .fcidump import MolecularIntegrals
from .fermion import (
    ANNIHILATE,
    CREATE,
    ActiveSpace,
    FermionOperator,
    UnsupportedSystemError,
    active_space_integrals,
)
from .mappings import get_mapping
from .pauli import PauliString, QubitOperator

SINGLE_QUBIT = frozenset({"X", "H", "S", "RX", "RY", "RZ"})
TWO_QUBIT = frozenset({"CNOT", "CZ", "Givens"})
GATE_KINDS = SINGLE_QUBIT | TWO_QUBIT | {"ExpPauli"}
PARAMETRIC = frozenset({"RX", "RY", "RZ", "Givens", "ExpPauli"})

FAMILIES = ("uccsd", "kupccgsd", "puccd", "hardware", "hardware_conserving")


class EmptyAnsatzError(ValueError):
    """No excitations can be generated for the requested problem."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    param: int | None = None
    angle: float = 0.0
    scale: float = 1.0
    pauli: PauliString | None = None

    def resolved_angle(self, theta: Sequence[float]) -> float:
        if self.param is None:
            return self.angle
        return self.scale * float(theta[self.param]) + self.angle

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "qubits": list(self.qubits)}
        if self.param is not None:
            d["param"] = self.param
            d["scale"] = self.scale
        if self.angle or self.param is None and self.kind in PARAMETRIC:
            d["angle"] = self.angle
        if self.pauli is not None:
            d["pauli"] = self.pauli.label()
        return d

    @classmethod
    def from_dict(cls, d: dict, n_qubits: int) -> "Gate":
        pauli = PauliString.from_label(d["pauli"]) if "pauli" in d else None
        if pauli is not None and pauli.n_qubits != n_qubits:
            raise ValueError("ExpPauli string width differs from the circuit")
        return cls(d["kind"], tuple(d["qubits"]), d.get("param"), d.get("angle", 0.0),
                   d.get("scale", 1.0), pauli)

    def text(self) -> str:
        parts = [self.kind, ",".join(map(str, self.qubits))]
        if self.pauli is not None:
            parts.append(self.pauli.label())
        if self.param is not None:
            parts.append(f"{self.scale:+.12g}*t[{self.param}]" + (f"{self.angle:+.12g}" if self.angle else ""))
        elif self.kind in PARAMETRIC:
            parts.append(f"{self.angle:.12g}")
        return " ".join(parts)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list acting after preparation of ``reference`` (qubits set to 1)."""

    n_qubits: int
    gates: tuple[Gate, ...]
    n_parameters: int
    reference: tuple[int, ...] = ()
    family: str = "custom"
    metadata: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "reference", tuple(sorted(self.reference)))
        for g in self.gates:
            if g.kind not in GATE_KINDS:
                raise ValueError(f"unknown gate kind {g.kind!r}")
            if any(q < 0 or q >= self.n_qubits for q in g.qubits):
                raise ValueError(f"gate {g.text()} touches a qubit outside 0..{self.n_qubits - 1}")
            if g.param is not None and not 0 <= g.param < self.n_parameters:
                raise ValueError(f"gate {g.text()} references parameter beyond {self.n_parameters}")
            if g.param is not None and g.kind not in PARAMETRIC:
                raise ValueError(f"{g.kind} gates cannot carry a parameter")
            if g.kind == "ExpPauli":
                if g.pauli is None or g.pauli.n_qubits != self.n_qubits:
                    raise ValueError("ExpPauli gate needs a Pauli string matching the circuit width")
        if any(q < 0 or q >= self.n_qubits for q in self.reference):
            raise ValueError("reference qubit outside the register")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        """Concatenate; parameters of ``other`` are shifted after ours."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("cannot concatenate circuits of different width")
        shifted = [replace(g, param=g.param + self.n_parameters) if g.param is not None else g
                   for g in other.gates]
        return Circuit(self.n_qubits, self.gates + tuple(shifted),
                       self.n_parameters + other.n_parameters, self.reference, self.family)

    def reference_circuit(self) -> "Circuit":
        return Circuit(self.n_qubits, tuple(Gate("X", (q,)) for q in self.reference), 0)

    def with_reference(self) -> "Circuit":
        return Circuit(self.n_qubits, self.reference_circuit().gates + self.gates, self.n_parameters,
                       (), self.family, dict(self.metadata))

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "n_parameters": self.n_parameters,
            "reference": list(self.reference),
            "family": self.family,
            "gates": [g.to_dict() for g in self.gates],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        n = d["n_qubits"]
        return cls(n, tuple(Gate.from_dict(g, n) for g in d["gates"]), d["n_parameters"],
                   tuple(d.get("reference", ())), d.get("family", "custom"))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))

    def text(self) -> str:
        return "\n".join(g.text() for g in self.gates)


@dataclass(frozen=True)
class AnsatzSpec:
    family: str = "uccsd"
    depth: int = 1

    def __post_init__(self):
        fam = self.family.lower().replace("-", "_")
        if fam not in FAMILIES:
            raise ValueError(f"unknown ansatz family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "family", fam)
        if self.depth < 1:
            raise ValueError("depth must be a positive integer")

    @property
    def pairing(self) -> bool:
        return self.family == "puccd"

    @property
    def reference(self) -> str:
        return "null" if self.family == "hardware" else "hartree_fock"


# ---------------------------------------------------------------------------
# excitations

@dataclass(frozen=True)
class Excitation:
    """``prod a+_c  prod a_a`` minus its adjoint; several may share one angle."""

    creators: tuple[int, ...]
    annihilators: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.creators)

    def operator(self, n_spin_orbitals: int) -> FermionOperator:
        key = tuple((c, CREATE) for c in self.creators) + tuple((a, ANNIHILATE) for a in self.annihilators)
        t = FermionOperator(n_spin_orbitals, {key: 1.0})
        return t - t.adjoint()

    def label(self) -> str:
        return f"{list(self.annihilators)}->{list(self.creators)}"


def hartree_fock_occupation(n_spin_orbitals: int, n_electrons: int) -> tuple[int, ...]:
    if n_electrons > n_spin_orbitals:
        raise ValueError("more electrons than spin orbitals")
    return tuple(range(n_electrons))


def uccsd_excitations(n_spin_orbitals: int, n_electrons: int) -> list[Excitation]:
    """Spin-conserving singles and doubles out of the interleaved HF reference."""
    occ = list(range(n_electrons))
    vir = list(range(n_electrons, n_spin_orbitals))
    out = [Excitation((a,), (i,)) for i in occ for a in vir if a % 2 == i % 2]
    for i, j in combinations(occ, 2):
        for a, b in combinations(vir, 2):
            if sorted((i % 2, j % 2)) == sorted((a % 2, b % 2)):
                out.append(Excitation((b, a), (j, i)))
    return out


def paired_double(p: int, q: int) -> Excitation:
    """Move an electron pair from spatial orbital ``p`` to ``q``."""
    return Excitation((2 * q + 1, 2 * q), (2 * p + 1, 2 * p))


def generator_terms(excitations: Iterable[Excitation], n_qubits: int, mapping: str = "jw"):
    """Pauli strings and angle scales whose ExpPauli product equals ``exp(theta (T - T^+))``.

    The anti-Hermitian generator maps to ``sum_k i c_k P_k`` with commuting
    ``P_k``; ``exp(i theta c_k P_k) = ExpPauli(P_k)`` with angle ``-2 c_k theta``.
    Terms are returned in lexicographic label order.
    """
    transform = get_mapping(mapping)
    total = None
    for exc in excitations:
        op = transform(exc.operator(n_qubits), n_qubits)
        total = op if total is None else total + op
    out = []
    for pauli, c in total.sorted_terms():
        c = complex(c)
        if abs(c.real) > 1e-10:
            raise ArithmeticError("excitation generator is not anti-Hermitian")
        out.append((pauli, -2.0 * c.imag))
    return out


def _exp_gates(excitation_groups, n_qubits, mapping, first_param=0):
    gates = []
    for offset, group in enumerate(excitation_groups):
        for pauli, scale in generator_terms(group, n_qubits, mapping):
            gates.append(Gate("ExpPauli", tuple(pauli.support), first_param + offset, 0.0, scale, pauli))
    return gates


def excitation_circuit(groups: Sequence[Sequence[Excitation]], n_qubits: int, reference: Sequence[int],
                       mapping: str = "jw", family: str = "custom") -> Circuit:
    gates = _exp_gates(groups, n_qubits, mapping)
    return Circuit(n_qubits, tuple(gates), len(groups), tuple(reference), family,
                   {"excitations": [[e.label() for e in g] for g in groups]})


def reference_occupation(n_qubits: int, n_electrons: int, mapping: str) -> tuple[int, ...]:
    occ = hartree_fock_occupation(n_qubits, n_electrons)
    if mapping == "jw":
        return occ
    # Bravyi-Kitaev: qubit values are parities of occupation subsets
    from .mappings import bravyi_kitaev_matrix

    enc = bravyi_kitaev_matrix(n_qubits)
    occ_vec = [1 if q in occ else 0 for q in range(n_qubits)]
    return tuple(q for q in range(n_qubits) if sum(enc[q, m] * occ_vec[m] for m in range(n_qubits)) % 2)


def build_uccsd(n_spin_orbitals: int, n_electrons: int, depth: int = 1, mapping: str = "jw") -> Circuit:
    """Trotterized UCCSD with independent angles in every step."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    excitations = uccsd_excitations(n_spin_orbitals, n_electrons)
    if not excitations:
        raise EmptyAnsatzError("no occupied->virtual excitations (no virtual orbitals?)")
    groups = [[e] for e in excitations] * depth
    circ = excitation_circuit(groups, n_spin_orbitals, reference_occupation(n_spin_orbitals, n_electrons, mapping),
                              mapping, "uccsd")
    circ.metadata["depth"] = depth
    return circ


def build_kupccgsd(n_spin_orbitals: int, n_electrons: int, k: int = 1, mapping: str = "jw") -> Circuit:
    """k-fold generalized singles (one angle per spatial pair) and paired doubles."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n_spatial = n_spin_orbitals // 2
    if n_spatial < 2:
        raise EmptyAnsatzError("generalized excitations need at least two spatial orbitals")
    pairs = list(combinations(range(n_spatial), 2))
    singles = [[Excitation((2 * q + s,), (2 * p + s,)) for s in (0, 1)] for p, q in pairs]
    doubles = [[paired_double(p, q)] for p, q in pairs]
    groups = (singles + doubles) * k
    circ = excitation_circuit(groups, n_spin_orbitals, reference_occupation(n_spin_orbitals, n_electrons, mapping),
                              mapping, "kupccgsd")
    circ.metadata.update(depth=k, n_singles=sum(len(g) for g in singles), n_doubles=len(doubles))
    return circ


def build_puccd(n_spatial: int, n_pairs: int) -> Circuit:
    """Pair-excitation ansatz on one qubit per spatial orbital (hard-core bosons)."""
    if n_pairs > n_spatial or n_pairs < 0:
        raise ValueError(f"n_pairs={n_pairs} incompatible with n_spatial={n_spatial}")
    occ = list(range(n_pairs))
    vir = list(range(n_pairs, n_spatial))
    gates = []
    param = 0
    for a in vir:
        for i in reversed(occ):
            gates.append(Gate("Givens", (i, a), param))
            param += 1
    if not gates:
        raise EmptyAnsatzError("pUCCD needs at least one occupied and one virtual orbital")
    return Circuit(n_spatial, tuple(gates), param, tuple(occ), "puccd")


def build_hardware(n_qubits: int, layers: int, conserve: bool = False,
                   reference: Sequence[int] = ()) -> Circuit:
    """Layered hardware-efficient ansatz.

    Non-conserving: RY and RZ on every qubit, then a CNOT ladder; acts on the
    all-zero state. Conserving: RZ on every qubit, then a ladder of Givens
    rotations; acts on ``reference``.
    """
    if layers < 1:
        raise ValueError("layers must be >= 1")
    gates: list[Gate] = []
    p = 0
    for _ in range(layers):
        if conserve:
            for q in range(n_qubits):
                gates.append(Gate("RZ", (q,), p))
                p += 1
            for q in range(n_qubits - 1):
                gates.append(Gate("Givens", (q, q + 1), p))
                p += 1
        else:
            for q in range(n_qubits):
                gates.append(Gate("RY", (q,), p))
                gates.append(Gate("RZ", (q,), p + 1))
                p += 2
            for q in range(n_qubits - 1):
                gates.append(Gate("CNOT", (q, q + 1)))
    family = "hardware_conserving" if conserve else "hardware"
    ref = tuple(reference) if conserve else ()
    circ = Circuit(n_qubits, tuple(gates), p, ref, family)
    circ.metadata["depth"] = layers
    return circ


def build_ansatz(spec: AnsatzSpec, n_spatial: int, n_electrons: int, mapping: str = "jw") -> Circuit:
    """Dispatch on ``spec.family`` for a closed-shell active space."""
    nso = 2 * n_spatial
    if spec.family == "uccsd":
        return build_uccsd(nso, n_electrons, spec.depth, mapping)
    if spec.family == "kupccgsd":
        return build_kupccgsd(nso, n_electrons, spec.depth, mapping)
    if spec.family == "puccd":
        if n_electrons % 2:
            raise UnsupportedSystemError("pUCCD needs an even electron count")
        return build_puccd(n_spatial, n_electrons // 2)
    if spec.family == "hardware":
        return build_hardware(nso, spec.depth)
    return build_hardware(nso, spec.depth, conserve=True,
                          reference=reference_occupation(nso, n_electrons, mapping))


# ---------------------------------------------------------------------------
# hard-core boson Hamiltonian

def restrict_to_hardcore_boson(mi: MolecularIntegrals, space: ActiveSpace | None = None) -> QubitOperator:
    """Seniority-zero Hamiltonian with one qubit per active spatial orbital.

    ``E0 + sum_p (2h_pp + J_pp) n_p + sum_{p!=q} (2J_pq - K_pq) n_p n_q
    + sum_{p!=q} K_pq b+_p b_q`` with ``J_pq = (pp|qq)``, ``K_pq = (pq|qp)``,
    ``n_p = (1 - Z_p)/2`` and ``b+_p b_q + h.c. = (X_p X_q + Y_p Y_q)/2``.
    """
    space = space or ActiveSpace.full(mi)
    if space.n_active_electrons % 2 or mi.ms2 != 0:
        raise UnsupportedSystemError("hard-core boson form needs a closed-shell, even-electron system")
    const, h, g = active_space_integrals(mi, space)
    n = space.n_active
    op = QubitOperator.constant(n, const)
    ident = PauliString.identity(n)

    def z(*qs):
        p = ident
        for q in qs:
            p = p * PauliString.single("Z", q, n)
        return QubitOperator.from_pauli(p)

    for p in range(n):
        e = 2.0 * h[p, p] + g[p, p, p, p]
        op = op + (QubitOperator.constant(n, 1.0) - z(p)) * (0.5 * e)
    for p, q in combinations(range(n), 2):
        w = 2.0 * (2.0 * g[p, p, q, q] - g[p, q, q, p])
        op = op + (QubitOperator.constant(n, 1.0) - z(p) - z(q) + z(p, q)) * (0.25 * w)
        k = g[p, q, q, p]
        xx = PauliString.single("X", p, n) * PauliString.single("X", q, n)
        yy = PauliString.single("Y", p, n) * PauliString.single("Y", q, n)
        op = op + (QubitOperator.from_pauli(xx) + QubitOperator.from_pauli(yy)) * (0.5 * k)
    return op.simplify()


# ---------------------------------------------------------------------------
# decomposition and resource counting

_HALF_PI = math.pi / 2


def _decompose_exp_pauli(g: Gate) -> list[Gate]:
    pauli = g.pauli
    support = pauli.support
    before, after = [], []
    for q in support:
        bx, bz = (pauli.x >> q) & 1, (pauli.z >> q) & 1
        if bx and not bz:
            before.append(Gate("H", (q,)))
            after.append(Gate("H", (q,)))
        elif bx and bz:
            before.append(Gate("RX", (q,), angle=_HALF_PI))
            after.append(Gate("RX", (q,), angle=-_HALF_PI))
    ladder = [Gate("CNOT", (a, b)) for a, b in zip(support, support[1:])]
    rz = Gate("RZ", (support[-1],), g.param, g.angle, g.scale)
    return before + ladder + [rz] + ladder[::-1] + after


def _decompose_givens(g: Gate) -> list[Gate]:
    i, j = g.qubits
    half = 0.5 * g.scale

    def rot(kind, q):
        return Gate(kind, (q,), g.param, 0.5 * g.angle, half) if g.param is not None else Gate(kind, (q,), angle=0.5 * g.angle)

    return [
        Gate("RX", (i,), angle=_HALF_PI),
        Gate("RY", (j,), angle=_HALF_PI),
        Gate("RZ", (j,), angle=-_HALF_PI),
        Gate("CNOT", (i, j)),
        rot("RX", i),
        rot("RZ", j),
        Gate("CNOT", (i, j)),
        Gate("RX", (i,), angle=-_HALF_PI),
        Gate("RZ", (j,), angle=_HALF_PI),
        Gate("RY", (j,), angle=-_HALF_PI),
    ]


def decompose(circuit: Circuit) -> Circuit:
    """Lower ExpPauli and Givens gates to single-qubit rotations and CNOTs."""
    out: list[Gate] = []
    for g in circuit.gates:
        if g.kind == "ExpPauli":
            out.extend(_decompose_exp_pauli(g) if g.pauli.weight else [])
        elif g.kind == "Givens":
            out.extend(_decompose_givens(g))
        else:
            out.append(g)
    return Circuit(circuit.n_qubits, tuple(out), circuit.n_parameters, circuit.reference,
                   circuit.family, dict(circuit.metadata))


def expand_givens(circuit: Circuit) -> Circuit:
    """Replace each Givens gate by its two commuting ExpPauli factors (exact)."""
    n = circuit.n_qubits
    out: list[Gate] = []
    for g in circuit.gates:
        if g.kind != "Givens":
            out.append(g)
            continue
        i, j = g.qubits
        xy = PauliString.single("X", i, n) * PauliString.single("Y", j, n)
        yx = PauliString.single("Y", i, n) * PauliString.single("X", j, n)
        out.append(Gate("ExpPauli", (i, j), g.param, 0.5 * g.angle, 0.5 * g.scale, xy))
        out.append(Gate("ExpPauli", (i, j), g.param, -0.5 * g.angle, -0.5 * g.scale, yx))
    return Circuit(n, tuple(out), circuit.n_parameters, circuit.reference, circuit.family,
                   dict(circuit.metadata))


def gate_counts(circuit: Circuit, include_reference: bool = True) -> dict:
    """Counts after decomposition to single-qubit gates plus CNOTs."""
    low = decompose(circuit.with_reference() if include_reference else circuit)
    by_kind: dict[str, int] = {}
    for g in low.gates:
        by_kind[g.kind] = by_kind.get(g.kind, 0) + 1
    single = sum(v for k, v in by_kind.items() if k in SINGLE_QUBIT)
    entangling = sum(v for k, v in by_kind.items() if k in TWO_QUBIT)
    return {"single_qubit": single, "entangling": entangling, "by_kind": dict(sorted(by_kind.items())),
            "parameters": circuit.n_parameters}
