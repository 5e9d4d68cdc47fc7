"""Second-quantized Hamiltonians, active spaces and MP2 natural occupations.

Spin orbitals are interleaved: spatial orbital ``p`` owns spin orbitals ``2p``
(alpha) and ``2p + 1`` (beta).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .fcidump import MolecularIntegrals

PRUNE_TOL = 1e-12

CREATE, ANNIHILATE = 1, 0

Term = tuple[tuple[int, int], ...]


class ActiveSpaceError(ValueError):
    """Active space inconsistent with the integrals."""


class UnsupportedSystemError(ValueError):
    """Open-shell or otherwise unsupported input for a closed-shell method."""


class SingularDenominatorError(ArithmeticError):
    """Near-zero MP2 energy denominator."""


def _normal_order_term(term: Term, coeff: complex) -> dict[Term, complex]:
    """Normal order one product of ladder operators.

    Creations go left of annihilations; within each block indices decrease.
    Anticommutation ``a_i a_j^+ = delta_ij - a_j^+ a_i`` spawns contracted terms.
    """
    out: dict[Term, complex] = {}
    stack = [(list(term), coeff)]
    while stack:
        ops, c = stack.pop()
        n = len(ops)
        swapped = True
        dead = False
        while swapped and not dead:
            swapped = False
            for pos in range(n - 1):
                (i, ai), (j, aj) = ops[pos], ops[pos + 1]
                if ai == aj:
                    if i == j:
                        dead = True
                        break
                    if i < j:
                        ops[pos], ops[pos + 1] = ops[pos + 1], ops[pos]
                        c = -c
                        swapped = True
                elif ai == ANNIHILATE and aj == CREATE:
                    if i == j:
                        stack.append((ops[:pos] + ops[pos + 2:], c))
                    ops[pos], ops[pos + 1] = ops[pos + 1], ops[pos]
                    c = -c
                    swapped = True
        if dead:
            continue
        key = tuple(ops)
        out[key] = out.get(key, 0.0) + c
    return out


class FermionOperator:
    """Sum of normal-ordered products of ladder operators.

    Keys are tuples of ``(spin_orbital, action)`` with ``action`` 1 for a
    creation and 0 for an annihilation operator; ``()`` is the identity.
    """

    def __init__(self, n_spin_orbitals: int, terms: Mapping[Term, complex] | None = None,
                 normal_order: bool = True):
        self.n_spin_orbitals = int(n_spin_orbitals)
        self.terms: dict[Term, complex] = {}
        for key, c in (terms or {}).items():
            key = tuple((int(i), int(a)) for i, a in key)
            for i, _ in key:
                if not 0 <= i < self.n_spin_orbitals:
                    raise ValueError(f"spin orbital {i} outside register of {self.n_spin_orbitals}")
            if normal_order:
                for k, v in _normal_order_term(key, c).items():
                    self.terms[k] = self.terms.get(k, 0.0) + v
            else:
                self.terms[key] = self.terms.get(key, 0.0) + c
        self.terms = {k: v for k, v in self.terms.items() if abs(v) >= PRUNE_TOL}

    @classmethod
    def ladder(cls, n: int, index: int, create: bool) -> "FermionOperator":
        return cls(n, {((index, CREATE if create else ANNIHILATE),): 1.0})

    @classmethod
    def from_string(cls, n: int, spec: str, coeff: complex = 1.0) -> "FermionOperator":
        """``"3^ 1"`` style input: a caret marks a creation operator."""
        ops = []
        for tok in spec.split():
            if tok.endswith("^"):
                ops.append((int(tok[:-1]), CREATE))
            else:
                ops.append((int(tok), ANNIHILATE))
        return cls(n, {tuple(ops): coeff})

    def __len__(self) -> int:
        return len(self.terms)

    @property
    def constant(self) -> complex:
        return self.terms.get((), 0.0)

    def __add__(self, other: "FermionOperator") -> "FermionOperator":
        if isinstance(other, (int, float, complex)):
            other = FermionOperator(self.n_spin_orbitals, {(): other})
        merged = dict(self.terms)
        for k, v in other.terms.items():
            merged[k] = merged.get(k, 0.0) + v
        out = FermionOperator(max(self.n_spin_orbitals, other.n_spin_orbitals))
        out.terms = {k: v for k, v in merged.items() if abs(v) >= PRUNE_TOL}
        return out

    __radd__ = __add__

    def __sub__(self, other):
        return self + other * -1.0

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            out = FermionOperator(self.n_spin_orbitals)
            out.terms = {k: v * other for k, v in self.terms.items() if abs(v * other) >= PRUNE_TOL}
            return out
        products: dict[Term, complex] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                products[k1 + k2] = products.get(k1 + k2, 0.0) + c1 * c2
        return FermionOperator(max(self.n_spin_orbitals, other.n_spin_orbitals), products)

    __rmul__ = __mul__

    def adjoint(self) -> "FermionOperator":
        terms = {
            tuple((i, 1 - a) for i, a in reversed(k)): complex(v).conjugate()
            for k, v in self.terms.items()
        }
        return FermionOperator(self.n_spin_orbitals, terms)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        adj = self.adjoint()
        keys = set(self.terms) | set(adj.terms)
        return all(abs(self.terms.get(k, 0) - adj.terms.get(k, 0)) <= tol for k in keys)

    def is_number_conserving(self) -> bool:
        return all(sum(1 if a else -1 for _, a in k) == 0 for k in self.terms)

    def __repr__(self) -> str:
        return f"FermionOperator(n={self.n_spin_orbitals}, terms={len(self.terms)})"


def number_operator(n_spin_orbitals: int) -> FermionOperator:
    return FermionOperator(n_spin_orbitals, {((p, CREATE), (p, ANNIHILATE)): 1.0
                                             for p in range(n_spin_orbitals)})


@dataclass(frozen=True)
class ActiveSpace:
    """Frozen (doubly occupied) and active spatial orbitals; the rest are discarded."""

    frozen: tuple[int, ...]
    active: tuple[int, ...]
    n_active_electrons: int

    def __post_init__(self):
        object.__setattr__(self, "frozen", tuple(sorted(int(i) for i in self.frozen)))
        object.__setattr__(self, "active", tuple(sorted(int(i) for i in self.active)))

    @classmethod
    def full(cls, mi: MolecularIntegrals) -> "ActiveSpace":
        return cls((), tuple(range(mi.n_orbitals)), mi.n_electrons)

    @classmethod
    def manual(cls, mi: MolecularIntegrals, frozen: Iterable[int], active: Iterable[int]) -> "ActiveSpace":
        frozen = tuple(frozen)
        space = cls(frozen, tuple(active), mi.n_electrons - 2 * len(frozen))
        space.validate(mi)
        return space

    @property
    def n_active(self) -> int:
        return len(self.active)

    def discarded(self, n_orbitals: int) -> tuple[int, ...]:
        used = set(self.frozen) | set(self.active)
        return tuple(i for i in range(n_orbitals) if i not in used)

    def validate(self, mi: MolecularIntegrals) -> None:
        f, a = set(self.frozen), set(self.active)
        if f & a:
            raise ActiveSpaceError(f"orbitals {sorted(f & a)} are both frozen and active")
        if any(i < 0 or i >= mi.n_orbitals for i in f | a):
            raise ActiveSpaceError("orbital index outside the integral set")
        if self.n_active_electrons != mi.n_electrons - 2 * len(f):
            raise ActiveSpaceError("n_active_electrons must equal n_electrons - 2|frozen|")
        if self.n_active_electrons < 0:
            raise ActiveSpaceError("more frozen electrons than electrons")
        if self.n_active_electrons > 2 * len(a):
            raise ActiveSpaceError("active electrons do not fit in the active orbitals")

    def to_dict(self) -> dict:
        return {"frozen": list(self.frozen), "active": list(self.active),
                "n_active_electrons": self.n_active_electrons}


def active_space_integrals(mi: MolecularIntegrals, space: ActiveSpace):
    """Constant, effective one-body matrix and two-body tensor over the active set.

    Frozen orbitals contribute their one-body energy, the core-core Coulomb and
    exchange energy, and a mean-field correction ``2(pq|kk) - (pk|kq)`` to every
    active one-body element.
    """
    space.validate(mi)
    h, g = mi.one_body, mi.two_body
    F = list(space.frozen)
    A = list(space.active)
    const = mi.core_energy
    if F:
        const += 2.0 * sum(h[k, k] for k in F)
        for k in F:
            for l in F:
                const += 2.0 * g[k, k, l, l] - g[k, l, l, k]
    h_eff = h[np.ix_(A, A)].copy()
    for k in F:
        h_eff += 2.0 * g[np.ix_(A, A, [k], [k])][:, :, 0, 0] - g[np.ix_(A, [k], [k], A)][:, 0, 0, :]
    g_act = g[np.ix_(A, A, A, A)].copy()
    return float(const), h_eff, g_act


def reduce_integrals(mi: MolecularIntegrals, space: ActiveSpace) -> MolecularIntegrals:
    """An equivalent integral set over the active orbitals only."""
    const, h_eff, g_act = active_space_integrals(mi, space)
    eps = None
    if mi.orbital_energies is not None:
        eps = mi.orbital_energies[list(space.active)]
    n_act = space.n_active
    return MolecularIntegrals(
        n_orbitals=n_act,
        n_electrons=space.n_active_electrons,
        ms2=mi.ms2,
        core_energy=const,
        one_body=h_eff,
        two_body=g_act,
        orbital_energies=eps,
        elements=None,
    )


def build_hamiltonian(mi: MolecularIntegrals, space: ActiveSpace | None = None) -> FermionOperator:
    """Spin-orbital electronic Hamiltonian over the active set.

    ``H = E0 + sum h_pq a+_p a_q + 1/2 sum (pq|rs) a+_p a+_r a_s a_q`` with spin
    summation, active orbitals relabeled contiguously.
    """
    space = space or ActiveSpace.full(mi)
    const, h, g = active_space_integrals(mi, space)
    n = space.n_active
    nso = 2 * n
    terms: dict[Term, complex] = {(): const}
    for p in range(n):
        for q in range(n):
            if h[p, q] == 0.0:
                continue
            for s in (0, 1):
                key = ((2 * p + s, CREATE), (2 * q + s, ANNIHILATE))
                terms[key] = terms.get(key, 0.0) + h[p, q]
    for p in range(n):
        for q in range(n):
            for r in range(n):
                for s_ in range(n):
                    v = g[p, q, r, s_]
                    if v == 0.0:
                        continue
                    for sig in (0, 1):
                        for tau in (0, 1):
                            a, b = 2 * p + sig, 2 * r + tau
                            c, d = 2 * s_ + tau, 2 * q + sig
                            if a == b or c == d:
                                continue
                            key = ((a, CREATE), (b, CREATE), (c, ANNIHILATE), (d, ANNIHILATE))
                            terms[key] = terms.get(key, 0.0) + 0.5 * v
    return FermionOperator(nso, terms)


def hartree_fock_energy(mi: MolecularIntegrals, space: ActiveSpace | None = None) -> float:
    """Energy of the closed-shell reference determinant in the active space."""
    space = space or ActiveSpace.full(mi)
    const, h, g = active_space_integrals(mi, space)
    n_a = (space.n_active_electrons + mi.ms2) // 2
    n_b = (space.n_active_electrons - mi.ms2) // 2
    e = const
    occ = {0: range(n_a), 1: range(n_b)}
    for s in (0, 1):
        for i in occ[s]:
            e += h[i, i]
    for s in (0, 1):
        for t in (0, 1):
            for i in occ[s]:
                for j in occ[t]:
                    e += 0.5 * g[i, i, j, j]
                    if s == t:
                        e -= 0.5 * g[i, j, j, i]
    return float(e)


# Frozen-core orbital counts per element.
_CORE_ORBITALS = {}
for _sym in ("H", "He"):
    _CORE_ORBITALS[_sym] = 0
for _sym in ("Li", "Be", "B", "C", "N", "O", "F", "Ne"):
    _CORE_ORBITALS[_sym] = 1
for _sym in ("Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar"):
    _CORE_ORBITALS[_sym] = 5


def core_orbital_count(symbol: str) -> int:
    key = symbol.strip().capitalize()
    try:
        return _CORE_ORBITALS[key]
    except KeyError:
        raise KeyError(f"no frozen-core entry for element {symbol!r}") from None


def frozen_core(mi: MolecularIntegrals, elements: Sequence[str] | None = None) -> ActiveSpace:
    """Freeze the lowest orbitals according to the per-element core table."""
    elements = elements if elements is not None else mi.elements
    if elements is None:
        raise ValueError("frozen-core selection needs the element list")
    n_core = sum(core_orbital_count(e) for e in elements)
    if 2 * n_core > mi.n_electrons:
        raise ActiveSpaceError("core count exceeds the number of electron pairs")
    space = ActiveSpace(tuple(range(n_core)), tuple(range(n_core, mi.n_orbitals)),
                        mi.n_electrons - 2 * n_core)
    space.validate(mi)
    return space


def orbital_energies(mi: MolecularIntegrals) -> np.ndarray:
    """Stored orbital energies, or Fock diagonal ``h_ii + sum_j 2(ii|jj) - (ij|ji)``."""
    if mi.orbital_energies is not None:
        return mi.orbital_energies
    n_occ = mi.n_electrons // 2
    g = mi.two_body
    occ = range(n_occ)
    return np.array([
        mi.one_body[i, i] + sum(2.0 * g[i, i, j, j] - g[i, j, j, i] for j in occ)
        for i in range(mi.n_orbitals)
    ])


@dataclass
class NoonReport:
    occupations: np.ndarray
    threshold: float
    density: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {"occupations": [float(x) for x in self.occupations], "threshold": self.threshold}


def mp2_density(mi: MolecularIntegrals, denom_tol: float = 1e-10) -> np.ndarray:
    """Unrelaxed closed-shell MP2 one-particle density in the spatial MO basis."""
    if mi.ms2 != 0 or mi.n_electrons % 2:
        raise UnsupportedSystemError("MP2 natural occupations need a closed-shell system")
    n = mi.n_orbitals
    n_occ = mi.n_electrons // 2
    eps = orbital_energies(mi)
    o, v = slice(0, n_occ), slice(n_occ, n)
    e_o, e_v = eps[o], eps[v]
    denom = e_o[:, None, None, None] + e_o[None, None, :, None] - e_v[None, :, None, None] - e_v[None, None, None, :]
    small = np.argwhere(np.abs(denom) < denom_tol)
    if small.size:
        i, a, j, b = small[0]
        raise SingularDenominatorError(
            f"denominator eps_i+eps_j-eps_a-eps_b vanishes for (i,j,a,b)=({i},{j},{a + n_occ},{b + n_occ})"
        )
    ovov = mi.two_body[o, v, o, v]
    t = ovov / denom  # t[i, a, j, b]
    t_tilde = 2.0 * t - t.transpose(0, 3, 2, 1)
    gamma = np.zeros((n, n))
    gamma[o, o] = 2.0 * np.eye(n_occ) - 2.0 * np.einsum("iakb,jakb->ij", t, t_tilde)
    gamma[v, v] = 2.0 * np.einsum("iajc,ibjc->ab", t, t_tilde)
    return 0.5 * (gamma + gamma.T)


def compute_noons(mi: MolecularIntegrals, threshold: float = 0.002) -> tuple[NoonReport, ActiveSpace]:
    """MP2 natural-orbital occupation numbers and the active space they imply.

    Natural occupations are sorted descending and matched to orbitals in energy
    order. Orbitals above ``2 - threshold`` are frozen, those below
    ``threshold`` are discarded.
    """
    gamma = mp2_density(mi)
    occ = np.sort(np.linalg.eigvalsh(gamma))[::-1]
    frozen = tuple(i for i, x in enumerate(occ) if x > 2.0 - threshold)
    discarded = {i for i, x in enumerate(occ) if x < threshold}
    active = tuple(i for i in range(mi.n_orbitals) if i not in discarded and i not in frozen)
    space = ActiveSpace(frozen, active, mi.n_electrons - 2 * len(frozen))
    space.validate(mi)
    return NoonReport(occ, threshold, gamma), space
