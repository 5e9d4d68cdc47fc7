"""Z2 symmetry detection and qubit tapering."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pauli import DimensionError, PauliString, QubitOperator


def gf2_rref(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2) and the pivot column of each row."""
    m = (np.asarray(mat, dtype=np.uint8) % 2).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        hit = np.flatnonzero(m[r:, c])
        if hit.size == 0:
            continue
        p = r + hit[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        others = np.flatnonzero(m[:, c])
        for o in others:
            if o != r:
                m[o] ^= m[r]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def gf2_kernel(mat: np.ndarray) -> np.ndarray:
    """Basis of the right null space over GF(2), one vector per row."""
    mat = np.asarray(mat, dtype=np.uint8)
    n_cols = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(n_cols, dtype=np.uint8)
    rref, pivots = gf2_rref(mat)
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for f in free:
        v = np.zeros(n_cols, dtype=np.uint8)
        v[f] = 1
        for row, p in zip(rref, pivots):
            if row[f]:
                v[p] = 1
        basis.append(v)
    return np.array(basis, dtype=np.uint8).reshape(len(basis), n_cols)


def _bits(value: int, n: int) -> np.ndarray:
    return np.array([(value >> q) & 1 for q in range(n)], dtype=np.uint8)


def _int(bits) -> int:
    return int(sum(int(b) << q for q, b in enumerate(bits)))


@dataclass
class TaperingResult:
    symmetries: list[PauliString]
    paulis: list[PauliString]
    cliffords: list[QubitOperator]
    tapered_qubit_indices: list[int]
    n_qubits: int

    @property
    def sector_count(self) -> int:
        return 2 ** len(self.symmetries)

    def sectors(self) -> list[tuple[int, ...]]:
        k = len(self.symmetries)
        return [tuple((s >> i) & 1 for i in range(k)) for s in range(2 ** k)]

    def to_dict(self) -> dict:
        return {
            "symmetries": [p.label() for p in self.symmetries],
            "single_qubit_paulis": [p.label() for p in self.paulis],
            "tapered_qubit_indices": list(self.tapered_qubit_indices),
            "sector_count": self.sector_count,
        }


def find_symmetries(h: QubitOperator) -> TaperingResult:
    """Independent Pauli symmetries of ``h`` and the Cliffords that isolate them.

    Each generator ``tau`` is paired with a single-qubit Pauli ``sigma`` that
    anticommutes with it and commutes with all other generators;
    ``U = (sigma + tau) / sqrt(2)`` maps ``tau`` to ``sigma``. Pivots are
    chosen from the highest qubit index down.
    """
    n = h.n_qubits
    keys = [k for k in sorted(h.terms) if k != (0, 0)]
    # tau = (x_t, z_t) commutes with P iff x_t.z_P + z_t.x_P = 0
    check = np.array([np.concatenate([_bits(z, n), _bits(x, n)]) for x, z in keys], dtype=np.uint8)
    check = check.reshape(len(keys), 2 * n)
    kernel = gf2_kernel(check)
    if kernel.shape[0] == 0:
        return TaperingResult([], [], [], [], n)

    # column order: z bits high->low, then x bits high->low
    order = [("z", q) for q in reversed(range(n))] + [("x", q) for q in reversed(range(n))]
    vecs = np.array([
        [v[n + q] if kind == "z" else v[q] for kind, q in order] for v in kernel
    ], dtype=np.uint8)
    rref, pivots = gf2_rref(vecs)

    symmetries, paulis, tapered = [], [], []
    used_qubits: set[int] = set()
    for row, piv in zip(rref, pivots):
        kind, q = order[piv]
        if q in used_qubits:
            continue
        x = z = 0
        for (k2, q2), bit in zip(order, row):
            if bit:
                if k2 == "x":
                    x |= 1 << q2
                else:
                    z |= 1 << q2
        tau = PauliString(x, z, n)
        sigma = PauliString.single("X" if kind == "z" else "Z", q, n)
        symmetries.append(tau)
        paulis.append(sigma)
        tapered.append(q)
        used_qubits.add(q)

    cliffords = [
        (QubitOperator.from_pauli(s) + QubitOperator.from_pauli(t)) * (1 / np.sqrt(2))
        for s, t in zip(paulis, symmetries)
    ]
    return TaperingResult(symmetries, paulis, cliffords, sorted(tapered), n)


def _compress(value: int, drop: Sequence[int], n: int) -> int:
    out, pos = 0, 0
    for q in range(n):
        if q in drop:
            continue
        out |= ((value >> q) & 1) << pos
        pos += 1
    return out


def taper(h: QubitOperator, t: TaperingResult, sector: Sequence[int]) -> QubitOperator:
    """Project ``h`` onto a symmetry sector and drop the tapered qubits.

    ``sector[i] = b`` selects eigenvalue ``(-1)**b`` of ``t.symmetries[i]``.
    """
    if len(sector) != len(t.symmetries):
        raise DimensionError(f"sector has {len(sector)} bits, expected {len(t.symmetries)}")
    if h.n_qubits != t.n_qubits:
        raise DimensionError("Hamiltonian width differs from the tapering result")
    op = h
    for u in t.cliffords:
        op = u * op * u
    n = h.n_qubits
    drop = set(t.tapered_qubit_indices)
    out: dict[tuple[int, int], complex] = {}
    for (x, z), c in op.terms.items():
        for sigma, bit in zip(t.paulis, sector):
            q = sigma.support[0]
            on_x, on_z = (x >> q) & 1, (z >> q) & 1
            if sigma.x:  # sigma = X_q: term carries I or X on q
                if on_z:
                    raise ArithmeticError("transformed term does not commute with the tapering Pauli")
                if on_x and bit:
                    c = -c
            else:
                if on_x:
                    raise ArithmeticError("transformed term does not commute with the tapering Pauli")
                if on_z and bit:
                    c = -c
        mask = sum(1 << q for q in drop)
        key = (_compress(x & ~mask, drop, n), _compress(z & ~mask, drop, n))
        out[key] = out.get(key, 0.0) + c
    return QubitOperator(n - len(drop), out).simplify()


def reference_sector(t: TaperingResult, occupied: Sequence[int]) -> tuple[int, ...]:
    """Sector bits of a computational basis state, for Z-type generators."""
    state = sum(1 << q for q in occupied)
    bits = []
    for tau in t.symmetries:
        if tau.x:
            raise ValueError("reference sector is only defined for Z-type symmetries")
        bits.append((state & tau.z).bit_count() % 2)
    return tuple(bits)
