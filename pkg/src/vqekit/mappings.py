"""Fermion-to-qubit encodings.

Both transforms are instances of a linear binary encoding ``b = B n (mod 2)``
of occupation numbers ``n`` into qubit values ``b``. For such an encoding::

    a_j^+ = X_{U(j)} Z_{P(j)} (1 + Z_{S(j)}) / 2

where ``U(j)`` are the qubits storing ``n_j`` (column ``j`` of ``B``), ``P(j)``
the qubits whose parity equals that of modes ``< j``, and ``S(j)`` the qubits
whose parity equals ``n_j`` (row ``j`` of ``B^-1``). Jordan-Wigner uses
``B = I``; Bravyi-Kitaev uses the binary-tree matrix.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .fermion import FermionOperator
from .pauli import QubitOperator, product_phase, _PHASES


def _gf2_inverse(mat: np.ndarray) -> np.ndarray:
    n = mat.shape[0]
    aug = np.concatenate([mat.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col]), None)
        if pivot is None:
            raise ValueError("encoding matrix is singular over GF(2)")
        aug[[col, pivot]] = aug[[pivot, col]]
        for r in range(n):
            if r != col and aug[r, col]:
                aug[r] ^= aug[col]
    return aug[:, n:]


def bravyi_kitaev_matrix(n: int) -> np.ndarray:
    """Binary-tree encoding matrix truncated to ``n`` modes (rows are qubits)."""
    size = 1
    mat = np.ones((1, 1), dtype=np.uint8)
    while size < n:
        block = np.zeros((2 * size, 2 * size), dtype=np.uint8)
        block[:size, :size] = mat
        block[size:, size:] = mat
        block[2 * size - 1, :size] = 1
        mat, size = block, 2 * size
    return mat[:n, :n].copy()


def _mask(bits) -> int:
    return int(sum(1 << int(q) for q in np.flatnonzero(bits)))


@lru_cache(maxsize=64)
def _ladder_table(kind: str, n: int):
    """Per-mode Pauli expansions of a_j^+ and a_j as lists of (x, z, coeff)."""
    enc = np.eye(n, dtype=np.uint8) if kind == "jw" else bravyi_kitaev_matrix(n)
    inv = _gf2_inverse(enc)
    create, annihilate = [], []
    for j in range(n):
        u = _mask(enc[:, j])
        p = _mask(np.bitwise_xor.reduce(inv[:j], axis=0) if j else np.zeros(n, dtype=np.uint8))
        s = _mask(inv[j])
        # X^u Z^p and X^u Z^(p^s); convert X^x Z^z to sigma(x, z) = i^|x&z| X^x Z^z
        terms = []
        for z in (p, p ^ s):
            coeff = 0.5 * (-1j) ** ((u & z).bit_count() % 4)
            terms.append((u, z, coeff))
        create.append(tuple(terms))
        # sigma strings are Hermitian, so the adjoint only conjugates coefficients
        annihilate.append(tuple((u, z, complex(c).conjugate()) for u, z, c in terms))
    return tuple(create), tuple(annihilate)


def _transform(op: FermionOperator, kind: str, n_qubits: int | None) -> QubitOperator:
    n = n_qubits if n_qubits is not None else op.n_spin_orbitals
    if n < op.n_spin_orbitals:
        raise ValueError("fewer qubits than spin orbitals")
    create, annihilate = _ladder_table(kind, n)
    out: dict[tuple[int, int], complex] = {}
    cache: dict[tuple, dict] = {}
    for term, coeff in op.terms.items():
        partial = cache.get(term)
        if partial is None:
            partial = {(0, 0): 1.0 + 0j}
            prefix: tuple = ()
            for index, action in term:
                prefix = prefix + ((index, action),)
                if prefix in cache:
                    partial = cache[prefix]
                    continue
                ladder = create[index] if action else annihilate[index]
                nxt: dict[tuple[int, int], complex] = {}
                for (x1, z1), c1 in partial.items():
                    for x2, z2, c2 in ladder:
                        key = (x1 ^ x2, z1 ^ z2)
                        nxt[key] = nxt.get(key, 0.0) + c1 * c2 * _PHASES[product_phase(x1, z1, x2, z2)]
                partial = {k: v for k, v in nxt.items() if abs(v) > 1e-15}
                cache[prefix] = partial
        for key, c in partial.items():
            out[key] = out.get(key, 0.0) + coeff * c
    return QubitOperator(n, out).simplify()


def jordan_wigner(op: FermionOperator, n_qubits: int | None = None) -> QubitOperator:
    """Jordan-Wigner transform; qubit ``j`` holds spin orbital ``j``, Z-chains act on ``< j``."""
    return _transform(op, "jw", n_qubits)


def bravyi_kitaev(op: FermionOperator, n_qubits: int | None = None) -> QubitOperator:
    """Bravyi-Kitaev (binary-tree) transform."""
    return _transform(op, "bk", n_qubits)


MAPPINGS = {"jw": jordan_wigner, "bk": bravyi_kitaev}


def get_mapping(name: str):
    try:
        return MAPPINGS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown mapping {name!r}; expected one of {sorted(MAPPINGS)}") from None
