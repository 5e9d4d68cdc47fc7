"""Independent reference implementations used only by the tests."""

import itertools
from functools import reduce

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def kron_label(label: str) -> np.ndarray:
    """Dense matrix of a label written qubit 0 first, qubit 0 the least significant bit."""
    return reduce(np.kron, [PAULI[c] for c in reversed(label)], np.eye(1, dtype=complex))


def annihilator(n: int, j: int) -> np.ndarray:
    """a_j in the occupation basis: bit j of the index is n_j, sign from occupied modes below j."""
    dim = 1 << n
    a = np.zeros((dim, dim))
    for s in range(dim):
        if (s >> j) & 1:
            sign = (-1) ** bin(s & ((1 << j) - 1)).count("1")
            a[s ^ (1 << j), s] = sign
    return a


def fermion_hamiltonian_dense(core, h, g) -> np.ndarray:
    """Second-quantized H from spatial chemist integrals, built term by term in the occupation basis.

    Spin orbital 2p is alpha, 2p+1 beta.
    """
    n_sp = h.shape[0]
    n = 2 * n_sp
    a = [annihilator(n, j) for j in range(n)]
    ad = [m.T for m in a]
    H = core * np.eye(1 << n)
    for p, q in itertools.product(range(n_sp), repeat=2):
        for s in (0, 1):
            H += h[p, q] * ad[2 * p + s] @ a[2 * q + s]
    for p, q, r, t in itertools.product(range(n_sp), repeat=4):
        if g[p, q, r, t] == 0:
            continue
        for s1, s2 in itertools.product((0, 1), repeat=2):
            # 1/2 (pq|rs) a+_{p s1} a+_{r s2} a_{s s2} a_{q s1}
            H += 0.5 * g[p, q, r, t] * ad[2 * p + s1] @ ad[2 * r + s2] @ a[2 * t + s2] @ a[2 * q + s1]
    return H


def popcount_indices(n: int, weight: int) -> np.ndarray:
    return np.array([i for i in range(1 << n) if bin(i).count("1") == weight])


def gf2_rank(mat: np.ndarray) -> int:
    """Rank over GF(2) by elimination on Python ints (independent of the package's routine)."""
    rows = [int("".join(str(int(b)) for b in r), 2) for r in np.asarray(mat) % 2]
    rank = 0
    while rows:
        pivot = max(rows)
        if pivot == 0:
            break
        rows.remove(pivot)
        top = pivot.bit_length() - 1
        rows = [r ^ pivot if (r >> top) & 1 else r for r in rows]
        rank += 1
    return rank
