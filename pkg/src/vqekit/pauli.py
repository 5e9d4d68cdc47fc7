"""Pauli strings and weighted Pauli sums in bit-packed symplectic form.

A Pauli string on ``n`` qubits is stored as two integers ``x`` and ``z``;
bit ``q`` of each encodes the operator on qubit ``q``::

    (x, z) = (0, 0) -> I, (1, 0) -> X, (0, 1) -> Z, (1, 1) -> Y

Labels are written with qubit 0 leftmost, e.g. ``"XZIY"`` is X on qubit 0 and
Y on qubit 3.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

PRUNE_TOL = 1e-12

_LABEL_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_LABEL = {v: k for k, v in _LABEL_TO_BITS.items()}
_PHASES = (1, 1j, -1, -1j)


class DimensionError(ValueError):
    """Raised when operands act on registers of different width."""


def _popcount(v: int) -> int:
    return v.bit_count()


def product_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of ``i`` picked up by ``sigma(x1, z1) @ sigma(x2, z2)``.

    Uses ``sigma(x, z) = i**|x & z| X**x Z**z`` and ``Z**z X**x = (-1)**|z & x| X**x Z**z``.
    """
    x3, z3 = x1 ^ x2, z1 ^ z2
    return (_popcount(x1 & z1) + _popcount(x2 & z2) + 2 * _popcount(z1 & x2) - _popcount(x3 & z3)) % 4


@dataclass(frozen=True)
class PauliString:
    """A single Pauli string with an overall phase ``i**phase``."""

    x: int
    z: int
    n_qubits: int
    phase: int = 0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if self.x < 0 or self.z < 0 or self.x >= limit or self.z >= limit:
            raise DimensionError(f"bit masks do not fit in {self.n_qubits} qubits")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str, phase: int = 0) -> "PauliString":
        x = z = 0
        for q, ch in enumerate(label.upper()):
            try:
                bx, bz = _LABEL_TO_BITS[ch]
            except KeyError:
                raise ValueError(f"invalid Pauli character {ch!r} in {label!r}") from None
            x |= bx << q
            z |= bz << q
        return cls(x, z, len(label), phase)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(0, 0, n_qubits)

    @classmethod
    def single(cls, kind: str, qubit: int, n_qubits: int) -> "PauliString":
        bx, bz = _LABEL_TO_BITS[kind.upper()]
        return cls(bx << qubit, bz << qubit, n_qubits)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x, self.z)

    @property
    def phase_factor(self) -> complex:
        return _PHASES[self.phase]

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    @property
    def support(self) -> list[int]:
        mask = self.x | self.z
        return [q for q in range(self.n_qubits) if (mask >> q) & 1]

    def label(self) -> str:
        return "".join(
            _BITS_TO_LABEL[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n_qubits)
        )

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def commutes(self, other: "PauliString") -> bool:
        _check_width(self.n_qubits, other.n_qubits)
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        return multiply(self, other)

    def to_matrix(self) -> np.ndarray:
        """Dense ``2**n`` matrix including the phase; qubit 0 is the least significant bit."""
        dim = 1 << self.n_qubits
        idx = np.arange(dim)
        parity = np.zeros(dim, dtype=np.int64)
        z = self.z
        for q in range(self.n_qubits):
            if (z >> q) & 1:
                parity ^= (idx >> q) & 1
        diag = (1j ** _popcount(self.x & self.z)) * (1 - 2 * parity) * self.phase_factor
        mat = np.zeros((dim, dim), dtype=complex)
        mat[idx ^ self.x, idx] = diag
        return mat

    def __repr__(self) -> str:
        prefix = {0: "", 1: "i", 2: "-", 3: "-i"}[self.phase]
        return f"PauliString({prefix}{self.label()})"


def _check_width(a: int, b: int) -> None:
    if a != b:
        raise DimensionError(f"qubit counts differ: {a} vs {b}")


def multiply(p: PauliString, q: PauliString) -> PauliString:
    """Product ``p @ q`` with exact phase tracking."""
    _check_width(p.n_qubits, q.n_qubits)
    phase = p.phase + q.phase + product_phase(p.x, p.z, q.x, q.z)
    return PauliString(p.x ^ q.x, p.z ^ q.z, p.n_qubits, phase)


class QubitOperator:
    """Weighted sum of phase-normalized Pauli strings.

    Terms are stored as ``{(x, z): coefficient}``; phases of input strings are
    folded into the coefficients. Coefficients below ``PRUNE_TOL`` in modulus
    are dropped.
    """

    __slots__ = ("terms", "n_qubits", "_cache")

    def __init__(self, n_qubits: int, terms: Mapping[tuple[int, int], complex] | None = None):
        self.n_qubits = int(n_qubits)
        self.terms: dict[tuple[int, int], complex] = {}
        self._cache: dict = {}
        if terms:
            for key, coeff in terms.items():
                self._accumulate(key, coeff)
            self._prune()

    # construction ---------------------------------------------------------
    @classmethod
    def from_pauli(cls, pauli: PauliString, coeff: complex = 1.0) -> "QubitOperator":
        return cls(pauli.n_qubits, {pauli.key: coeff * pauli.phase_factor})

    @classmethod
    def from_label(cls, label: str, coeff: complex = 1.0) -> "QubitOperator":
        return cls.from_pauli(PauliString.from_label(label), coeff)

    @classmethod
    def from_labels(cls, pairs: Iterable[tuple[str, complex]]) -> "QubitOperator":
        pairs = list(pairs)
        if not pairs:
            raise ValueError("need at least one term to infer the width")
        n = len(pairs[0][0])
        op = cls(n)
        for label, coeff in pairs:
            p = PauliString.from_label(label)
            _check_width(n, p.n_qubits)
            op._accumulate(p.key, coeff)
        op._prune()
        return op

    @classmethod
    def constant(cls, n_qubits: int, value: complex) -> "QubitOperator":
        return cls(n_qubits, {(0, 0): value})

    def _accumulate(self, key, coeff) -> None:
        self.terms[key] = self.terms.get(key, 0.0) + coeff

    def _prune(self, tol: float = PRUNE_TOL) -> None:
        self.terms = {k: v for k, v in self.terms.items() if abs(v) >= tol}

    # inspection -----------------------------------------------------------
    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[tuple[PauliString, complex]]:
        for (x, z), c in self.terms.items():
            yield PauliString(x, z, self.n_qubits), c

    def items(self) -> Iterator[tuple[PauliString, complex]]:
        return iter(self)

    @property
    def constant_term(self) -> complex:
        return self.terms.get((0, 0), 0.0)

    def coefficient(self, label: str) -> complex:
        return self.terms.get(PauliString.from_label(label).key, 0.0)

    def sorted_terms(self) -> list[tuple[PauliString, complex]]:
        """Terms in lexicographic label order."""
        return sorted(self, key=lambda pc: pc[0].label())

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return all(abs(c.imag) <= tol for c in map(complex, self.terms.values()))

    def norm1(self) -> float:
        return float(sum(abs(c) for c in self.terms.values()))

    # algebra --------------------------------------------------------------
    def copy(self) -> "QubitOperator":
        return QubitOperator(self.n_qubits, self.terms)

    def __add__(self, other):
        if isinstance(other, (int, float, complex)):
            other = QubitOperator.constant(self.n_qubits, other)
        _check_width(self.n_qubits, other.n_qubits)
        out = QubitOperator(self.n_qubits, self.terms)
        for k, v in other.terms.items():
            out._accumulate(k, v)
        out._prune()
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return QubitOperator(self.n_qubits, {k: v * other for k, v in self.terms.items()})
        if isinstance(other, PauliString):
            other = QubitOperator.from_pauli(other)
        _check_width(self.n_qubits, other.n_qubits)
        out: dict[tuple[int, int], complex] = {}
        for (x1, z1), c1 in self.terms.items():
            for (x2, z2), c2 in other.terms.items():
                key = (x1 ^ x2, z1 ^ z2)
                out[key] = out.get(key, 0.0) + c1 * c2 * _PHASES[product_phase(x1, z1, x2, z2)]
        return QubitOperator(self.n_qubits, out)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def adjoint(self) -> "QubitOperator":
        return QubitOperator(self.n_qubits, {k: complex(v).conjugate() for k, v in self.terms.items()})

    def simplify(self, tol: float = PRUNE_TOL) -> "QubitOperator":
        """Drop small terms and chop small real or imaginary parts."""
        out = {}
        for k, v in self.terms.items():
            v = complex(v)
            re = v.real if abs(v.real) >= tol else 0.0
            im = v.imag if abs(v.imag) >= tol else 0.0
            if re or im:
                out[k] = complex(re, im)
        return QubitOperator(self.n_qubits, out)

    def real(self) -> "QubitOperator":
        """Hermitian part's coefficients as real floats (imaginary residues discarded)."""
        return QubitOperator(self.n_qubits, {k: complex(v).real for k, v in self.terms.items()})

    def equals(self, other: "QubitOperator", tol: float = 1e-10) -> bool:
        if self.n_qubits != other.n_qubits:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0) - other.terms.get(k, 0)) <= tol for k in keys)

    def commutes_with(self, pauli: PauliString) -> bool:
        return all(PauliString(x, z, self.n_qubits).commutes(pauli) for x, z in self.terms)

    # dense / sparse forms -------------------------------------------------
    def to_sparse(self):
        from scipy import sparse

        dim = 1 << self.n_qubits
        rows, cols, vals = [], [], []
        idx = np.arange(dim)
        for x, diag in compiled_terms(self):
            rows.append(idx ^ x)
            cols.append(idx)
            vals.append(diag)
        if not rows:
            return sparse.csr_matrix((dim, dim), dtype=complex)
        return sparse.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    # serialization --------------------------------------------------------
    def to_json_list(self) -> list[dict]:
        return [
            {"pauli": p.label(), "coeff": [float(complex(c).real), float(complex(c).imag)]}
            for p, c in self.sorted_terms()
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_json_list())

    @classmethod
    def from_json_list(cls, items: list[dict], n_qubits: int | None = None) -> "QubitOperator":
        if not items:
            if n_qubits is None:
                raise ValueError("empty term list needs an explicit n_qubits")
            return cls(n_qubits)
        pairs = []
        for item in items:
            re, im = item["coeff"]
            pairs.append((item["pauli"], complex(re, im)))
        return cls.from_labels(pairs)

    @classmethod
    def from_json(cls, text: str) -> "QubitOperator":
        return cls.from_json_list(json.loads(text))

    def __repr__(self) -> str:
        body = " + ".join(f"({complex(c):.6g}) {p.label()}" for p, c in self.sorted_terms()[:6])
        more = "" if len(self) <= 6 else f" + ... ({len(self)} terms)"
        return f"QubitOperator[{self.n_qubits}]({body}{more})"


def parity_signs(n_qubits: int, z: int) -> np.ndarray:
    """(-1)**popcount(i & z) for every basis index ``i``."""
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    parity = np.zeros_like(idx)
    for q in range(n_qubits):
        if (z >> q) & 1:
            parity ^= (idx >> q) & 1
    return (1 - 2 * parity).astype(float)


def compiled_terms(op: QubitOperator) -> list[tuple[int, np.ndarray]]:
    """Group terms by X-mask; for each, the vector ``d`` with ``op = sum_x X^x diag(d_x)``-form.

    Acting on a basis state, ``sigma(x, z)|i> = i**|x&z| (-1)**|i&z| |i ^ x>``, so the
    contribution of all terms sharing ``x`` is a single permutation times a diagonal.
    Cached on the operator.
    """
    cached = op._cache.get("compiled")
    if cached is not None:
        return cached
    n = op.n_qubits
    by_x: dict[int, np.ndarray] = {}
    for (x, z), c in sorted(op.terms.items()):
        vec = parity_signs(n, z) * (c * (1j ** _popcount(x & z)))
        if x in by_x:
            by_x[x] = by_x[x] + vec
        else:
            by_x[x] = vec.astype(complex)
    out = sorted(by_x.items())
    op._cache["compiled"] = out
    return out
