"""Statevector simulation, shot sampling, energy estimation and the exact-diagonalization oracle.

Basis index bit ``q`` holds qubit ``q`` (qubit 0 is the least significant
bit). Bitstrings in histograms are written with qubit 0 first, matching
Pauli labels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ansatz import Circuit, Gate
from .pauli import DimensionError, PauliString, QubitOperator, compiled_terms, parity_signs

DEFAULT_QUBIT_CAP = 20
DENSE_LIMIT = 12


class ResourceError(RuntimeError):
    """Requested computation exceeds the configured size cap."""


class CoverageError(ValueError):
    """Measurement groups do not cover every Hamiltonian term."""


class UnsupportedGateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# statevector

class Statevector:
    """Owned ``2**n`` complex amplitude vector."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes, n_qubits: int | None = None):
        amps = np.asarray(amplitudes, dtype=complex)
        n = int(round(math.log2(amps.size))) if n_qubits is None else n_qubits
        if amps.ndim != 1 or amps.size != 1 << n:
            raise DimensionError(f"statevector of length {amps.size} does not match {n} qubits")
        self.amplitudes = amps
        self.n_qubits = n

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        return cls.basis(n_qubits, ())

    @classmethod
    def basis(cls, n_qubits: int, ones: Iterable[int]) -> "Statevector":
        amps = np.zeros(1 << n_qubits, dtype=complex)
        amps[sum(1 << q for q in ones)] = 1.0
        return cls(amps, n_qubits)

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.n_qubits)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def fidelity(self, other: "Statevector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def hamming_weight_leakage(self, weight: int) -> float:
        """Total probability outside the fixed-Hamming-weight subspace."""
        p = self.probabilities()
        return float(p[_popcounts(self.n_qubits) != weight].sum())

    def __repr__(self) -> str:
        return f"Statevector(n_qubits={self.n_qubits})"


@lru_cache(maxsize=32)
def _popcounts(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(idx)
    for q in range(n):
        out += (idx >> q) & 1
    out.setflags(write=False)
    return out


def reference_state(circuit: Circuit) -> Statevector:
    return Statevector.basis(circuit.n_qubits, circuit.reference)


# ---------------------------------------------------------------------------
# gate kernels (operate on flat arrays, return a new array)

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)


def single_qubit_matrix(kind: str, angle: float = 0.0) -> np.ndarray:
    if kind == "H":
        return _H
    if kind == "X":
        return _X
    if kind == "S":
        return _S
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "RZ":
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]])
    raise UnsupportedGateError(f"{kind} is not a single-qubit gate")


def _apply_1q(psi: np.ndarray, n: int, q: int, m: np.ndarray) -> np.ndarray:
    v = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    out = np.empty_like(v)
    v0, v1 = v[:, 0, :], v[:, 1, :]
    out[:, 0, :] = m[0, 0] * v0 + m[0, 1] * v1
    out[:, 1, :] = m[1, 0] * v0 + m[1, 1] * v1
    return out.reshape(-1)


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def _apply_cnot(psi: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    t = psi.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    idx[_axis(n, control)] = 1
    sub = t[tuple(idx)]
    at = _axis(n, target)
    if at > _axis(n, control):
        at -= 1
    t[tuple(idx)] = np.flip(sub, axis=at)
    return t.reshape(-1)


def _apply_cz(psi: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    t = psi.reshape((2,) * n).copy()
    idx = [slice(None)] * n
    idx[_axis(n, a)] = 1
    idx[_axis(n, b)] = 1
    t[tuple(idx)] *= -1
    return t.reshape(-1)


def _apply_givens(psi: np.ndarray, n: int, i: int, j: int, angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    t = psi.reshape((2,) * n).copy()
    ia, ja = _axis(n, i), _axis(n, j)
    one_zero = [slice(None)] * n
    zero_one = [slice(None)] * n
    one_zero[ia], one_zero[ja] = 1, 0
    zero_one[ia], zero_one[ja] = 0, 1
    a = t[tuple(one_zero)].copy()
    b = t[tuple(zero_one)].copy()
    t[tuple(one_zero)] = c * a - s * b
    t[tuple(zero_one)] = s * a + c * b
    return t.reshape(-1)


@lru_cache(maxsize=4096)
def _pauli_action(n: int, x: int, z: int):
    """Gather index and factors so that ``(P psi)[j] = f[j] * psi[j ^ x]``."""
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ x
    f = (1j ** (bin(x & z).count("1") % 4)) * parity_signs(n, z)[src]
    src.setflags(write=False)
    f.setflags(write=False)
    return src, f


def apply_pauli(psi: np.ndarray, n: int, pauli: PauliString) -> np.ndarray:
    src, f = _pauli_action(n, pauli.x, pauli.z)
    return pauli.phase_factor * f * psi[src]


def _apply_exp_pauli(psi: np.ndarray, n: int, pauli: PauliString, angle: float) -> np.ndarray:
    if pauli.phase % 2:
        raise UnsupportedGateError("ExpPauli needs a Hermitian Pauli string")
    return math.cos(angle / 2) * psi - 1j * math.sin(angle / 2) * apply_pauli(psi, n, pauli)


def apply_gate(psi: np.ndarray, n: int, gate: Gate, theta: Sequence[float] = ()) -> np.ndarray:
    kind = gate.kind
    if kind in ("CNOT", "CZ", "Givens"):
        a, b = gate.qubits
        if kind == "CNOT":
            return _apply_cnot(psi, n, a, b)
        if kind == "CZ":
            return _apply_cz(psi, n, a, b)
        return _apply_givens(psi, n, a, b, gate.resolved_angle(theta))
    if kind == "ExpPauli":
        return _apply_exp_pauli(psi, n, gate.pauli, gate.resolved_angle(theta))
    m = single_qubit_matrix(kind, gate.resolved_angle(theta))
    return _apply_1q(psi, n, gate.qubits[0], m)


def apply(circuit: Circuit, theta: Sequence[float] = (), state: Statevector | None = None) -> Statevector:
    """Run ``circuit`` at parameters ``theta``.

    When ``state`` is omitted the circuit's reference basis state is prepared
    first; otherwise ``state`` is taken as the input and left unmodified.
    """
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.size != circuit.n_parameters:
        raise DimensionError(f"expected {circuit.n_parameters} parameters, got {theta.size}")
    if state is None:
        state = reference_state(circuit)
    elif state.n_qubits != circuit.n_qubits:
        raise DimensionError(f"state has {state.n_qubits} qubits, circuit has {circuit.n_qubits}")
    n = circuit.n_qubits
    psi = state.amplitudes
    for g in circuit.gates:
        psi = apply_gate(psi, n, g, theta)
    return Statevector(psi if psi is not state.amplitudes else psi.copy(), n)


def circuit_unitary(circuit: Circuit, theta: Sequence[float] = ()) -> np.ndarray:
    """Dense unitary (columns are images of basis states); small circuits only."""
    n = circuit.n_qubits
    cols = []
    for k in range(1 << n):
        e = np.zeros(1 << n, dtype=complex)
        e[k] = 1.0
        cols.append(apply(circuit, theta, Statevector(e, n)).amplitudes)
    return np.array(cols).T


# ---------------------------------------------------------------------------
# expectation values

def _check_hermitian(h: QubitOperator) -> None:
    if not h.is_hermitian():
        raise ValueError("expectation values need a Hermitian operator")


def expectation(state: Statevector, h: QubitOperator) -> float:
    """``<psi|H|psi>`` from X-mask groups, without forming a matrix."""
    if state.n_qubits != h.n_qubits:
        raise DimensionError(f"state has {state.n_qubits} qubits, operator has {h.n_qubits}")
    _check_hermitian(h)
    psi = state.amplitudes
    idx = np.arange(psi.size)
    total = 0.0 + 0.0j
    for x, diag in compiled_terms(h):
        total += np.vdot(psi[idx ^ x] if x else psi, diag * psi)
    return float(total.real)


def apply_operator(h: QubitOperator, psi: np.ndarray) -> np.ndarray:
    idx = np.arange(psi.size)
    out = np.zeros_like(psi)
    for x, diag in compiled_terms(h):
        out[idx ^ x] += diag * psi
    return out


# ---------------------------------------------------------------------------
# histograms and sampling

def index_to_bitstring(index: int, n: int) -> str:
    return "".join("1" if (index >> q) & 1 else "0" for q in range(n))


def bitstring_to_index(bits: str) -> int:
    return sum(1 << q for q, ch in enumerate(bits) if ch == "1")


@dataclass
class Histogram:
    """Measurement outcomes in one basis setting.

    ``counts`` holds integer counts when ``shots`` is set, or probabilities
    for an exact (infinite-shot) distribution when ``shots`` is ``None``.
    """

    counts: dict[str, float]
    shots: int | None
    basis: str = "Z"

    def __post_init__(self):
        widths = {len(b) for b in self.counts}
        if len(widths) > 1:
            raise DimensionError("bitstrings in a histogram must share one width")
        if any(set(b) - {"0", "1"} for b in self.counts):
            raise ValueError("bitstrings may only contain 0 and 1")
        if any(v < 0 for v in self.counts.values()):
            raise ValueError("histogram entries must be non-negative")
        if self.shots is not None:
            total = sum(self.counts.values())
            if abs(total - self.shots) > 1e-9 * max(1, self.shots):
                raise ValueError(f"counts sum to {total}, expected {self.shots} shots")

    @property
    def n_qubits(self) -> int:
        return len(next(iter(self.counts))) if self.counts else 0

    @property
    def total(self) -> float:
        return float(sum(self.counts.values()))

    def probabilities(self) -> dict[str, float]:
        t = self.total
        return {b: v / t for b, v in self.counts.items()} if t else {}

    def as_arrays(self):
        """Basis indices and probabilities, in sorted bitstring order."""
        keys = sorted(self.counts)
        p = np.array([self.counts[k] for k in keys], dtype=float)
        return np.array([bitstring_to_index(k) for k in keys], dtype=np.int64), p / p.sum()

    def to_dict(self) -> dict:
        counts = {k: (int(v) if self.shots is not None else float(v)) for k, v in sorted(self.counts.items())}
        return {"basis": self.basis, "shots": self.shots, "counts": counts}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: Mapping) -> "Histogram":
        return cls(dict(d["counts"]), d.get("shots"), d.get("basis", "Z"))

    @classmethod
    def from_json(cls, text: str) -> "Histogram":
        return cls.from_dict(json.loads(text))


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based Philox generator keyed by ``seed`` and an optional stream path."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def _rotated(state: Statevector, rotation: Circuit | None) -> Statevector:
    if rotation is None or not rotation.gates:
        return state
    return apply(rotation, np.zeros(rotation.n_parameters), state)


def exact_distribution(state: Statevector, rotation: Circuit | None = None, basis: str = "Z",
                       cutoff: float = 0.0) -> Histogram:
    p = _rotated(state, rotation).probabilities()
    n = state.n_qubits
    nz = np.flatnonzero(p > cutoff)
    return Histogram({index_to_bitstring(int(i), n): float(p[i]) for i in nz}, None, basis)


def sample(state: Statevector, rotation: Circuit | None, shots: int, seed: int, basis: str = "Z",
           rng: np.random.Generator | None = None) -> Histogram:
    """Draw ``shots`` Born-rule samples after applying ``rotation``."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p = _rotated(state, rotation).probabilities()
    p = p / p.sum()
    rng = rng if rng is not None else make_rng(seed)
    counts = rng.multinomial(shots, p)
    n = state.n_qubits
    return Histogram({index_to_bitstring(int(i), n): int(counts[i]) for i in np.flatnonzero(counts)}, shots, basis)


# ---------------------------------------------------------------------------
# measurement groups

@dataclass
class MeasurementGroup:
    """Terms read out together after ``rotation``.

    ``readout`` maps each covered Hamiltonian term key to a list of
    ``(z_mask, weight)`` pairs: after the rotation the term's coefficient
    times ``<P>`` equals ``sum weight * <Z^z_mask>``.
    """

    basis: str
    rotation: Circuit
    readout: dict[tuple[int, int], list[tuple[int, float]]] = field(default_factory=dict)

    @property
    def keys(self) -> set[tuple[int, int]]:
        return set(self.readout)

    def to_dict(self) -> dict:
        n = self.rotation.n_qubits
        return {"basis": self.basis, "terms": sorted(PauliString(x, z, n).label() for x, z in self.readout)}


def _qwc_rotation(n: int, basis: list[str]) -> Circuit:
    gates = []
    for q, b in enumerate(basis):
        if b == "X":
            gates.append(Gate("H", (q,)))
        elif b == "Y":
            gates.append(Gate("RX", (q,), angle=math.pi / 2))
    return Circuit(n, tuple(gates), 0)


def qubitwise_groups(h: QubitOperator) -> list[MeasurementGroup]:
    """Greedy qubit-wise-commuting grouping in lexicographic term order."""
    n = h.n_qubits
    groups: list[tuple[list[str], list]] = []
    for pauli, c in h.sorted_terms():
        if pauli.is_identity():
            continue
        label = pauli.label()
        for basis, members in groups:
            if all(a == "I" or b in ("I", a) for a, b in zip(label, basis)):
                for q, a in enumerate(label):
                    if a != "I":
                        basis[q] = a
                members.append((pauli, c))
                break
        else:
            groups.append(([ch if ch != "I" else "I" for ch in label], [(pauli, c)]))
    out = []
    for basis, members in groups:
        readout = {p.key: [(p.x | p.z, float(complex(c).real))] for p, c in members}
        out.append(MeasurementGroup("".join(b if b != "I" else "Z" for b in basis),
                                    _qwc_rotation(n, basis), readout))
    return out


def _round_robin(n: int) -> list[list[tuple[int, int]]]:
    """Rounds of disjoint pairs covering every unordered pair of ``range(n)`` once."""
    players = list(range(n)) + ([None] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a is not None and b is not None:
                pairs.append((min(a, b), max(a, b)))
        rounds.append(sorted(pairs))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


def pair_hopping_groups(h: QubitOperator) -> list[MeasurementGroup]:
    """Groups for operators made of Z strings plus ``XX + YY`` pair hoppings.

    One Z-basis group covers the diagonal; each round of disjoint pairs is
    measured after ``Givens(-pi/2)`` on every pair, which maps
    ``(X_p X_q + Y_p Y_q)/2`` to ``(Z_q - Z_p)/2``. These rotations conserve
    Hamming weight, so symmetry post-selection stays valid in every setting.
    """
    n = h.n_qubits
    diag, hops = {}, {}
    for (x, z), c in h.terms.items():
        c = float(complex(c).real)
        if x == 0:
            if z:
                diag[(x, z)] = [(z, c)]
            continue
        pauli = PauliString(x, z, n)
        sup = pauli.support
        label = "".join(pauli.label()[q] for q in sup)
        if len(sup) != 2 or label not in ("XX", "YY"):
            raise ValueError(f"term {pauli.label()} is not a pair hopping")
        hops.setdefault(tuple(sup), {})[label] = ((x, z), c)
    for pair, d in hops.items():
        if set(d) != {"XX", "YY"} or abs(d["XX"][1] - d["YY"][1]) > 1e-12:
            raise ValueError(f"hopping on {pair} lacks matching XX and YY coefficients")
    groups = []
    if diag:
        groups.append(MeasurementGroup("Z" * n, Circuit(n, (), 0), diag))
    for rnd in _round_robin(n):
        active = [p for p in rnd if p in hops]
        if not active:
            continue
        gates, readout = [], {}
        for p, q in active:
            gates.append(Gate("Givens", (p, q), angle=-math.pi / 2))
            zp, zq = 1 << p, 1 << q
            for label in ("XX", "YY"):
                key, c = hops[(p, q)][label]
                # c (XX + YY) = 2c * (Z_q - Z_p)/2 after rotation, split over the two keys
                readout[key] = [(zq, 0.5 * c), (zp, -0.5 * c)]
        basis = "givens:" + ",".join(f"{p}-{q}" for p, q in active)
        groups.append(MeasurementGroup(basis, Circuit(n, tuple(gates), 0), readout))
    return groups


def measurement_groups(h: QubitOperator, strategy: str = "auto") -> list[MeasurementGroup]:
    """``"qwc"``, ``"pairs"`` or ``"auto"`` (pairs when the operator allows it)."""
    if strategy == "qwc":
        return qubitwise_groups(h)
    if strategy == "pairs":
        return pair_hopping_groups(h)
    try:
        return pair_hopping_groups(h)
    except ValueError:
        return qubitwise_groups(h)


# ---------------------------------------------------------------------------
# energy estimation

@dataclass(frozen=True)
class EnergyEstimate:
    value: float
    std_error: float
    shots_used: int

    def to_dict(self) -> dict:
        return {"value": self.value, "std_error": self.std_error, "shots_used": self.shots_used}


def group_statistics(hist: Histogram, group: MeasurementGroup) -> tuple[float, float]:
    """Mean of the group's summed observable and the standard error of that mean."""
    if not hist.counts:
        raise ValueError("empty histogram")
    idx, p = hist.as_arrays()
    values = np.zeros(idx.size)
    for pieces in group.readout.values():
        for mask, w in pieces:
            par = np.zeros(idx.size, dtype=np.int64)
            m = mask
            q = 0
            while m:
                if m & 1:
                    par ^= (idx >> q) & 1
                m >>= 1
                q += 1
            values += w * (1 - 2 * par)
    mean = float(np.dot(p, values))
    if hist.shots is None:
        return mean, 0.0
    n_eff = hist.total
    var = max(float(np.dot(p, values ** 2)) - mean ** 2, 0.0)
    return mean, math.sqrt(var / n_eff) if n_eff > 0 else 0.0


def estimate_energy(measurements: Sequence[tuple[Histogram, MeasurementGroup]], h: QubitOperator) -> EnergyEstimate:
    """Sum of group means plus the constant; sigma is the root-sum-square of group errors."""
    covered: set = set()
    for _, g in measurements:
        dup = covered & g.keys
        if dup:
            raise CoverageError(f"{len(dup)} terms are measured in more than one group")
        covered |= g.keys
    needed = {k for k in h.terms if k != (0, 0)}
    missing = needed - covered
    if missing:
        n = h.n_qubits
        sample_label = PauliString(*sorted(missing)[0], n).label()
        raise CoverageError(f"{len(missing)} Hamiltonian terms are not measured (e.g. {sample_label})")
    extra = covered - needed
    if extra:
        raise CoverageError("measurement groups contain terms absent from the Hamiltonian")
    value = float(complex(h.constant_term).real)
    var = 0.0
    shots = 0
    for hist, g in measurements:
        mean, err = group_statistics(hist, g)
        value += mean
        var += err ** 2
        shots += int(hist.total) if hist.shots is not None else 0
    return EnergyEstimate(value, math.sqrt(var), shots)


def measure(state: Statevector, groups: Sequence[MeasurementGroup], shots: int | None, seed: int = 0):
    """One histogram per group; ``shots=None`` yields exact distributions."""
    out = []
    for k, g in enumerate(groups):
        if shots is None:
            out.append((exact_distribution(state, g.rotation, g.basis), g))
        else:
            out.append((sample(state, g.rotation, shots, seed, g.basis, rng=make_rng(seed, k)), g))
    return out


def sampled_energy(state: Statevector, h: QubitOperator, shots: int | None, seed: int = 0,
                   groups: Sequence[MeasurementGroup] | None = None) -> EnergyEstimate:
    groups = measurement_groups(h) if groups is None else groups
    return estimate_energy(measure(state, groups, shots, seed), h)


# ---------------------------------------------------------------------------
# exact diagonalization

def sector_indices(n_qubits: int, weight: int | None) -> np.ndarray:
    if weight is None:
        return np.arange(1 << n_qubits)
    if not 0 <= weight <= n_qubits:
        raise ValueError(f"sector weight {weight} outside 0..{n_qubits}")
    return np.flatnonzero(_popcounts(n_qubits) == weight)


def sector_matrix(h: QubitOperator, weight: int | None = None):
    """Sparse matrix of ``h`` restricted to a Hamming-weight sector.

    Phases are evaluated on the sector's basis states only, so memory scales
    with the sector dimension rather than ``2**n``.
    """
    from scipy import sparse

    n = h.n_qubits
    keep = sector_indices(n, weight)
    pos = np.full(1 << n, -1, dtype=np.int64)
    pos[keep] = np.arange(keep.size)
    bits = ((keep[:, None] >> np.arange(n)) & 1).astype(np.int64)
    by_x: dict[int, list[tuple[int, complex]]] = {}
    for (x, z), c in sorted(h.terms.items()):
        by_x.setdefault(x, []).append((z, c * (1j ** bin(x & z).count("1"))))
    rows, cols, vals = [], [], []
    for x, members in sorted(by_x.items()):
        tgt = pos[keep ^ x]
        ok = np.flatnonzero(tgt >= 0)
        if ok.size == 0:
            continue
        zbits = ((np.array([z for z, _ in members], dtype=np.int64)[:, None] >> np.arange(n)) & 1)
        signs = 1 - 2 * ((bits[ok] @ zbits.T) & 1)
        diag = signs @ np.array([c for _, c in members], dtype=complex)
        rows.append(tgt[ok])
        cols.append(ok)
        vals.append(diag)
    if not rows:
        return sparse.csr_matrix((keep.size, keep.size), dtype=complex)
    return sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(keep.size, keep.size))


def exact_ground_energy(h: QubitOperator, particle_sector: int | None = None,
                        qubit_cap: int = DEFAULT_QUBIT_CAP) -> float:
    """Lowest eigenvalue, optionally within a fixed Hamming-weight sector."""
    n = h.n_qubits
    if n > qubit_cap:
        raise ResourceError(f"{n} qubits exceeds the exact-diagonalization cap of {qubit_cap}")
    _check_hermitian(h)
    mat = sector_matrix(h, particle_sector)
    dim = mat.shape[0]
    if n < DENSE_LIMIT or dim <= 64:
        return float(np.linalg.eigvalsh(mat.toarray())[0])
    from scipy.sparse.linalg import eigsh

    v0 = np.ones(dim) / math.sqrt(dim)
    mat = mat.real if not np.any(mat.imag.data) else mat
    vals = eigsh(mat, k=1, which="SA", v0=v0, tol=1e-9)[0]
    return float(vals[0])


def exact_spectrum(h: QubitOperator, particle_sector: int | None = None) -> np.ndarray:
    if h.n_qubits >= DENSE_LIMIT:
        raise ResourceError("full spectra are limited to fewer than 12 qubits")
    return np.linalg.eigvalsh(sector_matrix(h, particle_sector).toarray())
