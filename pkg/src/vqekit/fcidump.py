"""Reading and writing molecular integrals in the FCIDUMP text format."""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DUPLICATE_TOL = 1e-10


class FcidumpFormatError(ValueError):
    """Malformed header or record."""


class FcidumpRangeError(ValueError):
    """Orbital index outside ``[1, NORB]``."""


class FcidumpConsistencyError(ValueError):
    """Two records for symmetry-equivalent indices disagree."""


@dataclass(eq=False)
class MolecularIntegrals:
    """Core energy, one-body matrix and chemist-notation two-body tensor (Hartree).

    ``two_body[i, j, k, l]`` is ``(ij|kl)``. Orbitals are expected in canonical
    Hartree-Fock energy order.
    """

    n_orbitals: int
    n_electrons: int
    ms2: int
    core_energy: float
    one_body: np.ndarray
    two_body: np.ndarray
    orbital_energies: np.ndarray | None = None
    elements: tuple[str, ...] | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.one_body = np.asarray(self.one_body, dtype=float)
        self.two_body = np.asarray(self.two_body, dtype=float)
        if self.orbital_energies is not None:
            self.orbital_energies = np.asarray(self.orbital_energies, dtype=float)
        if self.elements is not None:
            self.elements = tuple(self.elements)

    @property
    def n_alpha(self) -> int:
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self) -> int:
        return (self.n_electrons - self.ms2) // 2

    def validate(self, tol: float = 1e-12) -> None:
        n = self.n_orbitals
        if self.one_body.shape != (n, n) or self.two_body.shape != (n, n, n, n):
            raise ValueError("integral shapes do not match n_orbitals")
        if not 0 < self.n_electrons <= 2 * n:
            raise ValueError(f"n_electrons={self.n_electrons} outside (0, {2 * n}]")
        if (self.n_electrons - self.ms2) % 2:
            raise ValueError("n_electrons and ms2 must have equal parity")
        if not np.allclose(self.one_body, self.one_body.T, atol=tol, rtol=0):
            raise ValueError("one-body integrals are not symmetric")
        g = self.two_body
        for perm in ((1, 0, 2, 3), (0, 1, 3, 2), (2, 3, 0, 1)):
            if not np.allclose(g, g.transpose(perm), atol=tol, rtol=0):
                raise ValueError("two-body integrals lack 8-fold permutation symmetry")

    def __eq__(self, other) -> bool:
        if not isinstance(other, MolecularIntegrals):
            return NotImplemented
        same_eps = (self.orbital_energies is None) == (other.orbital_energies is None) and (
            self.orbital_energies is None or np.array_equal(self.orbital_energies, other.orbital_energies)
        )
        return (
            self.n_orbitals == other.n_orbitals
            and self.n_electrons == other.n_electrons
            and self.ms2 == other.ms2
            and self.core_energy == other.core_energy
            and np.array_equal(self.one_body, other.one_body)
            and np.array_equal(self.two_body, other.two_body)
            and same_eps
            and self.elements == other.elements
        )


def _parse_header(text: str, first_line: int) -> dict[str, list[str]]:
    body = re.sub(r"^\s*&\s*FCI", "", text, flags=re.IGNORECASE)
    body = re.sub(r"(&\s*END|/)\s*$", "", body.strip(), flags=re.IGNORECASE)
    pieces = re.split(r"([A-Za-z_]+)\s*=", body)
    if pieces[0].strip(" ,"):
        raise FcidumpFormatError(f"line {first_line}: unexpected header text {pieces[0].strip()!r}")
    values: dict[str, list[str]] = {}
    for key, raw in zip(pieces[1::2], pieces[2::2]):
        values[key.upper()] = [tok for tok in re.split(r"[,\s]+", raw.strip()) if tok]
    for required in ("NORB", "NELEC"):
        if required not in values or not values[required]:
            raise FcidumpFormatError(f"line {first_line}: header is missing {required}")
    return values


def _symmetric_two_body_keys(i, j, k, l):
    return {
        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
    }


def parse_fcidump(stream) -> MolecularIntegrals:
    """Parse FCIDUMP text (a string or a readable text stream).

    Records are ``value i j k l`` with 1-based indices: ``(ij|kl)`` when all four
    are nonzero, ``h_ij`` when ``k = l = 0``, an orbital energy when additionally
    ``j = 0``, and the core energy when all are zero. A comment of the form
    ``! ELEMENTS=C,H,H,H,F`` records the atoms for frozen-core selection; other
    ``!`` lines are ignored.
    """
    text = stream if isinstance(stream, str) else stream.read()
    lines = text.splitlines()

    elements = None
    header_lines: list[str] = []
    header_start = None
    pos = 0
    while pos < len(lines):
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        if line.startswith("!"):
            m = re.match(r"!\s*ELEMENTS\s*=\s*(.+)", line, flags=re.IGNORECASE)
            if m:
                elements = tuple(s for s in re.split(r"[,\s]+", m.group(1).strip()) if s)
            continue
        if header_start is None:
            if not re.match(r"&\s*FCI", line, flags=re.IGNORECASE):
                raise FcidumpFormatError(f"line {pos}: expected '&FCI' namelist header, got {line!r}")
            header_start = pos
        header_lines.append(line)
        if re.search(r"(&\s*END|/)\s*$", line, flags=re.IGNORECASE):
            break
    else:
        raise FcidumpFormatError(f"line {header_start or 1}: header not terminated by &END or /")

    header = _parse_header(" ".join(header_lines), header_start)
    try:
        norb = int(header["NORB"][0])
        nelec = int(header["NELEC"][0])
        ms2 = int(header.get("MS2", ["0"])[0])
    except ValueError as exc:
        raise FcidumpFormatError(f"line {header_start}: non-integer header value ({exc})") from None

    one = np.zeros((norb, norb))
    two = np.zeros((norb, norb, norb, norb))
    eps = np.zeros(norb)
    eps_seen = False
    core = 0.0
    core_seen = False
    seen_one: dict[tuple[int, int], float] = {}
    seen_two: dict[tuple[int, int, int, int], float] = {}

    for lineno in range(pos, len(lines)):
        line = lines[lineno].strip()
        if not line or line.startswith("!"):
            continue
        parts = line.replace("D", "E").replace("d", "e").split()
        if len(parts) != 5:
            raise FcidumpFormatError(f"line {lineno + 1}: expected 'value i j k l', got {line!r}")
        try:
            value = float(parts[0])
            i, j, k, l = (int(p) for p in parts[1:])
        except ValueError:
            raise FcidumpFormatError(f"line {lineno + 1}: cannot parse record {line!r}") from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise FcidumpRangeError(f"line {lineno + 1}: index {idx} outside [1, {norb}]")

        if i == j == k == l == 0:
            if core_seen and abs(core - value) > DUPLICATE_TOL:
                raise FcidumpConsistencyError(f"line {lineno + 1}: conflicting core energy")
            core, core_seen = value, True
        elif k == 0 and l == 0 and j == 0:
            eps[i - 1] = value
            eps_seen = True
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise FcidumpRangeError(f"line {lineno + 1}: one-body index 0")
            key = (min(i, j) - 1, max(i, j) - 1)
            if key in seen_one and abs(seen_one[key] - value) > DUPLICATE_TOL:
                raise FcidumpConsistencyError(f"line {lineno + 1}: conflicting h{key}")
            seen_one[key] = value
            one[i - 1, j - 1] = one[j - 1, i - 1] = value
        else:
            if 0 in (i, j, k, l):
                raise FcidumpRangeError(f"line {lineno + 1}: two-body index 0")
            keys = _symmetric_two_body_keys(i - 1, j - 1, k - 1, l - 1)
            canon = min(keys)
            if canon in seen_two and abs(seen_two[canon] - value) > DUPLICATE_TOL:
                raise FcidumpConsistencyError(
                    f"line {lineno + 1}: conflicting value for ({i}{j}|{k}{l})"
                )
            seen_two[canon] = value
            for key in keys:
                two[key] = value

    mi = MolecularIntegrals(
        n_orbitals=norb,
        n_electrons=nelec,
        ms2=ms2,
        core_energy=core,
        one_body=one,
        two_body=two,
        orbital_energies=eps if eps_seen else None,
        elements=elements,
    )
    mi.validate()
    return mi


def _fmt(value: float) -> str:
    return f"{value: .16e}"


def write_fcidump(mi: MolecularIntegrals, stream=None) -> str:
    """Serialize to FCIDUMP text; zero entries are omitted. Returns the text."""
    n = mi.n_orbitals
    out = io.StringIO()
    if mi.elements:
        out.write(f"! ELEMENTS={','.join(mi.elements)}\n")
    out.write(f" &FCI NORB={n},NELEC={mi.n_electrons},MS2={mi.ms2},\n")
    out.write("  ORBSYM=" + ",".join("1" for _ in range(n)) + ",\n")
    out.write("  ISYM=1,\n &END\n")
    g = mi.two_body
    pairs = [(i, j) for i in range(n) for j in range(i + 1)]
    for ij, (i, j) in enumerate(pairs):
        for k, l in pairs[: ij + 1]:
            value = g[i, j, k, l]
            if value != 0.0:
                out.write(f"{_fmt(value)} {i + 1:4d} {j + 1:4d} {k + 1:4d} {l + 1:4d}\n")
    h = mi.one_body
    for i in range(n):
        for j in range(i + 1):
            if h[i, j] != 0.0:
                out.write(f"{_fmt(h[i, j])} {i + 1:4d} {j + 1:4d}    0    0\n")
    if mi.orbital_energies is not None:
        for i, e in enumerate(mi.orbital_energies):
            out.write(f"{_fmt(e)} {i + 1:4d}    0    0    0\n")
    out.write(f"{_fmt(mi.core_energy)}    0    0    0    0\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def load_fcidump(path: str | Path) -> MolecularIntegrals:
    path = Path(path)
    with path.open() as fh:
        mi = parse_fcidump(fh)
    mi.metadata["source"] = str(path)
    return mi


def save_fcidump(mi: MolecularIntegrals, path: str | Path) -> None:
    Path(path).write_text(write_fcidump(mi))
