"""Histogram-level error mitigation: symmetry post-selection and noise-floor thresholding."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .simulator import EnergyEstimate, Histogram, MeasurementGroup, estimate_energy, make_rng, index_to_bitstring
from .pauli import QubitOperator

THRESHOLD_GRID = (0.005, 0.010, 0.015, 0.020)
REPORT_GRID = (0.0,) + THRESHOLD_GRID


class EmptyPosteriorError(ValueError):
    """Every bitstring was discarded; the data are dominated by noise."""


class CalibrationError(ValueError):
    pass


@dataclass(frozen=True)
class MitigationPolicy:
    expected_hamming_weight: int
    threshold: float = 0.015
    apply_threshold_to_z_only: bool = True

    def __post_init__(self):
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")
        if self.expected_hamming_weight < 0:
            raise ValueError("expected_hamming_weight must be non-negative")

    def to_dict(self) -> dict:
        return {"expected_hamming_weight": self.expected_hamming_weight, "threshold": self.threshold,
                "apply_threshold_to_z_only": self.apply_threshold_to_z_only}

    @classmethod
    def from_dict(cls, d: Mapping) -> "MitigationPolicy":
        return cls(int(d["expected_hamming_weight"]), float(d.get("threshold", 0.015)),
                   bool(d.get("apply_threshold_to_z_only", True)))


def _keep(hist: Histogram, keep: dict[str, float]) -> Histogram:
    """Survivors as a new histogram: counts stay counts, probabilities are L1-renormalized."""
    if not keep:
        raise EmptyPosteriorError("no bitstring survived mitigation")
    if hist.shots is not None:
        return Histogram(dict(keep), int(round(sum(keep.values()))), hist.basis)
    total = sum(keep.values())
    return Histogram({b: v / total for b, v in keep.items()}, None, hist.basis)


def postselect_symmetry(hist: Histogram, weight: int) -> Histogram:
    """Keep bitstrings of Hamming weight ``weight``."""
    return _keep(hist, {b: v for b, v in hist.counts.items() if b.count("1") == weight})


def apply_threshold(hist: Histogram, threshold: float) -> Histogram:
    """Drop bitstrings whose probability is below ``threshold``."""
    if threshold <= 0:
        return hist
    probs = hist.probabilities()
    return _keep(hist, {b: hist.counts[b] for b, p in probs.items() if p >= threshold})


@dataclass
class CalibrationReport:
    noise_fraction: float
    recommended_threshold: float
    covered: bool
    spectrum: list[tuple[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"noise_fraction": self.noise_fraction, "recommended_threshold": self.recommended_threshold,
                "covered": self.covered, "spectrum": [[b, p] for b, p in self.spectrum]}


def calibrate_noise_floor(hf_hist: Histogram, ideal_bitstring: str,
                          grid: Sequence[float] = THRESHOLD_GRID) -> CalibrationReport:
    """Noise level of the theta=0 circuit, whose ideal output is one bitstring.

    The recommended threshold is the smallest grid value above every
    spurious peak; ``covered`` is False when even the largest is not.
    """
    probs = hf_hist.probabilities()
    if ideal_bitstring not in probs:
        raise CalibrationError(f"ideal bitstring {ideal_bitstring} never observed")
    junk = max((p for b, p in probs.items() if b != ideal_bitstring), default=0.0)
    chosen = next((g for g in sorted(grid) if junk < g), None)
    spectrum = sorted(probs.items(), key=lambda kv: (-kv[1], kv[0]))
    return CalibrationReport(1.0 - probs[ideal_bitstring], chosen if chosen is not None else max(grid),
                             chosen is not None, spectrum)


def is_z_basis(group: MeasurementGroup) -> bool:
    return not group.rotation.gates


def mitigate_histograms(raw: Sequence[tuple[Histogram, MeasurementGroup]], policy: MitigationPolicy,
                        postselect: bool = True) -> list[tuple[Histogram, MeasurementGroup]]:
    out = []
    for hist, group in raw:
        h = postselect_symmetry(hist, policy.expected_hamming_weight) if postselect else hist
        if policy.threshold > 0 and (is_z_basis(group) or not policy.apply_threshold_to_z_only):
            h = apply_threshold(h, policy.threshold)
        out.append((h, group))
    return out


def mitigated_energy(raw: Sequence[tuple[Histogram, MeasurementGroup]], h: QubitOperator,
                     policy: MitigationPolicy) -> EnergyEstimate:
    """Post-select every basis, threshold the Z basis, then estimate; sigma uses survivors only."""
    return estimate_energy(mitigate_histograms(raw, policy), h)


def inject_noise(ideal: Histogram | Mapping[str, float] | np.ndarray, p: float, shots: int, seed: int,
                 n_qubits: int | None = None, basis: str | None = None) -> Histogram:
    """Sample ``shots`` outcomes from ``(1 - p) * ideal + p * uniform``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("mixing probability must lie in [0, 1]")
    if isinstance(ideal, np.ndarray):
        dist = np.asarray(ideal, dtype=float)
        n = int(round(np.log2(dist.size)))
        label = basis or "Z"
    else:
        probs = ideal.probabilities() if isinstance(ideal, Histogram) else dict(ideal)
        n = n_qubits if n_qubits is not None else len(next(iter(probs)))
        dist = np.zeros(1 << n)
        for b, v in probs.items():
            dist[sum(1 << q for q, ch in enumerate(b) if ch == "1")] += v
        label = basis or (ideal.basis if isinstance(ideal, Histogram) else "Z")
    dist = dist / dist.sum()
    mixed = (1.0 - p) * dist + p / dist.size
    counts = make_rng(seed).multinomial(shots, mixed / mixed.sum())
    return Histogram({index_to_bitstring(int(i), n): int(counts[i]) for i in np.flatnonzero(counts)}, shots, label)


def mitigation_report(raw: Sequence[tuple[Histogram, MeasurementGroup]], h: QubitOperator, weight: int,
                      grid: Sequence[float] = REPORT_GRID) -> dict:
    """Raw, post-selected, and post-selected plus thresholded energies over a threshold grid."""
    raw_est = estimate_energy(raw, h)
    post = estimate_energy(mitigate_histograms(raw, MitigationPolicy(weight, 0.0)), h)
    rows = []
    for t in grid:
        try:
            est = mitigated_energy(raw, h, MitigationPolicy(weight, t))
            rows.append({"threshold": t, **est.to_dict(), "status": "ok"})
        except EmptyPosteriorError as exc:
            rows.append({"threshold": t, "value": None, "std_error": None, "shots_used": 0,
                         "status": f"error: {exc}"})
    return {"raw": raw_est.to_dict(), "postselected": post.to_dict(), "thresholded": rows,
            "expected_hamming_weight": weight}
