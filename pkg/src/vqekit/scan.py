"""Bond-stretching scans: one integrals file per distance, run in a job pool.

Timeouts are cooperative. A job checks its budget after building the
Hamiltonian and the optimizer checks it before every objective call, so a
job can overrun by at most one energy evaluation.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .ansatz import AnsatzSpec
from .fcidump import load_fcidump
from .mappings import MAPPINGS
from .mitigation import EmptyPosteriorError, MitigationPolicy, inject_noise, mitigated_energy
from .optimizers import OptimizerTimeout
from .problem import MolecularProblem
from .simulator import exact_distribution, make_rng, measurement_groups, sample
from .vqe import AdaptConfig, VqeConfig, run_adapt, run_tapered_vqe, run_vqe

METHODS = ("standard", "adapt", "tapered")
CSV_COLUMNS = ("distance", "vqe_energy", "hf_energy", "fci_energy", "vqe_error", "status", "wall_time")
DEFAULT_TIMEOUT = 24 * 3600.0
VARIATIONAL_SLACK = 1e-9
ENERGY_FIELDS = ("vqe_energy", "hf_energy", "fci_energy", "vqe_error")


class ScanConfigError(ValueError):
    pass


class ScanFailure(RuntimeError):
    """No distance in the scan produced an ok row."""

    def __init__(self, result: "ScanResult"):
        super().__init__(f"scan {result.summary['name']!r} produced no ok rows")
        self.result = result


def data_dir() -> Path:
    """Directory of the bundled FCIDUMP fixtures."""
    return Path(__file__).resolve().parent / "data"


@dataclass(frozen=True)
class ExperimentConfig:
    """A sweep over integral files with one method configuration.

    ``inputs`` pairs each distance (Angstrom) with an FCIDUMP path; relative
    paths resolve against ``base_dir`` and then the bundled fixture
    directory. ``mitigation`` applies to the final sampled readout and
    needs ``vqe.shots``; ``noise_mixing`` mixes that readout with uniform
    noise to exercise the mitigation path on a simulator.
    """

    name: str
    inputs: tuple[tuple[float, str], ...]
    method: str = "standard"
    ansatz: AnsatzSpec = field(default_factory=lambda: AnsatzSpec("uccsd"))
    mapping: str = "jw"
    active_space: object = "full"
    vqe: VqeConfig = field(default_factory=VqeConfig)
    mitigation: dict | None = None
    timeout_seconds: float = DEFAULT_TIMEOUT
    workers: int = 1
    seed: int = 0
    adapt: AdaptConfig = field(default_factory=AdaptConfig)
    noise_mixing: float = 0.0
    base_dir: str | None = None

    def __post_init__(self):
        if not self.inputs:
            raise ScanConfigError("a scan needs at least one input")
        distances = [d for d, _ in self.inputs]
        if any(b <= a for a, b in zip(distances, distances[1:])):
            raise ScanConfigError("distances must be strictly increasing")
        if not self.timeout_seconds > 0:
            raise ScanConfigError("timeout_seconds must be positive")
        if self.method not in METHODS:
            raise ScanConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "tapered" and self.ansatz.family != "hardware":
            raise ScanConfigError("tapered scans require the hardware ansatz")
        if self.workers < 1:
            raise ScanConfigError("workers must be >= 1")
        if self.mapping not in MAPPINGS:
            raise ScanConfigError(f"mapping must be one of {sorted(MAPPINGS)}, got {self.mapping!r}")
        if self.mitigation is not None and self.vqe.shots is None:
            raise ScanConfigError("mitigation needs sampled energies (vqe.shots)")
        if not 0.0 <= self.noise_mixing <= 1.0:
            raise ScanConfigError("noise_mixing must lie in [0, 1]")

    @classmethod
    def from_dict(cls, d: Mapping, base_dir: str | None = None) -> "ExperimentConfig":
        known = {"name", "inputs", "method", "ansatz", "mapping", "active_space", "vqe", "mitigation",
                 "timeout_seconds", "workers", "seed", "adapt", "noise_mixing"}
        unknown = set(d) - known
        if unknown:
            raise ScanConfigError(f"unknown config fields: {sorted(unknown)}")
        try:
            inputs = []
            for item in d["inputs"]:
                if isinstance(item, Mapping):
                    inputs.append((float(item["distance"]), str(item["path"])))
                else:
                    dist, path = item
                    inputs.append((float(dist), str(path)))
            ans = d.get("ansatz", "uccsd")
            spec = AnsatzSpec(ans) if isinstance(ans, str) else AnsatzSpec(ans["family"], int(ans.get("depth", 1)))
            vqe = dict(d.get("vqe", {}))
            if vqe.get("shots") == "exact":
                vqe["shots"] = None
            return cls(
                name=str(d["name"]),
                inputs=tuple(inputs),
                method=str(d.get("method", "standard")).lower(),
                ansatz=spec,
                mapping=str(d.get("mapping", "jw")).lower(),
                active_space=d.get("active_space", "full"),
                vqe=VqeConfig(**vqe),
                mitigation=None if d.get("mitigation") is None else dict(d["mitigation"]),
                timeout_seconds=float(d.get("timeout_seconds", DEFAULT_TIMEOUT)),
                workers=int(d.get("workers", 1)),
                seed=int(d.get("seed", 0)),
                adapt=AdaptConfig(**d.get("adapt", {})),
                noise_mixing=float(d.get("noise_mixing", 0.0)),
                base_dir=base_dir,
            )
        except KeyError as exc:
            raise ScanConfigError(f"missing config field {exc}") from None
        except TypeError as exc:
            raise ScanConfigError(str(exc)) from None

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        path = Path(path)
        try:
            d = json.loads(path.read_text())
        except OSError as exc:
            raise ScanConfigError(f"{path}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ScanConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(d, str(path.resolve().parent))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": [{"distance": d, "path": p} for d, p in self.inputs],
            "method": self.method,
            "ansatz": {"family": self.ansatz.family, "depth": self.ansatz.depth},
            "mapping": self.mapping,
            "active_space": self.active_space,
            "vqe": self.vqe.to_dict(),
            "mitigation": self.mitigation,
            "timeout_seconds": self.timeout_seconds,
            "workers": self.workers,
            "seed": self.seed,
            "adapt": {"pool": self.adapt.pool, "gradient_threshold": self.adapt.gradient_threshold,
                      "max_operators": self.adapt.max_operators},
            "noise_mixing": self.noise_mixing,
        }

    def resolve(self, path: str) -> Path:
        p = Path(path)
        if p.is_absolute():
            return p
        if self.base_dir is not None and (Path(self.base_dir) / p).exists():
            return Path(self.base_dir) / p
        if (data_dir() / p).exists():
            return data_dir() / p
        return Path(self.base_dir or ".") / p


@dataclass
class ScanRow:
    distance: float
    vqe_energy: float | None
    hf_energy: float | None
    fci_energy: float | None
    vqe_error: float | None
    status: str
    wall_time: float

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in CSV_COLUMNS}

    @classmethod
    def from_dict(cls, d: Mapping) -> "ScanRow":
        return cls(**{k: d.get(k) for k in CSV_COLUMNS})


@dataclass
class ScanResult:
    rows: list[ScanRow]
    summary: dict

    @property
    def failed(self) -> bool:
        return self.summary["n_ok"] == 0

    def to_dict(self, timings: bool = True) -> dict:
        rows = [r.to_dict() for r in self.rows]
        summary = dict(self.summary)
        if not timings:
            for r in rows:
                r["wall_time"] = None
            summary["wall_time"] = None
        return {"rows": rows, "summary": summary}


def job_seed(seed: int, index: int) -> int:
    """Seed of the job at ``index``; independent of scheduling order."""
    return int(make_rng(seed, index).integers(2 ** 31))


def _final_mitigated(problem, circuit, result, cfg: ExperimentConfig, seed: int) -> float:
    from .simulator import apply

    state = apply(circuit, result.parameters)
    h = problem.hamiltonian
    pdict = dict(cfg.mitigation)
    pdict.setdefault("expected_hamming_weight", problem.particle_weight)
    policy = MitigationPolicy.from_dict(pdict)
    raw = []
    for k, g in enumerate(measurement_groups(h)):
        s = int(make_rng(seed, 4, k).integers(2 ** 63))
        if cfg.noise_mixing > 0:
            hist = inject_noise(exact_distribution(state, g.rotation, g.basis), cfg.noise_mixing,
                                cfg.vqe.shots, s, h.n_qubits, g.basis)
        else:
            hist = sample(state, g.rotation, cfg.vqe.shots, s, g.basis)
        raw.append((hist, g))
    return mitigated_energy(raw, h, policy).value


def run_job(cfg: ExperimentConfig, index: int) -> ScanRow:
    """Evaluate one distance; never raises."""
    start = time.monotonic()
    distance, path = cfg.inputs[index]
    seed = job_seed(cfg.seed, index)

    def row(status, vqe=None, hf=None, fci=None):
        err = None if vqe is None or fci is None else vqe - fci
        return ScanRow(distance, vqe, hf, fci, err, status, time.monotonic() - start)

    try:
        mi = load_fcidump(cfg.resolve(path))
        problem = MolecularProblem.build(mi, cfg.active_space, cfg.mapping, pairing=cfg.ansatz.pairing)
        hf, fci = problem.hf_energy(), problem.fci_energy()
        remaining = cfg.timeout_seconds - (time.monotonic() - start)
        if remaining <= 0:
            return row("timeout")
        vcfg = VqeConfig(**{**cfg.vqe.to_dict(), "seed": seed, "timeout": remaining})
        circuit = None
        if cfg.method == "standard":
            circuit = problem.ansatz(cfg.ansatz)
            res = run_vqe(problem.hamiltonian, circuit, cfg=vcfg)
        elif cfg.method == "adapt":
            res, _ = run_adapt(problem.hamiltonian, problem.n_electrons, cfg.adapt, vcfg, cfg.mapping,
                               problem.reference)
        else:
            res, _ = run_tapered_vqe(problem.hamiltonian, vcfg, cfg.ansatz.depth)
        energy = res.energy
        if cfg.mitigation is not None:
            if circuit is None:
                return row("error: mitigation is only wired for the standard method", hf=hf, fci=fci)
            energy = _final_mitigated(problem, circuit, res, cfg, seed)
        # Sampled energies fluctuate around the variational value, so the bound is checked on
        # the exact energy at the final parameters.
        bound = res.noiseless_energy if res.noiseless_energy is not None else energy
        if cfg.mitigation is None and bound < fci - VARIATIONAL_SLACK:
            return row(f"error: variational bound violated ({bound!r} < {fci!r})", hf=hf, fci=fci)
        return row("ok", energy, hf, fci)
    except OptimizerTimeout:
        return row("timeout")
    except EmptyPosteriorError as exc:
        return row(f"error: {exc}")
    except OSError as exc:
        return row(f"error: {cfg.resolve(path)}: {exc.strerror or exc}")
    except Exception as exc:  # isolation: a failing job must not abort its siblings
        return row(f"error: {type(exc).__name__}: {exc}")


def _summarize(cfg: ExperimentConfig, rows: Sequence[ScanRow], wall_time: float, workers: int) -> dict:
    ok = [r for r in rows if r.ok]
    timeouts = sum(r.status == "timeout" for r in rows)
    errors = [r.vqe_error for r in ok if r.vqe_error is not None]
    return {
        "name": cfg.name,
        "n_rows": len(rows),
        "n_ok": len(ok),
        "n_timeout": timeouts,
        "n_error": len(rows) - len(ok) - timeouts,
        "max_abs_vqe_error": max((abs(e) for e in errors), default=None),
        "wall_time": max(wall_time, max((r.wall_time for r in rows), default=0.0)),
        "workers": workers,
    }


def run_scan(cfg: ExperimentConfig, workers: int | None = None, executor: str = "process",
             raise_on_failure: bool = False) -> ScanResult:
    """Run every distance and collect rows in input order.

    ``executor`` is ``"process"`` (default, true parallelism) or
    ``"thread"``. With zero ok rows the result reports ``failed`` and,
    if ``raise_on_failure``, ``ScanFailure`` is raised.
    """
    workers = cfg.workers if workers is None else workers
    if workers < 1:
        raise ScanConfigError("workers must be >= 1")
    start = time.monotonic()
    indices = list(range(len(cfg.inputs)))
    if workers == 1 or len(indices) == 1:
        rows = [run_job(cfg, i) for i in indices]
    else:
        pool_cls = {"process": ProcessPoolExecutor, "thread": ThreadPoolExecutor}[executor]
        with pool_cls(max_workers=min(workers, len(indices))) as pool:
            rows = list(pool.map(run_job, [cfg] * len(indices), indices))
    result = ScanResult(rows, _summarize(cfg, rows, time.monotonic() - start, workers))
    if raise_on_failure and result.failed:
        raise ScanFailure(result)
    return result


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def emit_results(rows: Sequence[ScanRow], fmt: str = "csv", path: str | Path | None = None,
                 timings: bool = True, summary: dict | None = None) -> str:
    """Serialize rows as CSV (fixed columns) or JSON; write to ``path`` if given.

    With ``timings=False`` the wall_time field is left empty so repeated
    runs produce byte-identical files.
    """
    if not rows:
        raise ValueError("no rows to emit")
    fmt = fmt.lower()
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in rows:
            d = r.to_dict()
            if not timings:
                d["wall_time"] = None
            writer.writerow([_fmt(d[k]) for k in CSV_COLUMNS])
        text = buf.getvalue()
    elif fmt == "json":
        out = ScanResult(list(rows), summary or {}).to_dict(timings)
        if summary is None:
            out.pop("summary")
        text = json.dumps(out, sort_keys=True, indent=2) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}; use csv or json")
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(exc.errno, f"cannot write results to {path}: {exc.strerror}") from None
    return text


def read_results(text: str, fmt: str = "json") -> list[ScanRow]:
    """Inverse of ``emit_results``."""
    if fmt == "json":
        return [ScanRow.from_dict(d) for d in json.loads(text)["rows"]]
    rows = []
    for rec in csv.DictReader(io.StringIO(text)):
        vals = {k: (float(rec[k]) if rec[k] != "" else None) for k in CSV_COLUMNS if k != "status"}
        rows.append(ScanRow(status=rec["status"], **vals))
    return rows
