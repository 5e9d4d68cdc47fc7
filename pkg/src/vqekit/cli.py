"""Command-line interface: one subcommand per pipeline stage.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ansatz import AnsatzSpec, FAMILIES
from .fcidump import load_fcidump
from .mitigation import (
    MitigationPolicy,
    calibrate_noise_floor,
    inject_noise,
    mitigated_energy,
    mitigation_report,
)
from .pauli import QubitOperator
from .problem import MolecularProblem
from .resources import resource_report
from .simulator import (
    Histogram,
    ResourceError,
    apply,
    exact_distribution,
    exact_ground_energy,
    index_to_bitstring,
    make_rng,
    measurement_groups,
    reference_state,
    sample,
)
from .tapering import find_symmetries, reference_sector, taper

SUBCOMMANDS = ("inspect", "map", "taper", "vqe", "adapt", "scan", "mitigate", "fci")
OUTPUTS = ("json", "csv", "text")
ANSATZ_CHOICES = tuple(f.replace("_", "-") for f in FAMILIES)
OPTIMIZER_CHOICES = ("nelder-mead", "powell", "bfgs")


class CliError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# output

def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def _scalar(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return str(v)


def render(payload: dict, fmt: str, table: list[dict] | None = None) -> str:
    """JSON (sorted keys), CSV (``table`` rows or key,value pairs) or ``key=value`` text."""
    if fmt == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        if table:
            cols = list(table[0])
            writer.writerow(cols)
            for row in table:
                writer.writerow([_scalar(row[c]) for c in cols])
        else:
            writer.writerow(["key", "value"])
            for k, v in _flatten(payload):
                writer.writerow([k, _scalar(v)])
        return buf.getvalue()
    for k, v in _flatten(payload):
        buf.write(f"{k}={_scalar(v)}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument helpers

def _shots(text: str):
    if text.lower() == "exact":
        return None
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("--shots takes a positive integer or 'exact'") from None
    if n < 1:
        raise argparse.ArgumentTypeError("--shots must be positive")
    return n


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("value must be >= 1")
    return n


def _positive_float(text: str) -> float:
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError("value must be positive")
    return x


def _sector_bits(text: str) -> tuple[int, ...]:
    if set(text) - {"0", "1"} or not text:
        raise argparse.ArgumentTypeError("--sector takes a bitstring such as 010")
    return tuple(int(c) for c in text)


def _add_output(p):
    p.add_argument("--output", choices=OUTPUTS, default="text", help="output format (default text)")
    p.add_argument("--timings", action="store_true", help="include wall-clock fields in the output")


def _add_problem(p, ansatz: bool = True):
    p.add_argument("fcidump", help="FCIDUMP integrals file")
    p.add_argument("--active", default="full", help="full | frozen-core | noons:<tau> | manual:<file>")
    p.add_argument("--mapping", choices=("jw", "bk"), default="jw")
    if ansatz:
        p.add_argument("--ansatz", choices=ANSATZ_CHOICES, default=None)
        p.add_argument("--depth", type=_positive_int, default=1, help="layers / k / Trotter steps")


def _add_vqe(p):
    p.add_argument("--shots", type=_shots, default=None, help="shots per measurement group, or 'exact'")
    p.add_argument("--optimizer", choices=OPTIMIZER_CHOICES, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timeout", type=_positive_float, default=None, help="wall-clock budget in seconds")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--max-iterations", type=_positive_int, default=200)
    p.add_argument("--tolerance", type=_positive_float, default=1e-6, help="energy convergence window")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vqekit", allow_abbrev=False,
                                     description="Variational quantum eigensolver for molecular integrals.")
    parser.add_argument("--version", action="version", version=f"vqekit {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="{" + ",".join(SUBCOMMANDS) + "}")

    p = sub.add_parser("inspect", allow_abbrev=False, help="qubit, term and parameter counts")
    _add_problem(p)
    p.add_argument("--tapered", action="store_true", help="count after qubit tapering")
    _add_output(p)

    p = sub.add_parser("map", allow_abbrev=False, help="print the qubit Hamiltonian")
    _add_problem(p, ansatz=False)
    p.add_argument("--pairing", action="store_true", help="hard-core boson (pair) encoding")
    _add_output(p)

    p = sub.add_parser("taper", allow_abbrev=False, help="find Z2 symmetries and taper")
    _add_problem(p, ansatz=False)
    p.add_argument("--sector", type=_sector_bits, default=None,
                   help="eigenvalue bits, one per symmetry (default: the HF sector)")
    p.add_argument("--spectrum", action="store_true", help="ground energy of every sector")
    _add_output(p)

    p = sub.add_parser("vqe", allow_abbrev=False, help="single-point VQE energy")
    _add_problem(p)
    _add_vqe(p)
    p.add_argument("--tapered", action="store_true", help="tapered VQE over every symmetry sector")
    p.add_argument("--emit-histograms", metavar="DIR", default=None,
                   help="write final-state histograms for the mitigate subcommand (needs --shots)")
    p.add_argument("--noise", type=float, default=0.0, help="uniform mixing probability for emitted histograms")
    _add_output(p)

    p = sub.add_parser("adapt", allow_abbrev=False, help="ADAPT-VQE")
    _add_problem(p, ansatz=False)
    _add_vqe(p)
    p.add_argument("--pool", choices=("singles-and-doubles", "paired-doubles"), default="singles-and-doubles")
    p.add_argument("--gradient-threshold", type=_positive_float, default=1e-3)
    p.add_argument("--max-operators", type=int, default=20)
    _add_output(p)

    p = sub.add_parser("scan", allow_abbrev=False, help="bond-stretching sweep from a JSON config")
    p.add_argument("--config", required=True, help="experiment config file")
    p.add_argument("--workers", type=_positive_int, default=None, help="override the config's worker count")
    p.add_argument("--timeout", type=_positive_float, default=None, help="override timeout_seconds")
    p.add_argument("--seed", type=int, default=None, help="override the scan seed")
    p.add_argument("--save", metavar="PATH", default=None, help="also write results (.csv or .json)")
    _add_output(p)

    p = sub.add_parser("mitigate", allow_abbrev=False, help="symmetry post-selection and thresholding")
    p.add_argument("--histograms", required=True, metavar="DIR",
                   help="directory with hamiltonian.json and group_*.json histograms")
    p.add_argument("--policy", required=True, metavar="FILE", help="mitigation policy JSON")
    _add_output(p)

    p = sub.add_parser("fci", allow_abbrev=False, help="exact ground energy (oracle)")
    _add_problem(p, ansatz=False)
    p.add_argument("--sector", type=int, default=None, help="electron count (default: active electrons)")
    _add_output(p)
    return parser


# ---------------------------------------------------------------------------
# commands

def _spec(args) -> AnsatzSpec | None:
    return None if args.ansatz is None else AnsatzSpec(args.ansatz, args.depth)


def _problem(args, pairing: bool = False) -> MolecularProblem:
    mi = load_fcidump(args.fcidump)
    return MolecularProblem.build(mi, args.active, args.mapping, pairing=pairing)


def _vqe_config(args, **extra):
    from .vqe import VqeConfig

    return VqeConfig(optimizer=args.optimizer, max_iterations=args.max_iterations,
                     energy_tolerance=args.tolerance, shots=args.shots, seed=args.seed,
                     timeout=args.timeout, workers=args.workers, **extra)


def _reference_energies(problem: MolecularProblem) -> dict:
    try:
        fci = problem.fci_energy()
    except ResourceError:
        fci = None
    return {"hf_energy": problem.hf_energy(), "fci_energy": fci}


def cmd_inspect(args) -> tuple[dict, list | None]:
    mi = load_fcidump(args.fcidump)
    rep = resource_report(mi, args.active, args.mapping, _spec(args), args.depth, args.tapered)
    return rep.to_dict(), None


def cmd_map(args):
    problem = _problem(args, args.pairing)
    h = problem.hamiltonian
    terms = h.to_json_list()
    payload = {"n_qubits": h.n_qubits, "n_terms": len(h), "mapping": problem.mapping,
               "encoding": problem.encoding, "terms": terms}
    table = [{"pauli": t["pauli"], "re": t["coeff"][0], "im": t["coeff"][1]} for t in terms]
    if args.output == "text":
        payload = {"n_qubits": h.n_qubits, "n_terms": len(h), "mapping": problem.mapping,
                   "encoding": problem.encoding,
                   **{t["pauli"]: t["coeff"][0] for t in terms}}
    return payload, table


def cmd_taper(args):
    problem = _problem(args)
    h = problem.hamiltonian
    t = find_symmetries(h)
    payload = {"n_qubits": h.n_qubits, **t.to_dict()}
    if not t.symmetries:
        payload.update({"sector": [], "tapered_n_qubits": h.n_qubits, "tapered_terms": len(h)})
        return payload, None
    if args.sector is not None:
        if len(args.sector) != len(t.symmetries):
            raise CliError(f"--sector needs {len(t.symmetries)} bits, got {len(args.sector)}")
        sector = args.sector
    else:
        sector = reference_sector(t, problem.reference)
    hs = taper(h, t, sector)
    payload.update({"sector": list(sector), "tapered_n_qubits": hs.n_qubits, "tapered_terms": len(hs),
                    "hamiltonian": hs.to_json_list()})
    if args.spectrum:
        payload["sector_ground_energies"] = [
            {"sector": list(s), "energy": exact_ground_energy(taper(h, t, s))} for s in t.sectors()]
    if args.output == "text":
        payload.pop("hamiltonian")
    return payload, None


def _write_histograms(directory: str, problem: MolecularProblem, circuit, theta, shots, seed, noise):
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    h = problem.hamiltonian
    state = apply(circuit, theta)
    groups = measurement_groups(h)
    (out / "hamiltonian.json").write_text(h.to_json() + "\n")
    for k, g in enumerate(groups):
        s = int(make_rng(seed, 5, k).integers(2 ** 63))
        if noise > 0:
            hist = inject_noise(exact_distribution(state, g.rotation, g.basis), noise, shots, s,
                                h.n_qubits, g.basis)
        else:
            hist = sample(state, g.rotation, shots, s, g.basis)
        (out / f"group_{k:03d}.json").write_text(hist.to_json() + "\n")
    ref = reference_state(circuit)
    ideal = index_to_bitstring(int(np.argmax(np.abs(ref.amplitudes))), h.n_qubits)
    s = int(make_rng(seed, 6).integers(2 ** 63))
    cal = (inject_noise({ideal: 1.0}, noise, shots, s, h.n_qubits, "Z") if noise > 0
           else sample(ref, None, shots, s))
    (out / "calibration.json").write_text(cal.to_json() + "\n")
    meta = {"expected_hamming_weight": problem.particle_weight, "ideal_bitstring": ideal,
            "n_groups": len(groups), "shots": shots, "noise": noise}
    (out / "metadata.json").write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")
    return str(out)


def cmd_vqe(args):
    from .vqe import run_tapered_vqe, run_vqe

    spec = _spec(args) or AnsatzSpec("uccsd")
    cfg = _vqe_config(args)
    if args.tapered:
        if spec.family != "hardware":
            raise CliError("--tapered runs the hardware ansatz; pass --ansatz hardware")
        problem = _problem(args)
        res, _ = run_tapered_vqe(problem.hamiltonian, cfg, spec.depth)
        circuit = None
    else:
        problem = _problem(args, spec.pairing)
        circuit = problem.ansatz(spec)
        res = run_vqe(problem.hamiltonian, circuit, cfg=cfg)
    payload = res.to_dict()
    if not args.timings:
        payload.pop("wall_time")
    payload.update(_reference_energies(problem))
    payload["n_qubits"] = problem.n_qubits
    payload["ansatz"] = spec.family
    payload["error"] = None if payload["fci_energy"] is None else res.energy - payload["fci_energy"]
    if args.emit_histograms:
        if circuit is None or args.shots is None:
            raise CliError("--emit-histograms needs --shots and an untapered run")
        payload["histograms"] = _write_histograms(args.emit_histograms, problem, circuit, res.parameters,
                                                  args.shots, args.seed, args.noise)
    if args.output == "text":
        for k in ("parameters", "trace", "tapering", "sector_energies"):
            payload.pop(k, None)
    return payload, None


def cmd_adapt(args):
    from .vqe import AdaptConfig, run_adapt

    problem = _problem(args)
    acfg = AdaptConfig(args.pool.replace("-", "_"), args.gradient_threshold, args.max_operators)
    res, _ = run_adapt(problem.hamiltonian, problem.n_electrons, acfg, _vqe_config(args),
                       problem.mapping, problem.reference)
    payload = res.to_dict()
    if not args.timings:
        payload.pop("wall_time")
    payload.update(_reference_energies(problem))
    payload["error"] = None if payload["fci_energy"] is None else res.energy - payload["fci_energy"]
    if args.output == "text":
        for k in ("parameters", "trace", "rounds", "initial_pool_gradients", "pool"):
            payload.pop(k, None)
    return payload, None


def cmd_scan(args):
    import dataclasses

    from .scan import ExperimentConfig, emit_results, run_scan

    cfg = ExperimentConfig.load(args.config)
    if args.timeout is not None:
        cfg = dataclasses.replace(cfg, timeout_seconds=args.timeout)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    result = run_scan(cfg, workers=args.workers)
    if args.save:
        fmt = "json" if args.save.lower().endswith(".json") else "csv"
        emit_results(result.rows, fmt, args.save, args.timings,
                     result.summary if fmt == "json" else None)
    payload = result.to_dict(args.timings)
    if not args.timings:
        payload["summary"].pop("wall_time")
        for r in payload["rows"]:
            r.pop("wall_time")
    if args.output == "csv":
        text = emit_results(result.rows, "csv", None, args.timings)
        return payload, text, 1 if result.failed else 0
    if args.output == "text":
        lines = [emit_results(result.rows, "csv", None, args.timings)]
        lines += [f"{k}={_scalar(v)}\n" for k, v in payload["summary"].items()]
        return payload, "".join(lines), 1 if result.failed else 0
    return payload, None, 1 if result.failed else 0


def _load_histogram_dir(directory: str):
    d = Path(directory)
    if not d.is_dir():
        raise CliError(f"{d}: not a directory")
    h = QubitOperator.from_json((d / "hamiltonian.json").read_text())
    groups = measurement_groups(h)
    files = sorted(d.glob("group_*.json"))
    if len(files) != len(groups):
        raise CliError(f"{d}: expected {len(groups)} group histograms, found {len(files)}")
    raw = []
    for path, g in zip(files, groups):
        hist = Histogram.from_json(path.read_text())
        if hist.basis != g.basis:
            raise CliError(f"{path}: basis {hist.basis!r} does not match group basis {g.basis!r}")
        raw.append((hist, g))
    meta = json.loads((d / "metadata.json").read_text()) if (d / "metadata.json").exists() else {}
    cal = Histogram.from_json((d / "calibration.json").read_text()) if (d / "calibration.json").exists() else None
    return h, raw, meta, cal


def cmd_mitigate(args):
    h, raw, meta, cal = _load_histogram_dir(args.histograms)
    try:
        pdict = json.loads(Path(args.policy).read_text())
    except json.JSONDecodeError as exc:
        raise CliError(f"{args.policy}: invalid JSON ({exc})") from None
    if "expected_hamming_weight" not in pdict:
        if meta.get("expected_hamming_weight") is None:
            raise CliError("policy lacks expected_hamming_weight and the histogram set has no metadata")
        pdict["expected_hamming_weight"] = meta["expected_hamming_weight"]
    payload = {}
    if pdict.get("threshold") == "auto":
        if cal is None or "ideal_bitstring" not in {**meta, **pdict}:
            raise CliError("threshold 'auto' needs calibration.json and an ideal bitstring")
        report = calibrate_noise_floor(cal, pdict.get("ideal_bitstring", meta.get("ideal_bitstring")))
        pdict["threshold"] = report.recommended_threshold
        payload["calibration"] = {k: v for k, v in report.to_dict().items() if k != "spectrum"}
    pdict.pop("ideal_bitstring", None)
    policy = MitigationPolicy.from_dict(pdict)
    est = mitigated_energy(raw, h, policy)
    payload.update({"policy": policy.to_dict(), "energy": est.value, "std_error": est.std_error,
                    "shots_used": est.shots_used,
                    "report": mitigation_report(raw, h, policy.expected_hamming_weight)})
    table = [{"stage": "raw", "threshold": None, **payload["report"]["raw"]},
             {"stage": "postselected", "threshold": 0.0, **payload["report"]["postselected"]}]
    table += [{"stage": "thresholded", **{k: r[k] for k in ("threshold", "value", "std_error", "shots_used")}}
              for r in payload["report"]["thresholded"]]
    if args.output == "text":
        payload["report"] = {row["stage"] + ("" if row["threshold"] is None or row["stage"] != "thresholded"
                                             else f"@{row['threshold']}"): row["value"] for row in table}
    return payload, table


def cmd_fci(args):
    problem = _problem(args)
    sector = problem.n_electrons if args.sector is None else args.sector
    if not 0 <= sector <= problem.n_qubits:
        raise CliError(f"sector {sector} outside 0..{problem.n_qubits}")
    if problem.mapping == "jw":
        energy = exact_ground_energy(problem.hamiltonian, sector)
    elif sector == problem.n_electrons:
        energy = problem.fci_energy()
    else:
        raise CliError("non-default sectors need --mapping jw (Hamming weight equals electron count)")
    return {"energy": energy, "sector": sector, "n_qubits": problem.n_qubits,
            "hf_energy": problem.hf_energy()}, None


COMMANDS = {"inspect": cmd_inspect, "map": cmd_map, "taper": cmd_taper, "vqe": cmd_vqe, "adapt": cmd_adapt,
            "scan": cmd_scan, "mitigate": cmd_mitigate, "fci": cmd_fci}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        out = COMMANDS[args.command](args)
    except (OSError, ValueError, RuntimeError, ArithmeticError, KeyError) as exc:
        msg = str(exc) or type(exc).__name__
        print(f"vqekit {args.command}: error: {msg}", file=sys.stderr)
        return 1
    if args.command == "scan":
        payload, text, code = out
        sys.stdout.write(text if text is not None else render(payload, "json"))
        return code
    payload, table = out
    sys.stdout.write(render(payload, args.output, table))
    return 0


if __name__ == "__main__":
    sys.exit(main())
