"""Command-line interface.

Subcommands:
  run       simulate one QASM circuit on a chosen engine, emit a JSON report
  bench     run a benchmark experiment, emit CSV records (+ summary + figures)
  fidelity  squared overlap of two saved amplitude reports
  slope     fit log-log runtime slopes from a results CSV

Exit codes: 0 success, 1 usage error (bad arguments, missing files),
2 runtime error (parse or simulation failure). Diagnostics go to stderr;
data goes to stdout or the --out target.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, statevector
from .bench import BenchConfig
from .canonical import CanonicalMps
from .errors import TnqsimError
from .qasm import parse_qasm_file
from .simple_update import VidalMps
from .tensor import TruncationPolicy

AMPLITUDE_DUMP_LIMIT = 20  # qubits; reports above this omit amplitudes


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tnqsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one OpenQASM 2.0 circuit")
    run.add_argument("circuit", help="path to a .qasm file")
    run.add_argument("--engine", choices=("cf", "su", "sv"), default="cf")
    run.add_argument("--max-kept", type=int, default=64, help="bond dimension cap")
    run.add_argument("--rel-cutoff", type=float, default=0.0,
                     help="relative singular-value cutoff")
    run.add_argument("--out", help="write the JSON report here instead of stdout")

    b = sub.add_parser("bench", help="run a benchmark experiment")
    b.add_argument("experiment", choices=("shallow", "qv", "qasm"))
    b.add_argument("--config", help="JSON file with BenchConfig fields")
    b.add_argument("--out", help="write CSV here (summary JSON and figures go next to it)")
    b.add_argument("--corpus", help="QASM corpus directory (qasm experiment)")
    b.add_argument("--sizes", type=int, nargs="+", help="override qubit counts")
    b.add_argument("--depths", type=int, nargs="+", help="override depths")
    b.add_argument("--seeds", type=int, nargs="+", help="override seeds")
    b.add_argument("--max-kept", type=int, help="override bond dimension cap")
    b.add_argument("--rel-cutoff", type=float, help="override relative cutoff")
    b.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    fid = sub.add_parser("fidelity", help="squared overlap of two saved reports")
    fid.add_argument("--a", required=True, help="JSON report with amplitudes")
    fid.add_argument("--b", required=True, help="JSON report with amplitudes")

    slope = sub.add_parser("slope", help="fit log-log runtime slopes from a CSV")
    slope.add_argument("--in", dest="infile", required=True, help="results CSV")
    return parser


def _require_file(path: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise _UsageError(f"no such file: {path}")
    return p


def _cmd_run(args) -> int:
    circ = parse_qasm_file(_require_file(args.circuit))
    policy = TruncationPolicy(max_kept=args.max_kept, rel_cutoff=args.rel_cutoff)
    state, runtime = bench.run_timed(args.engine, circ, policy)
    report = {
        "engine": args.engine,
        "source": circ.metadata.get("source"),
        "n_qubits": circ.num_qubits,
        "gate_count": len(circ.gates),
        "runtime_s": runtime,
    }
    if isinstance(state, (CanonicalMps, VidalMps)):
        report["max_bond"] = state.max_bond
        report["discarded_weight"] = state.discarded_weight
        amps = (
            statevector.from_mps(state)
            if circ.num_qubits <= AMPLITUDE_DUMP_LIMIT
            else None
        )
    else:
        amps = state
    if amps is not None and circ.num_qubits <= AMPLITUDE_DUMP_LIMIT:
        report["amplitudes"] = [[z.real, z.imag] for z in amps]
    else:
        report["amplitudes"] = None
    _emit(report, args.out)
    return 0


def _load_amplitudes(path: str) -> np.ndarray:
    with open(_require_file(path), encoding="utf-8") as fh:
        data = json.load(fh)
    amps = data.get("amplitudes") if isinstance(data, dict) else data
    if not amps:
        raise TnqsimError(f"{path} has no amplitudes")
    arr = np.asarray(amps, dtype=float)
    return arr[:, 0] + 1j * arr[:, 1]


def _cmd_fidelity(args) -> int:
    a = _load_amplitudes(args.a)
    b = _load_amplitudes(args.b)
    value = abs(statevector.inner(a, b)) ** 2
    print(json.dumps({"fidelity": value}))
    return 0


def _cmd_slope(args) -> int:
    records = bench.read_csv(_require_file(args.infile))
    out = {}
    for engine in sorted({r.engine for r in records}):
        rows = [r for r in records if r.engine == engine]
        sizes = sorted({r.n for r in rows})
        points = [
            (n, bench.mean_se(r.runtime_s for r in rows if r.n == n).mean) for n in sizes
        ]
        slope, intercept, r2 = bench.fit_loglog_slope(points)
        out[engine] = {"slope": slope, "intercept": intercept, "r2": r2}
    print(json.dumps(out, indent=2))
    return 0


def _cmd_bench(args) -> int:
    if args.config:
        cfg = BenchConfig.from_json(_require_file(args.config))
    else:
        cfg = BenchConfig.defaults_for(args.experiment)
    overrides = {}
    if args.sizes:
        overrides["sizes"] = tuple(args.sizes)
    if args.depths:
        overrides["depths"] = tuple(args.depths)
    if args.seeds:
        overrides["seeds"] = tuple(args.seeds)
    if args.max_kept is not None:
        overrides["max_kept"] = args.max_kept
    if args.rel_cutoff is not None:
        overrides["rel_cutoff"] = args.rel_cutoff
    if overrides:
        cfg = BenchConfig(**{**cfg.__dict__, **overrides})

    result = bench.run_experiment(cfg, corpus_dir=args.corpus)
    summary = bench.summarize(cfg.experiment, result)
    for failure in result.failures:
        print(f"warning: cell failed: {failure}", file=sys.stderr)
    for skip in result.skipped:
        print(f"warning: circuit skipped: {skip}", file=sys.stderr)

    if args.out:
        out = Path(args.out)
        bench.write_csv(result.records, out)
        summary_path = out.with_name(out.stem + "_summary.json")
        with open(summary_path, "w", encoding="utf-8") as fh:
            json.dump(summary, fh, indent=2, default=str)
            fh.write("\n")
        print(f"wrote {out} and {summary_path}", file=sys.stderr)
        if not args.no_plot:
            from . import plots  # matplotlib import deferred until needed

            for fig_path in plots.render(cfg.experiment, summary, out.with_suffix("")):
                print(f"wrote {fig_path}", file=sys.stderr)
    else:
        bench.write_csv(result.records, sys.stdout)
    return 0


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {out}", file=sys.stderr)
    else:
        print(text)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    handlers = {
        "run": _cmd_run,
        "bench": _cmd_bench,
        "fidelity": _cmd_fidelity,
        "slope": _cmd_slope,
    }
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (TnqsimError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
