"""Benchmark harness: runtime-scaling, quantum-volume, and QASM experiments.

Each experiment cell runs one circuit on one or more engines, times the
tensor-update loop only (circuit generation, parsing, and fidelity
evaluation stay outside the timed region), and emits one record per engine
run. Records serialize to CSV with a fixed header and to JSON with the same
fields; identical configs and seeds reproduce identical files up to the
runtime columns.
"""

import csv
import gc
import glob
import json
import logging
import os
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import canonical, statevector
from .canonical import CanonicalMps
from .circuit import Circuit, quantum_volume_circuit, shallow_random_circuit
from .errors import CapacityError, QasmError, ShapeError, TnqsimError
from .qasm import parse_qasm_file
from .simple_update import VidalMps
from .tensor import TruncationPolicy

log = logging.getLogger(__name__)

CSV_HEADER = [
    "experiment", "engine", "n", "depth", "seed",
    "runtime_s", "f_cf", "f_sv", "max_bond", "discarded_weight",
]

# Fidelities below this are flagged as excluded in QASM reports (the raw
# records are kept).
QASM_EXCLUSION_THRESHOLD = 0.0005

CORPUS_ENV_VAR = "TNQSIM_QASM_CORPUS"


@dataclass
class BenchConfig:
    """Parameters of one benchmark run; JSON configs mirror these fields."""

    experiment: str
    engines: tuple[str, ...] = ("cf", "su")
    sizes: tuple[int, ...] = ()
    depths: tuple[int, ...] = (1,)
    seeds: tuple[int, ...] = (0, 1, 2, 3)
    max_kept: int = 5
    rel_cutoff: float = 1e-4
    corpus_dir: str | None = None

    def __post_init__(self):
        known = {"cf", "su", "sv"}
        bad = set(self.engines) - known
        if bad:
            raise ValueError(f"unknown engines {sorted(bad)}; choose from {sorted(known)}")
        if "sv" in self.engines and any(n > statevector.MAX_QUBITS for n in self.sizes):
            raise ValueError(
                f"sv engine requested but sizes exceed {statevector.MAX_QUBITS} qubits"
            )

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(max_kept=self.max_kept, rel_cutoff=self.rel_cutoff)

    @classmethod
    def shallow_defaults(cls) -> "BenchConfig":
        """Shallow-circuit runtime/fidelity sweep: max 5 singular values,
        relative cutoff 1e-4, four random circuits per size.
        """
        return cls(
            experiment="shallow",
            engines=("cf", "su"),
            sizes=(128, 256, 512, 1024, 2048),
            seeds=(0, 1, 2, 3),
            max_kept=5,
            rel_cutoff=1e-4,
        )

    @classmethod
    def qv_defaults(cls) -> "BenchConfig":
        """Quantum-volume sweep: 15 qubits, depths 1..6, 29 circuits per
        depth, max 10 singular values.
        """
        return cls(
            experiment="quantum_volume",
            engines=("cf", "su", "sv"),
            sizes=(15,),
            depths=(1, 2, 3, 4, 5, 6),
            seeds=tuple(range(29)),
            max_kept=10,
            rel_cutoff=1e-4,
        )

    @classmethod
    def qasm_defaults(cls) -> "BenchConfig":
        """QASM corpus run: max 3 singular values."""
        return cls(
            experiment="qasm",
            engines=("cf", "su", "sv"),
            seeds=(),
            max_kept=3,
            rel_cutoff=1e-4,
        )

    @classmethod
    def defaults_for(cls, experiment: str) -> "BenchConfig":
        table = {
            "shallow": cls.shallow_defaults,
            "quantum_volume": cls.qv_defaults,
            "qv": cls.qv_defaults,
            "qasm": cls.qasm_defaults,
        }
        if experiment not in table:
            raise ValueError(f"unknown experiment {experiment!r}")
        return table[experiment]()

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        base = cls.defaults_for(raw.pop("experiment"))
        fields = {k: tuple(v) if isinstance(v, list) else v for k, v in raw.items()}
        unknown = set(fields) - set(base.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config fields {sorted(unknown)}")
        merged = {**asdict(base), **fields}
        merged = {
            k: tuple(v) if isinstance(v, list) else v for k, v in merged.items()
        }
        return cls(**merged)


@dataclass
class BenchRecord:
    """One engine run of one circuit."""

    experiment: str
    engine: str
    n: int
    depth: int | None
    seed: int | None
    runtime_s: float
    f_cf: float | None
    f_sv: float | None
    max_bond: int
    discarded_weight: float


@dataclass
class ExperimentResult:
    records: list[BenchRecord] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)


@dataclass(frozen=True)
class MeanSE:
    """Sample mean with its standard error (None below two samples)."""

    mean: float
    se: float | None
    count: int


def mean_se(values) -> MeanSE:
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        raise ShapeError("cannot aggregate an empty sample")
    se = float(np.std(arr, ddof=1) / np.sqrt(arr.size)) if arr.size >= 2 else None
    return MeanSE(float(np.mean(arr)), se, int(arr.size))


# -- fidelities ------------------------------------------------------------


def fidelity_cf(cf_state: CanonicalMps, su_state: VidalMps) -> float:
    """Squared overlap of the two engines' states, via transfer-matrix
    contraction of the Vidal state converted to plain MPS form.
    """
    return canonical.fidelity(cf_state, su_state.to_mps())


def fidelity_sv(sv: np.ndarray, state) -> float:
    """Squared overlap of a tensor-network state with an exact state vector,
    normalized on both sides so truncation-induced norm drift divides out.
    """
    amps = statevector.from_mps(state)
    if amps.size != sv.size:
        raise ShapeError(f"state sizes differ: {sv.size} vs {amps.size}")
    norms = float(np.vdot(sv, sv).real * np.vdot(amps, amps).real)
    return abs(statevector.inner(sv, amps)) ** 2 / norms


# -- engine running ---------------------------------------------------------


@contextmanager
def _quiet_timing():
    """Keep collector pauses out of timed regions: reclaim pending garbage
    up front, then hold the cyclic collector off until the region ends
    (array buffers are still freed promptly by reference counting).
    """
    was_enabled = gc.isenabled()
    gc.collect()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()


def run_timed(engine: str, circ: Circuit, policy: TruncationPolicy | None):
    """Run a circuit on one engine, timing only the gate-application loop.

    Returns (final_state, seconds); the state is a CanonicalMps, VidalMps,
    or dense amplitude array depending on the engine.
    """
    if engine == "sv":
        state = statevector.zero_state(circ.num_qubits)
        with _quiet_timing():
            t0 = time.perf_counter()
            for g in circ.gates:
                state = statevector.apply_gate(state, g)
            runtime = time.perf_counter() - t0
        return state, runtime
    if engine == "cf":
        mps = CanonicalMps.zero_state(circ.num_qubits)
    elif engine == "su":
        mps = VidalMps.zero_state(circ.num_qubits)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    if policy is None:
        raise ValueError("MPS engines need a truncation policy")
    with _quiet_timing():
        t0 = time.perf_counter()
        for g in circ.gates:
            mps.apply_gate(g, policy)
        runtime = time.perf_counter() - t0
    return mps, runtime


def _tn_record(experiment, engine, circ, depth, seed, state, runtime, f_cf, f_sv):
    return BenchRecord(
        experiment=experiment,
        engine=engine,
        n=circ.num_qubits,
        depth=depth,
        seed=seed,
        runtime_s=runtime,
        f_cf=f_cf,
        f_sv=f_sv,
        max_bond=state.max_bond,
        discarded_weight=state.discarded_weight,
    )


# -- experiments -------------------------------------------------------------


def run_shallow_experiment(cfg: BenchConfig) -> ExperimentResult:
    """Per (size, seed): run CF and SU on the same shallow random circuit,
    record per-engine update runtime and the CF/SU fidelity.
    """
    result = ExperimentResult()
    policy = cfg.policy
    for n in cfg.sizes:
        for seed in cfg.seeds:
            circ = shallow_random_circuit(n, seed)
            try:
                cf_state, cf_time = run_timed("cf", circ, policy)
                su_state, su_time = run_timed("su", circ, policy)
                f = fidelity_cf(cf_state, su_state)
            except TnqsimError as exc:
                log.warning("shallow cell n=%d seed=%d failed: %s", n, seed, exc)
                result.failures.append({"n": n, "seed": seed, "reason": str(exc)})
                continue
            result.records.append(
                _tn_record("shallow", "cf", circ, None, seed, cf_state, cf_time, f, None)
            )
            result.records.append(
                _tn_record("shallow", "su", circ, None, seed, su_state, su_time, f, None)
            )
    return result


def run_qv_experiment(cfg: BenchConfig) -> ExperimentResult:
    """Per (depth, seed): run CF and SU on the same quantum-volume circuit;
    when the sv engine is enabled also run the exact oracle and record both
    engines' state-vector fidelities.
    """
    result = ExperimentResult()
    policy = cfg.policy
    n = cfg.sizes[0] if cfg.sizes else 15
    want_sv = "sv" in cfg.engines
    if want_sv and n > statevector.MAX_QUBITS:
        raise CapacityError(f"sv fidelities need n <= {statevector.MAX_QUBITS}, got {n}")
    for depth in cfg.depths:
        for seed in cfg.seeds:
            circ = quantum_volume_circuit(n, depth, seed)
            try:
                cf_state, cf_time = run_timed("cf", circ, policy)
                su_state, su_time = run_timed("su", circ, policy)
                f = fidelity_cf(cf_state, su_state)
                fsv_cf = fsv_su = None
                sv_state = sv_time = None
                if want_sv:
                    sv_state, sv_time = run_timed("sv", circ, None)
                    fsv_cf = fidelity_sv(sv_state, cf_state)
                    fsv_su = fidelity_sv(sv_state, su_state)
            except TnqsimError as exc:
                log.warning("qv cell depth=%d seed=%d failed: %s", depth, seed, exc)
                result.failures.append({"depth": depth, "seed": seed, "reason": str(exc)})
                continue
            result.records.append(
                _tn_record("quantum_volume", "cf", circ, depth, seed, cf_state, cf_time, f, fsv_cf)
            )
            result.records.append(
                _tn_record("quantum_volume", "su", circ, depth, seed, su_state, su_time, f, fsv_su)
            )
            if want_sv:
                result.records.append(
                    BenchRecord("quantum_volume", "sv", n, depth, seed, sv_time,
                                None, None, 2 ** (n // 2), 0.0)
                )
    return result


def run_qasm_experiment(cfg: BenchConfig, corpus_dir=None) -> ExperimentResult:
    """Run every .qasm file of a corpus directory on CF and SU; compute
    state-vector fidelities when the circuit fits the oracle. Unparseable
    circuits are recorded as skips, not errors.
    """
    corpus = corpus_dir or cfg.corpus_dir or os.environ.get(CORPUS_ENV_VAR)
    if not corpus:
        raise ShapeError(
            f"no corpus directory given (flag, config, or ${CORPUS_ENV_VAR})"
        )
    paths = sorted(glob.glob(os.path.join(corpus, "*.qasm")))
    if not paths:
        raise ShapeError(f"no .qasm files under {corpus!r}")
    result = ExperimentResult()
    policy = cfg.policy
    for path in paths:
        stem = Path(path).stem
        experiment = f"qasm:{stem}"
        try:
            circ = parse_qasm_file(path)
        except QasmError as exc:
            result.skipped.append({"circuit": stem, "reason": str(exc)})
            continue
        try:
            cf_state, cf_time = run_timed("cf", circ, policy)
            su_state, su_time = run_timed("su", circ, policy)
            f = fidelity_cf(cf_state, su_state)
            fsv_cf = fsv_su = None
            if "sv" in cfg.engines and circ.num_qubits <= statevector.MAX_QUBITS:
                sv_state, _ = run_timed("sv", circ, None)
                fsv_cf = fidelity_sv(sv_state, cf_state)
                fsv_su = fidelity_sv(sv_state, su_state)
        except TnqsimError as exc:
            log.warning("qasm cell %s failed: %s", stem, exc)
            result.failures.append({"circuit": stem, "reason": str(exc)})
            continue
        result.records.append(
            _tn_record(experiment, "cf", circ, None, None, cf_state, cf_time, f, fsv_cf)
        )
        result.records.append(
            _tn_record(experiment, "su", circ, None, None, su_state, su_time, f, fsv_su)
        )
    return result


def run_experiment(cfg: BenchConfig, corpus_dir=None) -> ExperimentResult:
    if cfg.experiment == "shallow":
        return run_shallow_experiment(cfg)
    if cfg.experiment in ("quantum_volume", "qv"):
        return run_qv_experiment(cfg)
    if cfg.experiment == "qasm":
        return run_qasm_experiment(cfg, corpus_dir)
    raise ValueError(f"unknown experiment {cfg.experiment!r}")


# -- aggregation and reporting ----------------------------------------------


def fit_loglog_slope(points) -> tuple[float, float, float]:
    """Least-squares line through (log n, log runtime): (slope, intercept, r2)."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ShapeError("slope fit needs at least 3 points")
    if np.any(pts <= 0):
        raise ShapeError("slope fit needs positive sizes and runtimes")
    x, y = np.log(pts[:, 0]), np.log(pts[:, 1])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def _stat_dict(stat: MeanSE) -> dict:
    return {"mean": stat.mean, "se": stat.se, "count": stat.count}


def summarize_shallow(records) -> dict:
    """Mean runtime and CF/SU fidelity per size, plus fitted log-log slopes
    (through the per-size mean runtimes) and the SU speedup at each size.
    """
    sizes = sorted({r.n for r in records})
    per_engine: dict[str, dict] = {}
    for engine in ("cf", "su"):
        rows = [r for r in records if r.engine == engine]
        runtime = {n: mean_se(r.runtime_s for r in rows if r.n == n) for n in sizes}
        points = [(n, runtime[n].mean) for n in sizes]
        entry = {"runtime_s": {n: _stat_dict(v) for n, v in runtime.items()}}
        if len(points) >= 3:
            slope, intercept, r2 = fit_loglog_slope(points)
            entry["slope"] = {"slope": slope, "intercept": intercept, "r2": r2}
        per_engine[engine] = entry
    f_cf = {
        n: _stat_dict(mean_se(r.f_cf for r in records if r.engine == "cf" and r.n == n))
        for n in sizes
    }
    speedup = {}
    for n in sizes:
        cf_t = per_engine["cf"]["runtime_s"][n]["mean"]
        su_t = per_engine["su"]["runtime_s"][n]["mean"]
        speedup[n] = cf_t / su_t if su_t > 0 else None
    return {"sizes": sizes, "engines": per_engine, "f_cf": f_cf, "speedup": speedup}


def summarize_qv(records) -> dict:
    """Per-depth mean and standard error of F_CF and of both engines' F_SV."""
    depths = sorted({r.depth for r in records if r.depth is not None})
    out = {"depths": depths, "f_cf": {}, "f_sv": {"cf": {}, "su": {}}}
    for d in depths:
        cf_rows = [r for r in records if r.depth == d and r.engine == "cf"]
        su_rows = [r for r in records if r.depth == d and r.engine == "su"]
        out["f_cf"][d] = _stat_dict(mean_se(r.f_cf for r in cf_rows))
        if any(r.f_sv is not None for r in cf_rows):
            out["f_sv"]["cf"][d] = _stat_dict(
                mean_se(r.f_sv for r in cf_rows if r.f_sv is not None)
            )
            out["f_sv"]["su"][d] = _stat_dict(
                mean_se(r.f_sv for r in su_rows if r.f_sv is not None)
            )
    return out


def summarize_qasm(records) -> dict:
    """Per-circuit fidelities with exclusion flags for F_SV below threshold."""
    circuits = sorted({r.experiment for r in records})
    rows = {}
    for c in circuits:
        entry = {}
        for engine in ("cf", "su"):
            rec = next((r for r in records if r.experiment == c and r.engine == engine), None)
            if rec is not None:
                entry[engine] = {"f_sv": rec.f_sv, "f_cf": rec.f_cf, "n": rec.n,
                                 "max_bond": rec.max_bond}
        fsvs = [v["f_sv"] for v in entry.values() if v.get("f_sv") is not None]
        entry["excluded"] = bool(fsvs) and any(f < QASM_EXCLUSION_THRESHOLD for f in fsvs)
        rows[c.removeprefix("qasm:")] = entry
    return {"circuits": rows}


def summarize(experiment: str, result: ExperimentResult) -> dict:
    if experiment == "shallow":
        body = summarize_shallow(result.records)
    elif experiment in ("quantum_volume", "qv"):
        body = summarize_qv(result.records)
    elif experiment == "qasm":
        body = summarize_qasm(result.records)
    else:
        raise ValueError(f"unknown experiment {experiment!r}")
    body["failures"] = result.failures
    body["skipped"] = result.skipped
    return body


# -- serialization ------------------------------------------------------------


def _format_field(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(records, out) -> None:
    """Write records with the fixed header; inapplicable fields stay empty.
    ``out`` is a path or an open text file.
    """
    own = isinstance(out, (str, os.PathLike))
    fh = open(out, "w", newline="", encoding="utf-8") if own else out
    try:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([_format_field(getattr(r, k)) for k in CSV_HEADER])
    finally:
        if own:
            fh.close()


def read_csv(path) -> list[BenchRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ShapeError(f"unexpected CSV header {reader.fieldnames}")
        for row in reader:
            records.append(
                BenchRecord(
                    experiment=row["experiment"],
                    engine=row["engine"],
                    n=int(row["n"]),
                    depth=int(row["depth"]) if row["depth"] else None,
                    seed=int(row["seed"]) if row["seed"] else None,
                    runtime_s=float(row["runtime_s"]),
                    f_cf=float(row["f_cf"]) if row["f_cf"] else None,
                    f_sv=float(row["f_sv"]) if row["f_sv"] else None,
                    max_bond=int(row["max_bond"]),
                    discarded_weight=float(row["discarded_weight"]),
                )
            )
    return records


def write_json(records, out) -> None:
    """JSON mirror of the CSV schema: a list of record objects."""
    payload = [asdict(r) for r in records]
    own = isinstance(out, (str, os.PathLike))
    fh = open(out, "w", encoding="utf-8") if own else out
    try:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    finally:
        if own:
            fh.close()
