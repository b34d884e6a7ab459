"""Experiment orchestration: ensembles, persistence, statistics, checks.

run_experiment executes a declarative ExperimentSpec and persists one raw
row per trial; convergence_sweep tabulates normalized completion times
over an N ladder; verify_suite bundles the statistical and exactness
checks that gate the simulator (the same functions back the acceptance
test suite). Output is a pure function of the spec: identical specs give
byte-identical files.
"""
from __future__ import annotations

import csv
import functools
import io
import json
import math
import os
import shutil
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import (
    Algorithm,
    ConfigError,
    ProtocolConfig,
    RngStream,
    sample_active,
)
from . import theory
from .protocols import TraceResult, run
from .theory import ExactLaw, constant, cyclic_beats_naive, lower_bound_tail

__all__ = [
    "GridCell",
    "ExperimentSpec",
    "TrialRow",
    "CellSummary",
    "SummaryStats",
    "run_experiment",
    "convergence_sweep",
    "SweepRow",
    "CheckResult",
    "VerifyReport",
    "verify_suite",
    "acceptance_checks",
]

TRAJECTORY_RECORD_MAX_N = 2 ** 16
CSV_COLUMNS = ("trial_id", "algorithm", "N", "p", "seed", "stream_id",
               "n_active", "phase1_end", "t_eps", "t_one_minus_eps",
               "T_n", "cap_hit")

# frozen parameters of the acceptance ensemble
ACCEPTANCE_SEED = 1729
_ACCEPT_N = 2 ** 20
_ACCEPT_P = 0.5
_ACCEPT_TRIALS = 336  # 3 protocols x 336 = 1008 pooled trials
_ACCEPT_HEAD = 100


@dataclass(frozen=True)
class GridCell:
    algorithm: Algorithm
    N: int
    p: float

    def config(self, epsilon: float, record_trajectory: bool) -> ProtocolConfig:
        record = record_trajectory and self.N <= TRAJECTORY_RECORD_MAX_N
        return ProtocolConfig(algorithm=self.algorithm, N=self.N, p=self.p,
                              epsilon=epsilon, record_trajectory=record)


_SPEC_KEYS = {"grid", "trials_per_cell", "base_seed", "record_trajectory",
              "epsilon", "output_path", "format"}
_CELL_KEYS = {"algorithm", "N", "p"}


@dataclass(frozen=True)
class ExperimentSpec:
    """Declarative description of a raw-trial ensemble."""

    grid: Tuple[GridCell, ...]
    trials_per_cell: int
    base_seed: int
    record_trajectory: bool
    epsilon: float
    output_path: str
    format: str

    def __post_init__(self) -> None:
        if not self.grid:
            raise ConfigError("grid must be nonempty")
        if int(self.trials_per_cell) < 1:
            raise ConfigError("trials_per_cell must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be 'csv' or 'json', got {self.format!r}")
        for cell in self.grid:
            cell.config(self.epsilon, False)  # validates each cell

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        if not isinstance(data, dict):
            raise ConfigError("experiment spec must be a JSON object")
        keys = set(data)
        if keys != _SPEC_KEYS:
            missing, extra = _SPEC_KEYS - keys, keys - _SPEC_KEYS
            raise ConfigError(f"spec keys mismatch: missing={sorted(missing)} "
                              f"unknown={sorted(extra)}")
        raw_grid = data["grid"]
        if not isinstance(raw_grid, list) or not raw_grid:
            raise ConfigError("grid must be a nonempty list")
        cells = []
        for entry in raw_grid:
            if not isinstance(entry, dict) or set(entry) != _CELL_KEYS:
                raise ConfigError(f"grid cell must have keys exactly "
                                  f"{sorted(_CELL_KEYS)}, got {entry!r}")
            cells.append(GridCell(algorithm=Algorithm.parse(str(entry["algorithm"])),
                                  N=int(entry["N"]), p=float(entry["p"])))
        return cls(
            grid=tuple(cells),
            trials_per_cell=int(data["trials_per_cell"]),
            base_seed=int(data["base_seed"]),
            record_trajectory=bool(data["record_trajectory"]),
            epsilon=float(data["epsilon"]),
            output_path=str(data["output_path"]),
            format=str(data["format"]).lower(),
        )

    @classmethod
    def from_json_file(cls, path: str) -> "ExperimentSpec":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read spec file {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"spec file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass(frozen=True)
class TrialRow:
    trial_id: int
    algorithm: str
    N: int
    p: float
    seed: int
    stream_id: int
    n_active: int
    phase1_end: Optional[int]
    t_eps: Optional[int]
    t_one_minus_eps: Optional[int]
    T_n: int
    cap_hit: bool
    trajectory: Optional[Tuple[int, ...]] = None

    def csv_values(self) -> Tuple[str, ...]:
        def fmt(value) -> str:
            if value is None:
                return ""
            if isinstance(value, bool):
                return "true" if value else "false"
            if isinstance(value, float):
                return repr(value)
            return str(value)

        return tuple(fmt(getattr(self, col)) for col in CSV_COLUMNS)

    def json_object(self) -> dict:
        obj = {col: getattr(self, col) for col in CSV_COLUMNS}
        if self.trajectory is not None:
            obj["trajectory"] = list(self.trajectory)
        return obj


def _row_from_trace(trial_id: int, seed: int, stream_id: int,
                    result: TraceResult) -> TrialRow:
    cfg = result.config
    return TrialRow(
        trial_id=trial_id,
        algorithm=cfg.algorithm.value,
        N=cfg.N,
        p=cfg.p,
        seed=seed,
        stream_id=stream_id,
        n_active=result.n_active,
        phase1_end=result.phase1_end,
        t_eps=result.threshold_times.get("t_eps"),
        t_one_minus_eps=result.threshold_times.get("t_one_minus_eps"),
        T_n=result.completion_time,
        cap_hit=result.cap_hit,
        trajectory=tuple(result.trajectory) if result.trajectory is not None else None,
    )


def _execute_trial(args) -> TrialRow:
    (alg_value, N, p, epsilon, record, seed, stream_id, trial_id) = args
    cell = GridCell(Algorithm(alg_value), N, p)
    config = cell.config(epsilon, record)
    result = run(config, RngStream(seed=seed, stream_id=stream_id))
    return _row_from_trace(trial_id, seed, stream_id, result)


@dataclass(frozen=True)
class CellSummary:
    algorithm: str
    N: int
    p: float
    trials: int
    cap_hits: int
    mean: float
    stddev: float
    min: int
    max: int
    q5: float
    q50: float
    q95: float
    mean_normalized: float
    theory_constant: float
    ratio: float
    stage_means: Optional[Tuple[float, float, float]]

    def as_dict(self) -> dict:
        out = {
            "algorithm": self.algorithm, "N": self.N, "p": self.p,
            "trials": self.trials, "cap_hits": self.cap_hits,
            "mean": self.mean, "stddev": self.stddev,
            "min": self.min, "max": self.max,
            "q5": self.q5, "q50": self.q50, "q95": self.q95,
            "mean_normalized": self.mean_normalized,
            "theory_constant": self.theory_constant, "ratio": self.ratio,
        }
        if self.stage_means is not None:
            out["stage_means"] = list(self.stage_means)
        return out


@dataclass(frozen=True)
class SummaryStats:
    cells: Tuple[CellSummary, ...]

    def as_dict(self) -> dict:
        return {"cells": [c.as_dict() for c in self.cells]}


def _summarize_cell(cell: GridCell, rows: Sequence[TrialRow]) -> CellSummary:
    T = np.array([r.T_n for r in rows], dtype=np.float64)
    caps = sum(1 for r in rows if r.cap_hit)
    ln_n = math.log(cell.N) if cell.N > 1 else 0.0
    mean = float(T.mean())
    normalized = mean / ln_n if ln_n > 0 else 0.0
    c_theory = constant(cell.algorithm, cell.p)
    staged = [(r.t_eps, r.t_one_minus_eps, r.T_n) for r in rows
              if r.t_eps is not None and r.t_one_minus_eps is not None]
    stage_means = None
    if staged:
        arr = np.array(staged, dtype=np.float64)
        stage_means = (
            float(arr[:, 0].mean()),
            float((arr[:, 1] - arr[:, 0]).mean()),
            float((arr[:, 2] - arr[:, 1]).mean()),
        )
    q5, q50, q95 = (float(q) for q in np.quantile(T, [0.05, 0.5, 0.95]))
    return CellSummary(
        algorithm=cell.algorithm.value, N=cell.N, p=cell.p,
        trials=len(rows), cap_hits=caps,
        mean=mean,
        stddev=float(T.std(ddof=1)) if len(rows) > 1 else 0.0,
        min=int(T.min()), max=int(T.max()),
        q5=q5, q50=q50, q95=q95,
        mean_normalized=normalized,
        theory_constant=c_theory,
        ratio=normalized / c_theory if c_theory > 0 else 0.0,
        stage_means=stage_means,
    )


def _render_csv(rows: Sequence[TrialRow]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue().encode("utf-8")


def _render_json(rows: Sequence[TrialRow], summary: SummaryStats) -> bytes:
    payload = {"rows": [r.json_object() for r in rows],
               "summary": summary.as_dict()}
    return (json.dumps(payload, sort_keys=True, separators=(",", ":"))
            + "\n").encode("utf-8")


def _atomic_write(path: str, blob: bytes) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gossipsim-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(blob)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise ConfigError(f"cannot write output to {path}: {exc}") from exc


def run_experiment(spec: ExperimentSpec,
                   workers: Optional[int] = None) -> SummaryStats:
    """Execute every cell of the spec and persist one raw row per trial.

    Trials are independent work units; with workers > 1 they execute in a
    process pool, and rows are folded in trial order so the persisted bytes
    do not depend on scheduling. Nothing is written if any trial fails.
    """
    tasks = []
    trials = spec.trials_per_cell
    for ci, cell in enumerate(spec.grid):
        for ti in range(trials):
            stream_id = ci * trials + ti
            tasks.append((cell.algorithm.value, cell.N, cell.p, spec.epsilon,
                          spec.record_trajectory, spec.base_seed, stream_id, ti))
    if workers is not None and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_execute_trial, tasks, chunksize=8))
    else:
        rows = [_execute_trial(task) for task in tasks]
    summaries = []
    for ci, cell in enumerate(spec.grid):
        summaries.append(_summarize_cell(cell, rows[ci * trials:(ci + 1) * trials]))
    summary = SummaryStats(cells=tuple(summaries))
    blob = (_render_csv(rows) if spec.format == "csv"
            else _render_json(rows, summary))
    _atomic_write(spec.output_path, blob)
    return summary


@dataclass(frozen=True)
class SweepRow:
    N: int
    mean_normalized: float
    ratio: float
    ratio_se: float


def convergence_sweep(algorithm: Algorithm, p: float, N_list: Sequence[int],
                      trials: int, base_seed: int = ACCEPTANCE_SEED,
                      epsilon: float = 0.1) -> List[SweepRow]:
    """Normalized completion means over an increasing N ladder.

    Used to check that mean(T_n)/ln N approaches the theory constant as N
    grows. Returns one row per N with the ratio to C(p) and its standard
    error.
    """
    if len(N_list) < 2:
        raise ConfigError("N ladder needs at least 2 entries")
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ConfigError("N ladder must be strictly increasing")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    c_theory = constant(algorithm, p)
    out: List[SweepRow] = []
    for ci, N in enumerate(N_list):
        cell = GridCell(algorithm, int(N), p)
        config = cell.config(epsilon, False)
        T = np.empty(trials, dtype=np.float64)
        for ti in range(trials):
            stream = RngStream(seed=base_seed, stream_id=ci * trials + ti)
            T[ti] = run(config, stream).completion_time
        ln_n = math.log(N) if N > 1 else 1.0
        ratios = T / ln_n / c_theory
        se = float(ratios.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        out.append(SweepRow(N=int(N), mean_normalized=float(T.mean() / ln_n),
                            ratio=float(ratios.mean()), ratio_se=se))
    return out


# ---------------------------------------------------------------------------
# verification checks (shared by verify_suite and the acceptance test suite)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


@dataclass(frozen=True)
class VerifyReport:
    checks: Tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"[{status}] {c.name} ({c.elapsed:.1f}s): {c.detail}")
        verdict = "all checks passed" if self.all_passed else "FAILURES present"
        lines.append(f"=> {verdict}")
        return "\n".join(lines)


def _timed(name: str, passed: bool, detail: str, t0: float) -> CheckResult:
    return CheckResult(name=name, passed=passed, detail=detail,
                       elapsed=time.time() - t0)


@functools.lru_cache(maxsize=8)
def _coupled_completions(N: int, p: float, trials: int, seed: int,
                         algorithms: Tuple[Algorithm, ...],
                         ) -> Dict[Algorithm, Dict[str, np.ndarray]]:
    """Completion times for pathwise-coupled trials, one stream per trial.

    Every algorithm consumes the same per-trial stream, hence the same
    active set and warm-up randomness. Returns per-algorithm arrays of
    completion times and cap flags, plus the build time.
    """
    out: Dict[Algorithm, Dict[str, np.ndarray]] = {}
    for alg in algorithms:
        config = ProtocolConfig(algorithm=alg, N=N, p=p)
        T = np.empty(trials, dtype=np.int64)
        caps = np.zeros(trials, dtype=bool)
        t0 = time.time()
        for ti in range(trials):
            result = run(config, RngStream(seed=seed, stream_id=ti))
            T[ti] = result.completion_time
            caps[ti] = result.cap_hit
        out[alg] = {"T": T, "cap": caps,
                    "elapsed": np.float64(time.time() - t0)}
    return out


def _acceptance_ensemble() -> Dict[Algorithm, Dict[str, np.ndarray]]:
    return _coupled_completions(
        _ACCEPT_N, _ACCEPT_P, _ACCEPT_TRIALS, ACCEPTANCE_SEED,
        (Algorithm.NAIVE, Algorithm.CYCLIC, Algorithm.IMPROVED_CYCLIC))


def _band_check(name: str, values: np.ndarray, c_theory: float, N: int,
                lo: float, hi: float, t0: float,
                extra: str = "") -> CheckResult:
    ratio = float(values.mean() / math.log(N) / c_theory)
    ok = lo <= ratio <= hi
    detail = (f"mean T={values.mean():.2f}, ratio={ratio:.4f}, "
              f"band=[{lo}, {hi}]{extra}")
    return _timed(name, ok, detail, t0)


def check_naive_constant() -> CheckResult:
    """Mean naive time at N=2^20, p=0.5 inside [0.8, 1.2] of theory."""
    t0 = time.time()
    ens = _acceptance_ensemble()
    data = ens[Algorithm.NAIVE]
    T = data["T"][:_ACCEPT_HEAD].astype(np.float64)
    c_theory = constant(Algorithm.NAIVE, _ACCEPT_P)
    res = _band_check("naive completion constant", T, c_theory, _ACCEPT_N,
                      0.8, 1.2, t0)
    runtime_ok = float(data["elapsed"]) <= 300.0
    return CheckResult(res.name, res.passed and runtime_ok,
                       res.detail + f", build={float(data['elapsed']):.0f}s (<=300s)",
                       res.elapsed)


def check_cyclic_constant() -> CheckResult:
    t0 = time.time()
    ens = _acceptance_ensemble()
    T = ens[Algorithm.CYCLIC]["T"][:_ACCEPT_HEAD].astype(np.float64)
    return _band_check("cyclic completion constant", T,
                       constant(Algorithm.CYCLIC, _ACCEPT_P), _ACCEPT_N,
                       0.8, 1.2, t0)


def check_cyclic_beats_naive_trials() -> CheckResult:
    t0 = time.time()
    ens = _acceptance_ensemble()
    naive_mean = ens[Algorithm.NAIVE]["T"][:_ACCEPT_HEAD].mean()
    wins = int((ens[Algorithm.CYCLIC]["T"][:_ACCEPT_HEAD] < naive_mean).sum())
    return _timed("cyclic beats naive mean on coupled trials", wins >= 95,
                  f"wins={wins}/100 against naive mean {naive_mean:.2f} "
                  f"(need >=95)", t0)


def check_improved_constant() -> CheckResult:
    t0 = time.time()
    ens = _acceptance_ensemble()
    T = ens[Algorithm.IMPROVED_CYCLIC]["T"][:_ACCEPT_HEAD].astype(np.float64)
    return _band_check("improved-cyclic completion constant", T,
                       constant(Algorithm.IMPROVED_CYCLIC, _ACCEPT_P),
                       _ACCEPT_N, 0.8, 1.25, t0)


def check_improved_beats_cyclic_trials() -> CheckResult:
    t0 = time.time()
    ens = _acceptance_ensemble()
    cyclic_mean = ens[Algorithm.CYCLIC]["T"][:_ACCEPT_HEAD].mean()
    wins = int((ens[Algorithm.IMPROVED_CYCLIC]["T"][:_ACCEPT_HEAD]
                < cyclic_mean).sum())
    return _timed("improved-cyclic beats cyclic mean on coupled trials",
                  wins >= 95,
                  f"wins={wins}/100 against cyclic mean {cyclic_mean:.2f} "
                  f"(need >=95)", t0)


def check_lower_bound_envelope() -> CheckResult:
    """No protocol beats the branching lower bound K steps early."""
    t0 = time.time()
    ens = _acceptance_ensemble()
    pooled = np.concatenate([ens[a]["T"] for a in ens])
    base = math.log(_ACCEPT_N) / math.log1p(_ACCEPT_P)
    parts = []
    ok = True
    for K in (2, 4, 6):
        early = int((pooled < base - K).sum())
        frac = early / len(pooled)
        bound = lower_bound_tail(1.0, _ACCEPT_P, K) * 1.5
        ok = ok and frac <= bound and (K < 6 or early == 0)
        parts.append(f"K={K}: {early} early (frac {frac:.4f} <= {bound:.4f})")
    return _timed("lower-bound envelope", ok,
                  f"{len(pooled)} pooled trials, base {base:.2f}; "
                  + "; ".join(parts), t0)


def _ladder_check(algorithm: Algorithm, trials: int = 100) -> CheckResult:
    t0 = time.time()
    rows = convergence_sweep(algorithm, _ACCEPT_P,
                             [2 ** 14, 2 ** 17, 2 ** 20], trials)
    ratios = [r.ratio for r in rows]
    ses = [r.ratio_se for r in rows]
    monotone = all(
        ratios[i + 1] <= ratios[i] + math.hypot(ses[i], ses[i + 1])
        for i in range(len(rows) - 1))
    ends_ok = ratios[-1] <= 1.25
    detail = ("ratios " + " -> ".join(f"{r:.4f}" for r in ratios)
              + f" (se {', '.join(f'{s:.4f}' for s in ses)}), "
              + f"monotone={monotone}, final<=1.25: {ends_ok}")
    return _timed(f"convergence trend: {algorithm.value}",
                  monotone and ends_ok, detail, t0)


def check_convergence_naive() -> CheckResult:
    return _ladder_check(Algorithm.NAIVE)


def check_convergence_cyclic() -> CheckResult:
    return _ladder_check(Algorithm.CYCLIC)


def check_convergence_improved() -> CheckResult:
    return _ladder_check(Algorithm.IMPROVED_CYCLIC)


def _empirical_law(algorithm: Algorithm, N: int, p: float, trials: int,
                   seed: int) -> ExactLaw:
    config = ProtocolConfig(algorithm=algorithm, N=N, p=p)
    values = np.empty(trials, dtype=np.int64)
    for ti in range(trials):
        values[ti] = run(config, RngStream(seed=seed, stream_id=ti)).completion_time
    return ExactLaw.from_samples(values)


def check_oracle_law(trials: int = 10 ** 5, tolerance: float = 0.02,
                     seed: int = ACCEPTANCE_SEED) -> CheckResult:
    t0 = time.time()
    exact = theory.exact_oracle_law(8, 0.5)
    empirical = _empirical_law(Algorithm.ORACLE, 8, 0.5, trials, seed)
    tv = exact.total_variation(empirical)
    return _timed("oracle empirical law vs exact DP", tv <= tolerance,
                  f"TV={tv:.4f} over {trials} trials (<= {tolerance})", t0)


def check_naive_law(trials: int = 10 ** 5, tolerance: float = 0.02,
                    seed: int = ACCEPTANCE_SEED) -> CheckResult:
    t0 = time.time()
    worst = 0.0
    details = []
    for N in (2, 8):
        exact = theory.exact_naive_law(N, 0.5)
        empirical = _empirical_law(Algorithm.NAIVE, N, 0.5, trials, seed + N)
        tv = exact.total_variation(empirical)
        worst = max(worst, tv)
        details.append(f"N={N}: TV={tv:.4f}")
    return _timed("naive empirical law vs exact DP", worst <= tolerance,
                  ", ".join(details) + f" over {trials} trials (<= {tolerance})",
                  t0)


def check_active_concentration(samples: int = 10 ** 3,
                               seed: int = ACCEPTANCE_SEED) -> CheckResult:
    """Active count concentrates within N^(2/3) of pN."""
    t0 = time.time()
    N, p = 10 ** 6, 0.5
    spread = N ** (2.0 / 3.0)
    outliers = 0
    for i in range(samples):
        state = sample_active(N, p, RngStream(seed=seed, stream_id=i))
        n = int(np.count_nonzero(state.active))
        if abs(n - p * N) > spread:
            outliers += 1
    frac = outliers / samples
    return _timed("active-count concentration", frac < 0.05,
                  f"{outliers}/{samples} samples beyond pN +/- N^(2/3) "
                  f"(fraction {frac:.4f} < 0.05)", t0)


def check_constants_ordering() -> CheckResult:
    """f(p) < 0 and the constants chain on the 99-point p grid."""
    t0 = time.time()
    bad = []
    for i in range(1, 100):
        p = i / 100.0
        f = cyclic_beats_naive(p)
        ci = constant(Algorithm.IMPROVED_CYCLIC, p)
        cc = constant(Algorithm.CYCLIC, p)
        cn = constant(Algorithm.NAIVE, p)
        if not (f < 0.0 and ci < cc < cn):
            bad.append(p)
    return _timed("analytic ordering on the p grid", not bad,
                  "no violations on p=0.01..0.99" if not bad
                  else f"violations at {bad}", t0)


def check_domination(trials: int = 500, N: int = 2 ** 16,
                     p_values: Tuple[float, ...] = (0.3, 0.5, 0.8),
                     seed: int = ACCEPTANCE_SEED) -> CheckResult:
    """Oracle completion never exceeds any protocol's on coupled trials."""
    t0 = time.time()
    algorithms = (Algorithm.ORACLE, Algorithm.NAIVE, Algorithm.CYCLIC,
                  Algorithm.IMPROVED_CYCLIC)
    violations = 0
    checked = 0
    for p in p_values:
        ens = _coupled_completions(N, p, trials, seed, algorithms)
        oracle_T = ens[Algorithm.ORACLE]["T"]
        for alg in algorithms[1:]:
            diff = ens[alg]["T"] - oracle_T
            violations += int((diff < 0).sum())
            checked += trials
    return _timed("oracle domination on coupled trials", violations == 0,
                  f"{violations} violations over {checked} comparisons "
                  f"at N={N}, p={list(p_values)}", t0)


def check_determinism(tmp_dir: Optional[str] = None) -> CheckResult:
    """Identical specs give byte-identical files, serial or parallel."""
    t0 = time.time()
    base = tempfile.mkdtemp(dir=tmp_dir, prefix="gossipsim-verify-")
    try:
        blobs = []
        for tag, workers in (("a", None), ("b", None), ("par", 2)):
            path = os.path.join(base, f"{tag}.csv")
            spec = ExperimentSpec(
                grid=(GridCell(Algorithm.NAIVE, 1024, 0.5),
                      GridCell(Algorithm.CYCLIC, 1024, 0.5)),
                trials_per_cell=5, base_seed=77, record_trajectory=False,
                epsilon=0.1, output_path=path, format="csv")
            run_experiment(spec, workers=workers)
            with open(path, "rb") as fh:
                blobs.append(fh.read())
        ok = blobs[0] == blobs[1] == blobs[2]
        return _timed("byte-identical reruns (serial and parallel)", ok,
                      "identical CSVs" if ok else "byte mismatch between runs",
                      t0)
    finally:
        shutil.rmtree(base, ignore_errors=True)


def acceptance_checks() -> List[CheckResult]:
    """The full acceptance gauntlet (shared with tests/test_acceptance.py)."""
    return [
        check_naive_constant(),
        check_cyclic_constant(),
        check_cyclic_beats_naive_trials(),
        check_improved_constant(),
        check_improved_beats_cyclic_trials(),
        check_lower_bound_envelope(),
        check_convergence_naive(),
        check_convergence_cyclic(),
        check_convergence_improved(),
        check_oracle_law(),
        check_naive_law(),
        check_active_concentration(),
        check_constants_ordering(),
        check_domination(),
        check_determinism(),
    ]


def quick_checks() -> List[CheckResult]:
    """Fast subset for `verify quick` (small N, reduced trial counts)."""
    return [
        check_constants_ordering(),
        check_oracle_law(trials=2 * 10 ** 4, tolerance=0.03),
        check_naive_law(trials=2 * 10 ** 4, tolerance=0.03),
        check_active_concentration(samples=200),
        check_domination(trials=100, N=2 ** 12),
        check_determinism(),
    ]


def verify_suite(level: str = "quick") -> VerifyReport:
    """Bundle the verification checks; `quick` <= 60 s, `full` <= 30 min."""
    if level == "quick":
        return VerifyReport(checks=tuple(quick_checks()))
    if level == "full":
        return VerifyReport(checks=tuple(acceptance_checks()))
    raise ConfigError(f"verify level must be 'quick' or 'full', got {level!r}")
