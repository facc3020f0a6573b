"""Sweep runner: generate matrices along one axis, estimate d_r, aggregate, emit CSV.

A sweep walks one axis (rank ``r``, size ``n``, band ``b`` or factor rank
``k``) of a matrix family. For every axis value it runs ``trials``
independent distance estimates and keeps the order statistics of the
resulting ``eps_plus`` values together with the closed-form bounds.

Seeding: trial ``t`` at axis index ``i`` draws its matrix from substream
``(i, t, 0)`` and its solver seed from substream ``(i, t, 1)`` of the master
seed. The identity and Hadamard families are deterministic, so their trials
differ only in the solver's starting points.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .apsolve import ApConfig, estimate_distance
from .diagnostics import cross_bound, diagnose, thm4_bound, thm8_bound
from .errors import EmptyInput
from .genmat import MatrixSpec, generate
from .matcore import substream_seed

log = logging.getLogger(__name__)

AXES = ("r", "n", "b", "k")
CSV_COLUMNS = (
    "axis",
    "trial_count",
    "best",
    "p10",
    "p25",
    "median",
    "ultimate_bound",
    "cross_bound",
    "thm4_bound",
    "thm8_bound",
    "thm8_C",
    "wall_time_s",
)
SOLVER_KEYS = ("max_iter", "feas_tol", "abs_tol", "stall_window", "stall_tol", "p", "q")


@dataclass
class SweepSpec:
    family: MatrixSpec
    sweep_axis: str
    axis_values: list
    rank: Optional[int] = None
    trials: int = 5
    restarts: int = 3
    bs_tol: float = 1e-3
    solver: ApConfig = field(default_factory=ApConfig)
    master_seed: int = 0
    thm8_C: float = 1.0
    output_dir: str = "results"
    plots: list = field(default_factory=lambda: ["loglog"])
    workers: int = 1
    csv_wall_time: bool = False

    def __post_init__(self):
        if self.sweep_axis not in AXES:
            raise ValueError(f"sweep_axis must be one of {AXES}, got {self.sweep_axis!r}")
        if not self.axis_values:
            raise ValueError("axis_values must be nonempty")
        if any(b <= a for a, b in zip(self.axis_values, self.axis_values[1:])):
            raise ValueError("axis_values must be strictly increasing")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.sweep_axis != "r" and self.rank is None:
            raise ValueError("a fixed rank is required unless sweeping r")

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        d = dict(d)
        d["family"] = MatrixSpec(**d["family"])
        solver = d.pop("solver", {}) or {}
        unknown = set(solver) - set(SOLVER_KEYS)
        if unknown:
            raise ValueError(f"unknown solver keys {sorted(unknown)}")
        d["solver"] = ApConfig(**solver)
        return cls(**d)

    @classmethod
    def load(cls, path) -> "SweepSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["family"] = self.family.to_dict()
        d["solver"] = {k: getattr(self.solver, k) for k in SOLVER_KEYS}
        return d

    def point(self, value) -> tuple[MatrixSpec, int]:
        """Matrix template and approximation rank at one axis value."""
        if self.sweep_axis == "r":
            return self.family, int(value)
        return replace(self.family, **{self.sweep_axis: int(value)}), int(self.rank)


@dataclass
class SweepRecord:
    axis_value: float
    values: list
    median: float
    p10: float
    p25: float
    best: float
    worst: float
    ultimate: float
    cross: float
    thm4: float
    thm8: float
    thm8_C: float
    wall_time: float
    spectral_norm: float = math.nan
    seeds: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def csv_row(self, wall_time: bool = True) -> list:
        return [
            _fmt(self.axis_value),
            str(len(self.values)),
            *(_fmt(x) for x in (self.best, self.p10, self.p25, self.median)),
            *(_fmt(x) for x in (self.ultimate, self.cross, self.thm4, self.thm8, self.thm8_C)),
            _fmt(self.wall_time if wall_time else math.nan),
        ]


def aggregate(values) -> tuple[float, float, float, float]:
    """(median, p10, p25, best) with linear interpolation between order statistics."""
    v = np.asarray(list(values), dtype=float)
    if v.size == 0:
        raise EmptyInput("cannot aggregate an empty list")
    p10, p25, med = np.percentile(v, [10, 25, 50], method="linear")
    return float(med), float(p10), float(p25), float(v.min())


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return format(x, ".17g")


def _nanmedian(xs) -> float:
    xs = [x for x in xs if not math.isnan(x)]
    return float(np.median(xs)) if xs else math.nan


def _run_trial(spec: SweepSpec, index: int, trial: int) -> dict:
    template, r = spec.point(spec.axis_values[index])
    mseed = substream_seed(spec.master_seed, index, trial, 0)
    sseed = substream_seed(spec.master_seed, index, trial, 1)
    X = generate(replace(template, seed=mseed if template.is_random else template.seed))
    est = estimate_distance(
        X,
        r,
        bs_tol=spec.bs_tol,
        restarts=spec.restarts,
        cfg=replace(spec.solver, seed=sseed),
    )
    d = diagnose(X)
    t4, v4 = thm4_bound(d, r)
    t8, v8 = thm8_bound(d, r, spec.thm8_C)
    cross = cross_bound(d.singular_values, r, d.m, d.n) if r < min(d.m, d.n) else 0.0
    return {
        "eps_plus": est.eps_plus,
        "eps_minus": est.eps_minus,
        "probes": est.n_probes,
        "ap_runs": len(est.probes),
        "ultimate": d.max_norm,
        "cross": cross,
        "thm4": t4 if v4 else math.nan,
        "thm8": t8 if v8 else math.nan,
        "thm4_raw": t4,
        "thm8_raw": t8,
        "spectral_norm": d.spectral_norm,
        "rank": d.rank,
        "mu_col": d.mu_col,
        "mu_row": d.mu_row,
        "matrix_seed": mseed,
        "solver_seed": sseed,
    }


def _run_point(spec: SweepSpec, index: int) -> tuple[SweepRecord, list]:
    value = spec.axis_values[index]
    t0 = time.perf_counter()
    try:
        trials = [_run_trial(spec, index, t) for t in range(spec.trials)]
    except Exception as exc:  # record and carry on with the other points
        log.exception("axis value %s failed", value)
        nan = math.nan
        rec = SweepRecord(value, [], nan, nan, nan, nan, nan, nan, nan, nan, nan, spec.thm8_C,
                          time.perf_counter() - t0, error=f"{type(exc).__name__}: {exc}")
        return rec, []
    values = [t["eps_plus"] for t in trials]
    med, p10, p25, best = aggregate(values)
    rec = SweepRecord(
        axis_value=value,
        values=values,
        median=med,
        p10=p10,
        p25=p25,
        best=best,
        worst=max(values),
        ultimate=_nanmedian([t["ultimate"] for t in trials]),
        cross=_nanmedian([t["cross"] for t in trials]),
        thm4=_nanmedian([t["thm4"] for t in trials]),
        thm8=_nanmedian([t["thm8"] for t in trials]),
        thm8_C=spec.thm8_C,
        wall_time=time.perf_counter() - t0,
        spectral_norm=_nanmedian([t["spectral_norm"] for t in trials]),
        seeds=[(t["matrix_seed"], t["solver_seed"]) for t in trials],
    )
    return rec, trials


def loglog_slope(x, y) -> float:
    """Least-squares slope of log(y) against log(x)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        return math.nan
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])


def fit_thm8_constant(records: list, trials: list) -> float:
    """Smallest C for which the Hanson-Wright bound covers every observed eps_plus.

    Empirical only: it describes these runs, not the constant in the theorem.
    The bound scales as sqrt(C), so each trial needs
    ``C >= C0 * (eps_plus / bound(C0))^2``.
    """
    need = []
    for rec, ts in zip(records, trials):
        for t in ts:
            if t["thm8_raw"] > 0:
                need.append(rec.thm8_C * (t["eps_plus"] / t["thm8_raw"]) ** 2)
    return float(max(need)) if need else math.nan


def run_sweep(spec: SweepSpec) -> tuple[list, dict]:
    """Run every axis value of ``spec``; returns records in axis order and a manifest."""
    started = datetime.now(timezone.utc).isoformat()
    indices = range(len(spec.axis_values))
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            results = list(pool.map(_run_point, [spec] * len(indices), indices))
    else:
        results = [_run_point(spec, i) for i in indices]
    records = [rec for rec, _ in results]
    trials = [ts for _, ts in results]

    ok = [r for r in records if not r.failed]
    axis = [r.axis_value for r in ok]
    manifest = {
        "code_version": __version__,
        "spec": spec.to_dict(),
        "resolved_solver": spec.solver.to_dict(),
        "percentile_convention": "linear interpolation between order statistics",
        "trial_policy": "matrix redrawn per trial" if spec.family.is_random else "matrix fixed; only solver seeds vary",
        "started_utc": started,
        "finished_utc": datetime.now(timezone.utc).isoformat(),
        "records": [
            {
                "axis_value": rec.axis_value,
                "eps_plus": rec.values,
                "wall_time_s": rec.wall_time,
                "spectral_norm_median": rec.spectral_norm,
                "error": rec.error,
                "trials": ts,
            }
            for rec, ts in results
        ],
        "fits": {
            "loglog_slope_best": loglog_slope(axis, [r.best for r in ok]),
            "loglog_slope_median": loglog_slope(axis, [r.median for r in ok]),
            # exponent p in median ~ log(n)^p; reported, never asserted
            "polylog_exponent_median": loglog_slope(np.log(axis), [r.median for r in ok])
            if spec.sweep_axis == "n" and all(a > 1 for a in axis)
            else math.nan,
            "empirical_thm8_C": fit_thm8_constant(ok, [ts for rec, ts in results if not rec.failed]),
        },
        "failed": [r.axis_value for r in records if r.failed],
    }
    return records, manifest


def emit_csv(records: list, manifest: Optional[dict], path, wall_time: bool = True) -> Path:
    """Write records as CSV (17 significant digits) and the manifest as a JSON sidecar."""
    if not records:
        raise EmptyInput("no records to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.csv_row(wall_time))
    if manifest is not None:
        sidecar = path.with_suffix(".manifest.json")
        sidecar.write_text(json.dumps(manifest, indent=2, default=_json_default, allow_nan=True) + "\n")
    return path


def read_csv(path) -> list[dict]:
    """Parse a results CSV back into dicts of floats (trial_count as int)."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for row in rows:
        out.append({k: int(v) if k == "trial_count" else float(v) for k, v in row.items()})
    return out


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
