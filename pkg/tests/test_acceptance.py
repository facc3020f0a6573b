"""Acceptance checks, one test per criterion.

Each test appends an ``ACCEPTANCE <n>: PASS|FAIL ...`` line to ``RESULTS``;
conftest prints them as a block at the end of the pytest run. Runtime limits
are part of the pass condition.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from maxnorm.apsolve import ApConfig, estimate_distance, project_ball, project_rank
from maxnorm.diagnostics import diagnose
from maxnorm.embeddings import hw_approximant, jl_approximant, split_factors
from maxnorm.genmat import MatrixSpec, banded_uniform, hadamard, stiefel_product
from maxnorm.harness import SweepSpec, loglog_slope, run_sweep
from maxnorm.matcore import make_rng, max_norm, spectral_norm, svd_dense
from oracles import rank1_distance_2x2

RESULTS = []


def report(n, ok, detail, elapsed=None, limit=None):
    if limit is not None:
        ok = ok and elapsed < limit
    timing = "" if elapsed is None else f" [{elapsed:.1f}s" + (f" / limit {limit:.0f}s]" if limit else "]")
    line = f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} {detail}{timing}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_c01_tiny_exact_distance():
    t0 = time.perf_counter()
    est = estimate_distance(np.eye(2), 1, bs_tol=1e-3)
    elapsed = time.perf_counter() - t0
    oracle = rank1_distance_2x2(np.eye(2))
    ok = 0.499 <= est.eps_plus <= 0.502 and abs(est.eps_plus - oracle) <= 1e-3
    report(1, ok, f"eps_plus={est.eps_plus:.6f} oracle={oracle:.6f}", elapsed, 5)


def test_c02_rank_exactness():
    t0 = time.perf_counter()
    worst = 0.0
    for r in (1, 4, 16):
        for s in range(20):
            rng = make_rng(1000 + s, r)
            X = rng.standard_normal((64, r)) @ rng.standard_normal((r, 64))
            est = estimate_distance(X, r)
            worst = max(worst, est.eps_plus / max_norm(X))
    elapsed = time.perf_counter() - t0
    report(2, worst <= 1e-6, f"max eps_plus/||X||_max={worst:.2e} over 60 matrices", elapsed, 60)


@pytest.mark.slow
def test_c03_identity_rank_decay():
    spec = SweepSpec(
        family=MatrixSpec("identity", 128),
        sweep_axis="r",
        axis_values=[2, 4, 8, 16],
        trials=2,
        restarts=5,
        bs_tol=2e-3,
        master_seed=3,
    )
    t0 = time.perf_counter()
    records, _ = run_sweep(spec)
    elapsed = time.perf_counter() - t0
    best = [rec.best for rec in records]
    slope = loglog_slope([2, 4, 8, 16], best)
    detail = f"slope={slope:.3f} window=[-1.3, -0.7] best={[round(b, 4) for b in best]}"
    report(3, -1.3 <= slope <= -0.7, detail, elapsed, 600)


@pytest.mark.slow
def test_c04_identity_size_growth():
    ns = [10, 12, 16, 24, 40]
    spec = SweepSpec(
        family=MatrixSpec("identity", 10),
        sweep_axis="n",
        axis_values=ns,
        rank=8,
        trials=3,
        restarts=5,
        bs_tol=1e-3,
        master_seed=4,
    )
    t0 = time.perf_counter()
    records, _ = run_sweep(spec)
    elapsed = time.perf_counter() - t0
    best = [rec.best for rec in records]
    slope = loglog_slope([n - 8 for n in ns], best)
    detail = f"slope={slope:.3f} window=[0.35, 0.65] best={[round(b, 4) for b in best]}"
    report(4, 0.35 <= slope <= 0.65, detail, elapsed, 600)


def test_c05_banded_norm_law():
    bs = [4, 16, 64, 256]
    t0 = time.perf_counter()
    norms = np.array([[spectral_norm(banded_uniform(500, b, make_rng(s, b))) for b in bs] for s in range(10)])
    elapsed = time.perf_counter() - t0
    slopes = [loglog_slope(bs, row) for row in norms]
    med = float(np.median(slopes))
    pooled = loglog_slope(bs, np.median(norms, axis=0))
    report(5, 0.4 <= med <= 0.6, f"median slope={med:.3f} (slope of medians {pooled:.3f}) window=[0.4, 0.6]", elapsed, 120)


@pytest.mark.slow
def test_c06_banded_distance_tracks_norm():
    spec = SweepSpec(
        family=MatrixSpec("banded", 256, b=8),
        sweep_axis="b",
        axis_values=[8, 32, 128],
        rank=8,
        trials=5,
        restarts=3,
        bs_tol=1e-2,
        master_seed=6,
    )
    t0 = time.perf_counter()
    records, _ = run_sweep(spec)
    elapsed = time.perf_counter() - t0
    med = [rec.median for rec in records]
    norms = [rec.spectral_norm for rec in records]
    rho = float(np.corrcoef(med, norms)[0, 1])
    detail = f"pearson={rho:.4f} medians={[round(m, 4) for m in med]} norms={[round(x, 3) for x in norms]}"
    report(6, rho >= 0.95, detail, elapsed, 900)


def test_c07_stiefel_norm_law():
    ks = [16, 64, 256]
    t0 = time.perf_counter()
    norms = np.array([[spectral_norm(stiefel_product(512, k, make_rng(s, k), normalize=True)) for k in ks] for s in range(10)])
    elapsed = time.perf_counter() - t0
    slope = loglog_slope(ks, np.median(norms, axis=0))
    report(7, -0.7 <= slope <= -0.4, f"slope={slope:.3f} (median over 10 seeds) window=[-0.7, -0.4]", elapsed, 120)


def test_c08_hw_rank_scaling():
    X = np.eye(512)
    t0 = time.perf_counter()
    sp = split_factors(X)
    err = {r: float(np.median([hw_approximant(X, r, trials=10, seed=s, split=sp)[1].achieved_error for s in range(10)])) for r in (16, 64)}
    elapsed = time.perf_counter() - t0
    ratio = err[64] / err[16]
    report(8, 0.4 <= ratio <= 0.65, f"ratio={ratio:.4f} (err16={err[16]:.4f}, err64={err[64]:.4f}) window=[0.4, 0.65]", elapsed, 120)


def test_c09_jl_exact_at_rank():
    t0 = time.perf_counter()
    worst = 0.0
    for s in range(10):
        rng = make_rng(900 + s)
        k = int(rng.integers(1, 12))
        X = rng.standard_normal((40, k)) @ rng.standard_normal((k, 30))
        Y, _ = jl_approximant(X, k, seed=s)
        worst = max(worst, max_norm(X - Y.to_dense()) / spectral_norm(X))
    elapsed = time.perf_counter() - t0
    report(9, worst <= 1e-8, f"max error/||X||_2={worst:.2e} over 10 matrices", elapsed, 30)


def test_c10_projection_and_diagnostics():
    t0 = time.perf_counter()
    rng = make_rng(10)
    ok = True
    for _ in range(1000):
        m, n = rng.integers(1, 12, size=2)
        X, A, B = (rng.standard_normal((m, n)) * 3 for _ in range(3))
        eps = float(rng.uniform(0, 3))
        PA, PB = project_ball(A, X, eps), project_ball(B, X, eps)
        ok &= np.array_equal(project_ball(PA, X, eps), PA)
        ok &= np.abs(PA - X).max() <= eps
        ok &= np.linalg.norm(PA - PB) <= np.linalg.norm(A - B) + 1e-12
    proj_ok = bool(ok)
    diag_ok = True
    for n in (4, 16, 64):
        d = diagnose(np.eye(n))
        diag_ok &= (d.spikiness, d.mu_col, d.mu_row, d.rank) == (n, 1, 1, n)
        h = diagnose(hadamard(n))
        diag_ok &= abs(h.spikiness - math.sqrt(n)) <= 1e-10 * n
        diag_ok &= abs(h.mu_col - 1) <= 1e-10 and abs(h.mu_row - 1) <= 1e-10
    elapsed = time.perf_counter() - t0
    report(10, proj_ok and diag_ok, f"projection suite {'ok' if proj_ok else 'broken'}, diagnostics {'ok' if diag_ok else 'broken'}", elapsed, 30)


def test_c11_sweep_determinism(tmp_path):
    cfg = {
        "family": {"family": "uniform", "n": 16},
        "sweep_axis": "r",
        "axis_values": [1, 2, 4],
        "trials": 3,
        "restarts": 2,
        "bs_tol": 0.01,
        "solver": {"max_iter": 300},
        "master_seed": 11,
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for run in ("a", "b"):
        subprocess.run([sys.executable, "-m", "maxnorm", "sweep", "--config", str(path), "--out", str(tmp_path / run)], check=True)
        outs.append((tmp_path / run / "results.csv").read_bytes())
    report(11, outs[0] == outs[1] and len(outs[0]) > 0, f"two runs, {len(outs[0])} bytes each, identical={outs[0] == outs[1]}")


def test_c12_rank_truncation_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for s in range(50):
        rng = make_rng(1200 + s)
        Z = rng.standard_normal((200, 200))
        exact = svd_dense(Z).truncate(20).to_dense()
        Y = project_rank(Z, 20, ApConfig(seed=s)).to_dense()
        worst = max(worst, np.linalg.norm(Z - Y) / np.linalg.norm(Z - exact))
    elapsed = time.perf_counter() - t0
    report(12, worst <= 1.05, f"max Frobenius ratio={worst:.4f} over 50 matrices", elapsed, 120)
