"""Randomized rank-r approximants with provable max-norm error.

Both constructions start from the balanced split ``X = Ut @ Vt.T`` with
``Ut = U sqrt(S)``, ``Vt = V sqrt(S)`` taken from the thin SVD at numerical
rank k, and compress the inner dimension with a random k x r matrix Q:

* ``jl_approximant``: Q has orthonormal columns (QR of a Gaussian) and
  ``Y = (k/r) (Ut Q)(Vt Q)^T``;
* ``hw_approximant``: Q has i.i.d. entries ``xi / sqrt(r)`` with xi Rademacher
  or standard Gaussian, and ``Y = (Ut Q)(Vt Q)^T / E[xi^2]``.

The guarantees are existential, so each function draws ``trials`` independent
Q's (substream ``trial`` of ``seed``) and keeps the one with the smallest
max-norm error; ties go to the lowest trial index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagnostics import RANK_TOL, MatrixDiagnostics, diagnose, numerical_rank, thm4_bound, thm8_bound
from .errors import InvalidRank, RankDeficient, ShapeMismatch, ZeroMatrix
from .matcore import DEFAULT_SEED, LowRankFactors, factors_from_product, make_rng, max_norm, qr_thin, substream_seed, svd_dense

DEFAULT_TRIALS = 10
XI_SECOND_MOMENT = {"rademacher": 1.0, "gaussian": 1.0}


@dataclass(frozen=True)
class SplitFactors:
    Utilde: np.ndarray
    Vtilde: np.ndarray
    diagnostics: MatrixDiagnostics

    @property
    def k(self) -> int:
        return self.Utilde.shape[1]


@dataclass
class ConstructReport:
    method: str
    r: int
    rank: int
    achieved_error: float
    theoretical_bound: float
    bound_valid: bool
    trials_used: int
    best_seed: int
    best_trial: int
    trial_errors: list = field(default_factory=list)

    def best_so_far(self) -> list:
        return list(np.minimum.accumulate(self.trial_errors)) if self.trial_errors else []


def split_factors(X: np.ndarray, rank_tol: float = RANK_TOL) -> SplitFactors:
    if max_norm(X) == 0:
        raise ZeroMatrix("cannot split the zero matrix")
    f = svd_dense(X)
    k = numerical_rank(f.s, rank_tol)
    root = np.sqrt(f.s[:k])
    return SplitFactors(f.U[:, :k] * root, f.V[:, :k] * root, diagnose(X, rank_tol, svd=f))


def _check_rank(r: int, k: int, trials: int) -> None:
    if not 1 <= r <= k:
        raise InvalidRank(f"approximation rank {r} outside [1, numerical rank {k}]")
    if trials < 1:
        raise ValueError("trials must be >= 1")


def _best_of(X, split, r, trials, seed, draw, scale, method, bound, valid):
    best = None
    errors = []
    used = 0
    trial = 0
    while used < trials:
        tseed = substream_seed(seed, trial)
        used += 1
        trial += 1
        try:
            Q = draw(make_rng(tseed))
        except RankDeficient:
            # degenerate draw: counts against the budget, next substream
            errors.append(np.inf)
            continue
        A = split.Utilde @ Q
        B = scale * (split.Vtilde @ Q)
        err = max_norm(X - A @ B.T)
        errors.append(err)
        if best is None or err < best[0]:
            best = (err, tseed, trial - 1, A, B)
    if best is None:
        raise RankDeficient(f"all {trials} draws were rank deficient")
    err, tseed, idx, A, B = best
    Y = factors_from_product(A, B)
    report = ConstructReport(
        method=method,
        r=r,
        rank=Y.rank,
        achieved_error=float(max_norm(X - Y.to_dense())),
        theoretical_bound=float(bound),
        bound_valid=valid,
        trials_used=used,
        best_seed=tseed,
        best_trial=idx,
        trial_errors=errors,
    )
    return Y, report


def jl_approximant(
    X: np.ndarray,
    r: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    rank_tol: float = RANK_TOL,
    split: SplitFactors | None = None,
) -> tuple[LowRankFactors, ConstructReport]:
    """Best of ``trials`` orthonormal-projection approximants ``(k/r)(Ut Q)(Vt Q)^T``."""
    split = split_factors(X, rank_tol) if split is None else split
    k = split.k
    _check_rank(r, k, trials)

    def draw(rng):
        Q, _ = qr_thin(rng.standard_normal((k, r)))
        return Q

    bound, valid = thm4_bound(split.diagnostics, r)
    return _best_of(X, split, r, trials, seed, draw, k / r, "jl", bound, valid)


def hw_approximant(
    X: np.ndarray,
    r: int,
    dist: str = "rademacher",
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    C: float = 1.0,
    rank_tol: float = RANK_TOL,
    split: SplitFactors | None = None,
) -> tuple[LowRankFactors, ConstructReport]:
    """Best of ``trials`` sub-Gaussian approximants ``(Ut Q)(Vt Q)^T / E[xi^2]``.

    ``C`` is the constant fed to the theoretical bound in the report.
    """
    if dist not in XI_SECOND_MOMENT:
        raise ValueError(f"dist must be one of {sorted(XI_SECOND_MOMENT)}, got {dist!r}")
    split = split_factors(X, rank_tol) if split is None else split
    k = split.k
    _check_rank(r, k, trials)

    def draw(rng):
        if dist == "rademacher":
            xi = rng.integers(0, 2, size=(k, r)) * 2.0 - 1.0
        else:
            xi = rng.standard_normal((k, r))
        return xi / np.sqrt(r)

    bound, valid = thm8_bound(split.diagnostics, r, C)
    return _best_of(X, split, r, trials, seed, draw, 1.0 / XI_SECOND_MOMENT[dist], "hw", bound, valid)


def verify_construction(X: np.ndarray, Y, bound: float) -> tuple[bool, float]:
    """Check ``||X - Y||_max <= bound``; returns the flag and ``error / bound``."""
    Yd = Y.to_dense() if isinstance(Y, LowRankFactors) else np.asarray(Y, dtype=float)
    if Yd.shape != X.shape:
        raise ShapeMismatch(f"shapes differ: {X.shape} vs {Yd.shape}")
    err = max_norm(X - Yd)
    if bound > 0:
        ratio = err / bound
    else:
        ratio = 0.0 if err == 0 else np.inf
    return bool(err <= bound), float(ratio)
