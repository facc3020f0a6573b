"""Alternating projections between the max-norm ball around X and the rank-r set.

``ap_run`` iterates

    Z = X + clip(Y - X, -eps, eps)        (projection onto B_eps(X))
    Y = rank-r truncation of Z            (randomized SVD)

from a random or warm start, and ``estimate_distance`` wraps it in a
bisection over eps. Every rank-r matrix Y met along the way is a certificate
``d_r(X) <= ||X - Y||_max``; the estimate reports the best one found, so
``eps_plus`` is always a verified upper bound. ``eps_minus`` is only the
largest eps at which the heuristic failed, not a proven lower bound.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import InvalidBracket, InvalidRank, ShapeMismatch
from .matcore import (
    DEFAULT_SEED,
    RSVD_OVERSAMPLING,
    RSVD_POWER_ITERS,
    LowRankFactors,
    factors_from_product,
    make_rng,
    max_norm,
    rsvd_truncate,
    substream_seed,
)

log = logging.getLogger(__name__)

INIT_GAUSSIAN = "gaussian-product"
INIT_WARM = "warm-start"


@dataclass(frozen=True)
class ApConfig:
    eps: float = 0.0
    max_iter: int = 2000
    feas_tol: float = 1e-3
    abs_tol: float = 1e-10
    stall_window: int = 50
    stall_tol: float = 1e-4
    p: int = RSVD_OVERSAMPLING
    q: int = RSVD_POWER_ITERS
    seed: int = DEFAULT_SEED
    init: str = INIT_GAUSSIAN
    warm: Optional[LowRankFactors] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.init not in (INIT_GAUSSIAN, INIT_WARM):
            raise ValueError(f"unknown init {self.init!r}")
        if self.init == INIT_WARM and self.warm is None:
            raise ValueError("warm-start init needs a starting matrix")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("warm")
        return d


@dataclass
class ApReport:
    feasible: bool
    iterations: int
    final_error: float
    error_history: list
    stop_reason: str
    eps: float
    certificate: LowRankFactors = field(repr=False)
    best_error: float = np.inf
    best: Optional[LowRankFactors] = field(default=None, repr=False)


@dataclass
class DistanceEstimate:
    eps_minus: float
    eps_plus: float
    certificate: LowRankFactors = field(repr=False)
    probes: list = field(default_factory=list, repr=False)
    r: int = 0
    max_norm: float = 0.0

    @property
    def n_probes(self) -> int:
        return len({eps for eps, _ in self.probes})


def project_ball(Y: np.ndarray, X: np.ndarray, eps: float) -> np.ndarray:
    """Euclidean projection of Y onto ``{Z : ||Z - X||_max <= eps}``.

    Entries already inside the ball are returned unchanged and clamped
    entries are nudged inward by an ulp where rounding would leave them
    outside, so ``|Z - X| <= eps`` holds exactly in floating point.
    """
    if Y.shape != X.shape:
        raise ShapeMismatch(f"shapes differ: {Y.shape} vs {X.shape}")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    inside = np.abs(Y - X) <= eps
    if inside.all():
        return Y.copy()
    Z = np.where(inside, Y, np.clip(Y, X - eps, X + eps))
    out = np.abs(Z - X) > eps
    while out.any():
        Z[out] = np.nextafter(Z[out], X[out])
        out = np.abs(Z - X) > eps
    return Z


def project_rank(Z: np.ndarray, r: int, cfg: ApConfig = ApConfig(), rng: Optional[np.random.Generator] = None) -> LowRankFactors:
    """Rank-r truncation of Z by randomized SVD with the config's p and q."""
    if not 1 <= r <= min(Z.shape):
        raise InvalidRank(f"rank {r} outside [1, {min(Z.shape)}]")
    rng = make_rng(cfg.seed, 1) if rng is None else rng
    return rsvd_truncate(Z, r, cfg.p, cfg.q, rng)


def gaussian_start(m: int, n: int, r: int, rng: np.random.Generator) -> LowRankFactors:
    """Product of m x r and n x r Gaussian factors with entry variance 1/r."""
    scale = 1.0 / np.sqrt(r)
    return factors_from_product(scale * rng.standard_normal((m, r)), scale * rng.standard_normal((n, r)))


def _stalled(history: list, window: int, tol: float) -> bool:
    if len(history) <= window:
        return False
    before = min(history[:-window])
    return min(history[-window:]) > (1.0 - tol) * before


def ap_run(X: np.ndarray, r: int, cfg: ApConfig) -> ApReport:
    """Run alternating projections at radius ``cfg.eps``.

    Stops as ``converged`` once ``||X - Y||_max <= eps (1 + feas_tol)``
    (plus ``abs_tol ||X||_max`` so that eps = 0 is reachable in floating
    point), as
    ``stalled`` when the best error in the last ``stall_window`` steps has
    not improved on the earlier best by a relative ``stall_tol``, or at
    ``max_iter``.
    """
    m, n = X.shape
    if not 1 <= r <= min(m, n):
        raise InvalidRank(f"rank {r} outside [1, {min(m, n)}]")
    init_rng = make_rng(cfg.seed, 0)
    rank_rng = make_rng(cfg.seed, 1)
    if cfg.init == INIT_WARM:
        Yf = cfg.warm
        if Yf.shape != X.shape:
            raise ShapeMismatch("warm start has the wrong shape")
    else:
        Yf = gaussian_start(m, n, r, init_rng)
    Y = Yf.to_dense()

    target = cfg.eps * (1.0 + cfg.feas_tol) + cfg.abs_tol * max_norm(X)
    history = []
    best_err, best = np.inf, None
    reason = "max_iter"
    it = 0
    while True:
        err = max_norm(X - Y)
        history.append(err)
        if err < best_err:
            best_err, best = err, Yf
        if err <= target:
            reason = "converged"
            break
        if it >= cfg.max_iter:
            break
        if _stalled(history, cfg.stall_window, cfg.stall_tol):
            reason = "stalled"
            break
        Yf = project_rank(project_ball(Y, X, cfg.eps), r, cfg, rank_rng)
        Y = Yf.to_dense()
        it += 1

    return ApReport(
        feasible=reason == "converged",
        iterations=it,
        final_error=history[-1],
        error_history=history,
        stop_reason=reason,
        eps=cfg.eps,
        certificate=Yf,
        best_error=best_err,
        best=best,
    )


def estimate_distance(
    X: np.ndarray,
    r: int,
    lo: float = 0.0,
    hi: Optional[float] = None,
    bs_tol: float = 1e-3,
    restarts: int = 5,
    cfg: ApConfig = ApConfig(),
    warm_start: bool = True,
) -> DistanceEstimate:
    """Bracket ``d_r(X)`` by bisection on eps with ``ap_run`` as the feasibility oracle.

    Each probe tries up to ``restarts`` runs and is feasible if any run
    converges. With ``warm_start`` the first run of a probe starts from the
    best certificate so far; the rest use fresh Gaussian starts from
    substream ``(probe, attempt)`` of ``cfg.seed``.

    Two certificates are available before any probe: ``Y = 0`` (error
    ``||X||_max``) and the rank-r truncated SVD of X. Bisection stops when
    the bracket is narrower than ``bs_tol * ||X||_max``.
    """
    m, n = X.shape
    if not 1 <= r <= min(m, n):
        raise InvalidRank(f"rank {r} outside [1, {min(m, n)}]")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    M = max_norm(X)
    hi = M if hi is None else hi
    if not 0 <= lo < hi:
        raise InvalidBracket(f"need 0 <= lo < hi, got lo={lo}, hi={hi}")

    cert = LowRankFactors.zeros(m, n)
    eps_plus = M
    trunc = rsvd_truncate(X, r, cfg.p, cfg.q, make_rng(cfg.seed, 2))
    trunc_err = max_norm(X - trunc.to_dense())
    if trunc_err < eps_plus:
        cert, eps_plus = trunc, trunc_err

    probes = []
    eps_minus = lo
    hi = min(hi, eps_plus)
    probe = 0
    while hi - lo > bs_tol * M:
        mid = 0.5 * (lo + hi)
        feasible = False
        for attempt in range(restarts):
            seed = substream_seed(cfg.seed, probe, attempt)
            if attempt == 0 and warm_start and cert.rank > 0:
                run_cfg = replace(cfg, eps=mid, seed=seed, init=INIT_WARM, warm=cert)
            else:
                run_cfg = replace(cfg, eps=mid, seed=seed, init=INIT_GAUSSIAN, warm=None)
            rep = ap_run(X, r, run_cfg)
            probes.append((mid, rep))
            if rep.best_error < eps_plus:
                cert, eps_plus = rep.best, rep.best_error
            if rep.feasible:
                feasible = True
                break
        log.debug("probe %d eps=%.6g feasible=%s eps_plus=%.6g", probe, mid, feasible, eps_plus)
        if feasible:
            hi = mid
        else:
            lo = eps_minus = mid
        hi = min(hi, eps_plus)
        probe += 1

    return DistanceEstimate(
        eps_minus=min(eps_minus, eps_plus),
        eps_plus=eps_plus,
        certificate=cert,
        probes=probes,
        r=r,
        max_norm=M,
    )
