"""Matrix quality metrics and closed-form error bounds for max-norm approximation.

Quantities computed here:

* spikiness ``gamma = sqrt(m n) ||X||_max / ||X||_2``, in ``[1, sqrt(m n)]``;
* coherence of a k-dimensional subspace with orthonormal basis Q,
  ``mu = (m / k) max_i ||Q^T e_i||^2``, in ``[1, m / k]``;
* the trivial bound ``||X||_max``, the cross-approximation bound, the
  JL-based bound and the Hanson-Wright based bound on ``d_r(X)``, and the
  rank formulas of Alon et al. and Udell-Townsend.

The Hanson-Wright bound depends on an unknown absolute constant ``C``. It is
a parameter here (default 1); any fitted value is an empirical constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import InvalidEps, InvalidRank, NotOrthonormal, ZeroMatrix
from .matcore import LowRankFactors, fro_norm, max_norm, svd_dense

RANK_TOL = 1e-10
ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class MatrixDiagnostics:
    m: int
    n: int
    max_norm: float
    spectral_norm: float
    fro_norm: float
    rank: int
    spikiness: float
    mu_col: float
    mu_row: float
    singular_values: np.ndarray

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("singular_values")
        return d


@dataclass(frozen=True)
class BoundReport:
    r: int
    ultimate: float
    cross: float
    thm4: float
    thm4_valid: bool
    thm8: float
    thm8_valid: bool
    thm8_C: float
    eps: Optional[float] = None
    alon_rank: Optional[float] = None
    udell_rank: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)


def coherence(Q: np.ndarray, tol: float = ORTHO_TOL) -> float:
    """Coherence of the column space of an orthonormal basis ``Q`` (m x k)."""
    m, k = Q.shape
    if k == 0:
        raise NotOrthonormal("empty basis")
    if np.abs(Q.T @ Q - np.eye(k)).max() > tol:
        raise NotOrthonormal("basis columns are not orthonormal")
    return float(m / k * np.max(np.sum(Q * Q, axis=1)))


def numerical_rank(singular_values: np.ndarray, rank_tol: float = RANK_TOL) -> int:
    s = np.asarray(singular_values)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rank_tol * s[0]))


def diagnose(X: np.ndarray, rank_tol: float = RANK_TOL, svd: Optional[LowRankFactors] = None) -> MatrixDiagnostics:
    """Norms, numerical rank, spikiness and row/column coherences of ``X``.

    Coherences use the leading singular vectors up to the numerical rank.
    Pass ``svd`` to reuse an existing thin SVD of ``X``.
    """
    m, n = X.shape
    mx = max_norm(X)
    if mx == 0:
        raise ZeroMatrix("diagnostics are undefined for the zero matrix")
    f = svd_dense(X) if svd is None else svd
    k = numerical_rank(f.s, rank_tol)
    s1 = float(f.s[0])
    return MatrixDiagnostics(
        m=m,
        n=n,
        max_norm=mx,
        spectral_norm=s1,
        fro_norm=fro_norm(X),
        rank=k,
        spikiness=math.sqrt(m * n) * mx / s1,
        mu_col=coherence(f.U[:, :k]),
        mu_row=coherence(f.V[:, :k]),
        singular_values=np.array(f.s),
    )


def ultimate_bound(X: np.ndarray) -> float:
    return max_norm(X)


def cross_bound(singular_values, r: int, m: int, n: int) -> float:
    """Cross-approximation bound ``sqrt(1 + r/(m-r+1)) sqrt(1 + r/(n-r+1)) sigma_{r+1}``."""
    if not 0 <= r < min(m, n):
        raise InvalidRank(f"cross bound needs 0 <= r < min(m, n) = {min(m, n)}, got {r}")
    s = np.asarray(singular_values, dtype=float)
    sigma = float(s[r]) if r < s.size else 0.0
    return math.sqrt(1 + r / (m - r + 1)) * math.sqrt(1 + r / (n - r + 1)) * sigma


def thm4_bound(diag: MatrixDiagnostics, r: int) -> tuple[float, bool]:
    """JL-based bound ``(eps/3)(k mu_col/m + k mu_row/n + gamma/sqrt(mn)) ||X||_2``.

    ``eps = sqrt(k0 / r)`` with ``k0 = 108 log(m + n + 1)``; the bound is only
    guaranteed when ``eps < 1`` and ``r < k``.
    """
    if r < 1:
        raise InvalidRank("rank must be >= 1")
    m, n, k = diag.m, diag.n, diag.rank
    k0 = 108.0 * math.log(m + n + 1)
    eps = math.sqrt(k0 / r)
    shape = k * diag.mu_col / m + k * diag.mu_row / n + diag.spikiness / math.sqrt(m * n)
    return eps / 3.0 * shape * diag.spectral_norm, bool(eps < 1.0 and r < k)


def thm8_bound(diag: MatrixDiagnostics, r: int, C: float = 1.0) -> tuple[float, bool]:
    """Hanson-Wright bound ``eps (k / sqrt(mn)) sqrt(mu_col mu_row) ||X||_2``.

    ``eps = sqrt(C log(4mn) / r)``; guaranteed when ``eps <= 1`` and ``r <= k``.
    """
    if r < 1:
        raise InvalidRank("rank must be >= 1")
    if C <= 0:
        raise ValueError("C must be positive")
    m, n, k = diag.m, diag.n, diag.rank
    eps = math.sqrt(C * math.log(4.0 * m * n) / r)
    bound = eps * k / math.sqrt(m * n) * math.sqrt(diag.mu_col * diag.mu_row) * diag.spectral_norm
    return bound, bool(eps <= 1.0 and r <= k)


def alon_rank(eps: float, n: int) -> float:
    """Rank sufficient for relative max-norm error eps on n x n PSD matrices."""
    if not 0 < eps < 1:
        raise InvalidEps(f"eps must lie in (0, 1), got {eps}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return 9.0 * math.log(n) / (eps**2 - eps**3)


def udell_rank(eps: float, m: int, n: int) -> int:
    """``ceil(72 log(2 min(m, n) + 1) / eps^2)``; eps = 1 is accepted as a formal evaluation."""
    if not 0 < eps <= 1:
        raise InvalidEps(f"eps must lie in (0, 1], got {eps}")
    if min(m, n) < 1:
        raise ValueError("matrix dimensions must be >= 1")
    return math.ceil(72.0 * math.log(2 * min(m, n) + 1) / eps**2)


def bound_report(
    X: np.ndarray,
    r: int,
    eps: Optional[float] = None,
    C: float = 1.0,
    diag: Optional[MatrixDiagnostics] = None,
) -> BoundReport:
    """Evaluate every bound for ``X`` at rank ``r`` (and the rank formulas at ``eps``)."""
    d = diagnose(X) if diag is None else diag
    t4, v4 = thm4_bound(d, r)
    t8, v8 = thm8_bound(d, r, C)
    cross = cross_bound(d.singular_values, r, d.m, d.n) if r < min(d.m, d.n) else 0.0
    alon = udell = None
    if eps is not None:
        udell = udell_rank(eps, d.m, d.n)
        alon = alon_rank(eps, d.n) if eps < 1 else math.inf
    return BoundReport(
        r=r,
        ultimate=d.max_norm,
        cross=cross,
        thm4=t4,
        thm4_valid=v4,
        thm8=t8,
        thm8_valid=v8,
        thm8_C=C,
        eps=eps,
        alon_rank=alon,
        udell_rank=udell,
    )
