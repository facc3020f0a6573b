"""Dense linear algebra kernel: norms, thin QR, SVD, power iteration, randomized SVD.

Matrices are plain 2-D ``float64`` numpy arrays. :func:`as_matrix` is the single
validation gate (shape, finiteness); everything else assumes validated input.

Random streams come from :func:`make_rng`, a Philox4x64 counter-based generator
keyed by a :class:`numpy.random.SeedSequence` built from ``(seed, *stream)``.
The same ``(seed, stream)`` tuple gives the same stream on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .errors import InvalidRank, NoConvergence, RankDeficient, ShapeMismatch

DEFAULT_SEED = 0x5EED
QR_RANK_TOL = 1e-12
RSVD_OVERSAMPLING = 10
RSVD_POWER_ITERS = 2
DENSE_SVD_CUTOFF = 64


def make_rng(seed: int = DEFAULT_SEED, *stream: int) -> np.random.Generator:
    """Return a Philox generator for ``seed`` and an optional substream path.

    ``make_rng(s, 3, 1)`` and ``make_rng(s, 3, 2)`` are independent streams.
    """
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(s) for s in stream]])
    return np.random.Generator(np.random.Philox(ss))


def substream_seed(seed: int, *stream: int) -> int:
    """Derive a 64-bit seed for substream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *[int(s) for s in stream]])
    lo, hi = ss.generate_state(2, dtype=np.uint32)
    return int(lo) | (int(hi) << 32)


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Validate ``a`` as a finite 2-D real matrix with at least one row and column."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise ShapeMismatch(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeMismatch(f"{name} must have at least one row and column, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


@dataclass(frozen=True)
class LowRankFactors:
    """``Y = U @ diag(s) @ V.T`` with orthonormal columns in U, V and s nonincreasing."""

    U: np.ndarray
    s: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return int(self.s.shape[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.U.shape[0], self.V.shape[0])

    def to_dense(self) -> np.ndarray:
        return (self.U * self.s) @ self.V.T

    def truncate(self, r: int) -> "LowRankFactors":
        return LowRankFactors(self.U[:, :r], self.s[:r], self.V[:, :r])

    def orthonormality_error(self) -> float:
        r = self.rank
        eye = np.eye(r)
        eu = np.abs(self.U.T @ self.U - eye).max(initial=0.0)
        ev = np.abs(self.V.T @ self.V - eye).max(initial=0.0)
        return float(max(eu, ev))

    @classmethod
    def zeros(cls, m: int, n: int) -> "LowRankFactors":
        return cls(np.zeros((m, 0)), np.zeros(0), np.zeros((n, 0)))


def factors_from_product(A: np.ndarray, B: np.ndarray, rank_tol: float = 1e-13) -> LowRankFactors:
    """Orthonormal factors of ``A @ B.T`` for tall A (m x r) and B (n x r).

    Singular values below ``rank_tol * s[0]`` are dropped, so a degenerate
    product comes back with a smaller rank.
    """
    Qa, Ra = np.linalg.qr(A)
    Qb, Rb = np.linalg.qr(B)
    u, s, vt = np.linalg.svd(Ra @ Rb.T)
    keep = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
    return LowRankFactors(Qa @ u[:, :keep], s[:keep], Qb @ vt[:keep].T)


# -- norms -------------------------------------------------------------------


def max_norm(A: np.ndarray) -> float:
    """Chebyshev norm: largest absolute entry."""
    return float(np.max(np.abs(A)))


def fro_norm(A: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.square(A))))


# -- QR ----------------------------------------------------------------------


def householder_qr(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin Householder QR of a tall matrix, written out column by column."""
    m, k = A.shape
    R = np.array(A, dtype=np.float64, copy=True)
    vs = []
    for j in range(k):
        x = R[j:, j]
        alpha = np.linalg.norm(x)
        v = x.copy()
        v[0] += np.copysign(alpha, x[0]) if x[0] != 0 else alpha
        vnorm = np.linalg.norm(v)
        if vnorm > 0:
            v /= vnorm
            R[j:, j:] -= 2.0 * np.outer(v, v @ R[j:, j:])
        vs.append(v)
    Q = np.eye(m, k)
    for j in reversed(range(k)):
        v = vs[j]
        Q[j:, :] -= 2.0 * np.outer(v, v @ Q[j:, :])
    return Q, np.triu(R[:k, :])


def qr_thin(A: np.ndarray, method: str = "lapack", check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR with the diagonal of R made nonnegative.

    Parameters
    ----------
    A : (m, k) array with m >= k.
    method : "lapack" (numpy) or "householder" (:func:`householder_qr`).
    check : raise :class:`RankDeficient` when a diagonal entry of R drops below
        ``QR_RANK_TOL`` times the largest column norm.
    """
    m, k = A.shape
    if m < k:
        raise ShapeMismatch(f"qr_thin needs rows >= cols, got {A.shape}")
    if method == "lapack":
        Q, R = np.linalg.qr(A)
    elif method == "householder":
        Q, R = householder_qr(A)
    else:
        raise ValueError(f"unknown QR method {method!r}")
    signs = np.where(np.diag(R) < 0, -1.0, 1.0)
    Q = Q * signs
    R = R * signs[:, None]
    if check:
        scale = float(np.max(np.linalg.norm(A, axis=0), initial=0.0))
        diag = np.diag(R)
        bad = np.flatnonzero(diag <= QR_RANK_TOL * scale) if scale > 0 else np.arange(k)
        if bad.size:
            raise RankDeficient(f"R[{bad[0]},{bad[0]}] = {diag[bad[0]]:.3e} below tolerance", int(bad[0]))
    return Q, R


# -- SVD ---------------------------------------------------------------------


def _orthonormal_completion(U: np.ndarray, good: np.ndarray) -> np.ndarray:
    # Replace columns of U not flagged good by an orthonormal complement.
    m, k = U.shape
    if good.all():
        return U
    basis = np.concatenate([U[:, good], np.eye(m)], axis=1)
    Q, _ = np.linalg.qr(basis)
    out = U.copy()
    ngood = int(good.sum())
    out[:, ~good] = Q[:, ngood : ngood + int((~good).sum())]
    return out


def jacobi_svd(A: np.ndarray, tol: float = 1e-15, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One-sided (Hestenes) Jacobi SVD on the smaller Gram side.

    Returns ``(U, s, V)`` with ``A = U @ diag(s) @ V.T``, s nonincreasing.
    """
    m, n = A.shape
    if m < n:
        V, s, U = jacobi_svd(A.T, tol, max_sweeps)
        return U, s, V
    W = np.array(A, dtype=np.float64, copy=True)
    V = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                wi, wj = W[:, i], W[:, j]
                alpha = wi @ wi
                beta = wj @ wj
                gamma = wi @ wj
                if abs(gamma) <= tol * np.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = np.copysign(1.0, zeta) / (abs(zeta) + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = c * t
                W[:, [i, j]] = np.column_stack((c * wi - sn * wj, sn * wi + c * wj))
                V[:, [i, j]] = np.column_stack((c * V[:, i] - sn * V[:, j], sn * V[:, i] + c * V[:, j]))
        if not rotated:
            break
    else:
        raise NoConvergence(f"Jacobi SVD did not converge in {max_sweeps} sweeps")
    s = np.linalg.norm(W, axis=0)
    order = np.argsort(-s, kind="stable")
    s, W, V = s[order], W[:, order], V[:, order]
    good = s > (s[0] if s.size else 0.0) * 1e-14
    U = np.zeros_like(W)
    U[:, good] = W[:, good] / s[good]
    return _orthonormal_completion(U, good), s, V


def svd_dense(A: np.ndarray, method: str = "lapack") -> LowRankFactors:
    """Full thin SVD, rank ``min(m, n)``, singular values nonincreasing."""
    if method == "lapack":
        try:
            u, s, vt = np.linalg.svd(A, full_matrices=False)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(str(exc)) from exc
        return LowRankFactors(u, s, vt.T)
    if method == "jacobi":
        U, s, V = jacobi_svd(A)
        return LowRankFactors(U, s, V)
    raise ValueError(f"unknown SVD method {method!r}")


def rsvd_truncate(
    A: np.ndarray,
    r: int,
    p: int = RSVD_OVERSAMPLING,
    q: int = RSVD_POWER_ITERS,
    rng: Optional[np.random.Generator] = None,
) -> LowRankFactors:
    """Rank-``r`` truncated SVD via a Gaussian range finder with power iterations."""
    m, n = A.shape
    if not 1 <= r <= min(m, n):
        raise InvalidRank(f"rank {r} outside [1, {min(m, n)}]")
    if p < 0 or q < 0:
        raise ValueError("oversampling and power iterations must be nonnegative")
    rng = make_rng() if rng is None else rng
    ell = min(r + p, m, n)
    Y = A @ rng.standard_normal((n, ell))
    Q, _ = np.linalg.qr(Y)
    for _ in range(q):
        Q, _ = np.linalg.qr(A.T @ Q)
        Q, _ = np.linalg.qr(A @ Q)
    B = Q.T @ A
    u, s, vt = np.linalg.svd(B, full_matrices=False)
    return LowRankFactors(Q @ u[:, :r], s[:r], vt[:r].T)


def spectral_norm(
    A: np.ndarray,
    tol: float = 1e-8,
    max_iter: int = 20000,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """Largest singular value by power iteration on ``A.T @ A``.

    Small matrices (``min(m, n) <= 64``) go straight to :func:`svd_dense`.
    Raises :class:`NoConvergence` (with ``.estimate``) at the iteration cap.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    m, n = A.shape
    if min(m, n) <= DENSE_SVD_CUTOFF:
        return float(svd_dense(A).s[0])
    rng = make_rng(DEFAULT_SEED) if rng is None else rng
    G = A.T @ A if n <= m else A @ A.T
    v = rng.standard_normal(G.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = G @ v
        lam_new = float(v @ w)
        if lam_new <= 0.0:
            return 0.0
        resid = np.linalg.norm(w - lam_new * v)
        # the Rayleigh quotient error is bounded by resid**2 / gap; the
        # change test covers clustered top eigenvalues where resid stalls
        if resid <= tol * lam_new or abs(lam_new - lam) <= 1e-3 * tol * lam_new:
            return float(np.sqrt(lam_new))
        lam = lam_new
        v = w / np.linalg.norm(w)
    raise NoConvergence("power iteration hit its cap", estimate=float(np.sqrt(lam)))


# -- matrix file format ------------------------------------------------------

PathLike = Union[str, Path]


def format_matrix(A: np.ndarray) -> str:
    rows = [f"{A.shape[0]} {A.shape[1]}"]
    rows.extend(" ".join(format(float(x), ".17g") for x in row) for row in A)
    return "\n".join(rows) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"bad header line {lines[0]!r}")
    m, n = int(header[0]), int(header[1])
    if len(lines) - 1 != m:
        raise ValueError(f"expected {m} rows, found {len(lines) - 1}")
    data = np.array([[float(x) for x in ln.split()] for ln in lines[1:]], dtype=np.float64)
    if data.shape != (m, n):
        raise ValueError(f"expected shape {(m, n)}, found {data.shape}")
    return as_matrix(data)


def write_matrix(A: np.ndarray, path: PathLike) -> None:
    Path(path).write_text(format_matrix(A))


def read_matrix(path: PathLike) -> np.ndarray:
    return parse_matrix(Path(path).read_text())
