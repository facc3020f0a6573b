"""Seeded generators for the test matrix families.

Every generator is a deterministic function of its arguments and seed; the
same call returns a bit-identical matrix.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import InvalidBand, InvalidRank, NotPowerOfTwo
from .matcore import make_rng, max_norm, qr_thin

FAMILIES = ("identity", "hadamard", "uniform", "banded", "stiefel-product")
RANDOM_FAMILIES = ("uniform", "banded", "stiefel-product")


@dataclass(frozen=True)
class MatrixSpec:
    family: str
    n: int
    b: Optional[int] = None
    k: Optional[int] = None
    seed: int = 0
    normalize: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.family == "banded" and self.b is None:
            raise InvalidBand("banded family needs band width b")
        if self.family == "stiefel-product" and self.k is None:
            raise InvalidRank("stiefel-product family needs factor rank k")

    @property
    def is_random(self) -> bool:
        return self.family in RANDOM_FAMILIES

    def to_dict(self) -> dict:
        return asdict(self)


def identity(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.eye(n)


def hadamard(n: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order n (a power of two), entries +-1."""
    if n < 1 or n & (n - 1):
        raise NotPowerOfTwo(f"Hadamard order must be a power of two, got {n}")
    H = np.ones((1, 1))
    while H.shape[0] < n:
        H = np.block([[H, H], [H, -H]])
    return H


def _open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    # 53-bit uniforms on [0, 1) with exact zeros redrawn, mapped to (-1, 1)
    u = rng.random(size)
    zero = u == 0.0
    while zero.any():
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0.0
    return 2.0 * u - 1.0


def uniform(n: int, rng: np.random.Generator) -> np.ndarray:
    """n x n matrix with i.i.d. Uniform(-1, 1) entries."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _open_uniform(rng, (n, n))


def banded_uniform(n: int, b: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform(-1, 1) entries on the 2b - 1 central diagonals, zeros elsewhere.

    The full n x n block is drawn and then masked, so ``b = n`` reproduces
    :func:`uniform` for the same generator state.
    """
    if not 1 <= b <= n:
        raise InvalidBand(f"band width {b} outside [1, {n}]")
    A = _open_uniform(rng, (n, n))
    i, j = np.indices((n, n))
    A[np.abs(i - j) >= b] = 0.0
    return A


def stiefel(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x k matrix with orthonormal columns."""
    Q, _ = qr_thin(rng.standard_normal((n, k)))
    return Q


def stiefel_product(n: int, k: int, rng: np.random.Generator, normalize: bool = False) -> np.ndarray:
    """``Q1 @ Q2.T`` for independent Haar Stiefel factors; rank k, unit spectral norm.

    With ``normalize`` the product is scaled to unit max norm instead.
    """
    if not 1 <= k <= n:
        raise InvalidRank(f"factor rank {k} outside [1, {n}]")
    Q1 = stiefel(n, k, rng)
    Q2 = stiefel(n, k, rng)
    P = Q1 @ Q2.T
    if normalize:
        P /= max_norm(P)
    return P


def generate(spec: MatrixSpec) -> np.ndarray:
    rng = make_rng(spec.seed)
    if spec.family == "identity":
        A = identity(spec.n)
    elif spec.family == "hadamard":
        A = hadamard(spec.n)
    elif spec.family == "uniform":
        A = uniform(spec.n, rng)
    elif spec.family == "banded":
        A = banded_uniform(spec.n, spec.b, rng)
    else:
        return stiefel_product(spec.n, spec.k, rng, normalize=spec.normalize)
    if spec.normalize:
        A = A / max_norm(A)
    return A
