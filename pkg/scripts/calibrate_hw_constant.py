"""Empirical calibration of the constant C in the Hanson-Wright bound.

For each test matrix and rank r, runs the best-of-t Rademacher construction
and records the smallest C for which ``eps(C) k/sqrt(mn) sqrt(mu_c mu_r) ||X||_2``
covers the achieved error. The bound scales as sqrt(C), so
``C_needed = C0 (error / bound(C0))^2``. The result describes these draws
only; it is not the theorem's constant.
"""

import argparse

import numpy as np

from maxnorm.embeddings import hw_approximant, split_factors
from maxnorm.genmat import hadamard, stiefel_product
from maxnorm.matcore import make_rng


def cases(n):
    yield "identity", np.eye(n)
    yield "hadamard", hadamard(n)
    P = stiefel_product(n, n // 4, make_rng(0))
    yield "stiefel", P / np.abs(P).max()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=256, help="matrix size (power of two)")
    ap.add_argument("--ranks", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    worst = 0.0
    for name, X in cases(args.n):
        sp = split_factors(X)
        for r in args.ranks:
            if r > sp.k:
                continue
            _, rep = hw_approximant(X, r, trials=args.trials, seed=args.seed, split=sp)
            need = (rep.achieved_error / rep.theoretical_bound) ** 2
            worst = max(worst, need)
            print(f"{name:9s} r={r:<4d} error={rep.achieved_error:.4f} bound(C=1)={rep.theoretical_bound:.4f} C_needed={need:.4f}")
    print(f"empirical C covering every case: {worst:.4f}")


if __name__ == "__main__":
    main()
