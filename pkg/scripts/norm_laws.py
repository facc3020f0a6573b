"""Spectral norms of the random families against their size parameter.

Prints log-log slopes of the median norm over seeds for
  - uniform U_n against n (expect ~0.5),
  - banded U_{n,b} against b at fixed n (expect ~0.5),
  - normalized Stiefel products P_{n,k} against k at fixed n.
"""

import argparse

import numpy as np

from maxnorm.genmat import banded_uniform, stiefel_product, uniform
from maxnorm.harness import loglog_slope
from maxnorm.matcore import make_rng, max_norm, spectral_norm


def median_norms(make, values, seeds):
    return np.array([np.median([make(v, make_rng(s, v)) for s in range(seeds)]) for v in values])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--n", type=int, default=500, help="size for the banded and Stiefel sweeps")
    args = ap.parse_args()

    ns = [64, 128, 256, 512]
    u = median_norms(lambda n, rng: spectral_norm(uniform(n, rng)), ns, args.seeds)
    print(f"uniform   n={ns}  norms={np.round(u, 3).tolist()}  slope={loglog_slope(ns, u):.3f}")

    bs = [b for b in (4, 16, 64, 256) if b <= args.n]
    b = median_norms(lambda b, rng: spectral_norm(banded_uniform(args.n, b, rng)), bs, args.seeds)
    print(f"banded    b={bs}  norms={np.round(b, 3).tolist()}  slope={loglog_slope(bs, b):.3f}")

    ks = [k for k in (16, 64, 256, 1024) if k <= args.n]
    # unnormalized products have unit spectral norm, so the normalized norm is 1 / max|P|
    p = median_norms(lambda k, rng: 1.0 / max_norm(stiefel_product(args.n, k, rng)), ks, args.seeds)
    print(f"stiefel   k={ks}  norms={np.round(p, 3).tolist()}  slope={loglog_slope(ks, p):.3f}")


if __name__ == "__main__":
    main()
