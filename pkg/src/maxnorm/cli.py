"""Command line interface: ``maxnorm {gen,diag,construct,approx,distance,sweep}``.

Matrices travel in the plain-text format of :mod:`maxnorm.matcore`: a
``rows cols`` header followed by one line per row. ``-`` means stdin/stdout.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

from .apsolve import ApConfig, ap_run, estimate_distance
from .diagnostics import bound_report, diagnose
from .embeddings import hw_approximant, jl_approximant
from .genmat import FAMILIES, MatrixSpec, generate
from .harness import SweepSpec, emit_csv, run_sweep
from .matcore import DEFAULT_SEED, format_matrix, parse_matrix
from .plotting import emit_plot


def _read(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_matrix(text)


def _write(A, path: str) -> None:
    if path == "-":
        sys.stdout.write(format_matrix(A))
    else:
        Path(path).write_text(format_matrix(A))


def _csv(header, row) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerow([format(v, ".17g") if isinstance(v, float) else v for v in row])


def cmd_gen(args) -> int:
    spec = MatrixSpec(args.family, args.n, b=args.b, k=args.k, seed=args.seed, normalize=args.normalize)
    _write(generate(spec), args.out)
    return 0


def cmd_diag(args) -> int:
    X = _read(args.matrix)
    d = diagnose(X, rank_tol=args.rank_tol)
    b = bound_report(X, args.rank, eps=args.eps, C=args.C, diag=d)
    fields = {**d.to_dict(), **{f"bound_{k}": v for k, v in b.to_dict().items()}}
    if args.format == "csv":
        _csv(list(fields), list(fields.values()))
    else:
        width = max(map(len, fields))
        for k, v in fields.items():
            print(f"{k:<{width}}  {v:.6g}" if isinstance(v, float) else f"{k:<{width}}  {v}")
    return 0


def cmd_construct(args) -> int:
    X = _read(args.matrix)
    if args.method == "jl":
        Y, rep = jl_approximant(X, args.rank, trials=args.trials, seed=args.seed)
    else:
        Y, rep = hw_approximant(X, args.rank, dist=args.dist, trials=args.trials, seed=args.seed, C=args.C)
    if args.out:
        _write(Y.to_dense(), args.out)
    _csv(
        ["method", "r", "rank", "achieved_error", "theoretical_bound", "bound_valid", "trials_used", "best_seed"],
        [rep.method, rep.r, rep.rank, rep.achieved_error, rep.theoretical_bound, rep.bound_valid, rep.trials_used, rep.best_seed],
    )
    return 0


def cmd_approx(args) -> int:
    X = _read(args.matrix)
    rep = ap_run(X, args.rank, ApConfig(eps=args.eps, max_iter=args.max_iter, seed=args.seed))
    if args.dump:
        _write(rep.certificate.to_dense(), args.dump)
    _csv(
        ["feasible", "iterations", "final_error", "best_error", "stop_reason", "eps"],
        [rep.feasible, rep.iterations, rep.final_error, rep.best_error, rep.stop_reason, rep.eps],
    )
    return 0


def cmd_distance(args) -> int:
    X = _read(args.matrix)
    cfg = ApConfig(max_iter=args.max_iter, seed=args.seed)
    try:
        est = estimate_distance(X, args.rank, lo=args.lo, hi=args.hi, bs_tol=args.bs_tol, restarts=args.restarts, cfg=cfg)
    except Exception as exc:  # exit code stays 0; the status column carries the failure
        _csv(["status", "eps_minus", "eps_plus", "probes", "ap_runs"], [f"error: {exc}", math.nan, math.nan, 0, 0])
        return 0
    if args.dump:
        _write(est.certificate.to_dense(), args.dump)
    _csv(
        ["status", "eps_minus", "eps_plus", "probes", "ap_runs"],
        ["ok", est.eps_minus, est.eps_plus, est.n_probes, len(est.probes)],
    )
    return 0


def cmd_sweep(args) -> int:
    spec = SweepSpec.load(args.config)
    out = Path(args.out or spec.output_dir)
    records, manifest = run_sweep(spec)
    emit_csv(records, manifest, out / "results.csv", wall_time=spec.csv_wall_time)
    xlabel = {"r": "approximation rank r", "n": "matrix size n", "b": "band width b", "k": "factor rank k"}[spec.sweep_axis]
    for style in spec.plots:
        emit_plot(records, style, out / f"plot_{style}.svg", title=f"{spec.family.family}: sweep over {spec.sweep_axis}", xlabel=xlabel)
    return 2 if manifest["failed"] else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxnorm", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a test matrix")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--b", type=int, help="band width (banded)")
    g.add_argument("--k", type=int, help="factor rank (stiefel-product)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--normalize", action="store_true", help="scale to unit max norm")
    g.add_argument("--out", default="-")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("diag", help="diagnostics and bounds of a matrix")
    d.add_argument("matrix")
    d.add_argument("--rank", type=int, required=True)
    d.add_argument("--eps", type=float, help="evaluate the rank formulas at this eps")
    d.add_argument("--C", type=float, default=1.0, help="Hanson-Wright constant")
    d.add_argument("--rank-tol", type=float, default=1e-10)
    d.add_argument("--format", choices=("csv", "text"), default="text")
    d.set_defaults(func=cmd_diag)

    c = sub.add_parser("construct", help="randomized JL or Hanson-Wright approximant")
    c.add_argument("matrix")
    c.add_argument("--method", choices=("jl", "hw"), default="hw")
    c.add_argument("--rank", type=int, required=True)
    c.add_argument("--trials", type=int, default=10)
    c.add_argument("--dist", choices=("rademacher", "gaussian"), default="rademacher")
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.add_argument("--C", type=float, default=1.0)
    c.add_argument("--out", help="write Y here")
    c.set_defaults(func=cmd_construct)

    a = sub.add_parser("approx", help="one alternating-projections run at fixed eps")
    a.add_argument("matrix")
    a.add_argument("--rank", type=int, required=True)
    a.add_argument("--eps", type=float, required=True)
    a.add_argument("--max-iter", type=int, default=2000)
    a.add_argument("--seed", type=int, default=DEFAULT_SEED)
    a.add_argument("--dump", help="write the final Y here")
    a.set_defaults(func=cmd_approx)

    s = sub.add_parser("distance", help="bracket d_r(X) by bisection")
    s.add_argument("matrix")
    s.add_argument("--rank", type=int, required=True)
    s.add_argument("--bs-tol", type=float, default=1e-3)
    s.add_argument("--restarts", type=int, default=5)
    s.add_argument("--lo", type=float, default=0.0)
    s.add_argument("--hi", type=float)
    s.add_argument("--max-iter", type=int, default=2000)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--dump", help="write the certificate here")
    s.set_defaults(func=cmd_distance)

    w = sub.add_parser("sweep", help="run an experiment sweep from a JSON config")
    w.add_argument("--config", required=True)
    w.add_argument("--out", help="output directory (defaults to the config's output_dir)")
    w.set_defaults(func=cmd_sweep)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
