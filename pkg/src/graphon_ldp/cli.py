"""Command-line interface.

Subcommands: sample, estimate, mc-rate, phase, cumulants, bound, oracle,
enumerate.  Exit codes: 0 success, 2 configuration error, 3 guard violation.
"""

import argparse
from fractions import Fraction
import sys

import numpy as np

from . import estimators as est
from .config import ExperimentConfig, load_experiment_config, load_prior
from .cumulants import SbmMomentOracle, kappa, lowdeg_lower_bound_sbm
from .errors import ConfigError, GuardError
from .harness import bound_report, phase_scan, run_mc, write_csv, write_mc_results
from .lowdeg import exact_corr_and_mmse
from .matio import load_matrix_csv, save_matrix_csv, save_multigraphs
from .model import (
    BiclusterPrior,
    SbmPqPrior,
    build_probability_matrix,
    sample_adjacency,
    sample_bicluster,
    sample_membership,
    snr_and_thresholds,
)
from .multigraph import enumerate_connected, enumerate_multigraphs
from .seeds import rng_from
from .smooth import SmoothGraphonSpec, sample_graphon


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0, help="base seed (u64)")
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--workers", type=int, default=1, help="worker budget")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="graphon-ldp", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one instance from a prior and write CSVs")
    p.add_argument("--config", help="prior config document (YAML)")
    p.add_argument("--prior", choices=("sbm", "bicluster", "graphon"), default="sbm")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--k1", type=int)
    p.add_argument("--k2", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--design", choices=("uniform", "grid-permutation"), default="uniform")
    p.add_argument("--matrix-out", default=None, help="also write the mean matrix")
    _add_common(p)

    p = sub.add_parser("estimate", help="apply an estimator to a matrix CSV")
    p.add_argument("--estimator", required=True,
                   choices=("usvt", "trunc-spectral", "mean", "exhaustive-ls", "bicluster-svd", "sdp"))
    p.add_argument("--params", default="", help="comma-separated key=value list")
    p.add_argument("--in", dest="infile", required=True)
    _add_common(p)

    p = sub.add_parser("mc-rate", help="run the Monte Carlo grid from a config")
    p.add_argument("--config", required=True)
    p.add_argument("--timing-out", default=None)
    p.add_argument("--raw-out", default=None)
    _add_common(p)

    p = sub.add_parser("phase", help="clustering-loss scan across (p-q) at fixed q")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--gaps", required=True, help="comma-separated p-q values")
    p.add_argument("--estimators", default="sdp,spectral")
    p.add_argument("--replicates", type=int, default=8)
    p.add_argument("--D", type=int, default=1)
    p.add_argument("--r", type=float, default=0.5)
    _add_common(p)

    p = sub.add_parser("cumulants", help="cumulant tables")
    psub = p.add_subparsers(dest="cumulants_command", required=True)
    d = psub.add_parser("dump", help="CSV table of exact cumulants")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--k", type=int, required=True)
    d.add_argument("--dmax", type=int, required=True)
    _add_common(d)

    p = sub.add_parser("bound", help="rate comparison table over a (p,q) grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--r", type=_frac, default=Fraction(1, 2))
    p.add_argument("--p-grid", required=True, help="comma-separated p values")
    p.add_argument("--q-grid", required=True, help="comma-separated q values")
    _add_common(p)

    p = sub.add_parser("oracle", help="exact degree-D projection quantities")
    psub = p.add_subparsers(dest="oracle_command", required=True)
    m = psub.add_parser("mmse", help="one-line CSV record of corr_sq and mmse")
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--k", type=int, required=True)
    m.add_argument("--p", type=_frac, required=True)
    m.add_argument("--q", type=_frac, required=True)
    m.add_argument("--D", type=int, required=True)
    m.add_argument("--r", type=_frac, default=Fraction(1, 2))
    _add_common(m)

    p = sub.add_parser("enumerate", help="connected multigraph enumeration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--required", default="", help="comma-separated required vertices")
    _add_common(p)

    return top


def _write_or_print(out, text: str):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_sample(args) -> int:
    if args.config:
        prior = load_prior(args.config)
    elif args.prior == "sbm":
        required = {"n": args.n, "k": args.k, "p": args.p, "q": args.q}
        if any(v is None for v in required.values()):
            raise ConfigError("sample --prior sbm needs --n --k --p --q")
        prior = SbmPqPrior(**required)
    elif args.prior == "bicluster":
        required = {"n1": args.n1, "n2": args.n2, "k1": args.k1, "k2": args.k2, "lam": args.lam}
        if any(v is None for v in required.values()):
            raise ConfigError("sample --prior bicluster needs --n1 --n2 --k1 --k2 --lam")
        prior = BiclusterPrior(**required)
    else:
        if args.n is None or args.k is None or args.p is None or args.q is None:
            raise ConfigError("sample --prior graphon needs --n --k --p --q")
        prior = SmoothGraphonSpec(k=args.k, p=args.p, q=args.q, delta=args.delta)

    rng = rng_from(args.seed, "sample")
    out = args.out or "sample.csv"
    if isinstance(prior, SbmPqPrior):
        z = sample_membership(prior, rng)
        M = build_probability_matrix(z, prior.p, prior.q)
        A = sample_adjacency(M, rng)
        save_matrix_csv(out, A)
        if args.matrix_out:
            save_matrix_csv(args.matrix_out, M)
    elif isinstance(prior, BiclusterPrior):
        _, _, M, Y = sample_bicluster(prior, rng)
        save_matrix_csv(out, Y)
        if args.matrix_out:
            save_matrix_csv(args.matrix_out, M)
    else:
        if args.n is None:
            raise ConfigError("sample --prior graphon needs --n")
        xi, M = sample_graphon(prior, args.n, rng, design=args.design)
        A = sample_adjacency(M, rng)
        save_matrix_csv(out, A)
        if args.matrix_out:
            save_matrix_csv(args.matrix_out, M)
    return 0


def _parse_params(text: str) -> dict:
    params = {}
    if text:
        for item in text.split(","):
            if "=" not in item:
                raise ConfigError(f"--params entries must be key=value, got {item!r}")
            key, val = item.split("=", 1)
            try:
                params[key.strip()] = float(val)
            except ValueError:
                params[key.strip()] = val.strip()
    return params


def cmd_estimate(args) -> int:
    A = load_matrix_csv(args.infile)
    params = _parse_params(args.params)
    name = args.estimator
    if name == "usvt":
        tau = params.get("tau")
        Mhat = est.usvt(A, None if tau in (None, "auto") else float(tau))
    elif name == "trunc-spectral":
        tau = params.get("tau")
        if tau is None:
            tau = 2.0 * float(A.sum(axis=1).mean()) + 1.0
        Mhat = est.trunc_spectral(A, float(tau), int(params.get("rank", 1)))
    elif name == "mean":
        Mhat = est.mean_estimator(A)
    elif name == "exhaustive-ls":
        Mhat = est.exhaustive_least_squares(A, int(params.get("rank", 2))).Mhat
    elif name == "bicluster-svd":
        Mhat = est.bicluster_svd(A, int(params.get("rank", 1)))
    else:
        if "p" not in params or "q" not in params:
            raise ConfigError("estimate --estimator sdp needs --params p=..,q=..")
        result = est.sdp_community(A, float(params["p"]), float(params["q"]))
        Mhat = result.Z
    save_matrix_csv(args.out or "estimate.csv", Mhat)
    return 0


def cmd_mc_rate(args) -> int:
    config = load_experiment_config(args.config)
    if args.seed:
        config = ExperimentConfig(
            prior_kind=config.prior_kind, grid=config.grid, estimators=config.estimators,
            replicates=config.replicates, base_seed=args.seed, out=config.out,
        )
    rows = run_mc(config, workers=args.workers)
    out = args.out or config.out or "mc.csv"
    write_mc_results(out, rows, timing_path=args.timing_out, raw_path=args.raw_out)
    return 0


def cmd_phase(args) -> int:
    gaps = [float(g) for g in args.gaps.split(",") if g != ""]
    estimators = tuple(e.strip() for e in args.estimators.split(",") if e.strip())
    rows = phase_scan(
        n=args.n, k=args.k, q=args.q, gaps=gaps, estimators=estimators,
        replicates=args.replicates, base_seed=args.seed, D=args.D, r=args.r,
    )
    write_csv(args.out or "phase.csv", "phase", rows)
    return 0


def cmd_cumulants_dump(args) -> int:
    from .multigraph import Multigraph

    oracle = SbmMomentOracle(args.k)
    rows = []
    for d in range(0, args.dmax + 1):
        if d == 0:
            alphas = [Multigraph(args.n, ())]
        else:
            alphas = sorted(enumerate_multigraphs(args.n, d), key=lambda g: g.edges)
        for alpha in alphas:
            val = kappa(alpha, oracle)
            rows.append(
                {
                    "alpha": alpha.to_text() or "empty",
                    "size": alpha.size,
                    "vertices": alpha.vertex_count,
                    "coeff_num": val.coeff.numerator,
                    "coeff_den": val.coeff.denominator,
                    "lambda_power": val.power if not val.is_zero else alpha.size + 1,
                }
            )
    write_csv(args.out or "cumulants.csv", "cumulants", rows)
    return 0


def cmd_bound(args) -> int:
    ps = [float(v) for v in args.p_grid.split(",") if v != ""]
    qs = [float(v) for v in args.q_grid.split(",") if v != ""]
    grid = [(p, q) for p in ps for q in qs if p >= q]
    if not grid:
        raise ConfigError("bound: empty (p, q) grid after enforcing p >= q")
    rows = bound_report(args.n, args.k, args.D, args.r, grid)
    write_csv(args.out or "bound.csv", "bound", rows)
    return 0


def cmd_oracle_mmse(args) -> int:
    prior = SbmPqPrior(n=args.n, k=args.k, p=args.p, q=args.q, fixed_first=True)
    proj = exact_corr_and_mmse(prior, args.D)
    rhs = lowdeg_lower_bound_sbm(args.n, args.k, args.p, args.q, args.r)
    report = snr_and_thresholds(args.n, args.k, args.p, args.q, args.D, args.r)
    row = {
        "n": args.n, "k": args.k, "p": float(args.p), "q": float(args.q), "D": args.D,
        "corr_sq": proj.corr_sq, "mmse": proj.mmse, "theorem_rhs": rhs,
        "snr_ok": report.sw_condition_holds,
    }
    cols = ["n", "k", "p", "q", "D", "corr_sq", "mmse", "theorem_rhs", "snr_ok"]
    from .harness import SCHEMA, format_cell

    assert cols == SCHEMA["oracle"]
    text = ",".join(cols) + "\n" + ",".join(format_cell(row[c]) for c in cols) + "\n"
    _write_or_print(args.out, text)
    return 0


def cmd_enumerate(args) -> int:
    required = tuple(int(v) for v in args.required.split(",") if v != "")
    graphs = list(enumerate_connected(args.n, args.d, required))
    if args.out:
        save_multigraphs(args.out, graphs)
    else:
        for g in graphs:
            sys.stdout.write(g.to_text() + "\n")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "sample": cmd_sample,
        "estimate": cmd_estimate,
        "mc-rate": cmd_mc_rate,
        "phase": cmd_phase,
        "bound": cmd_bound,
        "enumerate": cmd_enumerate,
    }
    try:
        if args.command == "cumulants":
            return cmd_cumulants_dump(args)
        if args.command == "oracle":
            return cmd_oracle_mmse(args)
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GuardError as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
