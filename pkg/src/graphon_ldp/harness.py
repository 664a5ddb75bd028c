"""Configuration-driven Monte Carlo harness and report generators.

Determinism contract: identical (config, base seed) produce byte-identical
CSV output.  Per-replicate seeds are derived by hashing
``base_seed | cell | <sorted axis=value pairs> | rep | <index>`` (see
``graphon_ldp.seeds``), cells never share a stream, and rows are sorted at
write time so worker scheduling cannot reorder output.  Wall-clock times are
volatile and therefore live in a separate timing sidecar, never in the
result CSV.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
import math
import time

import numpy as np

from . import estimators as est
from .config import EstimatorSpec, ExperimentConfig
from .cumulants import lowdeg_lower_bound_sbm
from .errors import ConfigError
from .model import (
    BiclusterPrior,
    SbmPqPrior,
    bicluster_loss,
    build_probability_matrix,
    empirical_loss,
    clustering_loss,
    membership_matrix,
    sample_adjacency,
    sample_bicluster,
    sample_membership,
    snr_and_thresholds,
)
from .seeds import derive_seed, rng_from
from .smooth import SmoothGraphonSpec, graphon_probability_matrix


def load_schema() -> dict:
    """Frozen CSV column sets shipped with the package."""
    text = resources.files("graphon_ldp").joinpath("schema/result_columns.txt").read_text()
    schema = {}
    for line in text.strip().splitlines():
        name, cols = line.split(":", 1)
        schema[name.strip()] = [c.strip() for c in cols.split(",")]
    return schema


SCHEMA = load_schema()


def format_cell(x) -> str:
    if x is None or x == "":
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return repr(float(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path, kind: str, rows) -> None:
    """Write dict rows under the frozen column schema for ``kind``."""
    cols = SCHEMA[kind]
    lines = [",".join(cols)]
    for row in rows:
        unknown = set(row) - set(cols)
        if unknown:
            raise ValueError(f"row carries columns outside the schema: {sorted(unknown)}")
        lines.append(",".join(format_cell(row.get(c)) for c in cols))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# -- Monte Carlo core ------------------------------------------------------------


@dataclass
class ResultRow:
    cell: dict
    estimator: str
    mean_loss: float
    std_error: float
    replicates: int
    wall_time: float
    error: str = ""
    raw_losses: tuple = ()

    def sort_key(self):
        return (tuple(sorted(self.cell.items())), self.estimator)

    def csv_dict(self) -> dict:
        out = {k: self.cell.get(k) for k in ("n", "k", "p", "q", "rho", "lam", "n1", "n2", "k1", "k2")}
        out.update(
            estimator=self.estimator,
            mean_loss=self.mean_loss,
            std_error=self.std_error,
            replicates=self.replicates,
            error=self.error,
        )
        return out


def cell_text(cell: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(cell.items()))


def _build_prior(kind: str, cell: dict):
    try:
        if kind == "sbm":
            return SbmPqPrior(n=cell["n"], k=cell["k"], p=cell["p"], q=cell["q"])
        if kind == "sparse-sbm":
            rho = cell["rho"]
            return SbmPqPrior(
                n=cell["n"], k=cell["k"], p=rho * cell["p"], q=rho * cell["q"]
            )
        if kind == "bicluster":
            n1 = cell.get("n1", cell.get("n"))
            n2 = cell.get("n2", cell.get("n"))
            return BiclusterPrior(
                n1=n1, n2=n2, k1=cell["k1"], k2=cell["k2"], lam=cell["lam"]
            )
        if kind == "graphon":
            return SmoothGraphonSpec(k=cell["k"], p=cell["p"], q=cell["q"])
    except KeyError as exc:
        raise ConfigError(f"grid cell {cell} lacks axis {exc} required by prior {kind!r}")
    raise ConfigError(f"unknown prior kind {kind!r}")


def _apply_estimator(spec: EstimatorSpec, data: dict, cell: dict):
    """Return the loss of one estimator on one sampled draw."""
    name, params = spec.name, spec.params
    if name == "bicluster-svd":
        rank = params.get("rank") or min(cell.get("k1", 1), cell.get("k2", 1))
        Mhat = est.bicluster_svd(data["Y"], rank)
        return bicluster_loss(Mhat, data["M"])
    A, M = data["A"], data["M"]
    if name == "usvt":
        tau = params.get("tau")
        Mhat = est.usvt(A, None if tau in (None, "auto") else float(tau))
    elif name == "trunc-spectral":
        tau = params.get("tau")
        if tau in (None, "auto"):
            tau = 2.0 * float(np.asarray(A, dtype=float).sum(axis=1).mean()) + 1.0
        rank = params.get("rank") or cell.get("k", 1)
        Mhat = est.trunc_spectral(A, float(tau), int(rank))
    elif name == "mean":
        Mhat = est.mean_estimator(A)
    elif name == "exhaustive-ls":
        rank = params.get("rank") or cell.get("k", 1)
        Mhat = est.exhaustive_least_squares(A, int(rank)).Mhat
    elif name == "sdp":
        p, q = data["pq"]
        controls = est.SdpControls(
            penalty=float(params.get("penalty", 1.0)),
            max_iter=int(params.get("max_iter", 2000)),
            tol=float(params.get("tol", 1e-6)),
        )
        Z = est.sdp_community(A, p, q, controls).Z
        Mhat = q + (p - q) * Z
        np.fill_diagonal(Mhat, 0.0)
        Mhat = np.clip(Mhat, 0.0, 1.0)
    else:
        raise ConfigError(f"unknown estimator {name!r}")
    return empirical_loss(Mhat, M)


def _sample_cell(kind: str, prior, cell: dict, rng):
    if kind in ("sbm", "sparse-sbm"):
        z = sample_membership(prior, rng)
        M = build_probability_matrix(z, prior.p, prior.q)
        A = sample_adjacency(M, rng)
        return {"A": A, "M": M, "z": z, "pq": (prior.p, prior.q)}
    if kind == "bicluster":
        z1, z2, M, Y = sample_bicluster(prior, rng)
        return {"M": M, "Y": Y}
    if kind == "graphon":
        n = cell["n"]
        xi = rng.random(n)
        M = graphon_probability_matrix(prior, xi)
        A = sample_adjacency(M, rng)
        return {"A": A, "M": M, "pq": (prior.delta * prior.p, prior.delta * prior.q)}
    raise ConfigError(f"unknown prior kind {kind!r}")


def _run_cell(config: ExperimentConfig, cell: dict):
    kind = config.prior_kind
    prior = _build_prior(kind, cell)
    text = cell_text(cell)
    losses = {spec.tag(): [] for spec in config.estimators}
    errors = {spec.tag(): "" for spec in config.estimators}
    times = {spec.tag(): 0.0 for spec in config.estimators}
    for rep in range(config.replicates):
        rng = rng_from(config.base_seed, "cell", text, "rep", rep)
        data = _sample_cell(kind, prior, cell, rng)
        for spec in config.estimators:
            tag = spec.tag()
            if errors[tag]:
                continue
            start = time.monotonic()
            try:
                loss = _apply_estimator(spec, data, cell)
                losses[tag].append(float(loss))
            except Exception as exc:  # noqa: BLE001 - failures become row errors
                errors[tag] = f"{type(exc).__name__}: {exc}"
            times[tag] += time.monotonic() - start
    rows = []
    for spec in config.estimators:
        tag = spec.tag()
        vals = losses[tag]
        if errors[tag] or not vals:
            rows.append(
                ResultRow(
                    cell=cell, estimator=tag, mean_loss=math.nan, std_error=math.nan,
                    replicates=len(vals), wall_time=times[tag],
                    error=errors[tag] or "no successful replicates",
                )
            )
            continue
        mean = float(np.mean(vals))
        se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        rows.append(
            ResultRow(
                cell=cell, estimator=tag, mean_loss=mean, std_error=se,
                replicates=len(vals), wall_time=times[tag], raw_losses=tuple(vals),
            )
        )
    return rows


def run_mc(config: ExperimentConfig, workers: int = 1):
    """Run the configured grid; returns rows sorted by cell then estimator."""
    cells = config.cells()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda c: _run_cell(config, c), cells))
    else:
        chunks = [_run_cell(config, c) for c in cells]
    rows = [row for chunk in chunks for row in chunk]
    rows.sort(key=ResultRow.sort_key)
    return rows


def write_mc_results(path, rows, timing_path=None, raw_path=None) -> None:
    write_csv(path, "mc", [r.csv_dict() for r in rows])
    if timing_path:
        write_csv(
            timing_path,
            "timing",
            [
                {"cell": cell_text(r.cell), "estimator": r.estimator, "wall_time": r.wall_time}
                for r in rows
            ],
        )
    if raw_path:
        raw_rows = []
        for r in rows:
            for i, loss in enumerate(r.raw_losses):
                raw_rows.append(
                    {"cell": cell_text(r.cell), "estimator": r.estimator, "replicate": i, "loss": loss}
                )
        write_csv(raw_path, "raw", raw_rows)


# -- rate regression --------------------------------------------------------------


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    r_squared: float


def rate_fit(pairs) -> RateFit:
    """Ordinary least squares of log(loss) on log(x)."""
    xs = np.array([float(x) for x, _ in pairs])
    ys = np.array([float(y) for _, y in pairs])
    if len(set(xs.tolist())) < 3:
        raise ValueError("degenerate x range: need at least 3 distinct x values")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise ValueError("rate regression needs positive x and positive losses")
    lx, ly = np.log(xs), np.log(ys)
    lx_c = lx - lx.mean()
    ly_c = ly - ly.mean()
    denom = float(np.sum(lx_c**2))
    slope = float(np.sum(lx_c * ly_c)) / denom
    intercept = float(ly.mean() - slope * lx.mean())
    ss_res = float(np.sum((ly - (intercept + slope * lx)) ** 2))
    ss_tot = float(np.sum(ly_c**2))
    r_squared = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateFit(slope=slope, intercept=intercept, r_squared=r_squared)


# -- phase scan --------------------------------------------------------------------


def phase_scan(
    n: int,
    k: int,
    q: float,
    gaps,
    estimators=("sdp", "spectral"),
    replicates: int = 8,
    base_seed: int = 0,
    D: int = 1,
    r: float = 0.5,
    sdp_controls=None,
):
    """Clustering loss of hard label estimates across a (p-q) grid at fixed q.

    The membership estimate is the binary matrix of rounded labels: spectral
    k-means on the adjacency top-k eigenspace, or the same rounding applied
    to the SDP iterate.  Returns rows matching the 'phase' schema.
    """
    rows = []
    for gap in gaps:
        p = q + gap
        prior = SbmPqPrior(n=n, k=k, p=p, q=q)
        report = snr_and_thresholds(n, k, p, q, D, r)
        cell = {"n": n, "k": k, "q": q, "gap": gap, "p": p}
        text = cell_text(cell)
        losses = {name: [] for name in estimators}
        for rep in range(replicates):
            rng = rng_from(base_seed, "phase", text, "rep", rep)
            z = sample_membership(prior, rng)
            M = build_probability_matrix(z, p, q)
            A = sample_adjacency(M, rng)
            Z_true = membership_matrix(z)
            for name in estimators:
                seed = derive_seed(base_seed, "phase", text, "rep", rep, "est", name)
                if name == "spectral":
                    labels = est.spectral_labels(A, k, seed)
                elif name == "sdp":
                    labels = est.sdp_labels(A, p, q, k, seed, sdp_controls)
                else:
                    raise ConfigError(f"unknown phase estimator {name!r}")
                Zhat = membership_matrix(labels)
                losses[name].append(float(clustering_loss(Zhat, Z_true)))
        for name in estimators:
            vals = losses[name]
            se = float(np.std(vals, ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            rows.append(
                {
                    "n": n, "k": k, "q": q, "gap": gap, "p": p,
                    "estimator": name,
                    "snr": report.snr,
                    "ks_value": report.ks_value,
                    "trivial_baseline": 1.0 / k,
                    "mean_loss": float(np.mean(vals)),
                    "std_error": se,
                    "replicates": len(vals),
                }
            )
    return rows


# -- bound report ------------------------------------------------------------------


def bound_report(n: int, k: int, D: int, r, pq_grid):
    """Tabulate the three rates whose comparison exposes the
    statistical-computational gap, one row per (p, q)."""
    rows = []
    usvt_rate = Fraction(k, n)
    minimax = Fraction(k * k, n * n) + Fraction(math.log(k)) / n
    corollary = Fraction(1, D**4) * min(Fraction(k, n), Fraction(1, k))
    flags = []
    if k * k == n:
        flags.append("k~sqrt(n)")
    if k**3 > n**2:
        flags.append("cannot-be-sharp")
    flag = ";".join(flags)
    for p, q in pq_grid:
        report = snr_and_thresholds(n, k, p, q, D, r)
        rhs = lowdeg_lower_bound_sbm(
            n,
            k,
            Fraction(str(p) if isinstance(p, float) else p),
            Fraction(str(q) if isinstance(q, float) else q),
            Fraction(str(r) if isinstance(r, float) else r),
        )
        rows.append(
            {
                "n": n, "k": k, "D": D, "r": r, "p": p, "q": q,
                "snr": report.snr,
                "snr_ok": report.sw_condition_holds,
                "theorem_rhs": rhs,
                "usvt_rate_kn": float(usvt_rate),
                "minimax_rate": float(minimax),
                "corollary_rate": float(corollary),
                "flag": flag,
            }
        )
    return rows
