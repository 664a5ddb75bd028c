"""Structured-text configuration for priors and Monte Carlo experiments.

YAML documents with an explicit ``schema_version``.  Unknown keys are hard
errors: a silent typo in a grid axis would poison a whole experiment.
"""

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .errors import ConfigError
from .model import BiclusterPrior, SbmPqPrior
from .smooth import SmoothGraphonSpec

SCHEMA_VERSION = 1

PRIOR_KINDS = ("sbm", "sparse-sbm", "bicluster", "graphon")

ESTIMATOR_PARAM_KEYS = {
    "usvt": {"tau"},
    "trunc-spectral": {"tau", "rank"},
    "mean": set(),
    "exhaustive-ls": {"rank"},
    "bicluster-svd": {"rank"},
    "sdp": {"penalty", "max_iter", "tol"},
}


def _require_keys(mapping, allowed, where: str):
    if not isinstance(mapping, dict):
        raise ConfigError(f"{where}: expected a mapping")
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


# -- prior specs -------------------------------------------------------------


def prior_to_dict(prior) -> dict:
    if isinstance(prior, SbmPqPrior):
        return {
            "kind": "sbm",
            "n": prior.n,
            "k": prior.k,
            "p": prior.p,
            "q": prior.q,
            "fixed_first": prior.fixed_first,
        }
    if isinstance(prior, BiclusterPrior):
        return {
            "kind": "bicluster",
            "n1": prior.n1,
            "n2": prior.n2,
            "k1": prior.k1,
            "k2": prior.k2,
            "lam": prior.lam,
            "fixed_first": prior.fixed_first,
        }
    if isinstance(prior, SmoothGraphonSpec):
        return {
            "kind": "graphon",
            "k": prior.k,
            "p": prior.p,
            "q": prior.q,
            "delta": prior.delta,
        }
    raise ConfigError(f"unknown prior object {type(prior).__name__}")


def prior_from_dict(doc: dict):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ConfigError("prior: expected a mapping with a 'kind' tag")
    kind = doc["kind"]
    try:
        if kind == "sbm":
            _require_keys(doc, {"kind", "n", "k", "p", "q", "fixed_first"}, "prior")
            return SbmPqPrior(
                n=int(doc["n"]),
                k=int(doc["k"]),
                p=float(doc["p"]),
                q=float(doc["q"]),
                fixed_first=bool(doc.get("fixed_first", False)),
            )
        if kind == "sparse-sbm":
            _require_keys(doc, {"kind", "n", "k", "rho", "p", "q", "fixed_first"}, "prior")
            rho = float(doc["rho"])
            if not (0 < rho < 1):
                raise ConfigError("prior: rho must lie in (0, 1)")
            return SbmPqPrior(
                n=int(doc["n"]),
                k=int(doc["k"]),
                p=rho * float(doc["p"]),
                q=rho * float(doc["q"]),
                fixed_first=bool(doc.get("fixed_first", False)),
            )
        if kind == "bicluster":
            _require_keys(doc, {"kind", "n1", "n2", "k1", "k2", "lam", "fixed_first"}, "prior")
            return BiclusterPrior(
                n1=int(doc["n1"]),
                n2=int(doc["n2"]),
                k1=int(doc["k1"]),
                k2=int(doc["k2"]),
                lam=float(doc["lam"]),
                fixed_first=bool(doc.get("fixed_first", False)),
            )
        if kind == "graphon":
            _require_keys(doc, {"kind", "k", "p", "q", "delta"}, "prior")
            return SmoothGraphonSpec(
                k=int(doc["k"]),
                p=float(doc["p"]),
                q=float(doc["q"]),
                delta=float(doc.get("delta", 0.5)),
            )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"prior: {exc}") from exc
    raise ConfigError(f"prior: unknown kind {kind!r} (expected one of {PRIOR_KINDS})")


def save_prior(path, prior) -> None:
    doc = {"schema_version": SCHEMA_VERSION, "prior": prior_to_dict(prior)}
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=True), encoding="utf-8")


def load_prior(path):
    doc = _load_yaml(path)
    _require_keys(doc, {"schema_version", "prior"}, str(path))
    _check_version(doc, str(path))
    return prior_from_dict(doc["prior"])


# -- experiment configs --------------------------------------------------------

GRID_AXES = ("n", "k", "p", "q", "rho", "lam", "n1", "n2", "k1", "k2")


@dataclass(frozen=True)
class EstimatorSpec:
    name: str
    params: dict = field(default_factory=dict)

    def tag(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.name}[{inner}]"


@dataclass(frozen=True)
class ExperimentConfig:
    prior_kind: str
    grid: dict
    estimators: tuple
    replicates: int
    base_seed: int
    out: str = None

    def cells(self):
        """Cartesian product of the grid axes, in deterministic sorted-axis order."""
        axes = [(name, list(values)) for name, values in sorted(self.grid.items())]
        if not axes:
            return [dict()]
        out = [dict()]
        for name, values in axes:
            out = [dict(cell, **{name: v}) for cell in out for v in values]
        return out


def _load_yaml(path):
    try:
        doc = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML ({exc})")
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: expected a mapping at top level")
    return doc


def _check_version(doc, where: str):
    if "schema_version" not in doc:
        raise ConfigError(f"{where}: missing schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ConfigError(
            f"{where}: schema_version {doc['schema_version']} unsupported "
            f"(expected {SCHEMA_VERSION})"
        )


def parse_experiment_config(doc: dict, where: str = "config") -> ExperimentConfig:
    _require_keys(
        doc,
        {"schema_version", "prior", "grid", "estimators", "replicates", "base_seed", "out"},
        where,
    )
    _check_version(doc, where)
    prior_kind = doc.get("prior")
    if prior_kind not in PRIOR_KINDS:
        raise ConfigError(f"{where}: prior must be one of {PRIOR_KINDS}")
    grid = doc.get("grid")
    _require_keys(grid, GRID_AXES, f"{where}.grid")
    parsed_grid = {}
    for axis, values in grid.items():
        if not isinstance(values, list) or not values:
            raise ConfigError(f"{where}.grid.{axis}: expected a non-empty list")
        parsed_grid[axis] = values
    if "p" in parsed_grid and "q" in parsed_grid:
        for p in parsed_grid["p"]:
            for q in parsed_grid["q"]:
                if p < q:
                    raise ConfigError(f"{where}.grid: pair p={p} < q={q} not allowed")
    estimators = doc.get("estimators")
    if not isinstance(estimators, list) or not estimators:
        raise ConfigError(f"{where}.estimators: expected a non-empty list")
    specs = []
    for i, entry in enumerate(estimators):
        if isinstance(entry, str):
            entry = {"name": entry}
        _require_keys(entry, {"name", "params"}, f"{where}.estimators[{i}]")
        name = entry.get("name")
        if name not in ESTIMATOR_PARAM_KEYS:
            raise ConfigError(
                f"{where}.estimators[{i}]: unknown estimator {name!r} "
                f"(expected one of {sorted(ESTIMATOR_PARAM_KEYS)})"
            )
        params = entry.get("params", {}) or {}
        _require_keys(params, ESTIMATOR_PARAM_KEYS[name], f"{where}.estimators[{i}].params")
        specs.append(EstimatorSpec(name=name, params=dict(params)))
    replicates = doc.get("replicates")
    if not isinstance(replicates, int) or replicates < 1:
        raise ConfigError(f"{where}.replicates: expected an integer >= 1")
    base_seed = doc.get("base_seed")
    if not isinstance(base_seed, int):
        raise ConfigError(f"{where}.base_seed: expected an integer")
    return ExperimentConfig(
        prior_kind=prior_kind,
        grid=parsed_grid,
        estimators=tuple(specs),
        replicates=replicates,
        base_seed=base_seed,
        out=doc.get("out"),
    )


def load_experiment_config(path) -> ExperimentConfig:
    return parse_experiment_config(_load_yaml(path), where=str(path))
