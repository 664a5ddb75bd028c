"""Desk-scale toolkit for block-model and graphon estimation limits.

Exact machinery (multigraph cumulants, degree-D projection oracles, rational
risk bounds) together with the matching polynomial-time estimators and a
reproducible Monte Carlo harness.
"""

from .errors import ConfigError, GuardError
from .model import (
    BiclusterPrior,
    SbmPqPrior,
    SnrReport,
    bicluster_loss,
    build_probability_matrix,
    clustering_loss,
    empirical_loss,
    membership_matrix,
    sample_adjacency,
    sample_bicluster,
    sample_membership,
    sample_sbm,
    snr_and_thresholds,
)
from .smooth import SmoothGraphonSpec, cutoff_psi, graphon_fqp, mollifier, sample_graphon
from .multigraph import (
    BipartiteMultigraph,
    Multigraph,
    enumerate_connected,
    enumerate_sub_multigraphs,
    verify_counting_lemma,
    verify_vertex_lemma,
)
from .cumulants import (
    BiclusterMomentOracle,
    SbmMomentOracle,
    ScaledRational,
    joint_cumulant,
    kappa,
    kappa_via_enumeration,
    sum_kappa,
    verify_kappa_structure,
)
from .lowdeg import (
    ExactProjection,
    exact_corr_and_mmse,
    exact_mmse_gaussian_bicluster,
    verify_corr_bound,
)
from .estimators import (
    bicluster_svd,
    degree_truncate,
    exhaustive_least_squares,
    mean_estimator,
    sdp_community,
    trunc_spectral,
    usvt,
)
from .harness import phase_scan, rate_fit, run_mc

__version__ = "0.1.0"

__all__ = [
    "BiclusterMomentOracle",
    "BiclusterPrior",
    "BipartiteMultigraph",
    "ConfigError",
    "ExactProjection",
    "GuardError",
    "Multigraph",
    "SbmMomentOracle",
    "SbmPqPrior",
    "ScaledRational",
    "SmoothGraphonSpec",
    "SnrReport",
    "bicluster_loss",
    "bicluster_svd",
    "build_probability_matrix",
    "clustering_loss",
    "cutoff_psi",
    "degree_truncate",
    "empirical_loss",
    "enumerate_connected",
    "enumerate_sub_multigraphs",
    "exact_corr_and_mmse",
    "exact_mmse_gaussian_bicluster",
    "exhaustive_least_squares",
    "graphon_fqp",
    "joint_cumulant",
    "kappa",
    "kappa_via_enumeration",
    "mean_estimator",
    "membership_matrix",
    "mollifier",
    "phase_scan",
    "rate_fit",
    "run_mc",
    "sample_adjacency",
    "sample_bicluster",
    "sample_graphon",
    "sample_membership",
    "sample_sbm",
    "sdp_community",
    "snr_and_thresholds",
    "sum_kappa",
    "trunc_spectral",
    "usvt",
    "verify_corr_bound",
    "verify_counting_lemma",
    "verify_kappa_structure",
    "verify_vertex_lemma",
]
