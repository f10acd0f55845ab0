"""Unsupervised ensemble learning via pairwise-model pruning.

Workflow: model the joint distribution of the hidden truth and the observed
classifiers as a pairwise binary graphical model, estimate every classifier's
neighborhood by sparse logistic regression, reconstruct the expert set from
the knot structure, then predict with an EM-estimated posterior classifier or
an augmented majority vote.
"""

from ._kernels import backend
from .approx import ApproxModel, approximate, sign_partition, theta_tilde_pair
from .baselines import DSParams, dawid_skene, majority_vote, sml
from .enumeration import (
    ExactDistribution,
    conditional_logit,
    enumerate_spec,
    enumerate_weights,
    kl_divergence,
    marginalize_out_node0,
    pair_moment,
)
from .gibbs import GibbsConfig, chain_seed, sample, sample_weights
from .harness import BenchConfig, TrialRecord, d0_for, generate_graph, run_benchmark
from .metrics import ClassificationMetrics, RecoveryMetrics, classification, recovery
from .model import (
    ExpertReport,
    IsingModelSpec,
    LabelMatrix,
    NeighborhoodMap,
    PredictionResult,
    StructuralError,
    degree_stats,
    validate_model,
)
from .nodewise import (
    FisherDiagnostics,
    LassoLogisticProblem,
    LassoLogisticSolution,
    fisher_diagnostics,
    lambda_auto,
    neighborhoods,
    objective,
    smooth_gradient,
    solve,
)
from .predict import EMState, augmented_majority_vote, bayes_classify, em_fit, posterior
from .prune import KnotTable, knot_set, reconstruct_expert_set

__version__ = "0.1.0"

__all__ = [
    "ApproxModel",
    "BenchConfig",
    "ClassificationMetrics",
    "DSParams",
    "EMState",
    "ExactDistribution",
    "ExpertReport",
    "FisherDiagnostics",
    "GibbsConfig",
    "IsingModelSpec",
    "KnotTable",
    "LabelMatrix",
    "LassoLogisticProblem",
    "LassoLogisticSolution",
    "NeighborhoodMap",
    "PredictionResult",
    "RecoveryMetrics",
    "StructuralError",
    "TrialRecord",
    "approximate",
    "augmented_majority_vote",
    "backend",
    "bayes_classify",
    "chain_seed",
    "classification",
    "conditional_logit",
    "d0_for",
    "dawid_skene",
    "degree_stats",
    "em_fit",
    "enumerate_spec",
    "enumerate_weights",
    "fisher_diagnostics",
    "generate_graph",
    "kl_divergence",
    "knot_set",
    "lambda_auto",
    "majority_vote",
    "marginalize_out_node0",
    "neighborhoods",
    "objective",
    "pair_moment",
    "posterior",
    "reconstruct_expert_set",
    "recovery",
    "run_benchmark",
    "sample",
    "sample_weights",
    "sign_partition",
    "sml",
    "smooth_gradient",
    "solve",
    "theta_tilde_pair",
    "validate_model",
]
