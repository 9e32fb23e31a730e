"""Graph positional encodings from message-passing networks run on random or
basis node signals, with dense spectral references and property checks."""

from .csl import CSL_SKIPS, csl_classify, csl_config, csl_dataset, csl_signature, generate_csl
from .encoder import (GnnConfig, InputDistribution, LayerSpec, Nonlinearity, PeMatrix,
                      SampleStats, gin_layer, gnn_forward, identity_config, init_weights,
                      pearl_b, pearl_r, pearl_r_analytic_mean, pearl_r_stats, scalar_layer)
from .estimators import BPearl, RPearl, SignatureClassifier
from .filters import (FilterBank, FilterSpec, apply_filter, apply_filter_bank,
                      design_interpolating_filter, filter_norm_bound, frequency_response,
                      lipschitz_constants)
from .graph import (Graph, GraphParseError, GsoDomainError, GsoKind, GsoMatrix, build_gso,
                    degrees, load_graph, permute_graph, read_graph, spmv)
from .spectral import (eigenspace_projector, eigenvalue_features, group_eigenvalues,
                       spe_equiv_check, spe_reference, symmetric_eig, verify_prop1)

__version__ = "0.1.0"

__all__ = [
    "BPearl",
    "CSL_SKIPS",
    "FilterBank",
    "FilterSpec",
    "GnnConfig",
    "Graph",
    "GraphParseError",
    "GsoDomainError",
    "GsoKind",
    "GsoMatrix",
    "InputDistribution",
    "LayerSpec",
    "Nonlinearity",
    "PeMatrix",
    "RPearl",
    "SampleStats",
    "SignatureClassifier",
    "apply_filter",
    "apply_filter_bank",
    "build_gso",
    "csl_classify",
    "csl_config",
    "csl_dataset",
    "csl_signature",
    "degrees",
    "design_interpolating_filter",
    "eigenspace_projector",
    "eigenvalue_features",
    "filter_norm_bound",
    "frequency_response",
    "generate_csl",
    "gin_layer",
    "gnn_forward",
    "group_eigenvalues",
    "identity_config",
    "init_weights",
    "lipschitz_constants",
    "load_graph",
    "pearl_b",
    "pearl_r",
    "pearl_r_analytic_mean",
    "pearl_r_stats",
    "permute_graph",
    "read_graph",
    "scalar_layer",
    "spe_equiv_check",
    "spe_reference",
    "spmv",
    "symmetric_eig",
    "verify_prop1",
]
