"""Truthful threshold mechanisms for vertex cover and facility location.

The package groups into:

* `instances`: graphs, ownership structures, cost profiles, generators,
  JSON serialization;
* `thresholds`: threshold families, the selection/payment rule, scaling
  certificates, and the neighbor-to-edge conversion;
* `decomposition`: combining per-part mechanisms, random single-owner
  parts, low-degree peeling, star rounds, and the sparse pipelines;
* `ufl`: the truthful-in-expectation facility-location mechanism built on
  fractional VCG payments and a convex decomposition of the fractional
  optimum;
* `verify`: monotonicity, weak monotonicity, truthfulness grids, and the
  frugality benchmark;
* `oracles`, `lp`, `density`, `flows`: exact baselines the mechanisms and
  the test-suite check against.
"""

from __future__ import annotations

from .errors import (
    CovermechError,
    InfeasibleLPError,
    InvalidInstanceError,
    LMPCertificateError,
    LoopGuardError,
    LPError,
    MechanismPreconditionError,
    MonotonicityError,
    ScalingProbeError,
    SizeLimitError,
    ThresholdContractError,
    UnboundedLPError,
)
from .instances import (
    Graph,
    Ownership,
    UFLInstance,
    VCInstance,
    bipartite_gadget_instance,
    dump_instance,
    gadget_skeleton,
    generate_gadget_Gn,
    generate_random_vc_instance,
    load_instance,
    load_ufl_instance,
    load_vc_instance,
    random_ufl_instance,
    random_vc_instance,
    save_instance,
    validate_vc_instance,
)
from .density import (
    densest_subgraph,
    max_subgraph_density,
    orient_min_max_indegree,
    orient_minimizing_indegree,
    sparsity_gamma,
)
from .lp import LinearProgram, LPSolution, lp_solve, solve_lp
from .oracles import (
    enumerate_minimal_vertex_covers,
    min_vertex_cover_exact,
    ufl_exact,
    vc_lp_restricted_value,
    vc_lp_solve,
    vc_lp_value,
    vc_lp_via_simplex,
)
from .thresholds import (
    CostView,
    ThresholdFamily,
    VCMechanismResult,
    alpha_Gx,
    ax_mechanism,
    beta_Gx,
    bx_mechanism,
    edge_family_from_neighbor,
    evaluate_thresholds,
    independence_ratio,
    independence_witness,
    neighbor_to_edge_convert,
    neighborhood_ratio,
    nondisjoint_wrap,
    perron_scaling,
    perron_vector,
    run_threshold_mechanism,
    run_with_shared_ownership,
    scaled_edge_family,
    scaled_neighbor_family,
    tightness_instance,
    worst_case_instance,
)
from .decomposition import (
    Part,
    PeelingResult,
    ZSubgraph,
    build_sparse_parts,
    combine,
    combine_parts,
    lp_critical_value,
    lp_selection,
    lp_threshold_family,
    minor_closed_mechanism,
    peel_low_degree,
    random_single_owner_parts,
    random_singledim_decomposition,
    rdim_mechanism,
    run_combined,
    run_random_decomposition,
    run_sparse_mechanism,
    run_three_hop_mechanism,
    singledim_vc_mechanism,
    sparse_peeling,
    star_mechanism,
    star_rounds,
    three_hop_violation,
    threehop_mechanism,
    total_ratio_bound,
    zj_decomposition,
)
from .ufl import (
    RHO,
    FractionalSolution,
    UFLColumn,
    UFLMechanismResult,
    UFLOutcome,
    convex_decompose,
    enumerate_decompose,
    fractional_vcg_payments,
    jms_dual_ascent,
    jms_lmp,
    lmp_certificate,
    master_value,
    run_ufl_mechanism,
    solve_flp,
    solve_fractional,
)
from .verify import (
    FrugalityReport,
    MonotonicityWitness,
    WMONWitness,
    five_cycle_fixture,
    frugality_estimate,
    frugality_nu,
    frugality_ratio_estimate,
    lp_rounding_algorithm,
    monotonicity_probe,
    ordered_primal_dual,
    path_fixture,
    payment_benchmark,
    simultaneous_primal_dual,
    truthfulness_check,
    truthfulness_report,
    wmon_check,
    wmon_sides,
)
from ._kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    # errors
    "CovermechError",
    "InvalidInstanceError",
    "SizeLimitError",
    "ThresholdContractError",
    "ScalingProbeError",
    "MonotonicityError",
    "LMPCertificateError",
    "LoopGuardError",
    "LPError",
    "InfeasibleLPError",
    "UnboundedLPError",
    "MechanismPreconditionError",
    # instances
    "Graph",
    "Ownership",
    "VCInstance",
    "UFLInstance",
    "random_vc_instance",
    "generate_random_vc_instance",
    "random_ufl_instance",
    "gadget_skeleton",
    "generate_gadget_Gn",
    "bipartite_gadget_instance",
    "validate_vc_instance",
    "load_instance",
    "load_vc_instance",
    "load_ufl_instance",
    "dump_instance",
    "save_instance",
    # density
    "densest_subgraph",
    "max_subgraph_density",
    "sparsity_gamma",
    "orient_minimizing_indegree",
    "orient_min_max_indegree",
    # lp
    "LinearProgram",
    "LPSolution",
    "solve_lp",
    "lp_solve",
    # oracles
    "min_vertex_cover_exact",
    "enumerate_minimal_vertex_covers",
    "vc_lp_solve",
    "vc_lp_value",
    "vc_lp_restricted_value",
    "vc_lp_via_simplex",
    "ufl_exact",
    # thresholds
    "CostView",
    "ThresholdFamily",
    "VCMechanismResult",
    "run_threshold_mechanism",
    "run_with_shared_ownership",
    "nondisjoint_wrap",
    "evaluate_thresholds",
    "scaled_edge_family",
    "scaled_neighbor_family",
    "ax_mechanism",
    "bx_mechanism",
    "alpha_Gx",
    "beta_Gx",
    "independence_witness",
    "independence_ratio",
    "neighborhood_ratio",
    "perron_scaling",
    "perron_vector",
    "worst_case_instance",
    "tightness_instance",
    "edge_family_from_neighbor",
    "neighbor_to_edge_convert",
    # decomposition
    "Part",
    "ZSubgraph",
    "PeelingResult",
    "combine_parts",
    "combine",
    "run_combined",
    "total_ratio_bound",
    "lp_selection",
    "lp_critical_value",
    "lp_threshold_family",
    "random_single_owner_parts",
    "random_singledim_decomposition",
    "run_random_decomposition",
    "rdim_mechanism",
    "singledim_vc_mechanism",
    "peel_low_degree",
    "sparse_peeling",
    "star_rounds",
    "zj_decomposition",
    "star_mechanism",
    "build_sparse_parts",
    "run_sparse_mechanism",
    "minor_closed_mechanism",
    "run_three_hop_mechanism",
    "threehop_mechanism",
    "three_hop_violation",
    # ufl
    "RHO",
    "FractionalSolution",
    "solve_flp",
    "solve_fractional",
    "fractional_vcg_payments",
    "jms_dual_ascent",
    "jms_lmp",
    "lmp_certificate",
    "UFLColumn",
    "convex_decompose",
    "enumerate_decompose",
    "master_value",
    "UFLOutcome",
    "UFLMechanismResult",
    "run_ufl_mechanism",
    # verify
    "MonotonicityWitness",
    "WMONWitness",
    "monotonicity_probe",
    "wmon_sides",
    "wmon_check",
    "truthfulness_report",
    "truthfulness_check",
    "FrugalityReport",
    "frugality_nu",
    "payment_benchmark",
    "frugality_estimate",
    "frugality_ratio_estimate",
    "lp_rounding_algorithm",
    "ordered_primal_dual",
    "simultaneous_primal_dual",
    "five_cycle_fixture",
    "path_fixture",
]
