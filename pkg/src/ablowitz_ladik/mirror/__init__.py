"""Extrinsic picture, Backlund folding and reflectionless soliton solutions."""

from .backlund import (
    BacklundChain,
    BacklundSeeds,
    LineFields,
    asymptotic_matrix,
    backlund_matrix,
    backlund_seeds,
    constraint_residuals,
    determinant_spread,
    fold,
    folded_lax_residual,
    recursion_residual,
    run_backlund,
    symmetry_residual,
    tail_window,
    time_relation_residual,
)
from .gauge import (
    K_minus_conjugated,
    K_minus_td,
    boundary_commutator,
    extrinsic_A0,
    extrinsic_lax,
    extrinsic_zero_curvature_residual,
    gauge_consistency_residual,
    gauge_G,
    time_dependent_boundary_residual,
)
from .scattering import (
    DiscreteData,
    F1Root,
    F_infinity,
    OctetData,
    f1_infinity_roots,
    f1_quartic,
    octet_expand,
    phi,
    robin_f,
    s11,
    s11_prime,
    s22,
)
from .soliton import (
    boundary_residuals,
    bulk_residual,
    certify_root,
    closure_residual_series,
    soliton_field,
    soliton_solution,
    verify_boundary,
)
