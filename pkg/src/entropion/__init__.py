"""Numerical verification of quantum entropy inequalities.

Relative entropy H(P, Q) = Tr P (ln P - ln Q) (natural log), computed by
three independent routes, plus randomized margin suites for joint
convexity, strong subadditivity, data processing, operator Schwarz
inequalities, and Holevo bounds.
"""

from .channels import (
    AncillaRep,
    CptpVerdict,
    KrausMap,
    Povm,
    adjoint_channel,
    ancilla_representation,
    apply_ancilla,
    apply_channel,
    apply_linear,
    choi_matrix,
    dephase,
    dephase_via_z,
    identity_channel,
    is_cptp,
    povm_channel,
    purify,
    tensor_channel,
    trace_out_channel,
)
from .entropy import (
    QuadratureConfig,
    adaptive_gl,
    bures_distance,
    composite_gl,
    conditional_entropy,
    kernel_k,
    quadratic_relent,
    relative_entropy,
    relative_entropy_integral,
    relative_entropy_integral_fixed,
    relative_entropy_spectral_kernel,
    scalar_log_identity,
    support_defect,
    von_neumann_entropy,
)
from .holevo import (
    Ensemble,
    check_holevo_bound,
    check_partial_measurement_chain,
    chi,
    chi_via_qc,
    flagged_state,
    measure_ensemble,
    yuen_ozawa_gap,
)
from .inequalities import (
    BlockContractionReport,
    CheckReport,
    ConvexityInstance,
    Failure,
    JointConvexityMargins,
    SsaMargins,
    check_adjoint_contraction,
    check_block_contraction,
    check_concavity,
    check_cp_schwarz,
    check_joint_convexity,
    check_monotonicity,
    check_operator_schwarz,
    check_pure_state_lemmas,
    check_schwarz_quadratic,
    check_ssa,
)
from .matcore import (
    KernelObstruction,
    NonConvergence,
    Spectrum,
    as_density,
    as_hermitian,
    as_matrix,
    as_psd,
    hermitian_eig,
    hs_inner,
    matrix_from_json,
    matrix_function,
    matrix_to_json,
    partial_trace,
    permute_factors,
    read_matrix,
    tensor,
    write_matrix,
)
from .randgen import (
    RngState,
    random_cptp,
    random_density,
    random_ensemble,
    random_matrix,
    random_povm,
    random_simplex,
    random_unit_vector,
    random_unitary,
)
from .superop import SuperOpSpec, left_mul, right_mul, solve_resolvent, superop_matrix
from .suites import run_suite, suite_names

__version__ = "0.1.0"
