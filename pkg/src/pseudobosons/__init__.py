"""Symbolic-numeric pseudo-boson algebra for the quantum damped oscillator.

Exact first-order operator algebra on R^2, polynomial-times-Gaussian states
with closed-form weighted inner products, joint-vacuum solving, truncated
biorthogonal ladder machinery, and machine-checked certificates that the
damped-oscillator ladder admits no square-integrable vacuum pair.
"""

__version__ = "0.1.0"

from .operators import (
    FirstOrderOperator,
    OperatorExpression,
    WeightedSpace,
    L2,
    TOL_ALG,
    adjoint,
    check_pseudo_boson_ccr,
    commutator,
    compose,
    compose_ops,
)
from .states import (
    D_MAX,
    TOL_INT,
    DegreeCapExceeded,
    DivergentIntegral,
    GaussianPolynomial,
    IntegrabilityVerdict,
    QuadraticForm,
    apply_expression,
    apply_operator,
    inner_product,
    integrability_check,
)
from .vacuum import (
    DegenerateParamsError,
    VacuumResult,
    VacuumStatus,
    ratio_condition_defect,
    solve_vacuum,
)
from .model import (
    ConstructionMismatchError,
    ModelParams,
    OverdampedError,
    PhaseSpaceQuad,
    PseudoBosonQuad,
    build_hamiltonian,
    build_params,
    build_phase_space,
    build_pseudo_bosons,
    number_operators,
    sample_params,
    weighted_adjoint_quad,
)
from .nogo import (
    AnsatzMode,
    AnsatzSearchReport,
    PreconditionError,
    SearchConclusion,
    SignObstructionCertificate,
    WeightedFeasibilityReport,
    general_ansatz_search,
    pure_gaussian_forcing,
    sign_obstruction,
    weighted_infeasibility,
)
from .framework import (
    TOL_TRUNC,
    FixtureModel,
    LadderFamily,
    TruncatedOperator,
    build_S_operators,
    build_ladder,
    check_intertwining,
    check_number_eigenrelations,
    fixture_families,
    gram_matrix,
    make_fixture,
    qdho_family,
    truncated_matrix,
)
