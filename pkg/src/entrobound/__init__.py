"""Entropic uncertainty bounds for weighted POVM ensembles.

Evaluates lower bounds on weighted sums of Renyi and Shannon entropies over
measurement ensembles via view operators and index-of-coincidence caps, plus
competitor overlap-based bounds, numerically optimal bounds, and an entropic
steering criterion with measurement-weight optimisation.
"""

from .bounds import (
    BoundReport,
    OptimalBound,
    bound_q_alpha,
    bound_q_lmf,
    bound_q_lmf_best,
    bound_q_mu,
    bound_q_one,
    bound_q_s,
    bound_q_s_qubit,
    bound_q_scb,
    compile_bound_report,
    numerical_optimal_bound,
    weighted_ic,
    weighted_information_gain,
)
from .ensembles import (
    add_white_noise,
    haar_random_bases,
    mub_family,
    observable_basis,
    pauli_triple,
    projective_basis,
    qubit_family,
    qutrit_four_bases,
)
from .entropy import (
    IcValue,
    binary_entropy,
    index_of_coincidence,
    q_alpha_estimate,
    q_one_estimate,
    renyi_entropy,
    shannon_entropy,
    shannon_floor_h,
    shannon_floor_multi,
)
from .qmat import (
    DensityState,
    DiagnosticError,
    EnsembleDiagnostics,
    Povm,
    ValidationError,
    WeightedEnsemble,
    born_probabilities,
    hermitian_eigs,
    invariant_information,
    validate_ensemble,
    von_neumann_entropy,
)
from .steering import (
    BipartiteState,
    SteeringResult,
    SteeringScenario,
    conditional_renyi,
    evaluate_criterion,
    joint_distribution,
    maximally_entangled_qubits,
    noise_threshold,
    optimize_weights,
)
from .viewop import (
    ViewOperator,
    ViewReport,
    average_view,
    maximally_entangled_vector,
    operator_norm,
    overlap_matrix,
    total_view,
    view_operator,
    view_report,
)

__version__ = "0.1.0"
