"""Distance from tripartite quantum states to quantum Markov chains.

The package computes conditional mutual information, builds the optimal
Markov state for a fixed block decomposition of B, and numerically minimizes
the relative-entropy distance over decompositions, bracketing the true
distance between I(A:C|B) and the best value found.
"""

from .backend import active_backend, set_backend
from .classical import (
    ClassicalJoint,
    classical_cmi,
    classical_relative_entropy,
    closest_markov,
    is_markov,
    random_joint,
)
from .entropy import (
    EntropyReport,
    alicki_fannes_bound,
    conditional_entropy,
    conditional_mutual_information,
    fannes_bound,
    mutual_information,
    nearest_pure,
    pinsker_floor,
    quantum_relative_entropy,
    von_neumann_entropy,
)
from .families import (
    FamilyPoint,
    cq_ensemble,
    cq_information_distance,
    psi_x,
    random_pure_tripartite,
    random_tripartite,
    zeta_d,
)
from .linalg import (
    PureState,
    TripartiteState,
    apply_isometry,
    dephase,
    hermitian_eig,
    kron,
    partial_trace,
    permute_subsystems,
    purify,
    random_density,
    random_haar_isometry,
    trace_norm,
)
from .markov import (
    Decomposition,
    MarkovState,
    assemble,
    embed_state,
    optimal_markov_for_decomposition,
    povm_decomposition,
    project_omega_delta,
    random_decomposition,
    relent_compact,
    relent_direct,
    relent_via_formula,
    shape_candidates,
    trivial_decomposition,
    two_relents_identity,
)
from .optimize import (
    OptConfig,
    OptResult,
    certified_gap,
    minimize_delta,
    minimize_ep,
    pure_delta,
)

__version__ = "0.1.0"

__all__ = [
    "ClassicalJoint",
    "Decomposition",
    "EntropyReport",
    "FamilyPoint",
    "MarkovState",
    "OptConfig",
    "OptResult",
    "PureState",
    "TripartiteState",
    "active_backend",
    "alicki_fannes_bound",
    "apply_isometry",
    "assemble",
    "certified_gap",
    "classical_cmi",
    "classical_relative_entropy",
    "closest_markov",
    "conditional_entropy",
    "conditional_mutual_information",
    "cq_ensemble",
    "cq_information_distance",
    "dephase",
    "embed_state",
    "fannes_bound",
    "hermitian_eig",
    "is_markov",
    "kron",
    "minimize_delta",
    "minimize_ep",
    "mutual_information",
    "nearest_pure",
    "optimal_markov_for_decomposition",
    "partial_trace",
    "permute_subsystems",
    "pinsker_floor",
    "povm_decomposition",
    "project_omega_delta",
    "pure_delta",
    "purify",
    "psi_x",
    "quantum_relative_entropy",
    "random_decomposition",
    "random_density",
    "random_haar_isometry",
    "random_joint",
    "random_pure_tripartite",
    "random_tripartite",
    "relent_compact",
    "relent_direct",
    "relent_via_formula",
    "set_backend",
    "shape_candidates",
    "trace_norm",
    "trivial_decomposition",
    "two_relents_identity",
    "von_neumann_entropy",
    "zeta_d",
]
