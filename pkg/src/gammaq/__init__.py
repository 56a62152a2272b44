"""Relative-phase entanglement of pure multipartite quantum states."""

from .errors import GammaqError, ValidationError
from .gamma import (
    GammaReport,
    SubsetTermSpec,
    contribution,
    gamma,
    gamma_bipartite_explicit,
    gamma_tripartite_explicit,
    nested_term,
    normalization,
    permutation_apply,
)
from .optimize import OptimizerConfig, OptResult, build_unitary, objective, optimize_gamma_sup
from .povm import PhaseAssignment, delta_joint, delta_subsystem, fourier_gamma, phase_distribution
from .state import (
    JointIndexPair,
    PureState,
    apply_local_unitaries,
    make_state,
    pi_index,
    rho,
    zoo,
)
from .statefile import load_state, state_from_dict, state_to_dict

__version__ = "0.1.0"
