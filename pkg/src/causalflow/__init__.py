"""Information flow and causal influence in linear stochastic networks.

The package computes exact Gaussian information measures for stationary
linear Langevin networks without feedback loops, splits the lagged
information into redundant, unique and synergistic parts, and provides
closed forms, stationary simulation and plug-in estimation to cross-check
them.
"""

from . import blrm, ffl
from ._numeric import get_eps, set_eps
from .estimate import (
    LaggedSampleCov,
    empirical_curve,
    empirical_decomposition,
    sample_lagged_cov,
)
from .exceptions import (
    CausalFlowError,
    CycleDetected,
    DeterministicRelation,
    DuplicateEdge,
    DuplicateNode,
    GammaNonZero,
    InsufficientData,
    NegativeNoise,
    NetworkError,
    NetworkParseError,
    NonPositiveDecay,
    NumericalFailure,
    RootWithoutNoise,
    SelfLoop,
    SingularConditioning,
    StepTooLarge,
    UnknownNode,
)
from .gausscov import (
    CovarianceMatrix,
    LaggedGaussian,
    Var,
    conditional_covariance,
    lagged_joint,
    matrix_exponential,
    predictive_covariance,
    stationary_covariance,
    transition,
)
from .measures import (
    DecompositionCurve,
    DecompositionPoint,
    decompose,
    decompose_curve,
    gaussian_mi,
    linear_redundancy,
    transfer_entropy,
    wb_redundancy,
)
from .network import (
    EdgeSpec,
    LinearNetwork,
    NodeSpec,
    drift_matrix,
    format_network,
    load_network,
    noise_matrix,
    parents,
    parse_network,
    validate,
)
from .simulate import (
    TrajectoryEnsemble,
    euler_maruyama_step,
    exact_step_sampler,
    generate,
    read_trajectories,
    write_trajectories,
)

__version__ = "0.1.0"
