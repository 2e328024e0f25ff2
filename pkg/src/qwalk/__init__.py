"""Discrete-time quantum walks on Z^d and the weak limit of X_n / n."""

from .cdf import StepCDF
from .convergence import (
    ClosedFormLaw,
    ConvergenceReport,
    biased_support,
    compare_to_limit,
    cramer_wold_suite,
    empirical_cdf,
    hadamard_closed_form,
    kolmogorov_distance,
    mixed_coin_distribution,
)
from .errors import *  # noqa: F401,F403
from .estimator import QuantumWalkLimit
from .evolution import (
    EvolutionResult,
    distribution,
    evolve,
    evolve_distribution,
    evolve_spectral,
    scaled_moment,
    step,
)
from .spectral import (
    Eigensystem,
    LimitLaw,
    UkMatrix,
    eigensystem,
    limit_cdf,
    limit_moment,
    omega_measure,
    u_of_k,
    velocity,
)
from .walk import (
    CoinMatrix,
    Distribution,
    MixedState,
    MomentumGrid,
    PositionState,
    ShiftSet,
    WalkSpec,
    coin_family,
    make_coin,
    mixed_state,
    point_state,
    tensor_spec,
    walk_family,
)

__version__ = "0.1.0"
