"""Quantum-walk Metropolis sampling simulator with classical baselines."""

from .analysis import (
    CostAccount,
    detect_convergence,
    qubit_cost,
    sampling_cost,
    tv_distance,
)
from .engine import (
    CircuitConfig,
    ConvergenceReport,
    DensityState,
    KrausSet,
    acceptance_ratio,
    build_kraus,
    channel_step,
    coin_prob,
    disc_index,
    offset_of_action,
    run_qmcmc,
)
from .mcmc import ChainResult, ProposalSpec, mh_run, proposal_weights
from .purestate import (
    MAX_LIVE_QUBITS,
    FullState,
    PureStateSimulator,
    live_qubits,
    pure_run,
)
from .targets import (
    DENSITY_FLOOR,
    ExpectedDistribution,
    GaussianComponent,
    Grid,
    TargetSpec,
    discretize_target,
    real_of_index,
    uniform_target,
)
from .walks import (
    HADAMARD_COIN,
    CoinParams,
    WalkState,
    coin_matrix,
    dqw_evolve,
    dqw_run,
    position_std,
    rw_distribution,
)

__version__ = "0.1.0"
