"""Bayesian online learning of energy-efficient routes.

Conjugate Gaussian / log-Gaussian beliefs over per-edge energy
consumption, explored with greedy, Thompson Sampling, or BayesUCB
strategies over a shortest-path oracle, in single-vehicle or synchronous
fleet sessions, with regret instrumentation throughout.
"""

from ._accel import backend, set_backend, use_backend
from .agents import AgentSpec, all_labels, bayes_ucb_weights, compute_weights, greedy_weights, ts_weights
from .belief import (
    GAUSSIAN,
    LOG_GAUSSIAN,
    BeliefStore,
    GaussianEdgeBelief,
    LogGaussianEdgeBelief,
    gaussian_prior,
    gaussian_store,
    gaussian_update,
    log_gaussian_store_matched,
    loggaussian_prior,
    loggaussian_update,
    posterior_quantile,
    predictive_mean,
    sample_mean,
    store_from_prior_energy,
)
from .energy import (
    EARTH_STANDARD,
    MEDIUM_DUTY_TRUCK,
    PhysicsConstants,
    VehicleParams,
    deterministic_energy_wh,
    edge_energy_vec,
    lognormal_moments,
    rectified_normal_mean,
    wheel_energy_wh,
)
from .errors import (
    ConfigError,
    EvnavError,
    InvalidWeightError,
    NetworkFormatError,
    NoPathError,
    NonPositiveObservationError,
    PathExplosionError,
)
from .graph import EdgeAttrs, RoadNetwork, enumerate_paths, load_network, path_cost, save_network, shortest_path
from .sim import (
    GroundTruth,
    Scenario,
    ScenarioConfig,
    SessionRecord,
    build_scenario,
    cumulative_regret,
    instant_regret,
    run_multi_agent,
    run_single_agent,
    sample_rewards,
    true_expected_cost,
)
from .synth import SyntheticInstance, SyntheticSpec, generate_instance

__version__ = "0.1.0"
