"""Ground truth, reward generation, regret accounting, and session loops.

A scenario couples an immutable network with a hidden ground truth and a
prior belief store. Each session an agent prices every edge from its
beliefs, drives the resulting shortest path, observes per-edge consumption
(semi-bandit feedback), and updates only the traversed edges. The
synchronous fleet variant runs K agents per session against one shared
belief snapshot and applies all observations at a barrier, in agent order
(the conjugate updates are order-invariant, so scheduling cannot leak into
the results).

Randomness is organized as independent streams keyed by
(seed index, agent type, stream kind, fleet member, session) on top of one
master seed, so any sub-computation is reproducible regardless of
execution order or worker count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import ndtr, ndtri

from .agents import AgentSpec
from .belief import (
    GAUSSIAN,
    LOG_GAUSSIAN,
    BeliefStore,
    gaussian_store,
    log_gaussian_store_matched,
)
from .energy import (
    EARTH_STANDARD,
    MEDIUM_DUTY_TRUCK,
    PhysicsConstants,
    VehicleParams,
    edge_energy_vec,
)
from .errors import ConfigError
from .graph import RoadNetwork, load_network, path_cost, shortest_path
from .synth import SyntheticSpec, generate_instance

MODE_DIRECT = "direct"
MODE_CONSUMPTION_NOISE = "consumption_noise"
MODE_SPEED_NOISE = "speed_noise"
MODES = (MODE_DIRECT, MODE_CONSUMPTION_NOISE, MODE_SPEED_NOISE)

_MIN_SPEED_MPS = 1.0
_TRUE_MEAN_MC_DRAWS = 100_000
_TRUE_MEAN_MC_ENTROPY = 0x5EEDC0DE  # fixed: true means depend only on the network

# rng stream kinds
_STREAM_WEIGHTS = 0
_STREAM_REWARDS = 1
_STREAM_SYNTH = 2

_REGRET_FLOOR = -1e-9


def _stream(entropy: int, *key: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy, spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(seq)


def _truncated_normal(u, mu, sigma, low):
    """Inverse-CDF draws from N(mu, sigma^2) truncated below at ``low``.

    Zero-sigma entries degenerate to mu (no truncation applied, matching
    the noise-free limit).
    """
    u = np.asarray(u, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    out = np.array(mu, dtype=np.float64, copy=True)
    active = sigma > 0
    if active.any():
        a = ndtr((low - mu[active]) / sigma[active])
        out[active] = mu[active] + sigma[active] * ndtri(a + u[active] * (1.0 - a))
    return out


class GroundTruth:
    """Hidden true reward distributions plus the regret-side cost scale.

    ``mean_wh`` holds the raw (possibly negative) expected consumption per
    edge; the optimizer and the regret differences both use the clamped
    ``cost_wh = max(0, mean_wh)`` so chosen and optimal paths are measured
    on one scale.
    """

    def __init__(self, mode, mean_wh, std_wh, net=None, vehicle=None,
                 constants=EARTH_STANDARD, mc_se_wh=None):
        if mode not in MODES:
            raise ValueError(f"unknown ground-truth mode {mode!r}")
        self.mode = mode
        self.mean_wh = np.asarray(mean_wh, dtype=np.float64)
        self.std_wh = np.asarray(std_wh, dtype=np.float64)
        if not np.isfinite(self.mean_wh).all():
            raise ValueError("true means must be finite")
        if (self.std_wh < 0).any():
            raise ValueError("true stds must be >= 0")
        self.cost_wh = np.maximum(0.0, self.mean_wh)
        self.net = net
        self.vehicle = vehicle
        self.constants = constants
        self.mc_se_wh = mc_se_wh
        self._opt_cache: dict[tuple[int, int], tuple[float, tuple[int, ...]]] = {}

    @classmethod
    def direct(cls, mean_wh, std_wh) -> "GroundTruth":
        return cls(MODE_DIRECT, mean_wh, std_wh)

    @classmethod
    def consumption_noise(
        cls, net: RoadNetwork, vehicle: VehicleParams, obs_rel_std: float,
        constants: PhysicsConstants = EARTH_STANDARD,
    ) -> "GroundTruth":
        eps = edge_energy_vec(net, vehicle, constants=constants)
        return cls(MODE_CONSUMPTION_NOISE, eps, np.abs(obs_rel_std * eps))

    @classmethod
    def speed_noise(
        cls, net: RoadNetwork, vehicle: VehicleParams,
        constants: PhysicsConstants = EARTH_STANDARD,
        mc_draws: int = _TRUE_MEAN_MC_DRAWS,
    ) -> "GroundTruth":
        """True means estimated by fixed-seed Monte Carlo over speed draws.

        The per-edge standard error of the estimate is kept on
        ``mc_se_wh`` and surfaced through the run metadata.
        """
        m = net.n_edges
        mean = np.empty(m)
        se = np.empty(m)
        for e in range(m):
            rng = _stream(_TRUE_MEAN_MC_ENTROPY, e)
            u = rng.random(mc_draws)
            speeds = _truncated_normal(
                u, net.speed_mean_mps[e], net.speed_std_mps[e], _MIN_SPEED_MPS
            )
            y = edge_energy_vec(
                net, vehicle, speeds, constants, edge_ids=np.full(mc_draws, e, dtype=np.int64)
            )
            mean[e] = y.mean()
            se[e] = y.std(ddof=1) / math.sqrt(mc_draws)
        return cls(MODE_SPEED_NOISE, mean, np.zeros(m), net, vehicle, constants, se)

    def optimal(self, net: RoadNetwork, source: int, target: int) -> tuple[float, tuple[int, ...]]:
        key = (source, target)
        if key not in self._opt_cache:
            path = shortest_path(net, self.cost_wh, source, target)
            self._opt_cache[key] = (path_cost(path, self.cost_wh), path)
        return self._opt_cache[key]


def sample_rewards(gt: GroundTruth, net: RoadNetwork, path, rng: np.random.Generator) -> np.ndarray:
    """One independent consumption draw per edge of the path (signed Wh)."""
    idx = np.asarray(path, dtype=np.int64)
    if gt.mode in (MODE_DIRECT, MODE_CONSUMPTION_NOISE):
        return rng.normal(gt.mean_wh[idx], gt.std_wh[idx])
    u = rng.random(idx.shape[0])
    speeds = _truncated_normal(u, net.speed_mean_mps[idx], net.speed_std_mps[idx], _MIN_SPEED_MPS)
    return edge_energy_vec(net, gt.vehicle, speeds, gt.constants, edge_ids=idx)


def true_expected_cost(gt: GroundTruth, path) -> float:
    """Expected cost of a path on the regret scale (clamped true means)."""
    return path_cost(path, gt.cost_wh)


def instant_regret(gt: GroundTruth, net: RoadNetwork, path, source: int, target: int) -> float:
    opt_cost, _ = gt.optimal(net, source, target)
    delta = true_expected_cost(gt, path) - opt_cost
    if delta < _REGRET_FLOOR:
        raise RuntimeError(
            f"negative instant regret {delta}; ground-truth optimum is inconsistent"
        )
    return max(0.0, delta)


def cumulative_regret(records) -> list[float]:
    """Running sums of instant regret; records must be session-ordered."""
    out = []
    total = 0.0
    last = 0
    for rec in records:
        if rec.session < last:
            raise ValueError("records are not ordered by session")
        last = rec.session
        total += rec.instant_regret_wh
        out.append(total)
    return out


@dataclass(frozen=True)
class SessionRecord:
    session: int
    agent_id: str
    path: tuple[int, ...]
    observed_wh: tuple[float, ...]
    true_expected_cost_wh: float
    instant_regret_wh: float

    @property
    def observed_cost_wh(self) -> float:
        total = 0.0
        for y in self.observed_wh:
            total += y
        return total


@dataclass(frozen=True)
class ScenarioConfig:
    """Declarative description of one experiment scenario."""

    name: str = "scenario"
    synthetic: SyntheticSpec | None = None
    network_file: str | None = None
    prior_file: str | None = None
    mode: str = MODE_DIRECT
    source: int | None = None
    target: int | None = None
    horizon: int = 1
    agents: tuple[str, ...] = ()
    fleet_size: int = 1
    seed: int = 0
    num_seeds: int = 1
    obs_rel_std: float = 0.1
    prior_rel_std: float = 0.25
    positivity_floor_wh: float = 0.001
    vehicle: VehicleParams = MEDIUM_DUTY_TRUCK
    constants: PhysicsConstants = EARTH_STANDARD

    def validate(self) -> None:
        if (self.synthetic is None) == (self.network_file is None):
            raise ConfigError("exactly one of synthetic and network_file is required")
        if self.mode not in MODES:
            raise ConfigError(f"unknown ground-truth mode {self.mode!r}")
        if self.synthetic is not None and self.mode != MODE_DIRECT:
            raise ConfigError("synthetic networks carry direct ground truth")
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.fleet_size < 1:
            raise ConfigError(f"fleet_size must be >= 1, got {self.fleet_size}")
        if not self.agents:
            raise ConfigError("at least one agent label is required")
        for label in self.agents:
            AgentSpec.from_label(label)
        if self.num_seeds < 1:
            raise ConfigError(f"num_seeds must be >= 1, got {self.num_seeds}")
        if self.network_file is not None and (self.source is None or self.target is None):
            raise ConfigError("file networks require explicit source and target")
        src, tgt = self.resolved_endpoints()
        if src == tgt:
            raise ConfigError("source and target must differ")
        if not self.obs_rel_std > 0:
            raise ConfigError("noise.obs_rel_std must be > 0")
        if not self.prior_rel_std > 0:
            raise ConfigError("noise.prior_rel_std must be > 0")
        if not self.positivity_floor_wh > 0:
            raise ConfigError("noise.positivity_floor_wh must be > 0")

    def resolved_endpoints(self) -> tuple[int, int]:
        src = 0 if self.source is None else self.source
        if self.target is not None:
            tgt = self.target
        elif self.synthetic is not None:
            tgt = self.synthetic.n_vertices - 1
        else:
            tgt = -1
        return src, tgt


@dataclass
class Scenario:
    """A ScenarioConfig materialized for one seed index."""

    config: ScenarioConfig
    seed_index: int
    net: RoadNetwork
    gt: GroundTruth
    prior_mu0: np.ndarray
    prior_var0: np.ndarray
    prior_noise_var: np.ndarray
    prior_ln_store: BeliefStore | None = field(default=None, repr=False)
    source: int = 0
    target: int = 0

    def prior_store(self, model: str) -> BeliefStore:
        if model == GAUSSIAN:
            if self.prior_mu0 is None:
                raise ConfigError("prior file is log-Gaussian; Gaussian agents unsupported")
            return gaussian_store(self.prior_mu0, self.prior_var0, self.prior_noise_var)
        if model == LOG_GAUSSIAN:
            if self.prior_ln_store is not None:
                return self.prior_ln_store.copy()
            return log_gaussian_store_matched(
                self.prior_mu0, self.prior_var0, self.prior_noise_var
            )
        raise ValueError(f"unknown belief model {model!r}")

    @property
    def entropy(self) -> int:
        return self.config.seed


def build_scenario(cfg: ScenarioConfig, seed_index: int = 0) -> Scenario:
    """Materialize network, ground truth, and prior parameters for one seed.

    Synthetic instances are regenerated per seed index so seed averages
    cover instance randomness as well as reward noise.
    """
    cfg.validate()
    prior_ln_store = None
    if cfg.synthetic is not None:
        gen_seed = int(
            np.random.SeedSequence(cfg.seed, spawn_key=(_STREAM_SYNTH, seed_index))
            .generate_state(1)[0]
        )
        inst = generate_instance(replace(cfg.synthetic, seed=gen_seed))
        net = inst.network
        gt = GroundTruth.direct(inst.true_mean_wh, inst.true_std_wh)
        mu0, var0, noise = inst.prior_mu0_wh, inst.prior_var0_wh2, inst.noise_var_wh2
    else:
        net, true_mean, true_std = load_network(cfg.network_file)
        if cfg.mode == MODE_DIRECT:
            if true_mean is None:
                raise ConfigError(
                    f"{cfg.network_file}: direct mode needs true_mean_wh/true_std_wh fields"
                )
            gt = GroundTruth.direct(true_mean, true_std)
        elif cfg.mode == MODE_CONSUMPTION_NOISE:
            gt = GroundTruth.consumption_noise(net, cfg.vehicle, cfg.obs_rel_std, cfg.constants)
        else:
            gt = GroundTruth.speed_noise(net, cfg.vehicle, cfg.constants)
        if cfg.prior_file is not None:
            store = BeliefStore.from_csv(cfg.prior_file)
            if store.n_edges != net.n_edges:
                raise ConfigError(
                    f"{cfg.prior_file}: {store.n_edges} beliefs for {net.n_edges} edges"
                )
            if store.model == GAUSSIAN:
                mu0, var0, noise = store.loc, store.var, store.noise_var
            else:
                mu0 = var0 = noise = None
                prior_ln_store = store
        else:
            # prior from the deterministic energy model at the edge mean speed
            eps = edge_energy_vec(net, cfg.vehicle, constants=cfg.constants)
            eps = np.maximum(eps, 1.0)
            mu0 = eps
            var0 = np.square(cfg.prior_rel_std * eps)
            noise = np.square(cfg.obs_rel_std * eps)
    source, target = cfg.resolved_endpoints()
    for v, role in ((source, "source"), (target, "target")):
        if not 0 <= v < net.n_vertices:
            raise ConfigError(f"{role} vertex {v} outside [0, {net.n_vertices})")
    return Scenario(
        config=cfg,
        seed_index=seed_index,
        net=net,
        gt=gt,
        prior_mu0=mu0,
        prior_var0=var0,
        prior_noise_var=noise,
        prior_ln_store=prior_ln_store,
        source=source,
        target=target,
    )


def _coerce_agent(agent) -> AgentSpec:
    if isinstance(agent, AgentSpec):
        return agent
    return AgentSpec.from_label(agent)


def run_multi_agent(scenario: Scenario, agent) -> list[list[SessionRecord]]:
    """Synchronous fleet loop; returns per-agent session records.

    All fleet members price edges against the same belief snapshot, then
    their observations are applied as one batch in ascending agent order.
    With fleet_size 1 this is exactly the single-agent loop.
    """
    from .agents import compute_weights  # local import keeps module load cheap

    spec = _coerce_agent(agent)
    cfg = scenario.config
    net, gt = scenario.net, scenario.gt
    source, target = scenario.source, scenario.target
    K, T = cfg.fleet_size, cfg.horizon
    store = scenario.prior_store(spec.model)
    floor = cfg.positivity_floor_wh
    log_model = spec.model == LOG_GAUSSIAN
    gt.optimal(net, source, target)  # fail fast on unreachable targets
    records: list[list[SessionRecord]] = [[] for _ in range(K)]
    for t in range(1, T + 1):
        batch = []
        for k in range(K):
            rng_w = _stream(
                scenario.entropy, scenario.seed_index, spec.stream_key, _STREAM_WEIGHTS, k, t
            )
            weights = compute_weights(spec, store, t, rng_w)
            path = shortest_path(net, weights, source, target)
            rng_r = _stream(
                scenario.entropy, scenario.seed_index, spec.stream_key, _STREAM_REWARDS, k, t
            )
            observed = sample_rewards(gt, net, path, rng_r)
            delta = instant_regret(gt, net, path, source, target)
            records[k].append(
                SessionRecord(
                    session=t,
                    agent_id=f"{spec.label}#{k}",
                    path=path,
                    observed_wh=tuple(float(y) for y in observed),
                    true_expected_cost_wh=true_expected_cost(gt, path),
                    instant_regret_wh=delta,
                )
            )
            batch.append((path, observed))
        for path, observed in batch:  # barrier: agent-ascending application
            for e, y in zip(path, observed):
                store.apply_observation(e, max(float(y), floor) if log_model else float(y))
    return records


def run_single_agent(scenario: Scenario, agent) -> list[SessionRecord]:
    """Single-vehicle loop; requires fleet_size 1."""
    if scenario.config.fleet_size != 1:
        raise ConfigError("run_single_agent requires fleet_size == 1")
    return run_multi_agent(scenario, agent)[0]
