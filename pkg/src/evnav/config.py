"""YAML scenario and sweep configuration.

Every tunable of the simulation has a named key with a sensible default
(noise coefficients, the medium-duty-truck vehicle constants, physics
constants), so a minimal scenario document is just a network, an agent
list, and a horizon. Unknown keys are rejected everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import yaml

from .energy import EARTH_STANDARD, MEDIUM_DUTY_TRUCK, PhysicsConstants, VehicleParams
from .errors import ConfigError
from .sim import MODES, ScenarioConfig
from .synth import SyntheticSpec

SWEEP_AXES = ("vertices", "edges", "agents", "agent_type")


def _require_mapping(doc, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected a mapping")
    return doc


def _check_keys(doc: dict, allowed, where: str) -> None:
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")


def _build_dataclass(cls, doc: dict, defaults, where: str):
    names = [f.name for f in fields(cls)]
    _check_keys(doc, names, where)
    try:
        return replace(defaults, **doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def scenario_from_dict(doc: dict, where: str = "scenario") -> ScenarioConfig:
    doc = _require_mapping(doc, where)
    allowed = {
        "name",
        "network",
        "ground_truth",
        "source",
        "target",
        "horizon",
        "agents",
        "fleet_size",
        "seed",
        "num_seeds",
        "noise",
        "vehicle",
        "physics",
    }
    _check_keys(doc, allowed, where)

    network = _require_mapping(doc.get("network", {}), f"{where}.network")
    _check_keys(network, ("synthetic", "file", "prior_file"), f"{where}.network")
    synthetic = None
    if "synthetic" in network:
        syn = _require_mapping(network["synthetic"], f"{where}.network.synthetic")
        syn = {("n_vertices" if k == "n" else "n_edges" if k == "q" else k): v
               for k, v in syn.items()}
        names = [f.name for f in fields(SyntheticSpec)]
        _check_keys(syn, names, f"{where}.network.synthetic")
        if "n_vertices" not in syn or "n_edges" not in syn:
            raise ConfigError(f"{where}.network.synthetic: requires n and q")
        try:
            synthetic = SyntheticSpec(**syn)
        except ValueError as exc:
            raise ConfigError(f"{where}.network.synthetic: {exc}") from exc

    noise = _require_mapping(doc.get("noise", {}), f"{where}.noise")
    _check_keys(noise, ("obs_rel_std", "prior_rel_std", "positivity_floor_wh"), f"{where}.noise")

    vehicle = MEDIUM_DUTY_TRUCK
    if "vehicle" in doc:
        vehicle = _build_dataclass(
            VehicleParams, _require_mapping(doc["vehicle"], f"{where}.vehicle"),
            MEDIUM_DUTY_TRUCK, f"{where}.vehicle",
        )
    constants = EARTH_STANDARD
    if "physics" in doc:
        constants = _build_dataclass(
            PhysicsConstants, _require_mapping(doc["physics"], f"{where}.physics"),
            EARTH_STANDARD, f"{where}.physics",
        )

    mode = doc.get("ground_truth", "direct")
    if mode not in MODES:
        raise ConfigError(f"{where}.ground_truth: unknown mode {mode!r}")
    agents = doc.get("agents", [])
    if isinstance(agents, str):
        agents = [agents]
    if not isinstance(agents, list):
        raise ConfigError(f"{where}.agents: expected a list of agent labels")

    cfg = ScenarioConfig(
        name=str(doc.get("name", "scenario")),
        synthetic=synthetic,
        network_file=network.get("file"),
        prior_file=network.get("prior_file"),
        mode=mode,
        source=doc.get("source"),
        target=doc.get("target"),
        horizon=int(doc.get("horizon", 1)),
        agents=tuple(str(a) for a in agents),
        fleet_size=int(doc.get("fleet_size", 1)),
        seed=int(doc.get("seed", 0)),
        num_seeds=int(doc.get("num_seeds", 1)),
        obs_rel_std=float(noise.get("obs_rel_std", 0.1)),
        prior_rel_std=float(noise.get("prior_rel_std", 0.25)),
        positivity_floor_wh=float(noise.get("positivity_floor_wh", 0.001)),
        vehicle=vehicle,
        constants=constants,
    )
    cfg.validate()
    return cfg


def load_scenario(path) -> ScenarioConfig:
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    return scenario_from_dict(doc if doc is not None else {}, where=str(path))


@dataclass(frozen=True)
class SweepSpec:
    base: ScenarioConfig
    axis: str
    values: tuple
    seeds_per_point: int

    def point_config(self, value) -> ScenarioConfig:
        """The base scenario with one axis value applied."""
        cfg = self.base
        if self.axis in ("vertices", "edges"):
            if cfg.synthetic is None:
                raise ConfigError(f"axis {self.axis!r} requires a synthetic network")
            if self.axis == "vertices":
                syn = replace(cfg.synthetic, n_vertices=int(value))
            else:
                syn = replace(cfg.synthetic, n_edges=int(value))
            cfg = replace(cfg, synthetic=syn)
        elif self.axis == "agents":
            cfg = replace(cfg, fleet_size=int(value))
        else:
            cfg = replace(cfg, agents=(str(value),))
        cfg = replace(cfg, num_seeds=self.seeds_per_point, name=f"{cfg.name}-{self.axis}-{value}")
        cfg.validate()
        return cfg


def sweep_from_dict(doc: dict, where: str = "sweep") -> SweepSpec:
    doc = _require_mapping(doc, where)
    _check_keys(doc, ("sweep", "base"), where)
    if "sweep" not in doc or "base" not in doc:
        raise ConfigError(f"{where}: requires 'sweep' and 'base' sections")
    sweep = _require_mapping(doc["sweep"], f"{where}.sweep")
    _check_keys(sweep, ("axis", "values", "seeds_per_point"), f"{where}.sweep")
    axis = sweep.get("axis")
    if axis not in SWEEP_AXES:
        raise ConfigError(f"{where}.sweep.axis: expected one of {SWEEP_AXES}, got {axis!r}")
    values = sweep.get("values")
    if not isinstance(values, list) or not values:
        raise ConfigError(f"{where}.sweep.values: expected a nonempty list")
    seeds = int(sweep.get("seeds_per_point", 1))
    if seeds < 1:
        raise ConfigError(f"{where}.sweep.seeds_per_point: must be >= 1")
    base = scenario_from_dict(doc["base"], where=f"{where}.base")
    if len(base.agents) != 1:
        raise ConfigError(f"{where}.base: sweeps need exactly one agent label")
    spec = SweepSpec(base=base, axis=axis, values=tuple(values), seeds_per_point=seeds)
    for value in spec.values:  # fail fast on invalid points
        spec.point_config(value)
    return spec


def load_sweep(path) -> SweepSpec:
    with open(path) as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML ({exc})") from exc
    return sweep_from_dict(doc if doc is not None else {}, where=str(path))
