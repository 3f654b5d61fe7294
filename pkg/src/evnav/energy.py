"""Longitudinal-dynamics energy model and positive-support moment math.

The deterministic per-edge consumption assumes constant speed along the
edge (no acceleration term): wheel energy is grade + rolling resistance +
aerodynamic drag, converted to watt-hours, then scaled by the traction
efficiency when positive or the regeneration efficiency when negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import EdgeAttrs, RoadNetwork

_J_PER_WH = 3600.0


@dataclass(frozen=True)
class PhysicsConstants:
    gravity_mps2: float = 9.81
    air_density_kg_m3: float = 1.2


EARTH_STANDARD = PhysicsConstants()


@dataclass(frozen=True)
class VehicleParams:
    """Vehicle-specific constants of the consumption model."""

    mass_kg: float
    rolling_resistance: float
    drag_coefficient: float
    frontal_area_m2: float
    eta_traction: float
    eta_regen: float

    def __post_init__(self):
        for name in ("mass_kg", "rolling_resistance", "drag_coefficient", "frontal_area_m2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0 < self.eta_traction <= 1:
            raise ValueError(f"eta_traction must lie in (0, 1], got {self.eta_traction}")
        if not self.eta_regen >= 1:
            raise ValueError(f"eta_regen must be >= 1, got {self.eta_regen}")


# Medium-duty electric truck (curb weight plus half payload).
MEDIUM_DUTY_TRUCK = VehicleParams(
    mass_kg=14750.0,
    rolling_resistance=0.0064,
    drag_coefficient=0.7,
    frontal_area_m2=8.0,
    eta_traction=0.88,
    eta_regen=1.2,
)


def wheel_energy_terms(
    attrs: EdgeAttrs,
    veh: VehicleParams,
    speed_mps: float,
    constants: PhysicsConstants = EARTH_STANDARD,
) -> tuple[float, float, float]:
    """(grade, rolling, drag) wheel-energy components in watt-hours.

    The grade term is odd in the inclination and the other two are even,
    which the conservation sanity tests rely on.
    """
    if not speed_mps > 0:
        raise ValueError(f"speed_mps must be > 0, got {speed_mps}")
    m, g, d = veh.mass_kg, constants.gravity_mps2, attrs.length_m
    grade = m * g * d * math.sin(attrs.grade_rad) / _J_PER_WH
    rolling = m * g * veh.rolling_resistance * d * math.cos(attrs.grade_rad) / _J_PER_WH
    drag = (
        0.5
        * veh.drag_coefficient
        * veh.frontal_area_m2
        * constants.air_density_kg_m3
        * d
        * speed_mps
        * speed_mps
        / _J_PER_WH
    )
    return grade, rolling, drag


def wheel_energy_wh(attrs, veh, speed_mps, constants=EARTH_STANDARD) -> float:
    grade, rolling, drag = wheel_energy_terms(attrs, veh, speed_mps, constants)
    return grade + (rolling + drag)


def deterministic_energy_wh(attrs, veh, speed_mps, constants=EARTH_STANDARD) -> float:
    """Battery-side consumption for one edge; negative means recovered energy."""
    wheel = wheel_energy_wh(attrs, veh, speed_mps, constants)
    if wheel >= 0.0:
        return wheel / veh.eta_traction
    return wheel / veh.eta_regen


def _battery_energy_arrays(d, grade_rad, speeds_mps, veh, constants) -> np.ndarray:
    m, g = veh.mass_kg, constants.gravity_mps2
    grade = m * g * d * np.sin(grade_rad) / _J_PER_WH
    rolling = m * g * veh.rolling_resistance * d * np.cos(grade_rad) / _J_PER_WH
    drag = (
        0.5
        * veh.drag_coefficient
        * veh.frontal_area_m2
        * constants.air_density_kg_m3
        * d
        * speeds_mps
        * speeds_mps
        / _J_PER_WH
    )
    wheel = grade + (rolling + drag)
    return np.where(wheel >= 0.0, wheel / veh.eta_traction, wheel / veh.eta_regen)


def edge_energy_vec(
    net: RoadNetwork,
    veh: VehicleParams,
    speeds_mps: np.ndarray | None = None,
    constants: PhysicsConstants = EARTH_STANDARD,
    edge_ids: np.ndarray | None = None,
) -> np.ndarray:
    """Vectorized deterministic consumption, for every edge by default.

    ``speeds_mps`` defaults to the mean speed of the selected edges; pass
    sampled speeds to turn this into the stochastic ground-truth generator.
    ``edge_ids`` restricts (and repeats) edges, aligned with ``speeds_mps``.
    """
    if edge_ids is None:
        d, grade = net.length_m, net.grade_rad
        default_speed = net.speed_mean_mps
    else:
        edge_ids = np.asarray(edge_ids, dtype=np.int64)
        d, grade = net.length_m[edge_ids], net.grade_rad[edge_ids]
        default_speed = net.speed_mean_mps[edge_ids]
    speeds = default_speed if speeds_mps is None else np.asarray(speeds_mps, dtype=np.float64)
    if (speeds <= 0).any():
        raise ValueError("speeds must be > 0")
    return _battery_energy_arrays(d, grade, speeds, veh, constants)


def rectified_normal_mean(mu: float, sigma: float) -> float:
    """E[max(0, X)] for X ~ N(mu, sigma^2); requires sigma > 0."""
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    out = kernels.rect_norm_mean_vec(np.array([mu]), np.array([sigma]))
    return float(out[0])


def lognormal_moments(log_mean: float, log_var: float) -> tuple[float, float, float]:
    """(mean, variance, mode) of exp(X) for X ~ N(log_mean, log_var)."""
    if log_var < 0:
        raise ValueError(f"log_var must be >= 0, got {log_var}")
    mean = math.exp(log_mean + 0.5 * log_var)
    var = math.expm1(log_var) * math.exp(2.0 * log_mean + log_var)
    mode = math.exp(log_mean - log_var)
    return mean, var, mode
