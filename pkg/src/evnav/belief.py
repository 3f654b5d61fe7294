"""Per-edge conjugate beliefs over mean energy consumption.

Two model families share one interface:

* Gaussian: the mean consumption of an edge has a normal posterior
  N(mu_t, var_t) under a known-variance normal likelihood.
* Log-Gaussian: ln(mean consumption) has a normal posterior
  N(log_mean_t, log_var_t). The likelihood is a log-normal whose location
  is ``ln(mean) - noise_log_var / 2``, so the observable's expectation is
  exactly the latent mean. Taking logs, ``ln y + noise_log_var / 2`` is a
  Gaussian observation of the latent log-mean with variance
  ``noise_log_var``, and the usual precision-weighted update applies in
  log space (the derivation is spelled out in the README).

Scalar belief values are immutable; the vectorized ``BeliefStore`` holds
one belief per edge and is mutated only through ``apply_observation``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import NonPositiveObservationError

GAUSSIAN = "gaussian"
LOG_GAUSSIAN = "log_gaussian"
MODELS = (GAUSSIAN, LOG_GAUSSIAN)


@dataclass(frozen=True)
class GaussianEdgeBelief:
    mu_wh: float
    var_wh2: float
    noise_var_wh2: float


@dataclass(frozen=True)
class LogGaussianEdgeBelief:
    log_mean: float
    log_var: float
    noise_log_var: float


def gaussian_prior(
    epsilon_wh: float, theta_coeff: float, noise_var_wh2: float = math.nan
) -> GaussianEdgeBelief:
    """Prior centered on the deterministic-model estimate with spread
    proportional to it: N(epsilon, (theta * epsilon)^2).

    The likelihood variance is configured separately; attach it here when
    the belief will be updated.
    """
    if not epsilon_wh > 0:
        raise ValueError(f"prior mean must be > 0, got {epsilon_wh} (clamp upstream)")
    if not theta_coeff > 0:
        raise ValueError(f"theta_coeff must be > 0, got {theta_coeff}")
    spread = theta_coeff * epsilon_wh
    return GaussianEdgeBelief(epsilon_wh, spread * spread, noise_var_wh2)


def loggaussian_prior(
    mu0_wh: float, var0_wh2: float, noise_log_var: float = math.nan
) -> LogGaussianEdgeBelief:
    """Log-normal prior moment-matched to mean mu0 and variance var0."""
    if not mu0_wh > 0:
        raise ValueError(f"mu0_wh must be > 0, got {mu0_wh}")
    if not var0_wh2 > 0:
        raise ValueError(f"var0_wh2 must be > 0, got {var0_wh2}")
    log_var = math.log1p(var0_wh2 / (mu0_wh * mu0_wh))
    log_mean = math.log(mu0_wh) - 0.5 * log_var
    return LogGaussianEdgeBelief(log_mean, log_var, noise_log_var)


def gaussian_update(b: GaussianEdgeBelief, observed_wh: float) -> GaussianEdgeBelief:
    """Precision-weighted conjugate update with a single consumption value."""
    var_new = 1.0 / (1.0 / b.var_wh2 + 1.0 / b.noise_var_wh2)
    mu_new = var_new * (b.mu_wh / b.var_wh2 + observed_wh / b.noise_var_wh2)
    return GaussianEdgeBelief(mu_new, var_new, b.noise_var_wh2)


def loggaussian_update(b: LogGaussianEdgeBelief, observed_wh: float) -> LogGaussianEdgeBelief:
    if not observed_wh > 0:
        raise NonPositiveObservationError(
            f"log-Gaussian update needs a positive observation, got {observed_wh}"
        )
    pseudo = math.log(observed_wh) + 0.5 * b.noise_log_var
    log_var_new = 1.0 / (1.0 / b.log_var + 1.0 / b.noise_log_var)
    log_mean_new = log_var_new * (b.log_mean / b.log_var + pseudo / b.noise_log_var)
    return LogGaussianEdgeBelief(log_mean_new, log_var_new, b.noise_log_var)


def sample_mean(b, rng: np.random.Generator) -> float:
    """One posterior draw of the mean consumption."""
    if isinstance(b, GaussianEdgeBelief):
        return float(rng.normal(b.mu_wh, math.sqrt(b.var_wh2)))
    return float(math.exp(rng.normal(b.log_mean, math.sqrt(b.log_var))))


def posterior_quantile(b, alpha: float) -> float:
    z = kernels.norm_ppf(alpha)
    if isinstance(b, GaussianEdgeBelief):
        return b.mu_wh + math.sqrt(b.var_wh2) * z
    return math.exp(b.log_mean + math.sqrt(b.log_var) * z)


def predictive_mean(b) -> float:
    """Expected nonnegative edge weight implied by the belief.

    Gaussian: mean of the rectified observable max(0, y) at the posterior
    mean. Log-Gaussian: posterior mean of the latent consumption, positive
    by construction.
    """
    if isinstance(b, GaussianEdgeBelief):
        out = kernels.rect_norm_mean_vec(
            np.array([b.mu_wh]), np.array([math.sqrt(b.noise_var_wh2)])
        )
        return float(out[0])
    return math.exp(b.log_mean + 0.5 * b.log_var)


class BeliefStore:
    """One belief per edge, vectorized.

    ``loc``/``var`` are (mu_t, var_t) for the Gaussian model and
    (log_mean_t, log_var_t) for the log-Gaussian model; ``noise_var`` is
    the fixed likelihood variance on the same scale.
    """

    def __init__(self, model: str, loc, var, noise_var):
        if model not in MODELS:
            raise ValueError(f"unknown belief model {model!r}")
        self.model = model
        self.loc = np.array(loc, dtype=np.float64)
        self.var = np.array(var, dtype=np.float64)
        self.noise_var = np.array(noise_var, dtype=np.float64)
        if not (self.loc.shape == self.var.shape == self.noise_var.shape):
            raise ValueError("loc, var, noise_var must have identical shapes")
        if (self.var < 0).any() or (self.noise_var <= 0).any():
            raise ValueError("variances must be positive (var may be 0 only as a degenerate limit)")

    @property
    def n_edges(self) -> int:
        return int(self.loc.shape[0])

    def copy(self) -> "BeliefStore":
        return BeliefStore(self.model, self.loc, self.var, self.noise_var)

    def belief(self, edge_id: int):
        if self.model == GAUSSIAN:
            return GaussianEdgeBelief(
                float(self.loc[edge_id]), float(self.var[edge_id]), float(self.noise_var[edge_id])
            )
        return LogGaussianEdgeBelief(
            float(self.loc[edge_id]), float(self.var[edge_id]), float(self.noise_var[edge_id])
        )

    def apply_observation(self, edge_id: int, observed_wh: float) -> None:
        """In-place conjugate update of one edge (same math as the scalar ops)."""
        noise = self.noise_var[edge_id]
        if self.model == LOG_GAUSSIAN:
            if not observed_wh > 0:
                raise NonPositiveObservationError(
                    f"log-Gaussian update needs a positive observation, got {observed_wh}"
                )
            observed_wh = math.log(observed_wh) + 0.5 * noise
        var_new = 1.0 / (1.0 / self.var[edge_id] + 1.0 / noise)
        self.loc[edge_id] = var_new * (self.loc[edge_id] / self.var[edge_id] + observed_wh / noise)
        self.var[edge_id] = var_new

    # vectorized accessors used by the exploration strategies

    def predictive_means(self) -> np.ndarray:
        if self.model == GAUSSIAN:
            return kernels.rect_norm_mean_vec(self.loc, np.sqrt(self.noise_var))
        return np.exp(self.loc + 0.5 * self.var)

    def sample_means(self, rng: np.random.Generator) -> np.ndarray:
        draws = rng.normal(self.loc, np.sqrt(self.var))
        if self.model == GAUSSIAN:
            return draws
        return np.exp(draws)

    def quantiles(self, alpha: float) -> np.ndarray:
        z = kernels.norm_ppf(alpha)
        raw = self.loc + np.sqrt(self.var) * z
        if self.model == GAUSSIAN:
            return raw
        return np.exp(raw)

    # snapshot CSV: edge_id, model, param1, param2, noise_param

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["edge_id", "model", "param1", "param2", "noise_param"])
            for e in range(self.n_edges):
                writer.writerow(
                    [e, self.model, str(self.loc[e]), str(self.var[e]), str(self.noise_var[e])]
                )

    @classmethod
    def from_csv(cls, path) -> "BeliefStore":
        rows = {}
        model = None
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            expected = ["edge_id", "model", "param1", "param2", "noise_param"]
            if reader.fieldnames != expected:
                raise ValueError(f"{path}: expected columns {expected}, got {reader.fieldnames}")
            for rec in reader:
                e = int(rec["edge_id"])
                if model is None:
                    model = rec["model"]
                elif rec["model"] != model:
                    raise ValueError(f"{path}: mixed models in one snapshot")
                rows[e] = (float(rec["param1"]), float(rec["param2"]), float(rec["noise_param"]))
        if model is None:
            raise ValueError(f"{path}: empty belief snapshot")
        if set(rows) != set(range(len(rows))):
            raise ValueError(f"{path}: edge ids must be dense 0..{len(rows) - 1}")
        loc = [rows[e][0] for e in range(len(rows))]
        var = [rows[e][1] for e in range(len(rows))]
        noise = [rows[e][2] for e in range(len(rows))]
        return cls(model, loc, var, noise)


# --- store constructors ---------------------------------------------------


def gaussian_store(mu0, var0, noise_var) -> BeliefStore:
    return BeliefStore(GAUSSIAN, mu0, var0, noise_var)


def log_gaussian_store_matched(mu0, var0, noise_var) -> BeliefStore:
    """Log-Gaussian store matched to a Gaussian parameterization.

    The prior is moment-matched to (mu0, var0); the likelihood log-variance
    is chosen so the observable's variance equals the Gaussian noise_var at
    the prior mean: ln(1 + noise_var / mu0^2).
    """
    mu0 = np.asarray(mu0, dtype=np.float64)
    var0 = np.asarray(var0, dtype=np.float64)
    noise_var = np.asarray(noise_var, dtype=np.float64)
    if (mu0 <= 0).any():
        raise ValueError("log-Gaussian prior means must be > 0")
    log_var0 = np.log1p(var0 / (mu0 * mu0))
    log_mean0 = np.log(mu0) - 0.5 * log_var0
    noise_log_var = np.log1p(noise_var / (mu0 * mu0))
    return BeliefStore(LOG_GAUSSIAN, log_mean0, log_var0, noise_log_var)


def store_from_prior_energy(
    model: str,
    epsilon_wh: np.ndarray,
    prior_rel_std: float,
    obs_rel_std: float,
    floor_wh: float = 1.0,
) -> BeliefStore:
    """Build the prior store from deterministic-model edge energies.

    Non-positive energies (downhill edges) are clamped to ``floor_wh``
    before the relative-spread construction, which degenerates at zero.
    """
    eps = np.maximum(np.asarray(epsilon_wh, dtype=np.float64), floor_wh)
    mu0 = eps
    var0 = np.square(prior_rel_std * eps)
    noise_var = np.square(obs_rel_std * eps)
    if model == GAUSSIAN:
        return gaussian_store(mu0, var0, noise_var)
    if model == LOG_GAUSSIAN:
        return log_gaussian_store_matched(mu0, var0, noise_var)
    raise ValueError(f"unknown belief model {model!r}")
