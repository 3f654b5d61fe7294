"""Exploration strategies mapping a belief store to per-session edge weights.

Three strategies, each usable with either belief model (six agents):

* greedy        -- exploit the current predictive means;
* thompson      -- sample a mean per edge from its posterior and price the
                   edge at the implied expected nonnegative weight;
* bayes_ucb     -- optimistic lower posterior quantile on a 1/t schedule
                   (lower because cost is minimized).

Labels follow the N-/LN- prefix convention: N-GR, LN-GR, N-TS, LN-TS,
N-BUCB, LN-BUCB.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .belief import GAUSSIAN, LOG_GAUSSIAN, BeliefStore

STRATEGY_GREEDY = "greedy"
STRATEGY_THOMPSON = "thompson"
STRATEGY_BAYES_UCB = "bayes_ucb"
STRATEGIES = (STRATEGY_GREEDY, STRATEGY_THOMPSON, STRATEGY_BAYES_UCB)

_MODEL_PREFIX = {GAUSSIAN: "N", LOG_GAUSSIAN: "LN"}
_STRATEGY_SUFFIX = {
    STRATEGY_GREEDY: "GR",
    STRATEGY_THOMPSON: "TS",
    STRATEGY_BAYES_UCB: "BUCB",
}


@dataclass(frozen=True)
class AgentSpec:
    strategy: str
    model: str

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.model not in _MODEL_PREFIX:
            raise ValueError(f"unknown model {self.model!r}")

    @property
    def label(self) -> str:
        return f"{_MODEL_PREFIX[self.model]}-{_STRATEGY_SUFFIX[self.strategy]}"

    @classmethod
    def from_label(cls, label: str) -> "AgentSpec":
        try:
            prefix, suffix = label.strip().split("-")
            model = {v: k for k, v in _MODEL_PREFIX.items()}[prefix]
            strategy = {v: k for k, v in _STRATEGY_SUFFIX.items()}[suffix]
        except (ValueError, KeyError):
            valid = ", ".join(sorted(all_labels()))
            raise ValueError(f"unknown agent label {label!r}; expected one of {valid}") from None
        return cls(strategy, model)

    @property
    def stream_key(self) -> int:
        """Stable small integer identifying this agent type in rng stream keys."""
        return STRATEGIES.index(self.strategy) * 2 + (0 if self.model == GAUSSIAN else 1)


def all_labels() -> list[str]:
    return [
        AgentSpec(s, m).label for s in STRATEGIES for m in (GAUSSIAN, LOG_GAUSSIAN)
    ]


def greedy_weights(store: BeliefStore) -> np.ndarray:
    """Exploit-only weights: the predictive mean of every edge."""
    return store.predictive_means()


def ts_weights(store: BeliefStore, rng: np.random.Generator) -> np.ndarray:
    """Thompson weights: one posterior draw per edge per session.

    Gaussian draws may be negative, so the edge is priced at the expected
    rectified observable around the draw; log-Gaussian draws are already
    positive and are used directly.
    """
    sampled = store.sample_means(rng)
    if store.model == GAUSSIAN:
        return kernels.rect_norm_mean_vec(sampled, np.sqrt(store.noise_var))
    return sampled


def bayes_ucb_weights(store: BeliefStore, t: int) -> np.ndarray:
    """Optimistic weights from the lower posterior quantile at level 1/(t+1).

    Sessions are numbered from 1; the shifted schedule keeps the first
    session at the posterior median instead of a degenerate quantile.
    """
    if t < 1:
        raise ValueError(f"session index must be >= 1, got {t}")
    alpha = 1.0 / (t + 1.0)
    q = store.quantiles(alpha)
    if store.model == GAUSSIAN:
        return np.maximum(0.0, q)
    return q


def compute_weights(
    spec: AgentSpec, store: BeliefStore, t: int, rng: np.random.Generator
) -> np.ndarray:
    if spec.strategy == STRATEGY_GREEDY:
        return greedy_weights(store)
    if spec.strategy == STRATEGY_THOMPSON:
        return ts_weights(store, rng)
    return bayes_ucb_weights(store, t)
