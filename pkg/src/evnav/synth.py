"""Synthetic DAG instances with adversarial rewards and a flat prior.

Construction: vertices 0..n-1, the full chain (i, i+1) as edges 0..n-2,
then q-(n-1) distinct shortcut edges (i, j) with j > i+1, drawn uniformly
without replacement. Chain edges truly cost 10 Wh in expectation; a
shortcut spanning s chain steps costs 11*s, so the chain beats any other
path by at least the number of chain steps its shortcuts cover. The prior
prices every edge at 11*span, making all source-to-target paths look
identical until the agent starts observing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .belief import gaussian_store
from .graph import EdgeAttrs, RoadNetwork, save_network

# Placeholder physical attributes for emitted instances; direct-mode
# ground truth never reads them, but the file format requires them.
_PLACEHOLDER_ATTRS = EdgeAttrs(
    length_m=1000.0, grade_rad=0.0, speed_mean_mps=13.9, speed_std_mps=0.0
)

# Above this pool size, rejection sampling replaces the full shuffle.
_SHUFFLE_POOL_LIMIT = 1 << 20


@dataclass(frozen=True)
class SyntheticSpec:
    n_vertices: int
    n_edges: int
    seed: int = 0
    chain_mean_wh: float = 10.0
    chain_var_wh2: float = 4.0
    shortcut_mean_per_skip_wh: float = 11.0
    prior_var_wh2: float = 8.0

    def __post_init__(self):
        n, q = self.n_vertices, self.n_edges
        if n < 2:
            raise ValueError(f"need at least 2 vertices, got {n}")
        if not n - 1 <= q <= n * (n - 1) // 2:
            raise ValueError(
                f"edge count must satisfy n-1 <= q <= n(n-1)/2, got n={n}, q={q}"
            )


@dataclass
class SyntheticInstance:
    network: RoadNetwork
    true_mean_wh: np.ndarray
    true_std_wh: np.ndarray
    prior_mu0_wh: np.ndarray
    prior_var0_wh2: np.ndarray
    noise_var_wh2: np.ndarray

    @property
    def optimal_cost_wh(self) -> float:
        n = self.network.n_vertices
        return float(self.true_mean_wh[: n - 1].sum())

    def to_files(self, network_path, prior_path) -> None:
        save_network(network_path, self.network, self.true_mean_wh, self.true_std_wh)
        gaussian_store(self.prior_mu0_wh, self.prior_var0_wh2, self.noise_var_wh2).to_csv(
            prior_path
        )


def _shortcut_pool_shuffle(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    i_idx, j_idx = np.triu_indices(n, k=2)
    order = rng.permutation(i_idx.shape[0])[:k]
    return np.stack([i_idx[order], j_idx[order]], axis=1)


def _shortcut_pool_rejection(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    # Uniform over {(i, j): j >= i+2} via a flat pair index, retrying
    # duplicates; deterministic given the generator state.
    counts = np.maximum(n - 2 - np.arange(n), 0)  # shortcuts starting at i
    offsets = np.concatenate([[0], np.cumsum(counts)])
    pool_size = int(offsets[-1])
    chosen: dict[int, None] = {}
    out = np.empty((k, 2), dtype=np.int64)
    filled = 0
    while filled < k:
        flat = int(rng.integers(0, pool_size))
        if flat in chosen:
            continue
        chosen[flat] = None
        i = int(np.searchsorted(offsets, flat, side="right") - 1)
        j = i + 2 + (flat - int(offsets[i]))
        out[filled, 0] = i
        out[filled, 1] = j
        filled += 1
    return out


def generate_instance(spec: SyntheticSpec) -> SyntheticInstance:
    """Deterministically generate one instance from the spec and its seed."""
    n, q = spec.n_vertices, spec.n_edges
    rng = np.random.default_rng(np.random.SeedSequence(spec.seed))
    edges = [(i, i + 1, _PLACEHOLDER_ATTRS) for i in range(n - 1)]
    k_extra = q - (n - 1)
    if k_extra > 0:
        pool_size = n * (n - 1) // 2 - (n - 1)
        if pool_size <= _SHUFFLE_POOL_LIMIT:
            shortcuts = _shortcut_pool_shuffle(rng, n, k_extra)
        else:
            shortcuts = _shortcut_pool_rejection(rng, n, k_extra)
        for i, j in shortcuts:
            edges.append((int(i), int(j), _PLACEHOLDER_ATTRS))
    net = RoadNetwork(n, edges)
    spans = (net.edge_to - net.edge_from).astype(np.float64)
    is_chain = np.arange(net.n_edges) < n - 1
    true_mean = np.where(is_chain, spec.chain_mean_wh, spec.shortcut_mean_per_skip_wh * spans)
    true_std = np.full(net.n_edges, np.sqrt(spec.chain_var_wh2))
    prior_mu0 = spec.shortcut_mean_per_skip_wh * spans
    prior_var0 = np.full(net.n_edges, spec.prior_var_wh2)
    noise_var = np.full(net.n_edges, spec.chain_var_wh2)
    return SyntheticInstance(net, true_mean, true_std, prior_mu0, prior_var0, noise_var)
