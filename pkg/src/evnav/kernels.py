"""Hot numeric kernels with a numba fast path and a numpy/scipy fallback.

The active implementation is picked per call from :mod:`evnav._accel`.
Both paths perform the same floating-point operations in the same order
(no fastmath, no reassociation), so a simulation trace is reproducible
under either backend; the distribution functions themselves may disagree
by a few ulps because libm and Cephes round differently.
"""

from __future__ import annotations

import heapq
import math

import numpy as np
from scipy.special import ndtr, ndtri

from . import _accel

_nb = None


def _numba_kernels():
    global _nb
    if _nb is None:
        from . import _kernels_numba

        _nb = _kernels_numba
    return _nb


_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def norm_pdf(x):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


def norm_cdf(x):
    return ndtr(x)


def norm_ppf(p: float) -> float:
    """Standard normal quantile for a scalar probability in (0, 1)."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"probability must lie strictly inside (0, 1), got {p}")
    if _accel.backend() == "numba":
        return float(_numba_kernels()._norm_ppf(p))
    return float(ndtri(p))


def norm_ppf_vec(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    if _accel.backend() == "numba":
        return _numba_kernels().norm_ppf_vec(np.ascontiguousarray(p))
    return ndtri(p)


def rect_norm_mean_vec(mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """E[max(0, X)] per element for X ~ N(mu, sigma^2), sigma > 0."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if _accel.backend() == "numba":
        return _numba_kernels().rect_norm_mean_vec(
            np.ascontiguousarray(mu), np.ascontiguousarray(sigma)
        )
    z = mu / sigma
    return np.maximum(0.0, mu * ndtr(z) + sigma * norm_pdf(z))


def _dijkstra_dist_py(indptr, head, eid, weights, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        key, u = heapq.heappop(heap)
        if key > dist[u]:
            continue
        for idx in range(indptr[u], indptr[u + 1]):
            v = head[idx]
            cand = key + weights[eid[idx]]
            if cand < dist[v]:
                dist[v] = cand
                heapq.heappush(heap, (cand, v))
    return dist


def _lex_walk_py(indptr, head, eid, rindptr, rtail, reid, weights, dist, source, target):
    n = indptr.shape[0] - 1
    reach = np.zeros(n, dtype=bool)
    reach[target] = True
    stack = [target]
    while stack:
        v = stack.pop()
        dv = dist[v]
        for idx in range(rindptr[v], rindptr[v + 1]):
            u = rtail[idx]
            if reach[u]:
                continue
            du = dist[u]
            if du < np.inf and du + weights[reid[idx]] == dv:
                reach[u] = True
                stack.append(u)
    if not reach[source]:
        return -1, np.empty(0, dtype=np.int64)
    visited = np.zeros(n, dtype=bool)
    visited[source] = True
    u = source
    path = []
    while u != target:
        nxt = -1
        for idx in range(indptr[u], indptr[u + 1]):
            v = head[idx]
            if not reach[v] or visited[v]:
                continue
            if dist[u] + weights[eid[idx]] == dist[v]:
                nxt = v
                path.append(eid[idx])
                break
        if nxt < 0:
            return -1, np.asarray(path, dtype=np.int64)
        visited[nxt] = True
        u = nxt
    return 0, np.asarray(path, dtype=np.int64)


def dijkstra_dist(indptr, head, eid, weights, source):
    if _accel.backend() == "numba":
        return _numba_kernels().dijkstra_dist(indptr, head, eid, weights, source)
    return _dijkstra_dist_py(indptr, head, eid, weights, source)


def lex_walk(indptr, head, eid, rindptr, rtail, reid, weights, dist, source, target):
    if _accel.backend() == "numba":
        status, path = _numba_kernels().lex_walk(
            indptr, head, eid, rindptr, rtail, reid, weights, dist, source, target
        )
        return int(status), np.asarray(path)
    return _lex_walk_py(indptr, head, eid, rindptr, rtail, reid, weights, dist, source, target)
