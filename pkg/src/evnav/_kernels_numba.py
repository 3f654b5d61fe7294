"""Numba implementations of the hot kernels.

Imported lazily: only when the "numba" backend is active. Every kernel has
a numpy twin in :mod:`evnav.kernels`; the two are held to agree within a
few ulps by the backend tests. No fastmath anywhere, so results are
reproducible run to run.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@njit(cache=True)
def _norm_cdf(x):
    return 0.5 * math.erfc(-x * _INV_SQRT2)


@njit(cache=True)
def _norm_pdf(x):
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


@njit(cache=True)
def _norm_ppf(p):
    # Wichura's PPND16 rational approximations (|error| well below 1e-12
    # over the whole open unit interval).
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                    + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                  + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                + 1.3314166789178437745e2) * r + 3.3871328727963666080e0)
        den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                    + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                  + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                + 4.2313330701600911252e1) * r + 1.0)
        return q * num / den
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    if r <= 0.0:
        return math.nan
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                    + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                  + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                + 4.63033784615654529590e0) * r + 1.42343711074968357734e0)
        den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                    + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                  + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                + 2.05319162663775882187e0) * r + 1.0)
    else:
        r = r - 5.0
        num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                    + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                  + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                + 5.46378491116411436990e0) * r + 6.65790464350110377720e0)
        den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                    + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                  + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                + 5.99832206555887937690e-1) * r + 1.0)
    value = num / den
    return -value if q < 0.0 else value


@njit(cache=True)
def norm_ppf_vec(p):
    out = np.empty(p.shape[0])
    for i in range(p.shape[0]):
        out[i] = _norm_ppf(p[i])
    return out


@njit(cache=True)
def rect_norm_mean_vec(mu, sigma):
    # E[max(0, X)] for X ~ N(mu, sigma^2); clamped at 0 against tiny
    # negative rounding when mu/sigma is far below zero.
    out = np.empty(mu.shape[0])
    for i in range(mu.shape[0]):
        z = mu[i] / sigma[i]
        v = mu[i] * _norm_cdf(z) + sigma[i] * _norm_pdf(z)
        out[i] = v if v > 0.0 else 0.0
    return out


@njit(cache=True)
def dijkstra_dist(indptr, head, eid, weights, source):
    """Forward Dijkstra over a CSR adjacency; returns distances from source."""
    n = indptr.shape[0] - 1
    dist = np.full(n, np.inf)
    dist[source] = 0.0
    cap = eid.shape[0] + 1
    heap_key = np.empty(cap)
    heap_val = np.empty(cap, np.int64)
    heap_key[0] = 0.0
    heap_val[0] = source
    size = 1
    while size > 0:
        key = heap_key[0]
        u = heap_val[0]
        size -= 1
        heap_key[0] = heap_key[size]
        heap_val[0] = heap_val[size]
        # sift down
        pos = 0
        while True:
            child = 2 * pos + 1
            if child >= size:
                break
            if child + 1 < size and heap_key[child + 1] < heap_key[child]:
                child += 1
            if heap_key[child] < heap_key[pos]:
                heap_key[pos], heap_key[child] = heap_key[child], heap_key[pos]
                heap_val[pos], heap_val[child] = heap_val[child], heap_val[pos]
                pos = child
            else:
                break
        if key > dist[u]:
            continue
        for idx in range(indptr[u], indptr[u + 1]):
            v = head[idx]
            cand = key + weights[eid[idx]]
            if cand < dist[v]:
                dist[v] = cand
                # sift up
                pos = size
                heap_key[pos] = cand
                heap_val[pos] = v
                size += 1
                while pos > 0:
                    parent = (pos - 1) // 2
                    if heap_key[pos] < heap_key[parent]:
                        heap_key[pos], heap_key[parent] = heap_key[parent], heap_key[pos]
                        heap_val[pos], heap_val[parent] = heap_val[parent], heap_val[pos]
                        pos = parent
                    else:
                        break
    return dist


@njit(cache=True)
def lex_walk(indptr, head, eid, rindptr, rtail, reid, weights, dist, source, target):
    """Lexicographically-smallest edge-id walk over distance-tight edges.

    Returns (status, path): status 0 on success, -1 when the walk gets
    stuck (possible only with zero-weight cycles; the caller falls back to
    the exact solver).
    """
    n = indptr.shape[0] - 1
    # vertices that reach the target through tight edges
    reach = np.zeros(n, np.uint8)
    stack = np.empty(n, np.int64)
    reach[target] = 1
    stack[0] = target
    top = 1
    while top > 0:
        top -= 1
        v = stack[top]
        dv = dist[v]
        for idx in range(rindptr[v], rindptr[v + 1]):
            u = rtail[idx]
            if reach[u] == 1:
                continue
            du = dist[u]
            if du < np.inf and du + weights[reid[idx]] == dv:
                reach[u] = 1
                stack[top] = u
                top += 1
    path = np.empty(n, np.int64)
    if reach[source] == 0:
        return -1, path[:0]
    visited = np.zeros(n, np.uint8)
    visited[source] = 1
    u = source
    m = 0
    while u != target:
        nxt = -1
        chosen = -1
        for idx in range(indptr[u], indptr[u + 1]):  # ascending edge id
            v = head[idx]
            if reach[v] == 0 or visited[v] == 1:
                continue
            if dist[u] + weights[eid[idx]] == dist[v]:
                nxt = v
                chosen = eid[idx]
                break
        if nxt < 0:
            return -1, path[:m]
        path[m] = chosen
        m += 1
        visited[nxt] = 1
        u = nxt
    return 0, path[:m]
