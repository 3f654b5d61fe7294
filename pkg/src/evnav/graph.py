"""Directed road network, shortest-path solver, and exhaustive enumerator.

The network is immutable once built: vertices are dense integers, edge ids
are the positions in the edge list, and adjacency is kept as CSR arrays
sorted by edge id (which is what makes the deterministic tie-break cheap).
Per-session edge weights live outside the network in a plain float array
indexed by edge id.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    InvalidWeightError,
    NetworkFormatError,
    NoPathError,
    PathExplosionError,
)

Path = tuple[int, ...]


@dataclass(frozen=True)
class EdgeAttrs:
    """Physical attributes of one road segment."""

    length_m: float
    grade_rad: float
    speed_mean_mps: float
    speed_std_mps: float

    def __post_init__(self):
        if not self.length_m > 0:
            raise ValueError(f"length_m must be > 0, got {self.length_m}")
        if not self.speed_mean_mps > 0:
            raise ValueError(f"speed_mean_mps must be > 0, got {self.speed_mean_mps}")
        if self.speed_std_mps < 0:
            raise ValueError(f"speed_std_mps must be >= 0, got {self.speed_std_mps}")


class RoadNetwork:
    """Directed graph over dense vertex ids with per-edge physical attributes.

    Parallel edges (same from/to pair) are allowed; self-loops are not.
    """

    def __init__(self, n_vertices: int, edges):
        if n_vertices < 1:
            raise ValueError("network needs at least one vertex")
        self.n_vertices = int(n_vertices)
        froms, tos, attrs = [], [], []
        for u, v, attr in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge ({u}, {v}) references an unknown vertex")
            if u == v:
                raise ValueError(f"self-loop at vertex {u} is not allowed")
            if not isinstance(attr, EdgeAttrs):
                attr = EdgeAttrs(*attr)
            froms.append(u)
            tos.append(v)
            attrs.append(attr)
        self.edge_from = np.asarray(froms, dtype=np.int64)
        self.edge_to = np.asarray(tos, dtype=np.int64)
        self.length_m = np.asarray([a.length_m for a in attrs], dtype=np.float64)
        self.grade_rad = np.asarray([a.grade_rad for a in attrs], dtype=np.float64)
        self.speed_mean_mps = np.asarray([a.speed_mean_mps for a in attrs], dtype=np.float64)
        self.speed_std_mps = np.asarray([a.speed_std_mps for a in attrs], dtype=np.float64)
        self._build_adjacency()

    def _build_adjacency(self):
        m = self.n_edges
        eids = np.arange(m, dtype=np.int64)
        # outgoing edges sorted by (tail vertex, edge id)
        order = np.lexsort((eids, self.edge_from))
        self.out_head = self.edge_to[order].copy()
        self.out_eid = eids[order].copy()
        self.out_indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.add.at(self.out_indptr, self.edge_from + 1, 1)
        np.cumsum(self.out_indptr, out=self.out_indptr)
        # incoming edges sorted by (head vertex, edge id)
        order = np.lexsort((eids, self.edge_to))
        self.in_tail = self.edge_from[order].copy()
        self.in_eid = eids[order].copy()
        self.in_indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.add.at(self.in_indptr, self.edge_to + 1, 1)
        np.cumsum(self.in_indptr, out=self.in_indptr)

    @property
    def n_edges(self) -> int:
        return int(self.edge_from.shape[0])

    def attrs(self, edge_id: int) -> EdgeAttrs:
        return EdgeAttrs(
            float(self.length_m[edge_id]),
            float(self.grade_rad[edge_id]),
            float(self.speed_mean_mps[edge_id]),
            float(self.speed_std_mps[edge_id]),
        )

    def out_edge_ids(self, vertex: int) -> np.ndarray:
        lo, hi = self.out_indptr[vertex], self.out_indptr[vertex + 1]
        return self.out_eid[lo:hi]

    def edge_list(self):
        """(from, to, EdgeAttrs) triples in edge-id order; adjacency round-trips."""
        return [
            (int(self.edge_from[e]), int(self.edge_to[e]), self.attrs(e))
            for e in range(self.n_edges)
        ]

    def _check_vertex(self, v: int, role: str):
        if not 0 <= v < self.n_vertices:
            raise ValueError(f"{role} vertex {v} outside [0, {self.n_vertices})")


def _check_weights(net: RoadNetwork, weights: np.ndarray) -> np.ndarray:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != (net.n_edges,):
        raise InvalidWeightError(
            f"weight vector has shape {weights.shape}, expected ({net.n_edges},)"
        )
    if not np.isfinite(weights).all():
        raise InvalidWeightError("weights contain NaN or infinity")
    if (weights < 0).any():
        raise InvalidWeightError("weights contain negative entries")
    return weights


def shortest_path(net: RoadNetwork, weights, source: int, target: int) -> Path:
    """Minimum-total-weight path from source to target as an edge-id sequence.

    Among equal-cost paths the lexicographically smallest edge-id sequence
    is returned, so the result is deterministic.
    """
    weights = _check_weights(net, weights)
    net._check_vertex(source, "source")
    net._check_vertex(target, "target")
    if source == target:
        return ()
    dist = kernels.dijkstra_dist(net.out_indptr, net.out_head, net.out_eid, weights, source)
    if not np.isfinite(dist[target]):
        raise NoPathError(f"no path from {source} to {target}")
    status, path = kernels.lex_walk(
        net.out_indptr,
        net.out_head,
        net.out_eid,
        net.in_indptr,
        net.in_tail,
        net.in_eid,
        weights,
        dist,
        source,
        target,
    )
    if status != 0:
        # Tight-edge walk can strand only when zero-weight cycles tie with
        # the optimum; fall back to the exact (slower) search.
        return _shortest_path_lexheap(net, weights, source, target)
    return tuple(int(e) for e in path)


def _shortest_path_lexheap(net: RoadNetwork, weights, source: int, target: int) -> Path:
    """Dijkstra keyed on (cost, edge-id sequence); exact but allocation-heavy."""
    best: dict[int, tuple[float, Path]] = {}
    heap = [(0.0, (), source)]
    while heap:
        cost, path, u = heapq.heappop(heap)
        if u in best and best[u] <= (cost, path):
            continue
        best[u] = (cost, path)
        if u == target:
            return path
        lo, hi = net.out_indptr[u], net.out_indptr[u + 1]
        for idx in range(lo, hi):
            e = int(net.out_eid[idx])
            v = int(net.out_head[idx])
            key = (cost + weights[e], path + (e,))
            if v not in best or best[v] > key:
                heapq.heappush(heap, (key[0], key[1], v))
    raise NoPathError(f"no path from {source} to {target}")


def enumerate_paths(net: RoadNetwork, source: int, target: int, max_paths: int | None = None):
    """All simple source-to-target paths in lexicographic edge-id order.

    Serves as the brute-force oracle for the shortest-path solver; raises
    PathExplosionError as soon as the count would exceed ``max_paths``.
    """
    net._check_vertex(source, "source")
    net._check_vertex(target, "target")
    paths: list[Path] = []
    on_path = np.zeros(net.n_vertices, dtype=bool)
    on_path[source] = True
    trail: list[int] = []

    def visit(u: int):
        if u == target:
            if max_paths is not None and len(paths) >= max_paths:
                raise PathExplosionError(f"more than {max_paths} paths exist")
            paths.append(tuple(trail))
            return
        lo, hi = net.out_indptr[u], net.out_indptr[u + 1]
        for idx in range(lo, hi):
            v = int(net.out_head[idx])
            if on_path[v]:
                continue
            on_path[v] = True
            trail.append(int(net.out_eid[idx]))
            visit(v)
            trail.pop()
            on_path[v] = False

    visit(source)
    return paths


def path_cost(path, weights) -> float:
    """Total weight of a path, accumulated left to right.

    Left-to-right accumulation matches the solver's relaxation order, so
    path_cost(shortest_path(...)) reproduces the solver's optimum exactly.
    """
    weights = np.asarray(weights, dtype=np.float64)
    total = 0.0
    for e in path:
        if not 0 <= e < weights.shape[0]:
            raise ValueError(f"unknown edge id {e}")
        total += weights[e]
    return float(total)


# --- network file format -------------------------------------------------

_EDGE_FIELDS = {
    "id",
    "from",
    "to",
    "length_m",
    "grade_rad",
    "speed_mean_mps",
    "speed_std_mps",
}
_OPTIONAL_EDGE_FIELDS = {"true_mean_wh", "true_std_wh"}


def load_network(path):
    """Read a network JSON document.

    Returns (network, true_mean_wh, true_std_wh); the truth arrays are None
    unless every edge carries the optional ground-truth fields.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise NetworkFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise NetworkFormatError(f"{path}: top level must be an object")
    unknown = set(doc) - {"vertices", "edges"}
    if unknown:
        raise NetworkFormatError(f"{path}: unknown top-level fields {sorted(unknown)}")
    if "vertices" not in doc or "edges" not in doc:
        raise NetworkFormatError(f"{path}: requires 'vertices' and 'edges'")
    n_vertices = doc["vertices"]
    if not isinstance(n_vertices, int) or n_vertices < 1:
        raise NetworkFormatError(f"{path}: 'vertices' must be a positive integer")
    records = doc["edges"]
    if not isinstance(records, list):
        raise NetworkFormatError(f"{path}: 'edges' must be an array")
    by_id: dict[int, dict] = {}
    for rec in records:
        if not isinstance(rec, dict):
            raise NetworkFormatError(f"{path}: edge records must be objects")
        unknown = set(rec) - _EDGE_FIELDS - _OPTIONAL_EDGE_FIELDS
        if unknown:
            raise NetworkFormatError(f"{path}: unknown edge fields {sorted(unknown)}")
        missing = _EDGE_FIELDS - set(rec)
        if missing:
            raise NetworkFormatError(f"{path}: edge record missing {sorted(missing)}")
        eid = rec["id"]
        if not isinstance(eid, int) or eid in by_id:
            raise NetworkFormatError(f"{path}: edge ids must be unique integers (id={eid!r})")
        by_id[eid] = rec
    m = len(by_id)
    if set(by_id) != set(range(m)):
        raise NetworkFormatError(f"{path}: edge ids must be dense 0..{m - 1}")
    edges = []
    for eid in range(m):
        rec = by_id[eid]
        try:
            attr = EdgeAttrs(
                float(rec["length_m"]),
                float(rec["grade_rad"]),
                float(rec["speed_mean_mps"]),
                float(rec["speed_std_mps"]),
            )
            edges.append((int(rec["from"]), int(rec["to"]), attr))
        except (TypeError, ValueError) as exc:
            raise NetworkFormatError(f"{path}: edge {eid}: {exc}") from exc
    try:
        net = RoadNetwork(n_vertices, edges)
    except ValueError as exc:
        raise NetworkFormatError(f"{path}: {exc}") from exc
    with_truth = [eid for eid in range(m) if "true_mean_wh" in by_id[eid]]
    true_mean = true_std = None
    if with_truth:
        if len(with_truth) != m:
            raise NetworkFormatError(
                f"{path}: true_mean_wh must be present on all edges or none"
            )
        true_mean = np.asarray([float(by_id[e]["true_mean_wh"]) for e in range(m)])
        true_std = np.asarray([float(by_id[e].get("true_std_wh", 0.0)) for e in range(m)])
        if (true_std < 0).any():
            raise NetworkFormatError(f"{path}: true_std_wh must be >= 0")
    return net, true_mean, true_std


def save_network(path, net: RoadNetwork, true_mean_wh=None, true_std_wh=None) -> None:
    records = []
    for e in range(net.n_edges):
        rec = {
            "id": e,
            "from": int(net.edge_from[e]),
            "to": int(net.edge_to[e]),
            "length_m": float(net.length_m[e]),
            "grade_rad": float(net.grade_rad[e]),
            "speed_mean_mps": float(net.speed_mean_mps[e]),
            "speed_std_mps": float(net.speed_std_mps[e]),
        }
        if true_mean_wh is not None:
            rec["true_mean_wh"] = float(true_mean_wh[e])
            rec["true_std_wh"] = float(true_std_wh[e]) if true_std_wh is not None else 0.0
        records.append(rec)
    doc = {"vertices": net.n_vertices, "edges": records}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
