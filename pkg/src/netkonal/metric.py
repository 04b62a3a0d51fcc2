"""Discretized networks, directed cost graphs, and the induced distance.

The Hamiltonian distance is the infimum of the Lagrangian action over curves
joining two points.  With nonnegative directional densities the infimum is
realized over monotone edge traversals (any back-and-forth inside an edge
covers an interval in both directions at nonnegative extra cost, so deleting
the excursion never increases the total).  The free travel time is absorbed
analytically: minimizing the conjugate integrand over speed leaves exactly
the per-unit-length densities p_plus (forward) and -p_minus (backward).  The
continuous problem therefore reduces to a shortest path on a directed grid
graph, solved here by multi-source Dijkstra with a binary heap, ties broken
by node id.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import errors
from .hamiltonian import EdgeHamiltonian, NetworkHamiltonian, p_minus, p_plus
from .network import Network, PointOnNetwork
from .numerics import adaptive_simpson, simpson_segments

#: relative tolerance to treat an arclength as an existing grid node
GRID_SNAP = 1e-12


@dataclass(frozen=True)
class EdgeGrid:
    edge_id: str
    delta: float
    t: np.ndarray
    node_ids: np.ndarray

    @property
    def n_segments(self) -> int:
        return len(self.t) - 1


class DiscretizedNetwork:
    """Uniform per-edge grids sharing one node per network vertex.

    Each edge of length l gets n = max(1, ceil(l / h)) equal segments (with a
    small guard against float fuzz in the division, so l = 1, h = 0.1 yields
    10 segments and a node at t = 0.5).
    """

    def __init__(self, network: Network, h: float):
        if not (h > 0.0):
            raise ValueError(f"mesh width must be positive, got {h!r}")
        self.network = network
        self.h = float(h)
        self._vertex_node = {v.id: i for i, v in enumerate(network.vertices)}
        locations: list[tuple] = [("vertex", v.id, 0.0) for v in network.vertices]
        grids: dict[str, EdgeGrid] = {}
        nid = len(network.vertices)
        for e in network.edges:
            n = max(1, int(math.ceil(e.length / h - 1e-9)))
            t = np.linspace(0.0, e.length, n + 1)
            ids = np.empty(n + 1, dtype=np.int64)
            ids[0] = self._vertex_node[e.tail]
            ids[-1] = self._vertex_node[e.head]
            for k in range(1, n):
                ids[k] = nid
                locations.append(("edge", e.id, float(t[k])))
                nid += 1
            grids[e.id] = EdgeGrid(e.id, e.length / n, t, ids)
        self.edges = grids
        self.n_nodes = nid
        self._locations = locations

    def vertex_node(self, vertex_id: str) -> int:
        try:
            return self._vertex_node[vertex_id]
        except KeyError:
            raise errors.UnknownVertex(f"unknown vertex {vertex_id!r}") from None

    def node_location(self, node: int) -> tuple:
        return self._locations[node]

    def node_point(self, node: int) -> PointOnNetwork:
        kind, a, b = self._locations[node]
        if kind == "vertex":
            return self.network.vertex_point(a)
        return self.network.point(a, b)

    def locate(self, p: PointOnNetwork) -> int | None:
        """Node id for a point lying exactly on the grid, else None."""
        p = self.network._own(p)
        if p.is_vertex:
            return self._vertex_node[p.vertex]
        eg = self.edges[p.edge]
        k = int(round(p.t / eg.delta))
        k = min(max(k, 0), eg.n_segments)
        length = self.network.edge(p.edge).length
        if abs(p.t - eg.t[k]) <= GRID_SNAP * max(1.0, length):
            return int(eg.node_ids[k])
        return None

    def interior_node_ids(self, edge_id: str) -> np.ndarray:
        return self.edges[edge_id].node_ids[1:-1]


@dataclass
class ValueField:
    """Real values on the grid nodes of a :class:`DiscretizedNetwork`.

    Vertex nodes are shared across edges, so restriction to each edge is
    automatically consistent at junctions.
    """

    grid: DiscretizedNetwork
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise errors.GridMismatch(
                f"expected {self.grid.n_nodes} node values, got {self.values.shape}"
            )

    @classmethod
    def from_function(cls, grid: DiscretizedNetwork, fn: Callable[[str, np.ndarray], np.ndarray],
                      *, vertex_tol: float = 1e-9) -> "ValueField":
        """Evaluate fn(edge_id, t_array) per edge; vertex values must agree."""
        vals = np.full(grid.n_nodes, np.nan)
        for eid, eg in grid.edges.items():
            v = np.asarray(fn(eid, eg.t), dtype=float)
            for pos in (0, len(eg.t) - 1):
                node = int(eg.node_ids[pos])
                if np.isnan(vals[node]):
                    vals[node] = v[pos]
                elif abs(vals[node] - v[pos]) > vertex_tol:
                    raise ValueError(
                        f"function is inconsistent at the vertex shared by edge {eid!r}: "
                        f"{vals[node]!r} vs {v[pos]!r}"
                    )
            vals[eg.node_ids[1:-1]] = v[1:-1]
        return cls(grid, vals)

    def edge_values(self, edge_id: str) -> np.ndarray:
        return self.values[self.grid.edges[edge_id].node_ids]

    def vertex_value(self, vertex_id: str) -> float:
        return float(self.values[self.grid.vertex_node(vertex_id)])

    def at_point(self, p: PointOnNetwork) -> float:
        """Value at a point, linearly interpolated along its edge."""
        p = self.grid.network._own(p)
        if p.is_vertex:
            return self.vertex_value(p.vertex)
        eg = self.grid.edges[p.edge]
        u = self.edge_values(p.edge)
        return float(np.interp(p.t, eg.t, u))

    def copy(self) -> "ValueField":
        return ValueField(self.grid, self.values.copy())


@dataclass
class DistanceField:
    """Per-node distance from a weighted source set."""

    grid: DiscretizedNetwork
    values: np.ndarray
    sources: tuple[tuple[int, float], ...]

    def to_value_field(self) -> ValueField:
        return ValueField(self.grid, np.asarray(self.values, dtype=float))


@dataclass
class GraphView:
    """Adjacency of a (possibly point-extended) cost graph."""

    adjacency: list[list[tuple[int, float]]]
    n_nodes: int
    point_nodes: list[int] = field(default_factory=list)
    extra_locations: dict[int, tuple] = field(default_factory=dict)


class MetricGraph:
    """Directed arc costs over a discretized network.

    Forward arc (t_k -> t_{k+1}) cost is the Simpson integral of p_plus over
    the segment; the backward arc integrates -p_minus.  Immutable after
    construction; point queries clone-and-extend the adjacency rather than
    mutate it.
    """

    #: fixed quadrature rule used for every arc cost
    quadrature = "simpson-3pt"

    def __init__(self, grid: DiscretizedNetwork, H: NetworkHamiltonian):
        self.grid = grid
        self.H = H
        net = grid.network
        adjacency: list[list[tuple[int, float]]] = [[] for _ in range(grid.n_nodes)]
        self.forward_cost: dict[str, np.ndarray] = {}
        self.backward_cost: dict[str, np.ndarray] = {}
        max_den = 0.0
        for e in net.edges:
            he = H.edge(e.id)
            eg = grid.edges[e.id]
            n = eg.n_segments
            ts = np.linspace(0.0, e.length, 2 * n + 1)
            den_f = np.asarray(p_plus(he, ts), dtype=float)
            den_b = -np.asarray(p_minus(he, ts), dtype=float)
            fwd = simpson_segments(den_f[0:-1:2], den_f[1::2], den_f[2::2], eg.delta)
            bwd = simpson_segments(den_b[0:-1:2], den_b[1::2], den_b[2::2], eg.delta)
            self.forward_cost[e.id] = fwd
            self.backward_cost[e.id] = bwd
            max_den = max(max_den, float(den_f.max()), float(den_b.max()))
            ids = eg.node_ids
            for k in range(n):
                adjacency[ids[k]].append((int(ids[k + 1]), float(fwd[k])))
                adjacency[ids[k + 1]].append((int(ids[k]), float(bwd[k])))
        self.adjacency = adjacency
        self.max_density = max_den
        self._quad_bound: float | None = None

    def arcs(self) -> Iterable[tuple[int, int, float]]:
        for u, lst in enumerate(self.adjacency):
            for v, c in lst:
                yield u, v, c

    def quadrature_error_bound(self) -> float:
        """Crude global bound on the Simpson error of any path cost.

        Richardson estimate per segment (coarse vs half-width Simpson),
        summed over all segments; a path uses each arc at most once so this
        overestimates the error of every computed distance.
        """
        if self._quad_bound is None:
            total = 0.0
            for e in self.grid.network.edges:
                he = self.H.edge(e.id)
                eg = self.grid.edges[e.id]
                n = eg.n_segments
                ts = np.linspace(0.0, e.length, 4 * n + 1)
                for den in (
                    np.asarray(p_plus(he, ts), dtype=float),
                    -np.asarray(p_minus(he, ts), dtype=float),
                ):
                    coarse = simpson_segments(den[0:-1:4], den[2::4], den[4::4], eg.delta)
                    fine = simpson_segments(
                        den[0:-1:4], den[1::4], den[2::4], eg.delta / 2.0
                    ) + simpson_segments(
                        den[2::4], den[3::4], den[4::4], eg.delta / 2.0
                    )
                    total += float(np.sum(np.abs(fine - coarse))) / 15.0
            self._quad_bound = total
        return self._quad_bound

    # -- point insertion ---------------------------------------------------

    def _sub_costs(self, he: EdgeHamiltonian, a: float, b: float) -> tuple[float, float]:
        pts = np.array([a, 0.5 * (a + b), b])
        den_f = np.asarray(p_plus(he, pts), dtype=float)
        den_b = -np.asarray(p_minus(he, pts), dtype=float)
        w = b - a
        cf = float(simpson_segments(den_f[0], den_f[1], den_f[2], w))
        cb = float(simpson_segments(den_b[0], den_b[1], den_b[2], w))
        return cf, cb

    def extended(self, points: Sequence[PointOnNetwork]) -> GraphView:
        """Clone-and-extend the graph with the given points as nodes.

        Points already on the grid map to their existing nodes; others split
        their segment, replacing the direct arcs with sub-arcs through the
        new node.  The base graph is never mutated.
        """
        net = self.grid.network
        adjacency = list(self.adjacency)
        modified: set[int] = set()
        base_n = self.grid.n_nodes

        def own_list(node: int) -> list:
            if node < base_n and node not in modified:
                adjacency[node] = list(adjacency[node])
                modified.add(node)
            return adjacency[node]

        entries: list[list] = []
        groups: dict[tuple[str, int], list[list]] = {}
        for idx, p in enumerate(points):
            p = net._own(p)
            node = self.grid.locate(p)
            ent = [idx, node, p]
            entries.append(ent)
            if node is None:
                eg = self.grid.edges[p.edge]
                k = min(max(int(p.t / eg.delta), 0), eg.n_segments - 1)
                groups.setdefault((p.edge, k), []).append(ent)

        next_id = base_n
        locations: dict[int, tuple] = {}
        for (eid, k), ents in sorted(groups.items()):
            eg = self.grid.edges[eid]
            he = self.H.edge(eid)
            t0, t1 = float(eg.t[k]), float(eg.t[k + 1])
            inner = sorted(set(float(e[2].t) for e in ents))
            node_of_t: dict[float, int] = {}
            chain_nodes = [int(eg.node_ids[k])]
            for tv in inner:
                node_of_t[tv] = next_id
                locations[next_id] = ("edge", eid, tv)
                adjacency.append([])
                chain_nodes.append(next_id)
                next_id += 1
            chain_nodes.append(int(eg.node_ids[k + 1]))
            for ent in ents:
                ent[1] = node_of_t[float(ent[2].t)]
            chain_t = [t0] + inner + [t1]
            for i in range(len(chain_t) - 1):
                cf, cb = self._sub_costs(he, chain_t[i], chain_t[i + 1])
                u, v = chain_nodes[i], chain_nodes[i + 1]
                own_list(u).append((v, cf))
                own_list(v).append((u, cb))
            u0, v0 = chain_nodes[0], chain_nodes[-1]
            lst = own_list(u0)
            lst.remove(next(arc for arc in lst if arc[0] == v0))
            lst = own_list(v0)
            lst.remove(next(arc for arc in lst if arc[0] == u0))

        return GraphView(
            adjacency=adjacency,
            n_nodes=next_id,
            point_nodes=[ent[1] for ent in entries],
            extra_locations=locations,
        )


def discretize(net: Network, H: NetworkHamiltonian, h: float) -> MetricGraph:
    """Build the grid and directed arc costs for a certified Hamiltonian."""
    return MetricGraph(DiscretizedNetwork(net, h), H)


def _dijkstra(adjacency: list[list[tuple[int, float]]], n: int,
              sources: Iterable[tuple[int, float]]) -> np.ndarray:
    dist = [math.inf] * n
    heap: list[tuple[float, int]] = []
    push = heapq.heappush
    for node, offset in sources:
        offset = float(offset)
        if offset < dist[node]:
            dist[node] = offset
            push(heap, (offset, node))
    pop = heapq.heappop
    while heap:
        d, u = pop(heap)
        if d > dist[u]:
            continue
        for v, c in adjacency[u]:
            nd = d + c
            if nd < dist[v]:
                dist[v] = nd
                push(heap, (nd, v))
    return np.asarray(dist)


def s_distance(mg: MetricGraph,
               sources: Sequence[tuple[int | PointOnNetwork, float]]) -> DistanceField:
    """Multi-source distance field: min over sources of offset + path cost.

    Sources must sit on grid nodes (ids or grid-aligned points); use
    :func:`s_point_query` or :meth:`MetricGraph.extended` for free points.
    """
    norm: list[tuple[int, float]] = []
    for target, offset in sources:
        offset = float(offset)
        if not math.isfinite(offset):
            raise ValueError(f"source offset must be finite, got {offset!r}")
        if isinstance(target, PointOnNetwork):
            node = mg.grid.locate(target)
            if node is None:
                raise ValueError(
                    f"source {target.describe()} is not a grid node; "
                    "insert it with extended() first"
                )
        else:
            node = int(target)
            if not 0 <= node < mg.grid.n_nodes:
                raise ValueError(f"source node {node} out of range")
        norm.append((node, offset))
    if not norm:
        raise ValueError("at least one source is required")
    dist = _dijkstra(mg.adjacency, mg.grid.n_nodes, norm)
    return DistanceField(mg.grid, dist, tuple(norm))


def s_point_query(mg: MetricGraph, y: PointOnNetwork, x: PointOnNetwork) -> float:
    """Distance from y to x, inserting both as temporary nodes."""
    net = mg.grid.network
    y = net._own(y)
    x = net._own(x)
    if y == x:
        return 0.0
    ext = mg.extended([y, x])
    dist = _dijkstra(ext.adjacency, ext.n_nodes, [(ext.point_nodes[0], 0.0)])
    return float(dist[ext.point_nodes[1]])


# ---------------------------------------------------------------------------
# brute-force oracle

ORACLE_MAX_VERTICES = 8


def _best_vertex_path_cost(net: Network, a: str, b: str,
                           fwd: dict[str, float], bwd: dict[str, float],
                           budget: float) -> float:
    """Cheapest simple vertex path a -> b using full-edge traversal costs."""
    best = budget

    def dfs(u: str, cost: float, visited: frozenset) -> None:
        nonlocal best
        if u == b:
            if cost < best:
                best = cost
            return
        for eid, w, _ in net.adjacency[u]:
            if w in visited:
                continue
            step = fwd[eid] if net.edge(eid).tail == u else bwd[eid]
            nxt = cost + step
            if nxt < best:
                dfs(w, nxt, visited | {w})

    dfs(a, 0.0, frozenset((a,)))
    return best


def oracle_s(net: Network, H: NetworkHamiltonian, y: PointOnNetwork,
             x: PointOnNetwork, quad_tol: float = 1e-10) -> float:
    """Ground-truth distance by simple-path enumeration + adaptive Simpson.

    Independent of the grid solver: enumerates every simple vertex path
    between the endpoints of the query points' edges (plus the direct
    same-edge segment) and integrates the directional densities adaptively.
    Guarded to small networks.
    """
    if len(net.vertices) > ORACLE_MAX_VERTICES:
        raise errors.TooLargeForOracle(
            f"oracle limited to {ORACLE_MAX_VERTICES} vertices, "
            f"got {len(net.vertices)}"
        )
    y = net._own(y)
    x = net._own(x)
    if y == x:
        return 0.0
    tol_each = quad_tol / (len(net.edges) + 2)

    def den_f(he: EdgeHamiltonian):
        return lambda ts: np.asarray(p_plus(he, ts), dtype=float)

    def den_b(he: EdgeHamiltonian):
        return lambda ts: -np.asarray(p_minus(he, ts), dtype=float)

    fwd: dict[str, float] = {}
    bwd: dict[str, float] = {}
    for e in net.edges:
        he = H.edge(e.id)
        fwd[e.id] = adaptive_simpson(den_f(he), 0.0, e.length, tol=tol_each)
        bwd[e.id] = adaptive_simpson(den_b(he), 0.0, e.length, tol=tol_each)

    best = math.inf
    if not y.is_vertex and not x.is_vertex and y.edge == x.edge:
        he = H.edge(y.edge)
        if y.t <= x.t:
            best = adaptive_simpson(den_f(he), y.t, x.t, tol=tol_each)
        else:
            best = adaptive_simpson(den_b(he), x.t, y.t, tol=tol_each)

    def leave_costs(p: PointOnNetwork) -> list[tuple[str, float]]:
        if p.is_vertex:
            return [(p.vertex, 0.0)]
        e = net.edge(p.edge)
        he = H.edge(p.edge)
        return [
            (e.tail, adaptive_simpson(den_b(he), 0.0, p.t, tol=tol_each)),
            (e.head, adaptive_simpson(den_f(he), p.t, e.length, tol=tol_each)),
        ]

    def enter_costs(p: PointOnNetwork) -> list[tuple[str, float]]:
        if p.is_vertex:
            return [(p.vertex, 0.0)]
        e = net.edge(p.edge)
        he = H.edge(p.edge)
        return [
            (e.tail, adaptive_simpson(den_f(he), 0.0, p.t, tol=tol_each)),
            (e.head, adaptive_simpson(den_b(he), p.t, e.length, tol=tol_each)),
        ]

    for a, ca in leave_costs(y):
        for b, cb in enter_costs(x):
            base = ca + cb
            if base >= best:
                continue
            through = _best_vertex_path_cost(net, a, b, fwd, bwd, best - base)
            if base + through < best:
                best = base + through
    return best
