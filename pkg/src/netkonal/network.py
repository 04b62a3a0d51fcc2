"""Finite metric networks.

A network is a finite connected graph whose edges carry positive lengths and
are addressed by an arclength parameter t in [0, l].  Vertices incident to
exactly one edge must belong to the boundary set; interior vertices may also
be declared boundary (data can be imposed at junctions).  Coordinates are
optional metadata: every computed quantity depends on arclength only.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import errors

#: relative tolerance used to snap an arclength parameter onto a vertex
POINT_SNAP = 1e-12


@dataclass(frozen=True)
class Vertex:
    id: str
    coords: tuple[float, ...] | None = None


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str
    length: float


@dataclass(frozen=True)
class PointOnNetwork:
    """Canonical point: either a vertex, or an interior point of one edge.

    Endpoint parameters (t == 0 or t == length) canonicalize to the vertex so
    that every point of the network has exactly one representation.
    """

    vertex: str | None = None
    edge: str | None = None
    t: float = 0.0

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def describe(self) -> str:
        if self.is_vertex:
            return str(self.vertex)
        return f"{self.edge}@{self.t:g}"


class IncidenceMatrix:
    """Signed incidence entries a[i, j]: +1 if vertex i is the tail of edge j,
    -1 if it is the head, 0 otherwise."""

    def __init__(self, vertex_ids: tuple[str, ...], edge_ids: tuple[str, ...],
                 entries: np.ndarray):
        self.vertex_ids = vertex_ids
        self.edge_ids = edge_ids
        self.entries = entries
        self._vrow = {v: i for i, v in enumerate(vertex_ids)}
        self._ecol = {e: j for j, e in enumerate(edge_ids)}

    def entry(self, vertex_id: str, edge_id: str) -> int:
        try:
            return int(self.entries[self._vrow[vertex_id], self._ecol[edge_id]])
        except KeyError as exc:
            key = str(exc.args[0])
            if key in (vertex_id,) and vertex_id not in self._vrow:
                raise errors.UnknownVertex(f"unknown vertex {vertex_id!r}") from None
            raise errors.UnknownEdge(f"unknown edge {edge_id!r}") from None

    def column(self, edge_id: str) -> np.ndarray:
        return self.entries[:, self._ecol[edge_id]]


class Network:
    """Validated immutable network; construct through :func:`build_network`."""

    def __init__(self, vertices: tuple[Vertex, ...], edges: tuple[Edge, ...],
                 boundary_ids: frozenset[str]):
        self.vertices = vertices
        self.edges = edges
        self.boundary_ids = boundary_ids
        self._vmap = {v.id: v for v in vertices}
        self._emap = {e.id: e for e in edges}
        self._incident: dict[str, frozenset[str]] = {}
        adj: dict[str, list[tuple[str, str, float]]] = {v.id: [] for v in vertices}
        inc: dict[str, set[str]] = {v.id: set() for v in vertices}
        for e in edges:
            adj[e.tail].append((e.id, e.head, e.length))
            adj[e.head].append((e.id, e.tail, e.length))
            inc[e.tail].add(e.id)
            inc[e.head].add(e.id)
        self.adjacency = {v: tuple(lst) for v, lst in adj.items()}
        self._incident = {v: frozenset(s) for v, s in inc.items()}
        self.transition_ids = frozenset(
            v.id for v in vertices if v.id not in boundary_ids
        )
        entries = np.zeros((len(vertices), len(edges)), dtype=np.int8)
        vrow = {v.id: i for i, v in enumerate(vertices)}
        for j, e in enumerate(edges):
            entries[vrow[e.tail], j] = 1
            entries[vrow[e.head], j] = -1
        self.incidence = IncidenceMatrix(
            tuple(v.id for v in vertices), tuple(e.id for e in edges), entries
        )
        self._vdist_cache: dict[str, dict[str, float]] = {}

    # -- lookups ---------------------------------------------------------

    def vertex(self, vertex_id: str) -> Vertex:
        try:
            return self._vmap[vertex_id]
        except KeyError:
            raise errors.UnknownVertex(f"unknown vertex {vertex_id!r}") from None

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._emap[edge_id]
        except KeyError:
            raise errors.UnknownEdge(f"unknown edge {edge_id!r}") from None

    def has_vertex(self, vertex_id: str) -> bool:
        return vertex_id in self._vmap

    def incident_edges(self, vertex_id: str) -> frozenset[str]:
        """Edge ids incident to the given vertex."""
        self.vertex(vertex_id)
        return self._incident[vertex_id]

    def degree(self, vertex_id: str) -> int:
        return len(self.incident_edges(vertex_id))

    # -- points ----------------------------------------------------------

    def vertex_point(self, vertex_id: str) -> PointOnNetwork:
        self.vertex(vertex_id)
        return PointOnNetwork(vertex=vertex_id)

    def point(self, edge_id: str, t: float) -> PointOnNetwork:
        """Point at arclength t along the edge; endpoints canonicalize."""
        e = self.edge(edge_id)
        t = float(t)
        snap = POINT_SNAP * max(1.0, e.length)
        if not (-snap <= t <= e.length + snap) or math.isnan(t):
            raise errors.InvalidPoint(
                f"t={t!r} outside [0, {e.length!r}] on edge {edge_id!r}"
            )
        if abs(t) <= snap:
            return PointOnNetwork(vertex=e.tail)
        if abs(t - e.length) <= snap:
            return PointOnNetwork(vertex=e.head)
        return PointOnNetwork(edge=edge_id, t=t)

    def _own(self, p: PointOnNetwork) -> PointOnNetwork:
        if p.is_vertex:
            return self.vertex_point(p.vertex)
        return self.point(p.edge, p.t)

    # -- path distance ----------------------------------------------------

    def vertex_distances(self, source_id: str) -> dict[str, float]:
        """Shortest path length from one vertex to every vertex (cached)."""
        self.vertex(source_id)
        cached = self._vdist_cache.get(source_id)
        if cached is not None:
            return cached
        dist = {v.id: math.inf for v in self.vertices}
        dist[source_id] = 0.0
        heap = [(0.0, source_id)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for _, w, length in self.adjacency[u]:
                nd = d + length
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        self._vdist_cache[source_id] = dist
        return dist

    def _point_ends(self, p: PointOnNetwork) -> list[tuple[str, float]]:
        if p.is_vertex:
            return [(p.vertex, 0.0)]
        e = self.edge(p.edge)
        return [(e.tail, p.t), (e.head, e.length - p.t)]

    def path_distance(self, y: PointOnNetwork, x: PointOnNetwork) -> float:
        """Length of the shortest path joining two points of the network."""
        y = self._own(y)
        x = self._own(x)
        if y == x:
            return 0.0
        best = math.inf
        if not y.is_vertex and not x.is_vertex and y.edge == x.edge:
            best = abs(y.t - x.t)
        for a, ca in self._point_ends(y):
            dv = self.vertex_distances(a)
            for b, cb in self._point_ends(x):
                cand = ca + dv[b] + cb
                if cand < best:
                    best = cand
        return best

    def total_length(self) -> float:
        return sum(e.length for e in self.edges)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return (
            f"Network({len(self.vertices)} vertices, {len(self.edges)} edges, "
            f"boundary={sorted(self.boundary_ids)})"
        )


def incident_edges(net: Network, vertex_id: str) -> frozenset[str]:
    """Module-level alias for :meth:`Network.incident_edges`."""
    return net.incident_edges(vertex_id)


def path_distance(net: Network, y: PointOnNetwork, x: PointOnNetwork) -> float:
    """Module-level alias for :meth:`Network.path_distance`."""
    return net.path_distance(y, x)


def _coerce_vertex(rec) -> Vertex:
    if isinstance(rec, Vertex):
        return rec
    if isinstance(rec, str):
        return Vertex(id=rec)
    if isinstance(rec, Mapping):
        coords = rec.get("coords")
        return Vertex(id=str(rec["id"]),
                      coords=None if coords is None else tuple(float(c) for c in coords))
    if isinstance(rec, (tuple, list)):
        if len(rec) == 1:
            return Vertex(id=str(rec[0]))
        return Vertex(id=str(rec[0]), coords=tuple(float(c) for c in rec[1]))
    raise TypeError(f"cannot interpret vertex record {rec!r}")


def _coerce_edge(rec) -> Edge:
    if isinstance(rec, Edge):
        return rec
    if isinstance(rec, Mapping):
        return Edge(id=str(rec["id"]), tail=str(rec["tail"]),
                    head=str(rec["head"]), length=float(rec["length"]))
    if isinstance(rec, (tuple, list)) and len(rec) == 4:
        return Edge(id=str(rec[0]), tail=str(rec[1]), head=str(rec[2]),
                    length=float(rec[3]))
    raise TypeError(f"cannot interpret edge record {rec!r}")


def build_network(
    spec: Mapping | None = None,
    *,
    vertices: Iterable | None = None,
    edges: Iterable | None = None,
    boundary: Iterable[str] | None = None,
) -> Network:
    """Validate a raw description and return an immutable :class:`Network`.

    Accepts either a mapping with keys ``vertices``/``edges``/``boundary``
    (extra per-edge keys such as cost profiles are ignored here) or the three
    pieces as keyword arguments.  Raises a specific :mod:`netkonal.errors`
    subclass naming the violated construction rule.
    """
    if spec is not None:
        vertices = spec["vertices"]
        edges = spec["edges"]
        boundary = spec["boundary"]
    if vertices is None or edges is None or boundary is None:
        raise TypeError("build_network needs vertices, edges and boundary")

    vlist = [_coerce_vertex(v) for v in vertices]
    seen: set[str] = set()
    for v in vlist:
        if v.id in seen:
            raise errors.DuplicateVertex(f"vertex id {v.id!r} appears twice")
        seen.add(v.id)

    elist = [_coerce_edge(e) for e in edges]
    eids: set[str] = set()
    pairs: set[frozenset[str]] = set()
    for e in elist:
        for end in (e.tail, e.head):
            if end not in seen:
                raise errors.UnknownVertex(
                    f"edge {e.id!r} references unknown vertex {end!r}"
                )
        if e.tail == e.head:
            raise errors.SelfLoop(f"edge {e.id!r} joins vertex {e.tail!r} to itself")
        if not (e.length > 0.0) or math.isinf(e.length):
            raise errors.NonPositiveLength(
                f"edge {e.id!r} has non-positive length {e.length!r}"
            )
        if e.id in eids:
            raise errors.DuplicateEdge(f"edge id {e.id!r} appears twice")
        eids.add(e.id)
        pair = frozenset((e.tail, e.head))
        if pair in pairs:
            raise errors.DuplicateEdge(
                f"vertices {e.tail!r} and {e.head!r} are joined by more than one edge"
            )
        pairs.add(pair)

    if not elist:
        raise errors.DisconnectedGraph("network has no edges")

    # connectivity and isolated vertices
    neighbors: dict[str, set[str]] = {v.id: set() for v in vlist}
    for e in elist:
        neighbors[e.tail].add(e.head)
        neighbors[e.head].add(e.tail)
    for v in vlist:
        if not neighbors[v.id]:
            raise errors.DisconnectedGraph(f"vertex {v.id!r} is isolated")
    stack = [vlist[0].id]
    reached = {vlist[0].id}
    while stack:
        u = stack.pop()
        for w in neighbors[u]:
            if w not in reached:
                reached.add(w)
                stack.append(w)
    if len(reached) != len(vlist):
        missing = sorted(set(seen) - reached)
        raise errors.DisconnectedGraph(
            f"vertices {missing} are not connected to {vlist[0].id!r}"
        )

    bset = set(str(b) for b in boundary)
    for b in bset:
        if b not in seen:
            raise errors.UnknownVertex(f"boundary names unknown vertex {b!r}")
    if not bset:
        raise errors.EmptyBoundary("boundary vertex set must be nonempty")
    degree: dict[str, int] = {v.id: 0 for v in vlist}
    for e in elist:
        degree[e.tail] += 1
        degree[e.head] += 1
    for v in vlist:
        if degree[v.id] == 1 and v.id not in bset:
            raise errors.DegreeOneNotBoundary(
                f"vertex {v.id!r} has degree one and must be in the boundary set"
            )

    return Network(tuple(vlist), tuple(elist), frozenset(bset))
