"""Seeded random problem instances for property tests and experiments.

Networks are built from a random spanning tree plus a few extra edges (no
duplicates, no self-loops); cost profiles interpolate random vertex
potentials linearly along each edge, which makes them automatically
continuous across junctions.  Boundary data generated here is compatible by
construction: it restricts a min of shifted, scaled distance fields, and the
triangle inequality survives scaling by factors <= 1, shifts, and pointwise
minima.
"""

from __future__ import annotations

import numpy as np

from .dirichlet import BoundaryData, boundary_data
from .hamiltonian import LinearProfile, NetworkHamiltonian, quadratic_eikonal
from .metric import MetricGraph, _dijkstra
from .network import Network, build_network


def random_network(rng: np.random.Generator, *, min_vertices: int = 2,
                   max_vertices: int = 6, extra_edge_prob: float = 0.4,
                   length_range: tuple[float, float] = (0.8, 2.0),
                   interior_boundary_prob: float = 0.25) -> Network:
    """Random connected network with all degree-one vertices on the boundary."""
    nv = int(rng.integers(min_vertices, max_vertices + 1))
    names = [f"v{i}" for i in range(nv)]
    edges = []
    used = set()
    for i in range(1, nv):
        j = int(rng.integers(0, i))
        edges.append((f"e{len(edges)}", names[j], names[i],
                      float(rng.uniform(*length_range))))
        used.add(frozenset((names[j], names[i])))
    candidates = [
        (a, b)
        for i, a in enumerate(names)
        for b in names[i + 1:]
        if frozenset((a, b)) not in used
    ]
    for a, b in candidates:
        if rng.random() < extra_edge_prob:
            edges.append((f"e{len(edges)}", a, b, float(rng.uniform(*length_range))))
    degree = {v: 0 for v in names}
    for _, a, b, _l in edges:
        degree[a] += 1
        degree[b] += 1
    boundary = {v for v in names if degree[v] == 1}
    for v in names:
        if v not in boundary and rng.random() < interior_boundary_prob:
            boundary.add(v)
    if not boundary:
        boundary.add(names[int(rng.integers(0, nv))])
    return build_network(vertices=names, edges=edges, boundary=sorted(boundary))


def random_quadratic(rng: np.random.Generator, net: Network, *,
                     value_range: tuple[float, float] = (0.7, 1.4),
                     ) -> NetworkHamiltonian:
    """Quadratic eikonal with junction-continuous random linear costs."""
    potential = {v.id: float(rng.uniform(*value_range)) for v in net.vertices}
    profiles = {}
    for e in net.edges:
        a = potential[e.tail]
        b = potential[e.head]
        profiles[e.id] = LinearProfile(offset=a, slope=(b - a) / e.length)
    return quadratic_eikonal(net, profiles)


def random_compatible_boundary(rng: np.random.Generator, mg: MetricGraph, *,
                               pieces: int = 2,
                               scale_range: tuple[float, float] = (0.3, 1.0),
                               shift_range: tuple[float, float] = (0.0, 1.0),
                               ) -> BoundaryData:
    """Boundary data that satisfies g(x) - g(y) <= S(y, x) on the same mesh."""
    net = mg.grid.network
    n = mg.grid.n_nodes
    best = np.full(n, np.inf)
    for _ in range(max(1, int(pieces))):
        source = int(rng.integers(0, n))
        lam = float(rng.uniform(*scale_range))
        shift = float(rng.uniform(*shift_range))
        dist = _dijkstra(mg.adjacency, n, [(source, 0.0)])
        best = np.minimum(best, lam * dist + shift)
    values = {vid: float(best[mg.grid.vertex_node(vid)])
              for vid in sorted(net.boundary_ids)}
    return boundary_data(net, values)
