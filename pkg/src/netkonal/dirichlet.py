"""Dirichlet problems on networks via the distance representation formula.

The solution candidate is u(x) = min over anchors y of g(y) + S(y, x), with
anchors the boundary vertices plus any user-declared interior anchor points.
Under the compatibility condition g(x) - g(y) <= S(y, x) for all anchor pairs
this attains the data and is the unique solution; without it, the same
formula is still the maximal solution below g, and the anchors where the
data is not attained are flagged.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import errors
from .hamiltonian import NetworkHamiltonian
from .metric import MetricGraph, ValueField, _dijkstra, discretize
from .network import Network, PointOnNetwork


@dataclass(frozen=True)
class Anchor:
    point: PointOnNetwork
    value: float


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet values on the boundary vertices plus optional anchor points."""

    vertex_values: Mapping[str, float]
    anchors: tuple[Anchor, ...] = ()


def boundary_data(net: Network, vertex_values: Mapping[str, float],
                  anchors: Sequence[Anchor | tuple] = ()) -> BoundaryData:
    """Validate Dirichlet data against a network.

    Every boundary vertex must carry a finite value and no value may name a
    vertex outside the declared boundary (put interior vertices that carry
    data into the boundary set).  Anchor tuples (edge, t, value) are accepted.
    """
    vals = {str(k): float(v) for k, v in vertex_values.items()}
    for vid, val in vals.items():
        if not net.has_vertex(vid):
            raise errors.UnknownVertex(f"boundary data names unknown vertex {vid!r}")
        if vid not in net.boundary_ids:
            raise errors.MissingBoundaryData(
                f"vertex {vid!r} carries data but is not in the boundary set"
            )
        if not math.isfinite(val):
            raise ValueError(f"boundary value at {vid!r} must be finite")
    missing = sorted(net.boundary_ids - set(vals))
    if missing:
        raise errors.MissingBoundaryData(
            f"boundary vertices {missing} have no Dirichlet value"
        )
    norm: list[Anchor] = []
    for a in anchors:
        if not isinstance(a, Anchor):
            edge, t, val = a
            a = Anchor(net.point(str(edge), float(t)), float(val))
        else:
            a = Anchor(net._own(a.point), float(a.value))
        if not math.isfinite(a.value):
            raise ValueError(f"anchor value at {a.point.describe()} must be finite")
        norm.append(a)
    return BoundaryData(vertex_values=vals, anchors=tuple(norm))


def _anchor_table(mg: MetricGraph, g: BoundaryData):
    """Extended graph plus (label, node, value) rows for every anchor."""
    ext = mg.extended([a.point for a in g.anchors])
    rows: list[tuple[str, int, float]] = []
    for vid, val in g.vertex_values.items():
        rows.append((vid, mg.grid.vertex_node(vid), val))
    for a, node in zip(g.anchors, ext.point_nodes):
        rows.append((a.point.describe(), node, a.value))
    return ext, rows


def _check_vanishing_cost(mg: MetricGraph, g: BoundaryData) -> None:
    H = mg.H
    if not H.has_cost_profiles() or g.anchors:
        return
    for eid, eg in mg.grid.edges.items():
        alpha = np.asarray(H.edge(eid).alpha(eg.t), dtype=float)
        if np.any(alpha <= 0.0):
            warnings.warn(
                "cost density vanishes somewhere on the network and no anchor "
                "data covers it; the solution may not be unique there",
                stacklevel=3,
            )
            return


def solve(net: Network, H: NetworkHamiltonian, g: BoundaryData, h: float,
          *, mg: MetricGraph | None = None) -> ValueField:
    """Representation-formula solution via one multi-source Dijkstra run."""
    mg = mg if mg is not None else discretize(net, H, h)
    _check_vanishing_cost(mg, g)
    ext, rows = _anchor_table(mg, g)
    dist = _dijkstra(ext.adjacency, ext.n_nodes, [(node, val) for _, node, val in rows])
    return ValueField(mg.grid, dist[: mg.grid.n_nodes])


@dataclass(frozen=True)
class CompatibilityReport:
    compatible: bool
    tolerance: float
    worst_margin: float
    worst_pair: tuple[str, str] | None
    pairs_checked: int

    def summary(self) -> str:
        verdict = "compatible" if self.compatible else "INCOMPATIBLE"
        if self.worst_pair is None:
            return f"boundary data {verdict} (no anchor pairs)"
        y, x = self.worst_pair
        return (
            f"boundary data {verdict}: worst margin g({x}) - g({y}) - S({y},{x}) "
            f"= {self.worst_margin:.6g} (tolerance {self.tolerance:.3g})"
        )


def check_compatibility(net: Network, H: NetworkHamiltonian, g: BoundaryData,
                        h: float, *, mg: MetricGraph | None = None) -> CompatibilityReport:
    """Verify g(x) - g(y) <= S(y, x) over all ordered anchor pairs."""
    mg = mg if mg is not None else discretize(net, H, h)
    ext, rows = _anchor_table(mg, g)
    tol = 1e-9 + mg.quadrature_error_bound()
    worst = -math.inf
    worst_pair: tuple[str, str] | None = None
    checked = 0
    for label_y, node_y, gy in rows:
        dist = _dijkstra(ext.adjacency, ext.n_nodes, [(node_y, 0.0)])
        for label_x, node_x, gx in rows:
            if node_x == node_y:
                continue
            margin = gx - gy - float(dist[node_x])
            checked += 1
            if margin > worst:
                worst = margin
                worst_pair = (label_y, label_x)
    if worst_pair is None:
        worst = 0.0
    return CompatibilityReport(
        compatible=worst <= tol,
        tolerance=tol,
        worst_margin=worst,
        worst_pair=worst_pair,
        pairs_checked=checked,
    )


@dataclass(frozen=True)
class MaximalSolution:
    field: ValueField
    unattained: tuple[tuple[str, float, float], ...]

    @property
    def attains_data(self) -> bool:
        return not self.unattained


def maximal_solution(net: Network, H: NetworkHamiltonian, g: BoundaryData,
                     h: float, *, mg: MetricGraph | None = None) -> MaximalSolution:
    """Same formula as :func:`solve`, flagging anchors where u < g.

    The formula is the maximal solution below g regardless of compatibility;
    flagged anchors are exactly where the Dirichlet data is not attained.
    """
    mg = mg if mg is not None else discretize(net, H, h)
    ext, rows = _anchor_table(mg, g)
    dist = _dijkstra(ext.adjacency, ext.n_nodes, [(node, val) for _, node, val in rows])
    tol = 1e-9 + mg.quadrature_error_bound()
    flags = tuple(
        (label, float(dist[node]), val)
        for label, node, val in rows
        if dist[node] < val - tol
    )
    return MaximalSolution(
        field=ValueField(mg.grid, dist[: mg.grid.n_nodes]),
        unattained=flags,
    )


@dataclass(frozen=True)
class StrictnessData:
    """Grid nodes where the cost vanishes, plus the strictness margin -alpha.

    Off the zero set a constant is a strict subsolution with margin -alpha;
    this is the input the comparison harness needs.
    """

    zero_nodes: np.ndarray
    margin: ValueField
    eps: float


def strictness_data(mg: MetricGraph, eps_K: float = 0.0) -> StrictnessData:
    """Zero set {alpha <= eps_K} and margin field for cost-based families."""
    if eps_K < 0.0:
        raise ValueError(f"eps_K must be nonnegative, got {eps_K!r}")
    H = mg.H
    if not H.has_cost_profiles():
        raise errors.UnsupportedFamily(
            "strict subsolution construction needs a cost-based family "
            "(quadratic or power eikonal)"
        )
    grid = mg.grid
    alpha_vals = np.full(grid.n_nodes, np.nan)
    for eid, eg in grid.edges.items():
        alpha_vals[eg.node_ids] = np.asarray(H.edge(eid).alpha(eg.t), dtype=float)
    zero = np.flatnonzero(alpha_vals <= eps_K)
    return StrictnessData(
        zero_nodes=zero,
        margin=ValueField(grid, -alpha_vals),
        eps=float(eps_K),
    )
