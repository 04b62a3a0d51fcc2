"""Numerical certification of viscosity sub/supersolution conditions.

Test functions are never materialized.  On a grid, the slope pairs reachable
by smooth test functions are exactly:

* interior node with one-sided slopes (left a, right b): touching from above
  is possible iff b <= a, and the reachable test slopes fill [b, a]; touching
  from below is possible iff a <= b, with slopes filling [a, b];
* junction, pair of incident edges (j, k): a test function whose oriented
  derivatives cancel across the pair has into-edge slopes (s, -s).  Touching
  from above forces s >= q_j and -s >= q_k, i.e. s in [q_j, -q_k]; from below
  the reversed inequalities give s in [-q_k, q_j], where q_j is the discrete
  into-edge slope of the checked function.

Convexity of H in the slope (and evenness at junctions) reduces sup/inf over
these intervals to endpoint or clamped-at-zero evaluations.  The junction
conditions are asymmetric: a subsolution must pass for every edge pair with a
nonempty upper interval, while a supersolution needs, for every edge j, just
one feasible partner edge k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import errors
from .dirichlet import BoundaryData, solve
from .hamiltonian import (
    NetworkHamiltonian,
    p_minus,
    p_plus,
    quadratic_eikonal,
    power_eikonal,
    vertex_profile,
)
from .metric import MetricGraph, ValueField, _dijkstra
from .network import Network, PointOnNetwork
from .numerics import golden_min

#: multiplier in the default kink-detection slack 10 * h * (local density)
SLOPE_TOL_FACTOR = 10.0


@dataclass(frozen=True)
class SlopeProfile:
    """One-sided difference quotients of a grid function.

    ``edge_slopes[eid][k]`` is the slope of segment k in the edge
    parametrization; ``vertex_slopes[vid][eid]`` is the into-edge slope at a
    vertex (related to the parametrized derivative by the incidence sign:
    d_j u = a_ij * q_j).
    """

    edge_slopes: Mapping[str, np.ndarray]
    vertex_slopes: Mapping[str, Mapping[str, float]]


def slope_profile(u: ValueField) -> SlopeProfile:
    grid = u.grid
    net = grid.network
    edge_slopes: dict[str, np.ndarray] = {}
    vertex_slopes: dict[str, dict[str, float]] = {v.id: {} for v in net.vertices}
    for eid, eg in grid.edges.items():
        vals = u.values[eg.node_ids]
        s = np.diff(vals) / eg.delta
        edge_slopes[eid] = s
        e = net.edge(eid)
        vertex_slopes[e.tail][eid] = float(s[0])
        vertex_slopes[e.head][eid] = float(-s[-1])
    return SlopeProfile(edge_slopes=edge_slopes, vertex_slopes=vertex_slopes)


@dataclass(frozen=True)
class CheckViolation:
    node: int
    location: tuple
    condition: str
    residual: float
    slopes: tuple

    def __str__(self) -> str:
        return (f"{self.condition} at node {self.node} {self.location}: "
                f"residual {self.residual:.6g}, slopes {self.slopes}")


@dataclass
class CheckReport:
    """Per-node worst residuals of one viscosity check.

    A node with no applicable test has residual -inf; the check passes iff
    every residual is <= tol, so passing is monotone in tol.
    """

    kind: str
    tol: float
    residuals: np.ndarray
    conditions: list
    slope_info: list
    grid_nodes: int

    @property
    def worst_residual(self) -> float:
        return float(np.max(self.residuals, initial=-math.inf))

    @property
    def worst_node(self) -> int | None:
        if not np.any(np.isfinite(self.residuals)):
            return None
        return int(np.argmax(self.residuals))

    @property
    def passed(self) -> bool:
        return self.worst_residual <= self.tol

    def violations(self, grid=None) -> list[CheckViolation]:
        out = []
        for node in np.flatnonzero(self.residuals > self.tol):
            node = int(node)
            out.append(CheckViolation(
                node=node,
                location=grid.node_location(node) if grid is not None else (),
                condition=self.conditions[node] or self.kind,
                residual=float(self.residuals[node]),
                slopes=self.slope_info[node] or (),
            ))
        return out

    def node_records(self, grid) -> list[dict]:
        recs = []
        for node in range(self.grid_nodes):
            r = self.residuals[node]
            if not math.isfinite(r):
                continue
            kind, a, b = grid.node_location(node)
            rec = {
                "node": node,
                "kind": kind,
                "id": a,
                "t": b,
                "residual": float(r),
                "condition": self.conditions[node],
                "slopes": list(self.slope_info[node] or ()),
                "ok": bool(r <= self.tol),
            }
            recs.append(rec)
        return recs

    def to_json(self, grid) -> dict:
        return {
            "check": self.kind,
            "tolerance": self.tol,
            "passed": self.passed,
            "worst_residual": None if not math.isfinite(self.worst_residual)
            else self.worst_residual,
            "worst_node": self.worst_node,
            "nodes": self.node_records(grid),
        }

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        worst = self.worst_residual
        shown = "n/a" if not math.isfinite(worst) else f"{worst:.6g}"
        return (f"{self.kind}-check: {verdict} "
                f"(worst residual {shown}, tolerance {self.tol:g})")


def _local_density_scale(grid, H) -> dict[str, float]:
    """Per-vertex bound on |p_plus|, |p_minus| over incident edge ends."""
    scale: dict[str, float] = {v.id: 1.0 for v in grid.network.vertices}
    for eid, eg in grid.edges.items():
        he = H.edge(eid)
        ends = np.array([0.0, eg.t[-1]])
        dens = np.maximum(
            np.asarray(p_plus(he, ends), dtype=float),
            -np.asarray(p_minus(he, ends), dtype=float),
        )
        e = grid.network.edge(eid)
        scale[e.tail] = max(scale[e.tail], float(dens[0]))
        scale[e.head] = max(scale[e.head], float(dens[1]))
    return scale


def _interval_min(hfn: Callable, lo: float, hi: float, even: bool) -> float:
    if even:
        return float(hfn(min(max(0.0, lo), hi)))
    _, val = golden_min(hfn, lo, hi, tol=1e-10)
    return min(val, float(hfn(lo)), float(hfn(hi)))


def _rhs_values(rhs: ValueField | None, u: ValueField) -> np.ndarray:
    if rhs is None:
        return np.zeros(u.grid.n_nodes)
    if rhs.grid.n_nodes != u.grid.n_nodes:
        raise errors.GridMismatch("right-hand side lives on a different grid")
    return rhs.values


def _excluded_mask(grid, exclude) -> np.ndarray:
    mask = np.zeros(grid.n_nodes, dtype=bool)
    for node in exclude:
        mask[int(node)] = True
    return mask


def sub_check(u: ValueField, H: NetworkHamiltonian, tol: float,
              *, rhs: ValueField | None = None,
              slope_tol: float | None = None,
              exclude: Sequence[int] = ()) -> CheckReport:
    """Certify the subsolution conditions H(x, Du) <= rhs on the grid.

    Interior nodes: when right slope <= left slope, H must be <= rhs + tol at
    both one-sided slopes (convexity makes the endpoints sufficient).
    Junctions: for every incident pair (j, k) whose upper test interval is
    nonempty (q_j + q_k <= slope_tol), the momentum profile must be <= rhs +
    tol at both interval endpoints.  Boundary vertices and excluded nodes are
    skipped.
    """
    grid = u.grid
    net = grid.network
    prof = slope_profile(u)
    fvals = _rhs_values(rhs, u)
    skip = _excluded_mask(grid, exclude)
    residuals = np.full(grid.n_nodes, -math.inf)
    conditions: list = [None] * grid.n_nodes
    slope_info: list = [None] * grid.n_nodes

    for eid, eg in grid.edges.items():
        if eg.n_segments < 2:
            continue
        he = H.edge(eid)
        s = prof.edge_slopes[eid]
        ids = eg.node_ids[1:-1]
        a = s[:-1]
        b = s[1:]
        active = (b <= a) & ~skip[ids]
        if not np.any(active):
            continue
        t_act = eg.t[1:-1][active]
        ha = np.asarray(he.evaluate(t_act, a[active]), dtype=float)
        hb = np.asarray(he.evaluate(t_act, b[active]), dtype=float)
        res = np.maximum(ha, hb) - fvals[ids[active]]
        residuals[ids[active]] = res
        for node, aa, bb in zip(ids[active].tolist(), a[active], b[active]):
            conditions[node] = "sub-interior"
            slope_info[node] = (float(aa), float(bb))

    scale = None
    for vid in sorted(net.transition_ids):
        node = grid.vertex_node(vid)
        if skip[node]:
            continue
        qs = prof.vertex_slopes[vid]
        inc = sorted(qs)
        if len(inc) < 2:
            continue
        if slope_tol is None:
            if scale is None:
                scale = _local_density_scale(grid, H)
            stol = SLOPE_TOL_FACTOR * grid.h * scale[vid]
        else:
            stol = slope_tol
        hfn = vertex_profile(H, net, vid)
        worst = -math.inf
        worst_pair = None
        for idx, j in enumerate(inc):
            for k in inc[idx + 1:]:
                if qs[j] + qs[k] > stol:
                    continue
                val = max(float(hfn(qs[j])), float(hfn(qs[k]))) - fvals[node]
                if val > worst:
                    worst = val
                    worst_pair = (j, k)
        if worst_pair is not None:
            residuals[node] = worst
            conditions[node] = f"sub-vertex({worst_pair[0]},{worst_pair[1]})"
            slope_info[node] = tuple(float(qs[j]) for j in inc)

    return CheckReport("sub", float(tol), residuals, conditions, slope_info,
                       grid.n_nodes)


def super_check(u: ValueField, H: NetworkHamiltonian, tol: float,
                *, slope_tol: float | None = None,
                exclude: Sequence[int] = (),
                _vertex_quantifier: str = "exists") -> CheckReport:
    """Certify the supersolution conditions H(x, Du) >= 0 on the grid.

    Interior nodes: when left slope <= right slope, the minimum of H over the
    slope interval must be >= -tol (clamped-at-zero for even profiles, golden
    section otherwise).  Junctions: for every edge j there must EXIST a
    partner k whose lower test interval [-q_k, q_j] is empty (q_j + q_k < 0)
    or has profile minimum >= -tol.

    ``_vertex_quantifier="all"`` switches to the deliberately wrong rule that
    demands every partner edge be feasible; it exists only to pin down the
    asymmetry of the junction conditions in regression tests.
    """
    if _vertex_quantifier not in ("exists", "all"):
        raise ValueError(f"unknown vertex quantifier {_vertex_quantifier!r}")
    grid = u.grid
    net = grid.network
    prof = slope_profile(u)
    skip = _excluded_mask(grid, exclude)
    residuals = np.full(grid.n_nodes, -math.inf)
    conditions: list = [None] * grid.n_nodes
    slope_info: list = [None] * grid.n_nodes

    for eid, eg in grid.edges.items():
        if eg.n_segments < 2:
            continue
        he = H.edge(eid)
        s = prof.edge_slopes[eid]
        ids = eg.node_ids[1:-1]
        a = s[:-1]
        b = s[1:]
        active = (a <= b) & ~skip[ids]
        if not np.any(active):
            continue
        t_act = eg.t[1:-1][active]
        if he.even_in_p:
            pstar = np.clip(0.0, a[active], b[active])
            mins = np.asarray(he.evaluate(t_act, pstar), dtype=float)
        else:
            mins = np.empty(int(np.count_nonzero(active)))
            for i, (tv, lo, hi) in enumerate(zip(t_act, a[active], b[active])):
                mins[i] = _interval_min(lambda p: float(he.evaluate(tv, p)),
                                        float(lo), float(hi), even=False)
        residuals[ids[active]] = -mins
        for node, aa, bb in zip(ids[active].tolist(), a[active], b[active]):
            conditions[node] = "super-interior"
            slope_info[node] = (float(aa), float(bb))

    for vid in sorted(net.transition_ids):
        node = grid.vertex_node(vid)
        if skip[node]:
            continue
        qs = prof.vertex_slopes[vid]
        inc = sorted(qs)
        if len(inc) < 2:
            continue
        hfn = vertex_profile(H, net, vid)
        worst = -math.inf
        worst_edge = None
        for j in inc:
            deficits = []
            for k in inc:
                if k == j:
                    continue
                if qs[j] + qs[k] < 0.0:
                    deficits.append(-math.inf)
                else:
                    m = _interval_min(hfn, -qs[k], qs[j], even=True)
                    deficits.append(-m)
            combine = max if _vertex_quantifier == "all" else min
            deficit_j = combine(deficits)
            if deficit_j > worst:
                worst = deficit_j
                worst_edge = j
        if worst_edge is not None and math.isfinite(worst):
            residuals[node] = worst
            conditions[node] = f"super-vertex({worst_edge})"
            slope_info[node] = tuple(float(qs[j]) for j in inc)

    return CheckReport("super", float(tol), residuals, conditions, slope_info,
                       grid.n_nodes)


# ---------------------------------------------------------------------------
# proposition harnesses


def closure_probe(op: str, u: ValueField, v: ValueField, H: NetworkHamiltonian,
                  tol: float, **check_kwargs) -> CheckReport:
    """Check that max of subsolutions (min of supersolutions) still passes.

    A failure here indicates a checker defect, not a mathematical one.
    Raises :class:`~netkonal.errors.PreconditionNotChecked` if either input
    fails its own check.
    """
    if op not in ("max", "min"):
        raise ValueError(f"op must be 'max' or 'min', got {op!r}")
    if u.grid.n_nodes != v.grid.n_nodes:
        raise errors.GridMismatch("closure probe needs fields on one grid")
    check = sub_check if op == "max" else super_check
    ru = check(u, H, tol, **check_kwargs)
    rv = check(v, H, tol, **check_kwargs)
    if not (ru.passed and rv.passed):
        raise errors.PreconditionNotChecked(
            f"inputs must individually pass the {ru.kind}-check"
        )
    combine = np.maximum if op == "max" else np.minimum
    w = ValueField(u.grid, combine(u.values, v.values))
    return check(w, H, tol, **check_kwargs)


@dataclass(frozen=True)
class StabilityReport:
    rows: tuple[tuple[int, float], ...]
    limit_field: ValueField

    def gaps(self) -> list[float]:
        return [gap for _, gap in self.rows]


def shifted_cost_hamiltonian(H: NetworkHamiltonian, net: Network,
                             shift: float) -> NetworkHamiltonian:
    """Same family with alpha(t) replaced by alpha(t) + shift."""
    if not H.has_cost_profiles():
        raise errors.UnsupportedFamily(
            "built-in stability sequence needs a cost-based family"
        )
    shifted = {}
    for eid, he in H.per_edge.items():
        shifted[eid] = _shifted_profile(he.alpha, shift)
    families = H.families
    if families == {"quadratic-eikonal"}:
        return quadratic_eikonal(net, shifted)
    if families == {"power-eikonal"}:
        m = next(iter(H.per_edge.values())).power
        return power_eikonal(net, shifted, power=m)
    raise errors.UnsupportedFamily(f"mixed or custom families: {sorted(families)}")


def _shifted_profile(alpha, shift):
    def prof(t):
        return np.asarray(alpha(t), dtype=float) + shift

    return prof


def stability_probe(net: Network, H_limit: NetworkHamiltonian, g: BoundaryData,
                    h: float, n_values: Sequence[int],
                    make_H: Callable[[int], NetworkHamiltonian] | None = None,
                    ) -> StabilityReport:
    """Solve along a sequence of Hamiltonians converging to H_limit.

    The default sequence shifts the cost by 1/n.  Returns sup-norm gaps
    |u_n - u_limit| per n; uniform convergence of the data must force the
    gaps down, which the caller asserts against a closed form or a bound.
    """
    if make_H is None:
        def make_H(n: int) -> NetworkHamiltonian:
            return shifted_cost_hamiltonian(H_limit, net, 1.0 / n)
    u_inf = solve(net, H_limit, g, h)
    rows = []
    for n in n_values:
        u_n = solve(net, make_H(int(n)), g, h)
        gap = float(np.max(np.abs(u_n.values - u_inf.values)))
        rows.append((int(n), gap))
    return StabilityReport(rows=tuple(rows), limit_field=u_inf)


@dataclass(frozen=True)
class ComparisonReport:
    passed: bool
    tol: float
    worst_gap: float
    worst_node: int | None
    sub_report: CheckReport
    super_report: CheckReport

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (f"comparison: {verdict} (worst u - v = {self.worst_gap:.6g}, "
                f"tolerance {self.tol:g})")


def comparison_probe(u_sub: ValueField, v_super: ValueField,
                     H: NetworkHamiltonian, margin: ValueField,
                     anchor_nodes: Sequence[int], *,
                     tol: float = 1e-9, check_tol: float,
                     slope_tol: float | None = None) -> ComparisonReport:
    """Assert u <= v everywhere given u <= v on the anchors.

    Preconditions (raised as PreconditionNotChecked when violated): u passes
    the subsolution check against the relaxed equation H <= margin with
    margin < 0 off the anchor set, and v passes the supersolution check, both
    away from the anchors.  The underlying uniqueness argument localizes to
    short geodesics crossing at most one junction; the numerical probe needs
    no such restriction and asserts the conclusion on every grid node.
    """
    if u_sub.grid.n_nodes != v_super.grid.n_nodes:
        raise errors.GridMismatch("comparison probe needs fields on one grid")
    anchors = [int(a) for a in anchor_nodes]
    ru = sub_check(u_sub, H, check_tol, rhs=margin, slope_tol=slope_tol,
                   exclude=anchors)
    rv = super_check(v_super, H, check_tol, slope_tol=slope_tol,
                     exclude=anchors)
    if not ru.passed:
        raise errors.PreconditionNotChecked(
            f"u is not a subsolution of the relaxed equation: {ru.summary()}"
        )
    if not rv.passed:
        raise errors.PreconditionNotChecked(
            f"v is not a supersolution: {rv.summary()}"
        )
    if anchors:
        on_anchor = u_sub.values[anchors] - v_super.values[anchors]
        if np.any(on_anchor > tol):
            raise errors.PreconditionNotChecked(
                "u exceeds v on the anchor set"
            )
    gap = u_sub.values - v_super.values
    worst = float(np.max(gap))
    return ComparisonReport(
        passed=worst <= tol,
        tol=float(tol),
        worst_gap=worst,
        worst_node=int(np.argmax(gap)),
        sub_report=ru,
        super_report=rv,
    )


@dataclass(frozen=True)
class MaximalityReport:
    passed: bool
    tol: float
    samples: int
    worst_excess: float
    worst_sample: int | None
    worst_node: int | None

    def summary(self) -> str:
        verdict = "pass" if self.passed else "FAIL"
        return (f"maximality: {verdict} over {self.samples} sampled "
                f"subsolutions (worst excess {self.worst_excess:.3g}, "
                f"tolerance {self.tol:g})")


def maximality_probe(mg: MetricGraph, y: PointOnNetwork, samples: int,
                     rng: np.random.Generator, *, tol: float = 1e-6,
                     candidate: ValueField | None = None,
                     max_anchors: int = 4,
                     offset_range: tuple[float, float] = (0.0, 2.0),
                     ) -> MaximalityReport:
    """Sample subsolutions vanishing at y and compare them to S(y, .).

    Each sample applies the representation formula to random anchors with
    random offsets and shifts the result to vanish at y; the distance field
    from y must dominate every sample (it is itself included as sample 0, so
    a dented candidate is always caught).
    """
    net = mg.grid.network
    y = net._own(y)
    ext = mg.extended([y])
    ynode = ext.point_nodes[0]
    s_field = _dijkstra(ext.adjacency, ext.n_nodes, [(ynode, 0.0)])
    if candidate is None:
        cand = s_field
        compare_n = ext.n_nodes
    else:
        if candidate.grid.n_nodes != mg.grid.n_nodes:
            raise errors.GridMismatch("candidate lives on a different grid")
        cand = candidate.values
        compare_n = mg.grid.n_nodes

    worst = -math.inf
    worst_sample = None
    worst_node = None
    fields = [s_field]
    for _ in range(int(samples)):
        k = 1 + int(rng.integers(0, max_anchors))
        nodes = rng.integers(0, ext.n_nodes, size=k)
        offsets = rng.uniform(offset_range[0], offset_range[1], size=k)
        w = _dijkstra(ext.adjacency, ext.n_nodes,
                      list(zip(nodes.tolist(), offsets.tolist())))
        fields.append(w - w[ynode])
    for i, w in enumerate(fields):
        excess = w[:compare_n] - cand[:compare_n]
        node = int(np.argmax(excess))
        if excess[node] > worst:
            worst = float(excess[node])
            worst_sample = i
            worst_node = node
    return MaximalityReport(
        passed=worst <= tol,
        tol=float(tol),
        samples=len(fields),
        worst_excess=worst,
        worst_sample=worst_sample,
        worst_node=worst_node,
    )
