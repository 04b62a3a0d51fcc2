"""Per-edge Hamiltonians of eikonal type and their derived quantities.

An edge Hamiltonian H(t, p) must be continuous, convex and coercive in the
momentum p, continuous and even in p at vertices, and must satisfy
H(t, 0) <= 0 everywhere so that the sublevel interval {p : H(t, p) <= 0}
always contains 0.  Its endpoints are the directional metric densities: the
per-unit-length cost of moving forward (p_plus) or backward (-p_minus) along
the edge.  The Lagrangian is the convex conjugate sup_p {p q - H(t, p)}.

Built-in families: the quadratic eikonal H = p^2 - alpha(t) and the power
eikonal H = |p|^m - alpha(t) with m > 1.  Custom evaluators are accepted but
must pass :func:`certify` before being fed to the metric layer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from . import errors
from .network import Network
from .numerics import golden_max, sublevel_boundary

#: tolerance for the vertex continuity/evenness certification checks
VERTEX_TOL = 1e-9
#: cost profiles must agree across edges at a shared vertex to this tolerance
ALPHA_VERTEX_TOL = 1e-12


def _scalarize(t, out):
    out = np.asarray(out, dtype=float)
    if np.ndim(t) == 0 and out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class ConstantProfile:
    """alpha(t) = value."""

    value: float

    def __post_init__(self):
        if not (self.value >= 0.0):
            raise ValueError(f"cost profile must be nonnegative, got {self.value!r}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalarize(t, np.full(t.shape, self.value))

    def bounds_on(self, length: float) -> tuple[float, float]:
        return self.value, self.value


@dataclass(frozen=True)
class LinearProfile:
    """alpha(t) = offset + slope * t."""

    offset: float
    slope: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalarize(t, self.offset + self.slope * t)

    def bounds_on(self, length: float) -> tuple[float, float]:
        ends = (self.offset, self.offset + self.slope * length)
        return min(ends), max(ends)


@dataclass(frozen=True)
class SampledProfile:
    """Piecewise-linear interpolation of (t, value) breakpoints."""

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.breakpoints) != len(self.values) or len(self.breakpoints) < 2:
            raise ValueError("sampled profile needs >= 2 aligned breakpoints")
        if any(nxt <= prev for prev, nxt in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("sampled profile breakpoints must increase strictly")
        if any(v < 0.0 for v in self.values):
            raise ValueError("cost profile must be nonnegative")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return _scalarize(t, np.interp(t, self.breakpoints, self.values))

    def bounds_on(self, length: float) -> tuple[float, float]:
        return min(self.values), max(self.values)

    def spans(self, length: float, tol: float = 1e-9) -> bool:
        return abs(self.breakpoints[0]) <= tol and abs(self.breakpoints[-1] - length) <= tol


CostProfile = ConstantProfile | LinearProfile | SampledProfile


def as_profile(alpha) -> Callable:
    """Coerce scalars to constant profiles; pass callables through."""
    if isinstance(alpha, (int, float)):
        return ConstantProfile(float(alpha))
    if callable(alpha):
        return alpha
    raise TypeError(f"cannot interpret cost profile {alpha!r}")


def _validate_profile(profile, edge_id: str, length: float) -> None:
    if isinstance(profile, SampledProfile) and not profile.spans(length):
        raise ValueError(
            f"sampled profile on edge {edge_id!r} must cover [0, {length!r}]"
        )
    if hasattr(profile, "bounds_on"):
        low, _ = profile.bounds_on(length)
        if low < 0.0:
            raise ValueError(
                f"cost profile on edge {edge_id!r} is negative (min {low!r})"
            )


@dataclass(frozen=True)
class EdgeHamiltonian:
    """Evaluator H(t, p) on one edge, with family metadata.

    ``evaluate`` must accept numpy arrays for both arguments and operate
    elementwise.  ``even_in_p`` marks global evenness in p, which unlocks a
    closed-form for interval minimization in the viscosity checks.
    """

    edge_id: str
    length: float
    evaluate: Callable = field(compare=False)
    family: str = "custom"
    alpha: Callable | None = field(default=None, compare=False)
    power: float | None = None
    even_in_p: bool = False

    def at_vertex_param(self, is_tail: bool) -> float:
        return 0.0 if is_tail else self.length


@dataclass(frozen=True)
class NetworkHamiltonian:
    """One :class:`EdgeHamiltonian` per edge of a network."""

    per_edge: Mapping[str, EdgeHamiltonian]

    def edge(self, edge_id: str) -> EdgeHamiltonian:
        try:
            return self.per_edge[edge_id]
        except KeyError:
            raise errors.UnknownEdge(f"no Hamiltonian for edge {edge_id!r}") from None

    @property
    def families(self) -> frozenset[str]:
        return frozenset(h.family for h in self.per_edge.values())

    def has_cost_profiles(self) -> bool:
        return all(h.alpha is not None for h in self.per_edge.values())


def _alpha_map(net: Network, alpha) -> dict[str, Callable]:
    if isinstance(alpha, Mapping):
        out = {}
        for e in net.edges:
            if e.id not in alpha:
                raise errors.UnknownEdge(f"no cost profile for edge {e.id!r}")
            out[e.id] = as_profile(alpha[e.id])
        return out
    prof = as_profile(alpha)
    return {e.id: prof for e in net.edges}


def quadratic_eikonal(net: Network, alpha=1.0) -> NetworkHamiltonian:
    """H = p^2 - alpha(t) on every edge.

    ``alpha`` may be a scalar, a profile/callable, or a mapping edge id ->
    profile.  Callables must be vectorized over t.
    """
    profiles = _alpha_map(net, alpha)
    per = {}
    for e in net.edges:
        prof = profiles[e.id]
        _validate_profile(prof, e.id, e.length)
        per[e.id] = EdgeHamiltonian(
            edge_id=e.id,
            length=e.length,
            evaluate=_quadratic_eval(prof),
            family="quadratic-eikonal",
            alpha=prof,
            even_in_p=True,
        )
    return NetworkHamiltonian(per)


def power_eikonal(net: Network, alpha=1.0, power: float = 3.0) -> NetworkHamiltonian:
    """H = |p|^m - alpha(t) with exponent m > 1 on every edge."""
    m = float(power)
    if not m > 1.0:
        raise ValueError(f"power exponent must exceed 1, got {m!r}")
    profiles = _alpha_map(net, alpha)
    per = {}
    for e in net.edges:
        prof = profiles[e.id]
        _validate_profile(prof, e.id, e.length)
        per[e.id] = EdgeHamiltonian(
            edge_id=e.id,
            length=e.length,
            evaluate=_power_eval(prof, m),
            family="power-eikonal",
            alpha=prof,
            power=m,
            even_in_p=True,
        )
    return NetworkHamiltonian(per)


def custom_hamiltonian(
    net: Network,
    evaluators: Mapping[str, Callable] | Callable,
    *,
    even_in_p: bool = False,
    vectorized: bool = True,
) -> NetworkHamiltonian:
    """Wrap user evaluators H(t, p); run :func:`certify` before solving."""
    per = {}
    for e in net.edges:
        fn = evaluators[e.id] if isinstance(evaluators, Mapping) else evaluators
        if not vectorized:
            fn = np.vectorize(fn, otypes=[float])
        per[e.id] = EdgeHamiltonian(
            edge_id=e.id, length=e.length, evaluate=fn,
            family="custom", even_in_p=even_in_p,
        )
    return NetworkHamiltonian(per)


def _quadratic_eval(prof):
    def ev(t, p):
        t = np.asarray(t, dtype=float)
        p = np.asarray(p, dtype=float)
        out = p * p - np.asarray(prof(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    return ev


def _power_eval(prof, m):
    def ev(t, p):
        t = np.asarray(t, dtype=float)
        p = np.asarray(p, dtype=float)
        out = np.abs(p) ** m - np.asarray(prof(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    return ev


# ---------------------------------------------------------------------------
# certification


@dataclass(frozen=True)
class ProbeGrid:
    """Sampling resolutions for :func:`certify`."""

    t_points: int = 33
    p_points: int = 33
    p_max: float = 8.0
    vertex_tol: float = VERTEX_TOL
    convexity_tol: float = 1e-9
    zero_tol: float = 1e-12
    coercive_limit: float = 1e9

    def __post_init__(self):
        if self.t_points < 3 or self.p_points < 3:
            raise ValueError("probe grids need at least 3 points per axis")

    def p_grid(self) -> np.ndarray:
        n = self.p_points if self.p_points % 2 == 1 else self.p_points + 1
        return np.linspace(-self.p_max, self.p_max, n)


@dataclass(frozen=True)
class CertViolation:
    condition: str
    location: str
    witness: tuple[float, float]
    detail: str

    def __str__(self) -> str:
        t, p = self.witness
        return (f"{self.condition} violated at {self.location} "
                f"(t={t:.6g}, p={p:.6g}): {self.detail}")


@dataclass(frozen=True)
class CertificationReport:
    ok: bool
    violations: tuple[CertViolation, ...]

    @property
    def first(self) -> CertViolation | None:
        return self.violations[0] if self.violations else None

    def summary(self) -> str:
        if self.ok:
            return "hamiltonian certification: pass"
        lines = ["hamiltonian certification: FAIL"]
        lines += [f"  - {v}" for v in self.violations]
        return "\n".join(lines)


def certify(H: NetworkHamiltonian, net: Network,
            probe: ProbeGrid = ProbeGrid()) -> CertificationReport:
    """Sample-based check of the structural restrictions on H.

    Per edge: finite values, midpoint convexity in p, H(t, 0) <= 0, and
    coercive growth within the bracket limit.  Per vertex: agreement of all
    incident edge Hamiltonians (continuity across the junction) and evenness
    in p (independence of edge orientation).  Violations are reported with a
    witness point rather than raised.
    """
    out: list[CertViolation] = []
    pg = probe.p_grid()
    for e in net.edges:
        he = H.edge(e.id)
        ts = np.linspace(0.0, e.length, probe.t_points)
        tt, pp = np.meshgrid(ts, pg, indexing="ij")
        vals = np.asarray(he.evaluate(tt, pp), dtype=float)
        if not np.all(np.isfinite(vals)):
            i, j = np.argwhere(~np.isfinite(vals))[0]
            out.append(CertViolation(
                "continuity", f"edge {e.id}", (float(ts[i]), float(pg[j])),
                "non-finite value",
            ))
            continue
        mid_excess = vals[:, 1:-1] - 0.5 * (vals[:, :-2] + vals[:, 2:])
        if np.any(mid_excess > probe.convexity_tol):
            i, j = np.argwhere(mid_excess > probe.convexity_tol)[0]
            out.append(CertViolation(
                "convexity", f"edge {e.id}", (float(ts[i]), float(pg[j + 1])),
                f"midpoint excess {float(mid_excess[i, j]):.3g}",
            ))
        zero = np.asarray(he.evaluate(ts, np.zeros_like(ts)), dtype=float)
        if np.any(zero > probe.zero_tol):
            i = int(np.argmax(zero))
            out.append(CertViolation(
                "zero-level", f"edge {e.id}", (float(ts[i]), 0.0),
                f"H(t, 0) = {float(zero[i]):.3g} > 0: no nonnegative cost density",
            ))
        big = max(1.0, probe.p_max)
        while True:
            lowest = np.minimum(
                np.asarray(he.evaluate(ts, np.full_like(ts, big)), dtype=float),
                np.asarray(he.evaluate(ts, np.full_like(ts, -big)), dtype=float),
            )
            if np.all(lowest > 0.0):
                break
            if big >= probe.coercive_limit:
                i = int(np.argmin(lowest))
                out.append(CertViolation(
                    "coercivity", f"edge {e.id}", (float(ts[i]), big),
                    f"H still <= 0 at |p| = {big:.3g}",
                ))
                break
            big *= 2.0

    for v in net.vertices:
        inc = sorted(net.incident_edges(v.id))
        rows = {}
        for eid in inc:
            he = H.edge(eid)
            tv = he.at_vertex_param(net.edge(eid).tail == v.id)
            rows[eid] = np.asarray(he.evaluate(np.full_like(pg, tv), pg), dtype=float)
        if len(inc) > 1:
            ref = rows[inc[0]]
            for eid in inc[1:]:
                diff = np.abs(rows[eid] - ref)
                worst = int(np.argmax(diff))
                if diff[worst] > probe.vertex_tol:
                    out.append(CertViolation(
                        "vertex-continuity", f"vertex {v.id}",
                        (0.0, float(pg[worst])),
                        f"edges {inc[0]} and {eid} differ by {float(diff[worst]):.3g}",
                    ))
        for eid in inc:
            diff = np.abs(rows[eid] - rows[eid][::-1])
            worst = int(np.argmax(diff))
            if diff[worst] > probe.vertex_tol:
                out.append(CertViolation(
                    "vertex-evenness", f"vertex {v.id}",
                    (0.0, float(pg[worst])),
                    f"edge {eid}: H(v, p) vs H(v, -p) differ by {float(diff[worst]):.3g}",
                ))
    return CertificationReport(ok=not out, violations=tuple(out))


# ---------------------------------------------------------------------------
# densities, Lagrangian, vertex profile


def p_plus(He: EdgeHamiltonian, t):
    """max{p : H(t, p) <= 0}, elementwise over t.

    Expands a power-of-two bracket until the sign changes, bisects to 1e-12
    and polishes with guarded secant steps.  Raises
    :class:`~netkonal.errors.BracketOverflow` if no sign change occurs before
    |p| reaches 1e9.
    """
    tarr = np.asarray(t, dtype=float)
    zero = np.asarray(He.evaluate(tarr, np.zeros_like(tarr)), dtype=float)
    if np.any(zero > 1e-9):
        raise errors.UncertifiedHamiltonian(
            f"H(t, 0) > 0 on edge {He.edge_id!r}; zero-level restriction violated"
        )
    try:
        root = sublevel_boundary(lambda p: He.evaluate(tarr, p), tarr.shape)
    except errors.BracketOverflow as exc:
        raise errors.BracketOverflow(f"edge {He.edge_id!r}: {exc}") from None
    return _scalarize(t, root)


def p_minus(He: EdgeHamiltonian, t):
    """min{p : H(t, p) <= 0}, elementwise over t (nonpositive)."""
    tarr = np.asarray(t, dtype=float)
    zero = np.asarray(He.evaluate(tarr, np.zeros_like(tarr)), dtype=float)
    if np.any(zero > 1e-9):
        raise errors.UncertifiedHamiltonian(
            f"H(t, 0) > 0 on edge {He.edge_id!r}; zero-level restriction violated"
        )
    try:
        root = sublevel_boundary(lambda p: He.evaluate(tarr, -p), tarr.shape)
    except errors.BracketOverflow as exc:
        raise errors.BracketOverflow(f"edge {He.edge_id!r}: {exc}") from None
    return _scalarize(t, -root + 0.0)


def legendre(He: EdgeHamiltonian, t: float, q: float) -> float:
    """Convex conjugate L(t, q) = sup_p {p q - H(t, p)}.

    Golden-section search over an expanding bracket; raises BracketOverflow
    when the supremum keeps growing (the conjugate is infinite there, which
    coercivity alone does not exclude for sublinear growth).
    """
    t = float(t)
    q = float(q)

    def phi(p: float) -> float:
        return p * q - float(He.evaluate(t, p))

    phi0 = phi(0.0)
    radius = 1.0
    while not (phi(-radius) < phi0 and phi(radius) < phi0):
        radius *= 2.0
        if radius > 1e9:
            raise errors.BracketOverflow(
                f"edge {He.edge_id!r}: conjugate unbounded for q={q:g}"
            )
    _, val = golden_max(phi, -radius, radius, tol=1e-10)
    return max(val, phi0)


@dataclass(frozen=True)
class VertexProfile:
    """Momentum profile h(p) = H(v, p) at one vertex.

    Well defined independently of the incident edge by the vertex-continuity
    certification; even in p by the evenness certification.
    """

    vertex_id: str
    edge_id: str
    _fn: Callable = field(compare=False)

    def __call__(self, p):
        return self._fn(p)


def vertex_profile(H: NetworkHamiltonian, net: Network, vertex_id: str) -> VertexProfile:
    """Single-variable evaluator of H at a vertex through its first edge."""
    inc = sorted(net.incident_edges(vertex_id))
    eid = inc[0]
    he = H.edge(eid)
    tv = he.at_vertex_param(net.edge(eid).tail == vertex_id)

    def fn(p):
        parr = np.asarray(p, dtype=float)
        out = he.evaluate(np.full(parr.shape, tv), parr)
        return _scalarize(p, out)

    return VertexProfile(vertex_id=vertex_id, edge_id=eid, _fn=fn)
