"""Problem description files.

YAML (or JSON, which YAML subsumes) with the schema::

    vertices:                  # required
      - id: c                  # or the bare string "c"
        coords: [0.0, 1.0]     # optional metadata, never validated
    edges:                     # required
      - {id: e1, tail: c, head: b1, length: 1.0, alpha: {constant: 1.0}}
      # alpha is one of {constant: c} | {linear: [a, b]} | {samples: [[t, v], ...]}
      # and defaults to {constant: 1.0}
    boundary: [b1, b2]         # required, nonempty
    boundary_data: {b1: 0.0}   # optional; required by solve-like commands
    anchors:                   # optional interior data points
      - {edge: e1, t: 0.5, g: 0.2}
    hamiltonian:               # optional
      family: quadratic        # or "power"
      power: 3.0               # only for the power family

Unknown keys are rejected at every level.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from . import errors
from .dirichlet import BoundaryData, boundary_data
from .hamiltonian import (
    ConstantProfile,
    LinearProfile,
    NetworkHamiltonian,
    SampledProfile,
    power_eikonal,
    quadratic_eikonal,
)
from .network import Network, PointOnNetwork, build_network

_TOP_KEYS = {"vertices", "edges", "boundary", "boundary_data", "anchors", "hamiltonian"}
_VERTEX_KEYS = {"id", "coords"}
_EDGE_KEYS = {"id", "tail", "head", "length", "alpha"}
_ANCHOR_KEYS = {"edge", "t", "g"}
_HAMILTONIAN_KEYS = {"family", "power"}
_ALPHA_KEYS = {"constant", "linear", "samples"}


@dataclass(frozen=True)
class Problem:
    """A parsed problem: topology, Hamiltonian, and optional Dirichlet data."""

    network: Network
    hamiltonian: NetworkHamiltonian
    boundary: BoundaryData | None
    path: str | None = None

    def require_boundary(self) -> BoundaryData:
        if self.boundary is None:
            raise errors.MissingBoundaryData(
                "this operation needs boundary_data in the problem file"
            )
        return self.boundary


def _reject_unknown(rec: Mapping, allowed: set[str], where: str) -> None:
    unknown = sorted(set(rec) - allowed)
    if unknown:
        raise errors.ParseError(f"{where}: unknown key(s) {unknown}")


def _require(rec: Mapping, key: str, where: str) -> Any:
    if key not in rec:
        raise errors.ParseError(f"{where}: missing required key {key!r}")
    return rec[key]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise errors.ParseError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _parse_alpha(spec: Any, where: str):
    if spec is None:
        return ConstantProfile(1.0)
    if not isinstance(spec, Mapping) or len(spec) != 1:
        raise errors.ParseError(
            f"{where}: alpha must be one of {sorted(_ALPHA_KEYS)} (exactly one key)"
        )
    kind, payload = next(iter(spec.items()))
    try:
        if kind == "constant":
            return ConstantProfile(_number(payload, where))
        if kind == "linear":
            if not isinstance(payload, (list, tuple)) or len(payload) != 2:
                raise errors.ParseError(f"{where}: linear alpha needs [offset, slope]")
            return LinearProfile(_number(payload[0], where), _number(payload[1], where))
        if kind == "samples":
            if not isinstance(payload, (list, tuple)) or len(payload) < 2:
                raise errors.ParseError(f"{where}: samples alpha needs >= 2 pairs")
            ts = tuple(_number(p[0], where) for p in payload)
            vs = tuple(_number(p[1], where) for p in payload)
            return SampledProfile(ts, vs)
    except ValueError as exc:
        raise errors.ParseError(f"{where}: {exc}") from None
    raise errors.ParseError(f"{where}: unknown alpha kind {kind!r}")


def parse_problem(doc: Any, *, path: str | None = None) -> Problem:
    """Validate a parsed mapping against the schema and build the problem."""
    if not isinstance(doc, Mapping):
        raise errors.ParseError("problem file must be a key/value mapping")
    _reject_unknown(doc, _TOP_KEYS, "top level")
    raw_vertices = _require(doc, "vertices", "top level")
    raw_edges = _require(doc, "edges", "top level")
    raw_boundary = _require(doc, "boundary", "top level")
    if not isinstance(raw_vertices, list) or not isinstance(raw_edges, list):
        raise errors.ParseError("vertices and edges must be lists")
    if not isinstance(raw_boundary, list):
        raise errors.ParseError("boundary must be a list of vertex ids")

    vertices = []
    for i, rec in enumerate(raw_vertices):
        where = f"vertices[{i}]"
        if isinstance(rec, str):
            vertices.append(rec)
            continue
        if not isinstance(rec, Mapping):
            raise errors.ParseError(f"{where}: expected an id or a mapping")
        _reject_unknown(rec, _VERTEX_KEYS, where)
        vid = str(_require(rec, "id", where))
        coords = rec.get("coords")
        if coords is not None:
            coords = [_number(c, f"{where}.coords") for c in coords]
        vertices.append({"id": vid, "coords": coords})

    edges = []
    alphas = {}
    for i, rec in enumerate(raw_edges):
        where = f"edges[{i}]"
        if not isinstance(rec, Mapping):
            raise errors.ParseError(f"{where}: expected a mapping")
        _reject_unknown(rec, _EDGE_KEYS, where)
        eid = str(_require(rec, "id", where))
        edges.append({
            "id": eid,
            "tail": str(_require(rec, "tail", where)),
            "head": str(_require(rec, "head", where)),
            "length": _number(_require(rec, "length", where), f"{where}.length"),
        })
        alphas[eid] = _parse_alpha(rec.get("alpha"), f"{where}.alpha")

    net = build_network(vertices=vertices, edges=edges,
                        boundary=[str(b) for b in raw_boundary])

    ham_spec = doc.get("hamiltonian") or {}
    if not isinstance(ham_spec, Mapping):
        raise errors.ParseError("hamiltonian must be a mapping")
    _reject_unknown(ham_spec, _HAMILTONIAN_KEYS, "hamiltonian")
    family = str(ham_spec.get("family", "quadratic"))
    if family == "quadratic":
        if "power" in ham_spec:
            raise errors.ParseError("hamiltonian.power is only for the power family")
        H = quadratic_eikonal(net, alphas)
    elif family == "power":
        power = _number(ham_spec.get("power", 3.0), "hamiltonian.power")
        try:
            H = power_eikonal(net, alphas, power=power)
        except ValueError as exc:
            raise errors.ParseError(f"hamiltonian: {exc}") from None
    else:
        raise errors.ParseError(
            f"hamiltonian.family must be 'quadratic' or 'power', got {family!r}"
        )

    bdata = None
    raw_g = doc.get("boundary_data")
    raw_anchors = doc.get("anchors") or []
    if raw_g is not None or raw_anchors:
        if raw_g is None:
            raise errors.ParseError("anchors require boundary_data")
        if not isinstance(raw_g, Mapping):
            raise errors.ParseError("boundary_data must map vertex ids to numbers")
        values = {str(k): _number(v, f"boundary_data[{k!r}]")
                  for k, v in raw_g.items()}
        anchors = []
        if not isinstance(raw_anchors, list):
            raise errors.ParseError("anchors must be a list")
        for i, rec in enumerate(raw_anchors):
            where = f"anchors[{i}]"
            if not isinstance(rec, Mapping):
                raise errors.ParseError(f"{where}: expected a mapping")
            _reject_unknown(rec, _ANCHOR_KEYS, where)
            anchors.append((
                str(_require(rec, "edge", where)),
                _number(_require(rec, "t", where), f"{where}.t"),
                _number(_require(rec, "g", where), f"{where}.g"),
            ))
        bdata = boundary_data(net, values, anchors)

    return Problem(network=net, hamiltonian=H, boundary=bdata, path=path)


def load_problem(path: str | Path) -> Problem:
    """Parse a problem file, wrapping YAML errors with file context."""
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise errors.ParseError(f"{path}: {exc}") from None
    return parse_problem(doc, path=str(path))


def _dump_alpha(profile) -> dict:
    if isinstance(profile, ConstantProfile):
        return {"constant": profile.value}
    if isinstance(profile, LinearProfile):
        return {"linear": [profile.offset, profile.slope]}
    if isinstance(profile, SampledProfile):
        return {"samples": [[t, v] for t, v in zip(profile.breakpoints, profile.values)]}
    raise TypeError(f"cost profile {profile!r} has no file representation")


def dump_problem(problem: Problem, path: str | Path) -> None:
    """Write a problem back to a file (profiles must be serializable)."""
    net = problem.network
    doc: dict[str, Any] = {
        "vertices": [
            {"id": v.id, "coords": list(v.coords)} if v.coords is not None else v.id
            for v in net.vertices
        ],
        "edges": [
            {
                "id": e.id,
                "tail": e.tail,
                "head": e.head,
                "length": e.length,
                "alpha": _dump_alpha(problem.hamiltonian.edge(e.id).alpha),
            }
            for e in net.edges
        ],
        "boundary": sorted(net.boundary_ids),
    }
    families = problem.hamiltonian.families
    if families == {"power-eikonal"}:
        doc["hamiltonian"] = {
            "family": "power",
            "power": next(iter(problem.hamiltonian.per_edge.values())).power,
        }
    if problem.boundary is not None:
        doc["boundary_data"] = dict(problem.boundary.vertex_values)
        if problem.boundary.anchors:
            doc["anchors"] = [
                {"edge": a.point.edge, "t": a.point.t, "g": a.value}
                for a in problem.boundary.anchors
            ]
    Path(path).write_text(yaml.safe_dump(doc, sort_keys=False))


def parse_point(net: Network, text: str) -> PointOnNetwork:
    """Parse 'vertexid' or 'edgeid@t' into a canonical point."""
    text = text.strip()
    if "@" in text:
        eid, _, raw_t = text.partition("@")
        try:
            t = float(raw_t)
        except ValueError:
            raise errors.InvalidPoint(f"bad arclength in point {text!r}") from None
        return net.point(eid, t)
    if net.has_vertex(text):
        return net.vertex_point(text)
    raise errors.InvalidPoint(
        f"point {text!r} is neither a vertex id nor of the form edge@t"
    )
