"""Command line interface.

Verbs: validate | solve | dist | check | oracle | convergence | stability |
compare | maximality.  Exit codes: 0 pass, 1 check or validation failure,
2 usage or parse error.  All commands are deterministic given the input
file, the flags, and the seed.  JSON is the canonical machine format (floats
round-trip bit-for-bit); CSV is a convenience projection printed with 17
significant digits.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import errors
from .dirichlet import check_compatibility, solve, strictness_data
from .hamiltonian import ConstantProfile, ProbeGrid, certify, p_plus
from .metric import ValueField, discretize, oracle_s, s_point_query
from .netfile import Problem, load_problem, parse_point
from .network import PointOnNetwork
from .numerics import adaptive_simpson
from .verify import maximality_probe, comparison_probe, stability_probe, sub_check, super_check

SOLUTION_FORMAT = "netkonal-solution"
#: committed calibration: viscosity checks on solver output pass at 5 * h
CHECK_TOL_FACTOR = 5.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: str
    mesh: float | None
    tol: float | None
    quad_tol: float
    seed: int
    fmt: str
    out: str | None
    threads: int

    def __post_init__(self):
        if self.mesh is not None and not self.mesh > 0.0:
            raise errors.ParseError(f"--mesh must be positive, got {self.mesh!r}")
        if self.tol is not None and not self.tol > 0.0:
            raise errors.ParseError(f"--tol must be positive, got {self.tol!r}")
        if not self.quad_tol > 0.0:
            raise errors.ParseError(f"--quad-tol must be positive, got {self.quad_tol!r}")
        if self.threads < 1:
            raise errors.ParseError(f"--threads must be >= 1, got {self.threads!r}")
        if self.fmt not in ("json", "csv"):
            raise errors.ParseError(f"--format must be json or csv, got {self.fmt!r}")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")


def _node_records(field: ValueField) -> list[dict]:
    grid = field.grid
    records = []
    for node in range(grid.n_nodes):
        kind, a, b = grid.node_location(node)
        value = float(field.values[node])
        if kind == "vertex":
            records.append({"node": node, "kind": "vertex", "id": a, "value": value})
        else:
            records.append({"node": node, "kind": "edge", "edge": a, "t": b,
                            "value": value})
    return records


def _solution_csv(field: ValueField) -> str:
    lines = ["node,kind,id,t,value"]
    for rec in _node_records(field):
        if rec["kind"] == "vertex":
            lines.append(f"{rec['node']},vertex,{rec['id']},,{_fmt(rec['value'])}")
        else:
            lines.append(
                f"{rec['node']},edge,{rec['edge']},{_fmt(rec['t'])},{_fmt(rec['value'])}"
            )
    return "\n".join(lines) + "\n"


def _anchor_exclusions(problem: Problem, grid) -> list[int]:
    """Grid nodes where the PDE is not required: segments holding anchors."""
    if problem.boundary is None:
        return []
    out: set[int] = set()
    for a in problem.boundary.anchors:
        p = a.point
        if p.is_vertex:
            out.add(grid.vertex_node(p.vertex))
            continue
        node = grid.locate(p)
        if node is not None:
            out.add(node)
            continue
        eg = grid.edges[p.edge]
        k = min(max(int(p.t / eg.delta), 0), eg.n_segments - 1)
        out.add(int(eg.node_ids[k]))
        out.add(int(eg.node_ids[k + 1]))
    return sorted(out)


# ---------------------------------------------------------------------------
# commands


def cmd_validate(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    net = problem.network
    print(f"network: {len(net.vertices)} vertices, {len(net.edges)} edges, "
          f"boundary {sorted(net.boundary_ids)}, "
          f"transition {sorted(net.transition_ids)}")
    probe = ProbeGrid(t_points=args.probe_t, p_points=args.probe_p,
                      p_max=args.p_max)
    report = certify(problem.hamiltonian, net, probe)
    print(report.summary())
    return 0 if report.ok else 1


def cmd_solve(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    g = problem.require_boundary()
    if cfg.mesh is None:
        raise errors.ParseError("solve requires --mesh")
    mg = discretize(problem.network, problem.hamiltonian, cfg.mesh)
    compat = check_compatibility(problem.network, problem.hamiltonian, g,
                                 cfg.mesh, mg=mg)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        field = solve(problem.network, problem.hamiltonian, g, cfg.mesh, mg=mg)
    notes = [str(w.message) for w in caught]
    for note in notes:
        print(f"warning: {note}", file=sys.stderr)
    print(compat.summary(), file=sys.stderr)
    if cfg.fmt == "csv":
        _emit(_solution_csv(field), cfg.out)
        return 0
    payload = {
        "format": SOLUTION_FORMAT,
        "input": cfg.input,
        "mesh": cfg.mesh,
        "compatibility": {
            "compatible": compat.compatible,
            "tolerance": compat.tolerance,
            "worst_margin": compat.worst_margin,
            "worst_pair": list(compat.worst_pair) if compat.worst_pair else None,
        },
        "warnings": notes,
        "nodes": _node_records(field),
    }
    _emit(json.dumps(payload, indent=1), cfg.out)
    return 0


def _load_solution(problem: Problem, path: str) -> tuple[ValueField, float]:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise errors.ParseError(f"{path}: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != SOLUTION_FORMAT:
        raise errors.ParseError(f"{path}: not a {SOLUTION_FORMAT} file")
    mesh = float(payload["mesh"])
    grid = discretize(problem.network, problem.hamiltonian, mesh).grid
    nodes = payload["nodes"]
    if len(nodes) != grid.n_nodes:
        raise errors.GridMismatch(
            f"solution has {len(nodes)} nodes, grid at mesh {mesh:g} has "
            f"{grid.n_nodes}"
        )
    values = np.empty(grid.n_nodes)
    for rec in nodes:
        node = int(rec["node"])
        kind, a, b = grid.node_location(node)
        if rec["kind"] != kind:
            raise errors.GridMismatch(f"node {node}: kind mismatch")
        if kind == "vertex" and rec["id"] != a:
            raise errors.GridMismatch(f"node {node}: vertex mismatch")
        if kind == "edge" and (rec["edge"] != a or float(rec["t"]) != b):
            raise errors.GridMismatch(f"node {node}: edge location mismatch")
        values[node] = float(rec["value"])
    return ValueField(grid, values), mesh


def cmd_check(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    field, mesh = _load_solution(problem, args.solution)
    tol = cfg.tol if cfg.tol is not None else CHECK_TOL_FACTOR * mesh
    exclude = _anchor_exclusions(problem, field.grid)
    sub = sub_check(field, problem.hamiltonian, tol, exclude=exclude)
    sup = super_check(field, problem.hamiltonian, tol, exclude=exclude)
    print(sub.summary())
    print(sup.summary())
    ok = sub.passed and sup.passed
    if not ok:
        for rep in (sub, sup):
            for v in rep.violations(field.grid)[:10]:
                print(f"  {v}")
    if cfg.out:
        payload = {
            "input": cfg.input,
            "solution": args.solution,
            "tolerance": tol,
            "sub": sub.to_json(field.grid),
            "super": sup.to_json(field.grid),
        }
        Path(cfg.out).write_text(json.dumps(payload, indent=1) + "\n")
    return 0 if ok else 1


def cmd_dist(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    if cfg.mesh is None:
        raise errors.ParseError("dist requires --mesh")
    net = problem.network
    y = parse_point(net, args.src)
    x = parse_point(net, args.dst)
    mg = discretize(net, problem.hamiltonian, cfg.mesh)
    value = s_point_query(mg, y, x)
    print(_fmt(value))
    return 0


def cmd_oracle(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    net = problem.network
    y = parse_point(net, args.src)
    x = parse_point(net, args.dst)
    exact = oracle_s(net, problem.hamiltonian, y, x, quad_tol=cfg.quad_tol)
    print(f"oracle   {_fmt(exact)}")
    if cfg.mesh is not None:
        mg = discretize(net, problem.hamiltonian, cfg.mesh)
        approx = s_point_query(mg, y, x)
        print(f"grid     {_fmt(approx)}")
        print(f"abs diff {_fmt(abs(approx - exact))}")
    return 0


def _constant_densities(problem: Problem) -> dict[str, float] | None:
    dens = {}
    for e in problem.network.edges:
        he = problem.hamiltonian.edge(e.id)
        if not isinstance(he.alpha, ConstantProfile):
            return None
        dens[e.id] = float(p_plus(he, 0.0))
    return dens


def _weighted_point_distance(net, dens: dict[str, float], y: PointOnNetwork,
                             x: PointOnNetwork) -> float:
    """Exact distance when the density is constant per edge (even families)."""
    import heapq

    y = net._own(y)
    x = net._own(x)
    if y == x:
        return 0.0
    best = math.inf
    if not y.is_vertex and not x.is_vertex and y.edge == x.edge:
        best = dens[y.edge] * abs(y.t - x.t)

    def ends(p):
        if p.is_vertex:
            return [(p.vertex, 0.0)]
        e = net.edge(p.edge)
        return [(e.tail, dens[p.edge] * p.t),
                (e.head, dens[p.edge] * (e.length - p.t))]

    for a, ca in ends(y):
        dist = {v.id: math.inf for v in net.vertices}
        dist[a] = 0.0
        heap = [(0.0, a)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for eid, w, length in net.adjacency[u]:
                nd = d + dens[eid] * length
                if nd < dist[w]:
                    dist[w] = nd
                    heapq.heappush(heap, (nd, w))
        for b, cb in ends(x):
            cand = ca + dist[b] + cb
            if cand < best:
                best = cand
    return best


def _single_edge_reference(problem: Problem):
    net = problem.network
    if len(net.edges) != 1:
        return None
    e = net.edges[0]
    he = problem.hamiltonian.edge(e.id)

    from .hamiltonian import p_minus as _p_minus

    def den_f(ts):
        return np.asarray(p_plus(he, ts), dtype=float)

    def den_b(ts):
        return -np.asarray(_p_minus(he, ts), dtype=float)

    def cost(t_from: float, t_to: float) -> float:
        if t_to >= t_from:
            return adaptive_simpson(den_f, t_from, t_to, tol=1e-12)
        return adaptive_simpson(den_b, t_to, t_from, tol=1e-12)

    g = problem.require_boundary()
    anchors: list[tuple[float, float]] = []
    for vid, val in g.vertex_values.items():
        anchors.append((0.0 if vid == e.tail else e.length, val))
    for a in g.anchors:
        anchors.append((a.point.t, a.value))

    def ref(point: PointOnNetwork) -> float:
        t = 0.0 if point.is_vertex and point.vertex == e.tail else (
            e.length if point.is_vertex else point.t)
        return min(val + cost(ta, t) for ta, val in anchors)

    return ref


def _reference_fn(problem: Problem, args):
    if args.reference is not None:
        ref_field, _ = _load_solution(problem, args.reference)
        return ref_field.at_point
    dens = _constant_densities(problem)
    if dens is not None:
        g = problem.require_boundary()
        net = problem.network
        anchors = [(net.vertex_point(vid), val)
                   for vid, val in g.vertex_values.items()]
        anchors += [(a.point, a.value) for a in g.anchors]

        def ref(point: PointOnNetwork) -> float:
            return min(val + _weighted_point_distance(net, dens, p, point)
                       for p, val in anchors)

        return ref
    single = _single_edge_reference(problem)
    if single is not None:
        return single
    raise errors.NoReference(
        "no closed-form reference for this problem; pass --reference with a "
        "fine-mesh solution file"
    )


def cmd_convergence(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    g = problem.require_boundary()
    try:
        h_list = [float(tok) for tok in args.h_list.split(",") if tok.strip()]
    except ValueError:
        raise errors.ParseError(f"bad --h-list {args.h_list!r}") from None
    if not h_list or any(h <= 0 for h in h_list):
        raise errors.ParseError("--h-list needs positive mesh widths")
    ref = _reference_fn(problem, args)
    rows = []
    prev_err = None
    for h in h_list:
        field = solve(problem.network, problem.hamiltonian, g, h)
        grid = field.grid
        err = max(
            abs(float(field.values[node]) - ref(grid.node_point(node)))
            for node in range(grid.n_nodes)
        )
        ratio = None if prev_err is None or err == 0.0 else prev_err / err
        rows.append((h, err, ratio))
        prev_err = err
    if cfg.fmt == "csv":
        lines = ["h,sup_error,ratio"]
        for h, err, ratio in rows:
            lines.append(f"{_fmt(h)},{_fmt(err)},"
                         f"{'' if ratio is None else _fmt(ratio)}")
        _emit("\n".join(lines), cfg.out)
    else:
        payload = {"input": cfg.input, "rows": [
            {"h": h, "sup_error": err, "ratio": ratio} for h, err, ratio in rows
        ]}
        _emit(json.dumps(payload, indent=1), cfg.out)
    if args.plot:
        lines = ["# h sup_error"]
        lines += [f"{_fmt(h)} {_fmt(err)}" for h, err, _ in rows]
        Path(args.plot).write_text("\n".join(lines) + "\n")
    return 0


def cmd_stability(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    g = problem.require_boundary()
    if cfg.mesh is None:
        raise errors.ParseError("stability requires --mesh")
    n_values = []
    n = 1
    while n <= args.n_max:
        n_values.append(n)
        n *= 2
    report = stability_probe(problem.network, problem.hamiltonian, g,
                             cfg.mesh, n_values)
    if cfg.fmt == "csv":
        lines = ["n,sup_gap"]
        lines += [f"{n},{_fmt(gap)}" for n, gap in report.rows]
        _emit("\n".join(lines), cfg.out)
    else:
        payload = {"input": cfg.input,
                   "rows": [{"n": n, "sup_gap": gap} for n, gap in report.rows]}
        _emit(json.dumps(payload, indent=1), cfg.out)
    if args.plot:
        lines = ["# n sup_gap"]
        lines += [f"{n} {_fmt(gap)}" for n, gap in report.rows]
        Path(args.plot).write_text("\n".join(lines) + "\n")
    return 0


def cmd_compare(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    g = problem.require_boundary()
    if cfg.mesh is None:
        raise errors.ParseError("compare requires --mesh")
    try:
        thetas = [float(tok) for tok in args.theta.split(",") if tok.strip()]
    except ValueError:
        raise errors.ParseError(f"bad --theta {args.theta!r}") from None
    if any(not 0.0 < t < 1.0 for t in thetas):
        raise errors.ParseError("--theta values must lie strictly in (0, 1)")
    mg = discretize(problem.network, problem.hamiltonian, cfg.mesh)
    v = solve(problem.network, problem.hamiltonian, g, cfg.mesh, mg=mg)
    strict = strictness_data(mg, args.eps_k)
    check_tol = cfg.tol if cfg.tol is not None else CHECK_TOL_FACTOR * cfg.mesh
    anchor_nodes = sorted(
        {mg.grid.vertex_node(vid) for vid in g.vertex_values}
        | set(int(i) for i in strict.zero_nodes)
        | set(_anchor_exclusions(problem, mg.grid))
    )
    floor = min(min(g.vertex_values.values()),
                min((a.value for a in g.anchors), default=math.inf))
    ok = True
    for theta in thetas:
        u_theta = ValueField(mg.grid, theta * v.values + (1.0 - theta) * floor)
        margin = ValueField(mg.grid, (1.0 - theta) * strict.margin.values)
        report = comparison_probe(u_theta, v, problem.hamiltonian, margin,
                                  anchor_nodes, check_tol=check_tol)
        print(f"theta={theta:g}: {report.summary()}")
        ok = ok and report.passed
    return 0 if ok else 1


def cmd_maximality(cfg: RunConfig, args) -> int:
    problem = load_problem(cfg.input)
    if cfg.mesh is None:
        raise errors.ParseError("maximality requires --mesh")
    net = problem.network
    if args.point is not None:
        y = parse_point(net, args.point)
    else:
        y = net.vertex_point(sorted(net.boundary_ids)[0])
    mg = discretize(net, problem.hamiltonian, cfg.mesh)
    rng = np.random.default_rng(cfg.seed)
    report = maximality_probe(mg, y, args.samples, rng,
                              tol=cfg.tol if cfg.tol is not None else 1e-6)
    print(f"base point {y.describe()}: {report.summary()}")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="problem description file")
    p.add_argument("--mesh", type=float, default=None, help="grid mesh width h")
    p.add_argument("--tol", type=float, default=None, help="check tolerance")
    p.add_argument("--quad-tol", type=float, default=1e-10,
                   help="adaptive quadrature tolerance")
    p.add_argument("--seed", type=int, default=0, help="PRNG seed")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   dest="fmt", help="output format")
    p.add_argument("--out", default=None, help="write output to this path")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (output is identical for any value)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netkonal",
        description="Eikonal Hamilton-Jacobi equations on metric networks: "
                    "solve Dirichlet problems, query the induced distance, "
                    "and certify viscosity conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate topology and Hamiltonian")
    _add_common(p)
    p.add_argument("--probe-t", type=int, default=33,
                   help="certification samples along each edge")
    p.add_argument("--probe-p", type=int, default=33,
                   help="certification samples in momentum")
    p.add_argument("--p-max", type=float, default=8.0,
                   help="certification momentum range")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("solve", help="solve the Dirichlet problem")
    _add_common(p)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("dist", help="distance between two points")
    _add_common(p)
    p.add_argument("--from", dest="src", required=True,
                   help="source point: vertex id or edge@t")
    p.add_argument("--to", dest="dst", required=True, help="target point")
    p.set_defaults(fn=cmd_dist)

    p = sub.add_parser("check", help="verify a solution file")
    _add_common(p)
    p.add_argument("solution", help="solution file written by solve")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("oracle", help="brute-force distance oracle")
    _add_common(p)
    p.add_argument("--from", dest="src", required=True)
    p.add_argument("--to", dest="dst", required=True)
    p.set_defaults(fn=cmd_oracle)

    p = sub.add_parser("convergence", help="mesh refinement error table")
    _add_common(p)
    p.add_argument("--h-list", required=True,
                   help="comma-separated mesh widths, coarse to fine")
    p.add_argument("--reference", default=None,
                   help="fine-mesh solution file used as reference")
    p.add_argument("--plot", default=None,
                   help="write a gnuplot-compatible data file")
    p.set_defaults(fn=cmd_convergence)

    p = sub.add_parser("stability", help="perturbed-cost convergence table")
    _add_common(p)
    p.add_argument("--n-max", type=int, default=64,
                   help="largest n in the 1/n cost shift sequence")
    p.add_argument("--plot", default=None,
                   help="write a gnuplot-compatible data file")
    p.set_defaults(fn=cmd_stability)

    p = sub.add_parser("compare", help="strict subsolution comparison probe")
    _add_common(p)
    p.add_argument("--theta", default="0.5,0.9,0.99",
                   help="comma-separated blend factors in (0, 1)")
    p.add_argument("--eps-k", type=float, default=0.0,
                   help="cost threshold defining the vanishing set")
    p.set_defaults(fn=cmd_compare)

    p = sub.add_parser("maximality", help="random subsolution domination probe")
    _add_common(p)
    p.add_argument("--point", default=None,
                   help="base point (default: first boundary vertex)")
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(fn=cmd_maximality)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(
            command=args.command,
            input=args.input,
            mesh=args.mesh,
            tol=args.tol,
            quad_tol=args.quad_tol,
            seed=args.seed,
            fmt=args.fmt,
            out=args.out,
            threads=args.threads,
        )
        return args.fn(cfg, args)
    except (errors.ParseError, errors.NoReference) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except errors.NetkonalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
