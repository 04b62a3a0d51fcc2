import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netkonal import (
    DiscretizedNetwork,
    build_network,
    discretize,
    errors,
    oracle_s,
    quadratic_eikonal,
    s_distance,
    s_point_query,
)
from netkonal.sampling import random_network, random_quadratic


def test_grid_segment_counts(unit_edge):
    grid = DiscretizedNetwork(unit_edge, 0.25)
    assert grid.edges["e"].n_segments == 4
    # guard against float fuzz: 1 / 0.1 must give 10 segments, not 11
    grid = DiscretizedNetwork(unit_edge, 0.1)
    assert grid.edges["e"].n_segments == 10
    assert 0.5 in grid.edges["e"].t
    # h >= length collapses to a single segment
    grid = DiscretizedNetwork(unit_edge, 5.0)
    assert grid.edges["e"].n_segments == 1


def test_grid_shares_vertex_nodes(y_network):
    grid = DiscretizedNetwork(y_network, 0.5)
    for eid in ("e1", "e2", "e3"):
        assert grid.edges[eid].node_ids[0] == grid.vertex_node("c")
    assert grid.n_nodes == 4 + 1 + 1 + 3  # vertices + interior nodes


def test_constant_density_costs(unit_edge):
    H = quadratic_eikonal(unit_edge, 1.0)
    mg = discretize(unit_edge, H, 0.25)
    np.testing.assert_array_equal(mg.forward_cost["e"], [0.25] * 4)
    np.testing.assert_array_equal(mg.backward_cost["e"], [0.25] * 4)


def test_curved_density_costs(unit_edge):
    # alpha = (1+t)^2 has density 1 + t; exact integrals over halves
    H = quadratic_eikonal(unit_edge, lambda t: (1.0 + t) ** 2)
    mg = discretize(unit_edge, H, 0.5)
    np.testing.assert_allclose(mg.forward_cost["e"], [0.625, 0.875], atol=1e-14)
    np.testing.assert_allclose(mg.backward_cost["e"], [0.625, 0.875], atol=1e-14)


def test_arc_costs_nonnegative(rng):
    net = random_network(rng)
    mg = discretize(net, random_quadratic(rng, net), 0.1)
    assert all(c >= 0.0 for _, _, c in mg.arcs())


def test_s_distance_examples(unit_edge, y_network, y_ham):
    H = quadratic_eikonal(unit_edge, 1.0)
    mg = discretize(unit_edge, H, 0.25)
    field = s_distance(mg, [(unit_edge.vertex_point("v0"), 0.0)])
    assert field.values[mg.grid.vertex_node("v1")] == 1.0

    mg = discretize(y_network, y_ham, 0.25)
    field = s_distance(mg, [(y_network.vertex_point("b1"), 0.0)])
    assert field.values[mg.grid.vertex_node("b2")] == pytest.approx(2.0, abs=1e-14)
    assert field.values[mg.grid.vertex_node("c")] == pytest.approx(1.0, abs=1e-14)


def test_s_distance_curved(unit_edge):
    H = quadratic_eikonal(unit_edge, lambda t: (1.0 + t) ** 2)
    mg = discretize(unit_edge, H, 0.01)
    field = s_distance(mg, [(unit_edge.vertex_point("v0"), 0.0)])
    assert field.values[mg.grid.vertex_node("v1")] == pytest.approx(1.5, abs=1e-12)


def test_s_distance_validates_sources(unit_edge):
    H = quadratic_eikonal(unit_edge, 1.0)
    mg = discretize(unit_edge, H, 0.25)
    with pytest.raises(ValueError):
        s_distance(mg, [])
    with pytest.raises(ValueError):
        s_distance(mg, [(unit_edge.vertex_point("v0"), math.inf)])
    with pytest.raises(ValueError):
        s_distance(mg, [(unit_edge.point("e", 0.1), 0.0)])  # off-grid


def test_relaxation_invariant(y_network, y_ham):
    mg = discretize(y_network, y_ham, 0.2)
    field = s_distance(mg, [(y_network.vertex_point("b1"), 0.0)])
    for u, v, c in mg.arcs():
        assert field.values[v] <= field.values[u] + c + 1e-12


def test_point_query_examples(y_network, y_ham, unit_edge):
    mg = discretize(y_network, y_ham, 0.25)
    p = y_network.point("e1", 0.37)
    assert s_point_query(mg, p, p) == 0.0
    mid1 = y_network.point("e1", 0.5)
    mid2 = y_network.point("e2", 0.5)
    assert s_point_query(mg, mid1, mid2) == pytest.approx(1.0, abs=1e-12)

    H4 = quadratic_eikonal(unit_edge, 4.0)
    mg4 = discretize(unit_edge, H4, 0.25)
    assert s_point_query(mg4, unit_edge.point("e", 0.0),
                         unit_edge.point("e", 1.0)) == pytest.approx(2.0, abs=1e-12)


def test_point_query_same_segment(unit_edge):
    H = quadratic_eikonal(unit_edge, 1.0)
    mg = discretize(unit_edge, H, 1.0)  # one segment
    a = unit_edge.point("e", 0.3)
    b = unit_edge.point("e", 0.7)
    assert s_point_query(mg, a, b) == pytest.approx(0.4, abs=1e-12)
    assert s_point_query(mg, b, a) == pytest.approx(0.4, abs=1e-12)


def test_extension_does_not_mutate_base(unit_edge):
    H = quadratic_eikonal(unit_edge, 1.0)
    mg = discretize(unit_edge, H, 0.5)
    before = [list(lst) for lst in mg.adjacency]
    ext = mg.extended([unit_edge.point("e", 0.3), unit_edge.point("e", 0.4)])
    assert [list(lst) for lst in mg.adjacency] == before
    assert ext.n_nodes == mg.grid.n_nodes + 2
    # grid-aligned points map to existing nodes
    ext2 = mg.extended([unit_edge.point("e", 0.5)])
    assert ext2.n_nodes == mg.grid.n_nodes
    assert ext2.point_nodes[0] == int(mg.grid.edges["e"].node_ids[1])


def test_oracle_examples(unit_edge, y_network, y_ham):
    H = quadratic_eikonal(unit_edge, 1.0)
    v0 = unit_edge.vertex_point("v0")
    v1 = unit_edge.vertex_point("v1")
    assert oracle_s(unit_edge, H, v0, v1) == pytest.approx(1.0, abs=1e-12)
    mg = discretize(unit_edge, H, 0.25)
    assert s_point_query(mg, v0, v1) == oracle_s(unit_edge, H, v0, v1)

    b1 = y_network.vertex_point("b1")
    b3 = y_network.vertex_point("b3")
    assert oracle_s(y_network, y_ham, b1, b3) == pytest.approx(3.0, abs=1e-12)


def test_oracle_guard():
    names = [f"v{i}" for i in range(9)]
    edges = [(f"e{i}", names[i], names[i + 1], 1.0) for i in range(8)]
    net = build_network(vertices=names, edges=edges, boundary=[names[0], names[-1]])
    H = quadratic_eikonal(net, 1.0)
    with pytest.raises(errors.TooLargeForOracle):
        oracle_s(net, H, net.vertex_point("v0"), net.vertex_point("v8"))


@settings(max_examples=8, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**6))
def test_oracle_matches_grid_distance(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, max_vertices=5)
    H = random_quadratic(rng, net)
    mg = discretize(net, H, 1e-3)
    for _ in range(2):
        e1 = net.edges[int(rng.integers(0, len(net.edges)))]
        e2 = net.edges[int(rng.integers(0, len(net.edges)))]
        y = net.point(e1.id, float(rng.uniform(0.0, e1.length)))
        x = net.point(e2.id, float(rng.uniform(0.0, e2.length)))
        assert s_point_query(mg, y, x) == pytest.approx(
            oracle_s(net, H, y, x), abs=1e-6)


@settings(max_examples=10, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**6))
def test_unit_cost_reduces_to_path_distance(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng)
    H = quadratic_eikonal(net, 1.0)
    mg = discretize(net, H, 0.2)
    src = int(rng.integers(0, mg.grid.n_nodes))
    field = s_distance(mg, [(src, 0.0)])
    src_pt = mg.grid.node_point(src)
    for node in range(mg.grid.n_nodes):
        expected = net.path_distance(src_pt, mg.grid.node_point(node))
        assert abs(field.values[node] - expected) <= 1e-12


@settings(max_examples=8, deadline=None, derandomize=True)
@given(seed=st.integers(0, 10**6))
def test_s_metric_axioms_and_symmetry(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, max_vertices=5)
    H = random_quadratic(rng, net)
    mg = discretize(net, H, 0.05)
    n = mg.grid.n_nodes
    sample = rng.integers(0, n, size=min(8, n))
    dmat = {int(s): s_distance(mg, [(int(s), 0.0)]).values for s in sample}
    for a in dmat:
        assert dmat[a][a] == 0.0
        for b in dmat:
            assert dmat[a][b] >= 0.0
            # even Hamiltonian: symmetric distance
            assert dmat[a][b] == pytest.approx(dmat[b][a], abs=1e-9)
            for c in dmat:
                assert dmat[a][c] <= dmat[a][b] + dmat[b][c] + 1e-9


def test_mesh_convergence_on_sampled_profile(unit_edge):
    # profile kinks at t = 0.5 sit on every tested grid, so the density is
    # smooth within segments and composite Simpson converges at full order
    from netkonal import SampledProfile

    prof = SampledProfile((0.0, 0.5, 1.0), (1.0, 2.4, 1.2))
    H = quadratic_eikonal(unit_edge, prof)
    exact = oracle_s(unit_edge, H, unit_edge.vertex_point("v0"),
                     unit_edge.vertex_point("v1"), quad_tol=1e-13)
    errs = []
    for h in (0.1, 0.05, 0.025):
        mg = discretize(unit_edge, H, h)
        field = s_distance(mg, [(unit_edge.vertex_point("v0"), 0.0)])
        errs.append(abs(field.values[mg.grid.vertex_node("v1")] - exact))
    for coarse, fine in zip(errs, errs[1:]):
        assert fine <= coarse / 3.0 or fine <= 1e-12


def test_lipschitz_bound(rng):
    net = random_network(rng)
    H = random_quadratic(rng, net)
    mg = discretize(net, H, 0.05)
    field = s_distance(mg, [(0, 0.0)])
    src = mg.grid.node_point(0)
    for node in rng.integers(0, mg.grid.n_nodes, size=20):
        node = int(node)
        d = net.path_distance(src, mg.grid.node_point(node))
        assert field.values[node] <= mg.max_density * d + 1e-9


def test_quadrature_error_bound_small(unit_edge):
    H = quadratic_eikonal(unit_edge, lambda t: (1.0 + t) ** 2)
    mg = discretize(unit_edge, H, 0.1)
    bound = mg.quadrature_error_bound()
    assert 0.0 <= bound < 1e-8
    assert mg.quadrature_error_bound() == bound  # cached
