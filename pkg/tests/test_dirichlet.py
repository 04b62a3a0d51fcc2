import numpy as np
import pytest

from netkonal import (
    LinearProfile,
    boundary_data,
    check_compatibility,
    custom_hamiltonian,
    discretize,
    errors,
    maximal_solution,
    quadratic_eikonal,
    solve,
    strictness_data,
)
from netkonal.sampling import (
    random_compatible_boundary,
    random_network,
    random_quadratic,
)


@pytest.fixture
def unit_H(unit_edge):
    return quadratic_eikonal(unit_edge, 1.0)


def test_boundary_data_validation(unit_edge, y_network):
    with pytest.raises(errors.MissingBoundaryData):
        boundary_data(unit_edge, {"v0": 0.0})  # v1 missing
    with pytest.raises(errors.UnknownVertex):
        boundary_data(unit_edge, {"v0": 0.0, "v1": 0.0, "zz": 1.0})
    with pytest.raises(errors.MissingBoundaryData):
        # c carries data but is not declared boundary
        boundary_data(y_network, {"b1": 0.0, "b2": 0.0, "b3": 0.0, "c": 0.0})
    with pytest.raises(ValueError):
        boundary_data(unit_edge, {"v0": 0.0, "v1": float("nan")})
    g = boundary_data(unit_edge, {"v0": 0.0, "v1": 1.0}, [("e", 0.5, 0.25)])
    assert g.anchors[0].point.t == 0.5


def test_tent_solution(unit_edge, unit_H):
    g = boundary_data(unit_edge, {"v0": 0.0, "v1": 0.0})
    u = solve(unit_edge, unit_H, g, 0.25)
    eg = u.grid.edges["e"]
    np.testing.assert_array_equal(u.values[eg.node_ids], [0.0, 0.25, 0.5, 0.25, 0.0])
    assert u.at_point(unit_edge.point("e", 0.5)) == 0.5


def test_y_network_center_value(y_network, y_ham, y_zero_data):
    u = solve(y_network, y_ham, y_zero_data, 0.1)
    assert u.vertex_value("c") == pytest.approx(1.0, abs=1e-14)


def test_incompatible_data_gives_maximal_solution(unit_edge, unit_H):
    g = boundary_data(unit_edge, {"v0": 0.0, "v1": 5.0})
    u = solve(unit_edge, unit_H, g, 0.25)
    eg = u.grid.edges["e"]
    # u(t) = min(t, 5 + (1 - t)) = t on [0, 1]
    np.testing.assert_allclose(u.values[eg.node_ids], eg.t, atol=1e-14)
    assert u.vertex_value("v1") == pytest.approx(1.0)

    compat = check_compatibility(unit_edge, unit_H, g, 0.25)
    assert not compat.compatible
    assert compat.worst_pair == ("v0", "v1")
    assert compat.worst_margin == pytest.approx(4.0, abs=1e-12)

    sol = maximal_solution(unit_edge, unit_H, g, 0.25)
    assert not sol.attains_data
    assert len(sol.unattained) == 1
    label, uval, gval = sol.unattained[0]
    assert label == "v1" and uval == pytest.approx(1.0) and gval == 5.0


def test_compatibility_boundary_case(unit_edge, unit_H):
    g = boundary_data(unit_edge, {"v0": 0.0, "v1": 1.0})
    compat = check_compatibility(unit_edge, unit_H, g, 0.25)
    assert compat.compatible
    assert compat.worst_margin == pytest.approx(0.0, abs=1e-12)
    sol = maximal_solution(unit_edge, unit_H, g, 0.25)
    assert sol.attains_data


def test_zero_data_always_compatible(y_network, y_ham, y_zero_data):
    compat = check_compatibility(y_network, y_ham, y_zero_data, 0.2)
    assert compat.compatible
    assert compat.pairs_checked == 6


def test_anchor_attained_when_compatible(y_network, y_ham):
    g = boundary_data(y_network, {"b1": 0.0, "b2": 0.0, "b3": 0.0},
                      [("e3", 1.2, 0.1)])
    sol = maximal_solution(y_network, y_ham, g, 0.1)
    assert sol.attains_data
    u = sol.field
    # values near the anchor dip toward its datum
    assert u.at_point(y_network.point("e3", 1.2)) <= 0.1 + 0.1 + 1e-9


def test_monotone_in_data(rng):
    for _ in range(5):
        net = random_network(rng)
        H = random_quadratic(rng, net)
        mg = discretize(net, H, 0.1)
        g1 = random_compatible_boundary(rng, mg)
        bump = {v: val + float(rng.uniform(0.0, 0.5))
                for v, val in g1.vertex_values.items()}
        g2 = boundary_data(net, bump)
        u1 = solve(net, H, g1, 0.1, mg=mg)
        u2 = solve(net, H, g2, 0.1, mg=mg)
        assert np.all(u1.values <= u2.values + 1e-12)


def test_solution_is_nonexpansive(rng):
    # u(x) - u(y) <= S(y, x): solve output never grows faster than the metric
    from netkonal import s_distance

    net = random_network(rng)
    H = random_quadratic(rng, net)
    mg = discretize(net, H, 0.1)
    g = random_compatible_boundary(rng, mg)
    u = solve(net, H, g, 0.1, mg=mg)
    for src in rng.integers(0, mg.grid.n_nodes, size=5):
        field = s_distance(mg, [(int(src), 0.0)])
        assert np.all(u.values - u.values[int(src)] <= field.values + 1e-9)


def test_strictness_data(unit_edge, unit_H):
    mg = discretize(unit_edge, unit_H, 0.25)
    strict = strictness_data(mg)
    assert strict.zero_nodes.size == 0
    np.testing.assert_array_equal(strict.margin.values, -np.ones(mg.grid.n_nodes))

    ramp = quadratic_eikonal(unit_edge, LinearProfile(0.0, 1.0))
    mg = discretize(unit_edge, ramp, 0.25)
    strict = strictness_data(mg)
    assert strict.zero_nodes.tolist() == [mg.grid.vertex_node("v0")]
    eg = mg.grid.edges["e"]
    np.testing.assert_allclose(strict.margin.values[eg.node_ids], -eg.t, atol=1e-15)

    flat = quadratic_eikonal(unit_edge, 0.0)
    mg = discretize(unit_edge, flat, 0.25)
    strict = strictness_data(mg)
    assert strict.zero_nodes.size == mg.grid.n_nodes


def test_strictness_unsupported_for_custom(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: p * p - 1.0, even_in_p=True)
    mg = discretize(unit_edge, H, 0.25)
    with pytest.raises(errors.UnsupportedFamily):
        strictness_data(mg)
    with pytest.raises(ValueError):
        strictness_data(discretize(unit_edge, quadratic_eikonal(unit_edge, 1.0), 0.5),
                        eps_K=-1.0)


def test_vanishing_cost_warns(unit_edge):
    import warnings

    H = quadratic_eikonal(unit_edge, LinearProfile(0.0, 1.0))
    g = boundary_data(unit_edge, {"v0": 0.0, "v1": 0.0})
    with pytest.warns(UserWarning, match="vanishes"):
        solve(unit_edge, H, g, 0.25)
    # declaring an anchor silences the warning
    g2 = boundary_data(unit_edge, {"v0": 0.0, "v1": 0.0}, [("e", 0.5, 0.2)])
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve(unit_edge, H, g2, 0.25)


def test_degenerate_cost_still_solves(unit_edge):
    H = quadratic_eikonal(unit_edge, 0.0)
    g = boundary_data(unit_edge, {"v0": 0.0, "v1": 0.0})
    with pytest.warns(UserWarning):
        u = solve(unit_edge, H, g, 0.25)
    np.testing.assert_array_equal(u.values, np.zeros(u.grid.n_nodes))
