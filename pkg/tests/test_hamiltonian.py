import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netkonal import (
    ConstantProfile,
    LinearProfile,
    ProbeGrid,
    SampledProfile,
    build_network,
    certify,
    custom_hamiltonian,
    errors,
    legendre,
    p_minus,
    p_plus,
    power_eikonal,
    quadratic_eikonal,
    vertex_profile,
)


@pytest.fixture
def two_edge_path():
    return build_network(
        vertices=["a", "b", "c"],
        edges=[("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)],
        boundary=["a", "c"],
    )


def test_profiles_evaluate():
    assert ConstantProfile(2.0)(0.3) == 2.0
    lin = LinearProfile(1.0, 2.0)
    assert lin(0.5) == 2.0
    np.testing.assert_allclose(lin(np.array([0.0, 1.0])), [1.0, 3.0])
    samp = SampledProfile((0.0, 0.5, 1.0), (1.0, 2.0, 1.0))
    assert samp(0.25) == pytest.approx(1.5)


def test_profile_validation():
    with pytest.raises(ValueError):
        ConstantProfile(-1.0)
    with pytest.raises(ValueError):
        SampledProfile((0.0, 1.0), (1.0, -0.5))
    with pytest.raises(ValueError):
        SampledProfile((0.0, 0.0, 1.0), (1.0, 1.0, 1.0))
    net = build_network(vertices=["a", "b"], edges=[("e", "a", "b", 1.0)],
                        boundary=["a", "b"])
    with pytest.raises(ValueError):
        quadratic_eikonal(net, LinearProfile(1.0, -2.0))  # negative at t=1
    with pytest.raises(ValueError):
        # samples must span the whole edge
        quadratic_eikonal(net, SampledProfile((0.0, 0.5), (1.0, 1.0)))


def test_certify_uniform_quadratic_passes(y_network, y_ham):
    report = certify(y_ham, y_network)
    assert report.ok
    assert report.violations == ()


def test_certify_vertex_mismatch_fails(two_edge_path):
    H = quadratic_eikonal(two_edge_path, {"e1": 1.0, "e2": 2.0})
    report = certify(H, two_edge_path)
    assert not report.ok
    assert report.first.condition == "vertex-continuity"
    assert "vertex b" in report.first.location


def test_certify_positive_at_zero_fails(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: p * p + 1.0, even_in_p=True)
    report = certify(H, unit_edge)
    assert not report.ok
    assert any(v.condition == "zero-level" for v in report.violations)


def test_certify_noncoercive_fails(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: np.full(np.shape(p), -1.0))
    report = certify(H, unit_edge, ProbeGrid(coercive_limit=1e4))
    assert not report.ok
    assert any(v.condition == "coercivity" for v in report.violations)


def test_certify_nonconvex_fails(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: (p * p - 1.0) ** 2 - 0.5)
    report = certify(H, unit_edge)
    assert any(v.condition == "convexity" for v in report.violations)


def test_certify_odd_part_fails_evenness(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: (p - 0.5) ** 2 - 1.0)
    report = certify(H, unit_edge)
    assert not report.ok
    assert any(v.condition == "vertex-evenness" for v in report.violations)


def test_p_plus_exact_root(unit_edge):
    H = quadratic_eikonal(unit_edge, 4.0)
    he = H.edge("e")
    assert p_plus(he, 0.3) == 2.0
    assert p_minus(he, 0.3) == -2.0


def test_p_plus_closed_form_curved(unit_edge):
    H = quadratic_eikonal(unit_edge, lambda t: (1.0 + t) ** 2)
    he = H.edge("e")
    assert p_plus(he, 0.5) == pytest.approx(1.5, abs=1e-12)
    ts = np.linspace(0.0, 1.0, 11)
    np.testing.assert_allclose(p_plus(he, ts), 1.0 + ts, atol=1e-12)
    scalars = np.array([p_plus(he, float(t)) for t in ts])
    np.testing.assert_array_equal(p_plus(he, ts), scalars)


def test_p_plus_degenerate_zero(unit_edge):
    H = quadratic_eikonal(unit_edge, 0.0)
    he = H.edge("e")
    assert p_plus(he, 0.5) == 0.0
    assert p_minus(he, 0.5) == 0.0


def test_p_plus_bracket_overflow(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: np.full(np.shape(p), -1.0))
    with pytest.raises(errors.BracketOverflow):
        p_plus(H.edge("e"), 0.5)


def test_p_plus_rejects_positive_zero_level(unit_edge):
    H = custom_hamiltonian(unit_edge, lambda t, p: p * p + 1.0)
    with pytest.raises(errors.UncertifiedHamiltonian):
        p_plus(H.edge("e"), 0.5)


def test_power_eikonal_density(unit_edge):
    H = power_eikonal(unit_edge, 8.0, power=3.0)
    assert p_plus(H.edge("e"), 0.1) == pytest.approx(2.0, abs=1e-12)
    with pytest.raises(ValueError):
        power_eikonal(unit_edge, 1.0, power=1.0)


def test_legendre_quadratic_closed_form(unit_edge):
    H = quadratic_eikonal(unit_edge, 1.0)
    he = H.edge("e")
    assert legendre(he, 0.0, 2.0) == pytest.approx(2.0, abs=1e-9)
    assert legendre(he, 0.3, 0.0) == 1.0  # sup at p = 0
    # q^2/4 + alpha over a grid
    for t in np.linspace(0.0, 1.0, 5):
        for q in np.linspace(-3.0, 3.0, 7):
            assert legendre(he, t, q) == pytest.approx(q * q / 4.0 + 1.0, abs=1e-8)


def test_legendre_power_closed_form(unit_edge):
    m = 3.0
    H = power_eikonal(unit_edge, 1.0, power=m)
    he = H.edge("e")
    for q in (0.5, 2.0, -2.0):
        expected = (m - 1.0) * (abs(q) / m) ** (m / (m - 1.0)) + 1.0
        assert legendre(he, 0.2, q) == pytest.approx(expected, abs=1e-8)


def test_legendre_overflow_for_sublinear_growth(unit_edge):
    # |p| - 1 is convex and coercive but its conjugate is infinite for |q| > 1
    H = custom_hamiltonian(unit_edge, lambda t, p: np.abs(p) - 1.0, even_in_p=True)
    assert legendre(H.edge("e"), 0.0, 0.5) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(errors.BracketOverflow):
        legendre(H.edge("e"), 0.0, 2.0)


def _unit_edge():
    return build_network(vertices=["v0", "v1"], edges=[("e", "v0", "v1", 1.0)],
                         boundary=["v0", "v1"])


@settings(max_examples=40, deadline=None, derandomize=True)
@given(
    alpha=st.floats(0.0, 4.0),
    q=st.floats(-4.0, 4.0),
    p=st.floats(-4.0, 4.0),
    t=st.floats(0.0, 1.0),
)
def test_fenchel_young(alpha, q, p, t):
    H = quadratic_eikonal(_unit_edge(), alpha)
    he = H.edge("e")
    lval = legendre(he, t, q)
    assert lval + he.evaluate(t, p) >= p * q - 1e-9


@settings(max_examples=40, deadline=None, derandomize=True)
@given(a=st.floats(0.0, 5.0), b=st.floats(-1.0, 1.0), t=st.floats(0.0, 1.0))
def test_density_sits_on_zero_level(a, b, t):
    lo = min(a, a + b)
    H = quadratic_eikonal(_unit_edge(), LinearProfile(a - min(0.0, lo), b))
    he = H.edge("e")
    for pv in (p_plus(he, t), p_minus(he, t)):
        assert abs(he.evaluate(t, pv)) <= 1e-10
    assert p_minus(he, t) <= 0.0 <= p_plus(he, t)


def test_vertex_profile_even_and_edge_independent(y_network, y_ham):
    prof = vertex_profile(y_ham, y_network, "c")
    assert prof(1.0) == pytest.approx(0.0, abs=1e-12)
    ps = np.linspace(-4.0, 4.0, 17)
    np.testing.assert_allclose(prof(ps), prof(-ps), atol=1e-12)
    for eid in ("e1", "e2", "e3"):
        he = y_ham.edge(eid)
        tv = he.at_vertex_param(y_network.edge(eid).tail == "c")
        np.testing.assert_allclose(prof(ps), he.evaluate(np.full_like(ps, tv), ps),
                                   atol=1e-9)


def test_vertex_profile_unknown_vertex(y_network, y_ham):
    with pytest.raises(errors.UnknownVertex):
        vertex_profile(y_ham, y_network, "zz")


def test_interior_asymmetry_allowed(unit_edge):
    # evenness is only demanded at vertices; a drift that vanishes there
    # certifies fine even though the interior sublevel set is lopsided
    def ev(t, p):
        drift = 0.3 * np.sin(np.pi * np.asarray(t, dtype=float))
        return (np.asarray(p, dtype=float) - drift) ** 2 - 1.0

    H = custom_hamiltonian(unit_edge, ev)
    assert certify(H, unit_edge).ok
    he = H.edge("e")
    assert p_plus(he, 0.0) == pytest.approx(1.0, abs=1e-12)
    assert p_minus(he, 0.0) == pytest.approx(-1.0, abs=1e-12)
    assert p_plus(he, 0.5) == pytest.approx(1.3, abs=1e-10)
    assert p_minus(he, 0.5) == pytest.approx(-0.7, abs=1e-10)
