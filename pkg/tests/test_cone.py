import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import P, XYZ
from lipmult.cone import (MapSample, TangentLine, hypersurface_cone, map_derivative_estimate,
                          normalize_direction, projective_distance, secant_directions,
                          squarefree_decomposition, tangent_lines)
from lipmult.poly import GaussianRational, Polynomial


def lines_of(ls):
    return sorted((ln.direction, ln.cone_multiplicity) for ln in ls)


def has_line(ls, direction, mult=1, tol=1e-9):
    return any(ln.same_line(direction, tol) and ln.cone_multiplicity == mult for ln in ls)


def test_normalization_is_canonical():
    a = TangentLine((2j, 1j))
    b = TangentLine((-1, -0.5))
    assert a.direction == b.direction == (1, 0.5)
    assert projective_distance((1, 0), (0, 1)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        normalize_direction((0, 0))


def test_cusp_cone():
    cone = hypersurface_cone(P("x^3 - y^2"))
    assert cone.defining_form == P("-y^2")
    assert len(cone.lines) == 1 and has_line(cone.lines, (1, 0), 2)


def test_whitney_cone_has_four_lines():
    cone = hypersurface_cone(P("x*y*(y-x)*(y-2*x)"))
    assert len(cone.lines) == 4
    for d in [(1, 0), (0, 1), (1, 1), (1, 2)]:
        assert has_line(cone.lines, d)


def test_homogeneous_cone_is_idempotent():
    f = P("x^3 + y^3 + z^3", XYZ)
    assert hypersurface_cone(f).defining_form == f


def test_cone_errors():
    with pytest.raises(ValueError):
        hypersurface_cone(P("x + 1"))
    with pytest.raises(ValueError):
        hypersurface_cone(P("0"))


@pytest.mark.parametrize("form, expected", [
    ("-y^2", [((1, 0), 2)]),
    ("x*y", [((1, 0), 1), ((0, 1), 1)]),
    ("y^2 - x^2", [((1, 1), 1), ((1, -1), 1)]),
    ("(y-x)^3*(y+2*x)^2*x", [((1, 1), 3), ((1, -2), 2), ((0, 1), 1)]),
    ("(x + i*y)^4*(x - y)", [((1, 1j), 4), ((1, 1), 1)]),
])
def test_tangent_lines_examples(form, expected):
    ls = tangent_lines(P(form))
    assert len(ls) == len(expected)
    for d, m in expected:
        assert has_line(ls, d, m)


def test_tangent_lines_rejects_inhomogeneous():
    with pytest.raises(ValueError):
        tangent_lines(P("x^3 - y^2"))


def test_squarefree_decomposition_multiplicities():
    # (t - 1)^3 (t + 2)^2 t over Q(i), ascending coefficients
    f = P("(y - x)^3*(y + 2*x)^2*y")
    uni = [f.terms.get((6 - j, j), GaussianRational(0)) for j in range(7)]
    parts = squarefree_decomposition(uni)
    assert sorted((len(g) - 1, k) for g, k in parts) == [(1, 1), (1, 2), (1, 3)]


slope = st.builds(GaussianRational, st.integers(-4, 4), st.integers(-4, 4))


@given(st.lists(st.tuples(slope, st.integers(1, 3)), min_size=1, max_size=4), st.integers(0, 2))
def test_multiplicities_sum_to_degree(factors, vertical):
    f = Polynomial.constant(2, 1)
    y, x = Polynomial.variable(2, 1), Polynomial.variable(2, 0)
    for a, k in factors:
        f = f * (y - x.scale(a)) ** k
    f = f * x ** vertical
    ls = tangent_lines(f)
    assert sum(ln.cone_multiplicity for ln in ls) == f.degree
    for ln in ls:
        assert abs(f.evaluate(list(ln.direction), exact=False)) < 1e-8 * (1 + max(abs(c) for c in ln.direction)) ** f.degree


# -- secants ---------------------------------------------------------------------------


def test_cusp_secants_hug_the_tangent():
    scale = 1e-3
    sec = secant_directions(P("x^3 - y^2"), scale)
    assert sec.cluster_count == 1
    # directions of (t^2, t^3) deviate from (1, 0) by |t| ~ sqrt(scale)
    dev = [projective_distance(d, (1, 0)) for d in sec.directions]
    assert max(dev) <= 2 * np.sqrt(2 * scale)
    sec6 = secant_directions(P("x^3 - y^2"), 1e-6)
    assert max(projective_distance(d, (1, 0)) for d in sec6.directions) <= 2e-3


def test_node_secants_two_axes():
    sec = secant_directions(P("x*y"), 1e-3)
    assert sec.cluster_count == 2
    assert sorted(min(projective_distance(c, a) for c in sec.centers)
                  for a in [(1, 0), (0, 1)])[-1] < 1e-9


def test_diagonal_secants():
    sec = secant_directions(P("y^2 - x^2"), 1e-3)
    assert sec.cluster_count == 2
    for a in [(1, 1), (1, -1)]:
        assert min(projective_distance(c, a) for c in sec.centers) < 1e-9


@pytest.mark.parametrize("text", ["x^3 - y^2", "x*y*(y-x)*(y-2*x)", "(y-x^2)*(y+x^2)", "x^3 + y^3",
                                  "x^3 - y^4"])
@pytest.mark.parametrize("scale", [1e-2, 1e-3])
def test_secant_centres_lie_near_cone(text, scale):
    f = P(text)
    form = f.initial_form()
    for c in secant_directions(f, scale).centers:
        u = np.array(normalize_direction(c))
        assert abs(form.evaluate(list(u), exact=False)) <= 10 * scale


def test_secants_need_points():
    with pytest.raises(ValueError):
        secant_directions(P("x^2 + y^2 + 1"), 1e-3)


# -- tangent map -----------------------------------------------------------------------


def test_linear_map_exact():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    for _ in range(5):
        v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        est = map_derivative_estimate(lambda z: A @ z, v)
        np.testing.assert_allclose(est.estimates, np.broadcast_to(A @ v, est.estimates.shape), rtol=1e-13, atol=1e-13)


def test_radial_perturbation_error_is_linear_in_t():
    e1 = np.array([1, 0], complex)
    est = map_derivative_estimate(lambda z: z + np.linalg.norm(z) * z, e1)
    err = np.linalg.norm(est.estimates - e1, axis=1)
    np.testing.assert_allclose(err, est.tgrid, rtol=1e-9)
    assert est.converged


def test_swap():
    est = map_derivative_estimate(lambda z: z[::-1], [1, 0])
    np.testing.assert_array_equal(est.value, [0, 1])


def test_oscillating_map_is_flagged():
    # |z| * (cos(log|z|), sin(log|z|)) is bi-Lipschitz with no derivative at 0
    def phi(z):
        r = np.linalg.norm(z)
        if r == 0:
            return z
        a = np.log(r)
        return np.array([np.cos(a) * z[0] - np.sin(a) * z[1], np.sin(a) * z[0] + np.cos(a) * z[1]])

    est = map_derivative_estimate(MapSample(phi), [1, 0])
    assert not est.converged


def test_map_checks():
    with pytest.raises(ValueError):
        map_derivative_estimate(lambda z: z + 1, [1, 0])
    with pytest.raises(ValueError):
        map_derivative_estimate(lambda z: z, [1, 0], [1e-2, 1e-3])
    with pytest.raises(ValueError):
        map_derivative_estimate(lambda z: z, [1, 0], [1e-3, 1e-2, 1e-4, 1e-5])


def test_lipschitz_bound_on_estimated_derivative():
    # phi(z) = U z + |z| z with U unitary: dphi = U, C2 = 1
    th = 0.7
    U = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]], complex)
    phi = lambda z: U @ z + np.linalg.norm(z) * z  # noqa: E731
    rng = np.random.default_rng(1)
    for _ in range(10):
        v, w = (rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(2))
        dv = map_derivative_estimate(phi, v).value
        dw = map_derivative_estimate(phi, w).value
        assert np.linalg.norm(dv - dw) <= np.linalg.norm(v - w) * (1 + 1e-4)
