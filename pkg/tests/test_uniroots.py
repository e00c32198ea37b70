import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipmult.poly import DenseBivariate, UnivariateComplexPoly
from conftest import P
from lipmult.uniroots import (RootOnBoundaryError, batch_roots, compose_permutations,
                              count_roots_in_disc, find_roots, permutation_cycles, track_roots)


def poly(*ascending):
    return UnivariateComplexPoly(np.array(ascending, dtype=complex))


def test_find_roots_quadratic():
    rs = find_roots(poly(-1, 0, 1))
    assert rs.converged
    np.testing.assert_allclose(sorted(rs.roots.real), [-1, 1], atol=1e-14)


def test_find_roots_cube_roots_of_small_number():
    eps = 1e-2
    rs = find_roots(poly(-eps ** 2, 0, 0, 1))
    expected = 1e-4 ** (1 / 3) * np.exp(2j * np.pi * np.arange(3) / 3)
    assert np.allclose(np.abs(rs.roots), 4.6416e-2, rtol=1e-4)
    for r in expected:
        assert np.min(np.abs(rs.roots - r)) < 1e-12


def test_find_roots_double_root_is_near_coincident_pair():
    rs = find_roots(poly(0, 0, 1))
    assert rs.converged and len(rs) == 2
    assert np.all(np.abs(rs.roots) < 1e-6)


def test_find_roots_rejects_constants():
    with pytest.raises(ValueError):
        find_roots(poly(3))


@pytest.mark.parametrize("center, radius, count", [(0, 2, 2), (0, 0.5, 0)])
def test_count_quadratic(center, radius, count):
    assert count_roots_in_disc(poly(-1, 0, 1), center, radius) == count


def test_count_cubic_off_center():
    assert count_roots_in_disc(poly(0, -1, 0, 1), 0.9, 0.2) == 1


def test_count_detects_root_on_circle():
    with pytest.raises(RootOnBoundaryError):
        count_roots_in_disc(poly(-1, 0, 1), 0, 1.0)


def _random_poly(rng, deg):
    roots = np.sqrt(rng.random(deg)) * np.exp(2j * np.pi * rng.random(deg))
    return UnivariateComplexPoly(np.poly(roots)[::-1]), roots


@settings(max_examples=30)
@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_count_agrees_with_eigenvalue_oracle(deg, seed):
    rng = np.random.default_rng(seed)
    p, _ = _random_poly(rng, deg)
    # independent oracle: companion-matrix eigenvalues
    oracle = np.roots(p.coeffs[::-1])
    c = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    r = rng.uniform(0.2, 1.0)
    if np.min(np.abs(np.abs(oracle - c) - r)) < 1e-3:
        return
    assert count_roots_in_disc(p, c, r) == int(np.sum(np.abs(oracle - c) < r))


@given(st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
def test_whole_plane_count_is_degree(deg, seed):
    p, _ = _random_poly(np.random.default_rng(seed), deg)
    assert count_roots_in_disc(p, 0, 50.0) == deg


@given(st.integers(1, 12), st.integers(0, 2 ** 32 - 1))
def test_find_roots_matches_eigenvalues(deg, seed):
    p, roots = _random_poly(np.random.default_rng(seed), deg)
    rs = find_roots(p)
    assert rs.converged and rs.residual <= 1e-12
    oracle = np.roots(p.coeffs[::-1])
    assert len(rs.roots) == deg
    # every oracle root has a match (clusters may be ill-conditioned, so be lenient)
    for z in oracle:
        assert np.min(np.abs(rs.roots - z)) < 1e-5


def test_batch_roots_matches_find_roots():
    rng = np.random.default_rng(3)
    coeffs = rng.standard_normal((50, 5)) + 1j * rng.standard_normal((50, 5))
    out = batch_roots(coeffs)
    for c, r in zip(coeffs, out):
        ref = find_roots(UnivariateComplexPoly(c)).roots
        assert max(np.min(np.abs(ref - z)) for z in r) < 1e-8


# -- tracking ---------------------------------------------------------------------------


def _loop(radius, n=64, turns=1):
    return radius * np.exp(2j * np.pi * np.linspace(0, turns, n * turns + 1))


def _y_family(text):
    dense = DenseBivariate(P(text))
    return lambda x: UnivariateComplexPoly(dense.y_coeffs(np.array(x)))


def test_cusp_loop_swaps_sheets():
    path = track_roots(_y_family("y^2 - x^3"), _loop(0.1))
    assert path.closed and path.permutation == (1, 0)
    assert path.cycles() == [[0, 1]]


def test_node_loop_is_identity():
    assert track_roots(_y_family("y^2 - x^2"), _loop(0.1)).permutation == (0, 1)


def test_constant_family_is_identity():
    assert track_roots(lambda x: poly(-1, 0, 1), _loop(1.0)).permutation == (0, 1)


@pytest.mark.parametrize("text", ["y^3 - x^2", "y^3 - x^4 - x*y", "(y^2 - x^3)*(y - x)"])
def test_permutation_stable_under_step_halving(text):
    fam = _y_family(text)
    coarse = track_roots(fam, _loop(0.1, 32))
    fine = track_roots(fam, _loop(0.1, 64))
    assert coarse.permutation == fine.permutation


@pytest.mark.parametrize("text", ["y^3 - x^2", "y^2 - x^3", "(y^2 - x^3)*(y^3 - x^5)"])
def test_double_loop_is_square(text):
    fam = _y_family(text)
    once = track_roots(fam, _loop(0.1)).permutation
    twice = track_roots(fam, _loop(0.1, turns=2)).permutation
    assert twice == compose_permutations(once, once)


def test_permutation_cycles():
    assert permutation_cycles((1, 2, 0, 3)) == [[0, 1, 2], [3]]
