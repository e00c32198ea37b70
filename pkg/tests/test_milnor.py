from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import P, XY, XYZ
from lipmult.milnor import (NotIsolatedError, degree_polynomial, descartes_sign_changes,
                            euler_data, milnor_number, quotient_dimension, randell_chi,
                            recover_degree, total_tjurina, transversal_milnor)
from lipmult.poly import Polynomial


@pytest.mark.parametrize("text, variables, mu", [
    ("x^3 + y^3 + z^3", XYZ, 8),
    ("x^2 + y^2", XY, 1),
    ("y^2 - x^3", XY, 2),
    ("x^4 + y^4 + z^4", XYZ, 27),
    ("x^2*y + y^4", XY, 5),     # D5
    ("x^3 + y^4", XY, 6),       # E6
    ("x*y*(x - y)*(x - 2*y)", XY, 9),
    ("y", XY, 0),
])
def test_milnor_examples(text, variables, mu):
    res = milnor_number(P(text, variables))
    assert res.mu == mu and res.stabilized
    assert res.dimensions[-1] == res.dimensions[-2] == mu


def test_milnor_number_ak_family():
    # A_k: y^2 - x^(k+1) has Jacobian ideal (x^k, y), basis 1, x, ..., x^(k-1)
    for k in range(1, 9):
        assert milnor_number(P(f"y^2 - x^{k + 1}")).mu == k


def test_milnor_with_gaussian_coefficients():
    assert milnor_number(P("x^2 + i*y^2")).mu == 1


def test_non_isolated_is_flagged():
    with pytest.raises(NotIsolatedError, match="possibly non-isolated"):
        milnor_number(P("x^2", XY))
    with pytest.raises(NotIsolatedError):
        milnor_number(P("x*y*(x+y)", XYZ))


def test_milnor_rejects_zero():
    with pytest.raises(ValueError):
        milnor_number(P("0"))


def test_quotient_dimension_truncation():
    # (x^2, y) + M^D: the quotient is spanned by 1 and x once D >= 2
    gens = [P("x^2"), P("y")]
    assert [quotient_dimension(gens, D) for D in range(1, 5)] == [1, 2, 2, 2]


def _random_linear(rng, n):
    while True:
        m = [[Fraction(int(rng.integers(-3, 4))) for _ in range(n)] for _ in range(n)]
        if round(np.linalg.det(np.array(m, dtype=float))) != 0:
            return m


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_homogeneous_formula(d, k):
    names = ["x", "y", "z"][:k]
    fermat = P(" + ".join(f"{v}^{d}" for v in names), names)
    assert milnor_number(fermat).mu == (d - 1) ** k
    if k >= 2 and d <= 3:
        rng = np.random.default_rng(10 * d + k)
        changed = fermat.compose_linear(_random_linear(rng, k))
        assert milnor_number(changed).mu == (d - 1) ** k


def test_homogeneous_formula_random_binary_forms():
    # squarefree binary forms of degree d have mu = (d-1)^2
    rng = np.random.default_rng(3)
    for d in (2, 3, 4):
        roots = rng.choice(np.arange(-5, 6), size=d, replace=False)
        text = "*".join(f"(x - {int(r)}*y)" for r in roots)
        assert milnor_number(P(text)).mu == (d - 1) ** 2


# -- transversal --------------------------------------------------------------------


def test_transversal_examples():
    assert transversal_milnor(P("x*y*(x+y)", XYZ)) == 4
    assert transversal_milnor(P("x*y", XYZ)) == 1


def test_transversal_rejects_non_reduced():
    with pytest.raises(NotIsolatedError):
        transversal_milnor(P("x^2", XYZ))


def test_transversal_rejects_bad_line():
    with pytest.raises(ValueError, match="bad line"):
        transversal_milnor(P("x*y*(x+y)", XYZ), line=(1, 0, 0))


def test_transversal_accepts_explicit_line():
    assert transversal_milnor(P("x*y*(x+y)", XYZ), line=(0, 0, 3)) == 4


@pytest.mark.parametrize("text", ["x*y*z", "x*y*(x+y)*z", "(x^2-y^2)*(x^2-z^2)"])
def test_transversal_rejects_several_singular_lines(text):
    with pytest.raises(ValueError, match="more than one line"):
        transversal_milnor(P(text, XYZ))
    # without the check the slice at the first singular axis is still computed
    assert transversal_milnor(P(text, XYZ), check_components=False) >= 1


@pytest.mark.parametrize("text, total", [("x*y*(x+y)", 4), ("y^2*z - x^3", 2), ("x*y*z", 3),
                                         ("x*y*(x+y)*z", 7)])
def test_total_tjurina(text, total):
    # three concurrent lines contribute 4 at their common point, each node 1, a cusp 2
    assert total_tjurina(P(text, XYZ)) == total


def test_transversal_input_checks():
    with pytest.raises(ValueError):
        transversal_milnor(P("x*y"))
    with pytest.raises(ValueError):
        transversal_milnor(P("x*y + z", XYZ))


@pytest.mark.parametrize("seed", [0, 1, 2, 17])
def test_transversal_is_seed_independent(seed):
    assert transversal_milnor(P("x*y*(x+y)*(x-y)", XYZ), seed=seed) == 9


@pytest.mark.parametrize("plane", ["x*y", "x^3 + y^3", "x*y*(x+y)", "x*y*(x-y)*(x-2*y)"])
def test_cylinder_consistency(plane):
    # a plane form g(x, y) viewed in three variables: the slice is g itself
    g = P(plane)
    mu = milnor_number(g).mu
    f = P(plane, XYZ)
    assert transversal_milnor(f) == mu
    assert randell_chi(g.degree, 2, mu) == 1 - mu


# -- Randell ------------------------------------------------------------------------


def test_randell_examples():
    assert randell_chi(3, 2, 0) == 9 == 1 + milnor_number(P("x^3+y^3+z^3", XYZ)).mu
    assert randell_chi(3, 2, 4) == -3
    for n in range(1, 6):
        assert randell_chi(1, n, 0) == 1
    assert euler_data(3, 2, 4).to_json() == {"d": 3, "n": 2, "muPrime": 4, "chi": -3}


def test_randell_input_checks():
    with pytest.raises(ValueError):
        randell_chi(0, 2, 0)
    with pytest.raises(ValueError):
        randell_chi(2, 0, 0)
    with pytest.raises(ValueError):
        randell_chi(2, 2, -1)


@given(st.integers(1, 30), st.integers(1, 6))
def test_isolated_case(d, n):
    assert randell_chi(d, n, 0) == 1 + (-1) ** n * (d - 1) ** (n + 1)


def test_recover_examples():
    assert recover_degree(-3, 2, 4) == {3}
    assert recover_degree(9, 2, 0) == {3}
    assert len(recover_degree(0, 2, 1)) <= 1


@given(st.integers(2, 8), st.integers(1, 3), st.integers(0, 10))
def test_recover_round_trip(d, n, mu_prime):
    assert d in recover_degree(randell_chi(d, n, mu_prime), n, mu_prime)


@given(st.integers(-50, 50), st.integers(1, 3), st.integers(0, 10))
def test_recover_matches_degree_polynomial(chi, n, mu_prime):
    coeffs = degree_polynomial(chi, n, mu_prime)
    roots = {d for d in range(2, 200) if np.polyval(coeffs, d - 1) == 0}
    assert recover_degree(chi, n, mu_prime) == roots


@given(st.integers(1, 3), st.integers(1, 40))
def test_descartes_uniqueness_at_chi_zero(n, mu_prime):
    coeffs = degree_polynomial(0, n, mu_prime)
    assert descartes_sign_changes(coeffs) == 1
    assert len(recover_degree(0, n, mu_prime)) <= 1


def test_sign_changes_skip_zeros():
    assert descartes_sign_changes([1, 0, 0, -4, -3]) == 1
    assert descartes_sign_changes([1, -1, 1]) == 2
    assert descartes_sign_changes([0, 0]) == 0
