import numpy as np
import pytest

from conftest import P
from lipmult.branches import (NotSquarefreeError, branches, cayley_unitary, generic_coordinates,
                              relative_multiplicities, stabilize_epsilon)
from lipmult.cone import tangent_lines
from lipmult.seeding import rng_for


def orders(dec):
    return sorted(b.order for b in dec.branches)


def tangent_multiset(dec):
    return sorted((b.order, tuple(np.round(b.tangent.direction, 6))) for b in dec.branches)


def test_cayley_unitary_is_exactly_unitary():
    U = cayley_unitary(rng_for(0, "t"))
    for i in range(2):
        for j in range(2):
            s = sum(U[k][i].conjugate() * U[k][j] for k in range(2))
            assert s == (1 if i == j else 0)


def test_generic_coordinates_avoid_vertical_tangents():
    gc = generic_coordinates(P("x*y*(y-x)*(y-2*x)"), seed=0)
    g = gc.transformed
    assert gc.max_slope <= 2
    assert g.degree_in(1) == g.degree


def test_cusp_single_order_two_branch():
    dec = branches(P("y^2 - x^3"))
    assert orders(dec) == [2]
    assert dec.branches[0].tangent.same_line((1, 0), 1e-6)
    assert dec.conserved


def test_node_two_branches():
    dec = branches(P("y^2 - x^2"))
    assert orders(dec) == [1, 1]
    for d in [(1, 1), (1, -1)]:
        assert any(b.tangent.same_line(d, 1e-6) for b in dec.branches)


def test_whitney_four_branches():
    dec = branches(P("x*y*(y-x)*(y-2*x)"))
    assert orders(dec) == [1, 1, 1, 1]
    for d in [(1, 0), (0, 1), (1, 1), (1, 2)]:
        assert any(b.tangent.same_line(d, 1e-6) for b in dec.branches)


@pytest.mark.parametrize("text, expected", [
    ("y^2 - x^3", {(1, 0): 2}),
    ("x*y*(y-x)*(y-2*x)", {(1, 0): 1, (0, 1): 1, (1, 1): 1, (1, 2): 1}),
    ("(y-x^2)*(y+x^2)", {(1, 0): 2}),
])
def test_relative_multiplicities(text, expected):
    rm = relative_multiplicities(P(text))
    assert len(rm.entries) == len(expected)
    for d, k in expected.items():
        assert rm.get(d) == k


@pytest.mark.parametrize("text", ["y^2 - x^3", "y^2 - x^2", "(y-x^2)*(y+x^2)"])
def test_stabilize_epsilon_on_ladder(text):
    eps = stabilize_epsilon(P(text))
    assert 1e-6 <= eps <= 1e-1


def test_node_stable_at_first_rung():
    assert stabilize_epsilon(P("y^2 - x^2")) == 1e-1


CORPUS = ["x^3 - y^2", "y^2 - x^4", "x^3 - y^4", "x^3 + y^3", "(x^3-y^2)*(y^2-x^4)",
          "(x^3-y^2)*(x^3-y^4)", "(x^3-y^2)*(x^3+y^3)", "(y^2-x^4)*(x^3-y^4)", "(y^2-x^4)*(x^3+y^3)",
          "(x^3-y^4)*(x^3+y^3)", "(x^3-y^2)*(y^3-x^2)", "(x^3-y^2)*(y^2-x^4)*(x^3+y^3)"]


@pytest.mark.parametrize("text", CORPUS)
def test_conservation_and_tangents_in_cone(text):
    f = P(text)
    dec = branches(f)
    assert dec.total_order == f.ord0()
    cone = tangent_lines(f.initial_form())
    for b in dec.branches:
        assert any(b.tangent.same_line(ln, 1e-6) for ln in cone)
        assert abs(f.initial_form().evaluate(list(b.tangent.unit()), exact=False)) < 1e-6
    rm = relative_multiplicities(f, decomposition=dec)
    assert rm.total == f.ord0()
    for ln, _ in rm.entries:
        assert any(ln.same_line(c, 1e-6) for c in cone)


@pytest.mark.parametrize("text", ["x^3 - y^2", "(x^3-y^2)*(x^3+y^3)", "(x^3-y^2)*(y^3-x^2)",
                                  "x*y*(y-x)*(y-3*x)"])
def test_structure_invariant_under_second_coordinate_change(text):
    f = P(text)
    a, b = branches(f, seed=0), branches(f, seed=7)
    assert not np.allclose(a.coordinate_change, b.coordinate_change)
    assert tangent_multiset(a) == tangent_multiset(b)


def test_cycle_lengths_are_orders():
    dec = branches(P("(x^3-y^2)*(x^3-y^4)"))
    for b in dec.branches:
        assert len(b.cycle) == b.order
    # sheet labels index all y-roots (far ones too) and never repeat
    sheets = [i for b in dec.branches for i in b.cycle]
    assert len(set(sheets)) == len(sheets) == dec.total_order


def test_fixed_epsilon():
    dec = branches(P("y^2 - x^3"), epsilon=1e-2)
    assert dec.epsilon_used == 1e-2 and orders(dec) == [2]


@pytest.mark.parametrize("text, exc", [
    ("(y - x)^2", NotSquarefreeError),
    ("(y^2 - x^3)^2*(y - 2*x)", NotSquarefreeError),
    ("x^2 + y + 1", ValueError),
])
def test_input_errors(text, exc):
    with pytest.raises(exc):
        branches(P(text))


def test_space_curve_rejected():
    with pytest.raises(ValueError):
        branches(P("x*y - z", ["x", "y", "z"]))
