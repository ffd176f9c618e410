from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curbkit.feasibility import EPS_FEAS, FeasibilityProblem, solve_feasibility, witness_residual

from oracles import feasible_by_vertices, feasible_on_grid

F = Fraction


def test_single_variable_no_rows():
    out = solve_feasibility(FeasibilityProblem.from_rows([], var_count=1))
    assert out.feasible and out.witness == (1,)


def test_pennies_row_one():
    problem = FeasibilityProblem.from_rows([[-1, 1]])
    out = solve_feasibility(problem)
    assert out.feasible
    assert witness_residual(problem, out.witness) == 0
    p = out.witness
    assert -p[0] + p[1] >= 0


def test_all_negative_row_is_infeasible():
    out = solve_feasibility(FeasibilityProblem.from_rows([[-1, -1, -1]]))
    assert not out.feasible and out.witness is None


def test_exact_witness_is_fractions():
    out = solve_feasibility(FeasibilityProblem.from_rows([[F(1, 3), F(-2, 3)], [F(-1, 2), 1]]))
    assert out.feasible
    assert all(isinstance(v, Fraction) for v in out.witness)
    assert sum(out.witness) == 1


def test_shape_checked():
    with pytest.raises(ValueError):
        FeasibilityProblem(np.zeros((2, 3)), 2)
    with pytest.raises(ValueError):
        FeasibilityProblem(np.zeros((0, 0)), 0)


def test_deterministic():
    problem = FeasibilityProblem.from_rows([[1, -1, 0], [0, 1, -1], [-1, 0, 1]])
    first = solve_feasibility(problem)
    assert first.feasible
    assert all(solve_feasibility(problem) == first for _ in range(3))


small = st.integers(-3, 3)


@st.composite
def systems(draw):
    n = draw(st.integers(1, 3))
    k = draw(st.integers(0, 4))
    rows = [[F(draw(small), draw(st.sampled_from([1, 2]))) for _ in range(n)] for _ in range(k)]
    return rows, n


@settings(max_examples=300, deadline=None)
@given(systems())
def test_agrees_with_vertex_oracle(system):
    rows, n = system
    problem = FeasibilityProblem.from_rows(rows, n) if rows else FeasibilityProblem.from_rows([], n)
    out = solve_feasibility(problem)
    expected = feasible_by_vertices(rows, n)
    assert out.feasible == expected
    if out.feasible:
        assert witness_residual(problem, out.witness) == 0


@settings(max_examples=40, deadline=None)
@given(systems())
def test_grid_points_never_contradict(system):
    rows, n = system
    if feasible_on_grid(rows, n, resolution=200 if n < 3 else 40):
        assert solve_feasibility(FeasibilityProblem.from_rows(rows, n)).feasible


@settings(max_examples=200, deadline=None)
@given(systems())
def test_float_mode_agrees(system):
    rows, n = system
    exact = solve_feasibility(FeasibilityProblem.from_rows(rows, n))
    floats = [[float(v) for v in r] for r in rows]
    problem = FeasibilityProblem(np.array(floats, dtype=float).reshape(len(rows), n), n)
    approx = solve_feasibility(problem)
    assert approx.feasible == exact.feasible
    if approx.feasible:
        assert witness_residual(problem, approx.witness) <= EPS_FEAS


def test_float_witness_soundness_random():
    rng = np.random.default_rng(3)
    for _ in range(300):
        n, k = int(rng.integers(1, 8)), int(rng.integers(0, 8))
        problem = FeasibilityProblem(rng.normal(size=(k, n)), n)
        out = solve_feasibility(problem)
        if out.feasible:
            assert witness_residual(problem, out.witness) <= EPS_FEAS
