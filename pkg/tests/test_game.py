from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curbkit.game import (
    Game,
    GameFormatError,
    MixedStrategy,
    NumericMode,
    Player,
    StrategyRef,
    StrategySet,
    expected_utility,
    parse_game,
    restrict,
    serialize_game,
)
from curbkit.generators import gamma_game, omega_game, random_game

F = Fraction
PENNIES = Game([[0, 1], [1, 0]], [[1, 0], [0, 1]])


def test_scalars_are_reduced_fractions():
    g = Game([[F(2, 4)]], [[3]])
    assert g.mode is NumericMode.RATIONAL
    assert g.payoff_row[0, 0] == F(1, 2) and g.payoff_row[0, 0].denominator == 2
    assert isinstance(g.payoff_col[0, 0], Fraction)


def test_any_float_gives_float_mode():
    g = Game([[0.5, 1]], [[0, 0]])
    assert g.mode is NumericMode.FLOAT
    assert g.payoff_row.dtype == np.float64


def test_shape_mismatch_and_nonfinite_rejected():
    with pytest.raises(ValueError):
        Game([[0, 1]], [[0], [1]])
    with pytest.raises(ValueError):
        Game([[float("nan")]], [[0.0]])


def test_game_is_immutable():
    with pytest.raises(ValueError):
        PENNIES.payoff_row[0, 0] = 5


def test_size_is_rows_plus_cols():
    assert gamma_game(3, 4).size == 7


def test_strategy_labels_round_trip():
    ref = StrategyRef(Player.COL, 2)
    assert ref.label == "c:3"
    assert StrategyRef.parse("c:3") == ref
    for bad in ("x:1", "r:0", "r", "r:a"):
        with pytest.raises(ValueError):
            StrategyRef.parse(bad)


def test_strategy_set_algebra():
    a = StrategySet([2, 0, 0], [1])
    assert a.rows == (0, 2)
    b = StrategySet([0], [1, 3])
    assert a.intersection(b) == StrategySet([0], [1])
    assert a.union(b) == StrategySet([0, 2], [1, 3])
    assert a.difference(b) == StrategySet([2], [])
    assert StrategyRef(Player.ROW, 2) in a
    assert str(a) == "rows {1,3} cols {2}"
    assert a.labels() == {"rows": [1, 3], "cols": [2]}


def test_mixture_validation():
    with pytest.raises(ValueError):
        MixedStrategy(Player.ROW, {0: F(1, 2)})
    with pytest.raises(ValueError):
        MixedStrategy(Player.ROW, {0: F(3, 2), 1: F(-1, 2)})
    m = MixedStrategy(Player.ROW, {0: 0.3, 1: 0.7})
    assert m.support == (0, 1)
    assert str(MixedStrategy.uniform(Player.ROW, [0, 1])) == "r:{1:1/2, 2:1/2}"


def test_point_mass_cell_of_gamma():
    g = gamma_game(3, 4)
    r1, c1 = MixedStrategy.point(Player.ROW, 0), MixedStrategy.point(Player.COL, 0)
    assert expected_utility(g, Player.ROW, r1, c1) == 0
    assert expected_utility(g, Player.COL, r1, c1) == 1


def test_point_mass_equals_entry_float():
    g = random_game(4, 5, 11)
    for i in range(4):
        for j in range(5):
            r, c = MixedStrategy.point(Player.ROW, i), MixedStrategy.point(Player.COL, j)
            assert expected_utility(g, Player.ROW, r, c) == g.payoff_row[i, j]
            assert expected_utility(g, Player.COL, r, c) == g.payoff_col[i, j]


def test_uniform_pennies_pays_half():
    r = MixedStrategy.uniform(Player.ROW, [0, 1])
    c = MixedStrategy.uniform(Player.COL, [0, 1])
    assert expected_utility(PENNIES, Player.ROW, r, c) == F(1, 2)
    assert expected_utility(PENNIES, Player.COL, r, c) == F(1, 2)


def test_expected_utility_checks_dimensions():
    with pytest.raises(ValueError):
        expected_utility(
            PENNIES, Player.ROW, MixedStrategy.point(Player.ROW, 5), MixedStrategy.point(Player.COL, 0)
        )


probs3 = st.lists(st.integers(0, 20), min_size=3, max_size=3).filter(lambda v: sum(v) > 0)


def _mix(player, weights):
    total = sum(weights)
    return MixedStrategy(player, {i: F(w, total) for i, w in enumerate(weights) if w})


@settings(max_examples=60, deadline=None)
@given(probs3, probs3, probs3, st.fractions(0, 1))
def test_expected_utility_is_bilinear(x, y1, y2, lam):
    g = Game(
        [[F(i * 3 + j, 7) - 1 for j in range(3)] for i in range(3)],
        [[F((i + 2 * j) % 5, 3) for j in range(3)] for i in range(3)],
    )
    row = _mix(Player.ROW, x)
    a, b = _mix(Player.COL, y1), _mix(Player.COL, y2)
    blend = {j: lam * a.probs.get(j, 0) + (1 - lam) * b.probs.get(j, 0) for j in range(3)}
    mixed = MixedStrategy(Player.COL, {j: p for j, p in blend.items() if p})
    for player in Player:
        lhs = expected_utility(g, player, row, mixed)
        rhs = lam * expected_utility(g, player, row, a) + (1 - lam) * expected_utility(g, player, row, b)
        assert lhs == rhs


def test_restrict_omega_corner_is_pennies():
    view = restrict(omega_game(2), StrategySet([0, 1], [0, 1]))
    assert view.to_game() == PENNIES


def test_restrict_full_is_identity():
    g = gamma_game(3, 4)
    assert restrict(g, g.full_set()).to_game() == g


def test_restrict_gamma_corner_row():
    view = restrict(gamma_game(3, 4), StrategySet([2], [2, 3]))
    assert (view.rows, view.cols) == (1, 2)
    assert list(view.payoff_row[0]) == [-3, -3]
    assert view.to_ambient(StrategySet([0], [1])) == StrategySet([2], [3])


def test_restrict_rejects_empty_side():
    with pytest.raises(ValueError):
        restrict(PENNIES, StrategySet([0], []))


def test_parse_smallest_file():
    g = parse_game("curbkit-game v1\n2 2\n0 1  1 0\n1 0  0 1\n")
    assert g == PENNIES


def test_fraction_token_is_exact():
    g = parse_game("curbkit-game v1\n1 1\n1/3 0\n")
    assert g.payoff_row[0, 0] == F(1, 3)
    assert g.is_rational


def test_decimal_file_is_float():
    g = parse_game("curbkit-game v1\n1 2\n0.5 1.5  0.25 2\n")
    assert not g.is_rational
    assert g.payoff_row[0, 1] == 0.25


def test_comments_and_blank_lines_ignored():
    text = "# hand made\ncurbkit-game v1\n\n1 1  # dims\n2 3\n"
    assert parse_game(text) == Game([[2]], [[3]])


@pytest.mark.parametrize(
    "text",
    [
        "2 2\n0 1 1 0\n1 0 0 1\n",
        "curbkit-game v1\n2 2\n0 1  1 0\n",
        "curbkit-game v1\n1 2\n0 1  1\n",
        "curbkit-game v1\n1 1\n1/0 1\n",
        "curbkit-game v1\n1 1\n1/2 0.5\n",
        "curbkit-game v1\n1 1\ninf 0.5\n",
        "curbkit-game v1\n1 1\nabc 1\n",
        "curbkit-game v1\nx 1\n1 1\n",
        "",
    ],
)
def test_malformed_input_rejected(text):
    with pytest.raises(GameFormatError):
        parse_game(text)


@pytest.mark.parametrize("game", [gamma_game(3, 4), omega_game(3), gamma_game(5, 2)])
def test_rational_round_trip(game):
    again = parse_game(serialize_game(game))
    assert again == game
    assert again.is_rational


def test_float_round_trip_is_bit_exact():
    g = random_game(3, 4, 5)
    again = parse_game(serialize_game(g))
    assert np.array_equal(again.payoff_row, g.payoff_row)
    assert np.array_equal(again.payoff_col, g.payoff_col)


def test_gamma_serialization_matches_table():
    assert serialize_game(gamma_game(3, 4)) == (
        "curbkit-game v1\n3 4\n"
        "0 1  1 0  0 1/2  1 1/4\n"
        "1 0  0 1  1 1/2  0 3/4\n"
        "1/3 1/2  2/3 1/2  -3 -3  -3 -4\n"
    )
