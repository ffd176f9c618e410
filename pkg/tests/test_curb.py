import itertools

import numpy as np
import pytest

from curbkit.best_response import SolverStats
from curbkit.curb import (
    all_minimal_curb,
    find_size_two_curbs,
    is_curb,
    min_containing_curb,
    one_minimal_curb,
    smallest_minimal_curb,
    strict_pair_for,
)
from curbkit.game import Game, Player, StrategyRef, StrategySet, restrict
from curbkit.generators import gamma_game, omega_game, padded_game, random_game

from oracles import BruteForceCurb, rational_corpus

ROW, COL = Player.ROW, Player.COL
MERGE = Game([[1, 0], [0, 1]], [[1, 0], [1, 0]])
PENNIES = Game([[0, 1], [1, 0]], [[1, 0], [0, 1]])
CONSTANT = Game([[1] * 3] * 3, [[2] * 3] * 3)


def r(i):
    return StrategyRef(ROW, i)


def c(j):
    return StrategyRef(COL, j)


def test_is_curb_examples():
    assert is_curb(MERGE, StrategySet([0], [0]))
    assert not is_curb(MERGE, StrategySet([1], [0]))
    g = omega_game(2)
    assert is_curb(g, g.full_set())
    with pytest.raises(ValueError):
        is_curb(MERGE, StrategySet([0], []))


def test_size_two_examples():
    assert find_size_two_curbs(MERGE) == [StrategySet([0], [0])]
    assert find_size_two_curbs(PENNIES) == []
    assert find_size_two_curbs(CONSTANT) == []


def test_strict_pair_for_seed():
    assert strict_pair_for(MERGE, r(0)) == StrategySet([0], [0])
    assert strict_pair_for(MERGE, c(0)) == StrategySet([0], [0])
    assert strict_pair_for(MERGE, r(1)) is None


def test_containing_merge_seed_two():
    report = min_containing_curb(MERGE, r(1))
    assert report.set == StrategySet([0, 1], [0])
    assert report.size == 3
    assert report.seed == r(1)


def test_containing_merge_seed_one():
    assert min_containing_curb(MERGE, r(0)).set == StrategySet([0], [0])


def test_containing_omega_first_row():
    assert min_containing_curb(omega_game(2), r(0)).size == 8


def test_containing_column_seed():
    assert min_containing_curb(MERGE, c(1)).set == StrategySet([0, 1], [0, 1])


def test_containing_inside_view():
    g = padded_game(4, 4, 2, 2)
    view = restrict(g, StrategySet([2, 3], [2, 3]))
    assert min_containing_curb(view, r(2)).set == StrategySet([2, 3], [2, 3])
    with pytest.raises(ValueError):
        min_containing_curb(view, r(0))


def test_all_minimal_merge_game():
    reports = all_minimal_curb(MERGE)
    assert [x.set for x in reports] == [StrategySet([0], [0])]
    assert reports[0].minimal


def test_all_minimal_gamma():
    g = gamma_game(3, 4)
    assert [x.set for x in all_minimal_curb(g)] == [g.full_set()]


def test_all_minimal_two_blocks():
    sets = [x.set for x in all_minimal_curb(padded_game(4, 4, 2, 2))]
    assert sets == [StrategySet([0, 1], [0, 1]), StrategySet([2, 3], [2, 3])]


@pytest.mark.parametrize("seed", range(8))
def test_one_minimal_merge_game(seed):
    assert one_minimal_curb(MERGE, seed).set == StrategySet([0], [0])


def test_one_minimal_omega():
    g = omega_game(2)
    assert one_minimal_curb(g, 1).set == g.full_set()


def test_one_minimal_two_blocks_depends_on_rng():
    blocks = {StrategySet([0, 1], [0, 1]), StrategySet([2, 3], [2, 3])}
    seen = {one_minimal_curb(padded_game(4, 4, 2, 2), s).set for s in range(12)}
    assert seen == blocks


def test_smallest_examples():
    assert smallest_minimal_curb(MERGE).set == StrategySet([0], [0])
    assert smallest_minimal_curb(padded_game(6, 6, 2, 2)).set == StrategySet([0, 1], [0, 1])
    g = gamma_game(3, 4)
    assert smallest_minimal_curb(g).size == 7


def test_merge_game_brute_force():
    assert BruteForceCurb(MERGE).minimal() == {StrategySet([0], [0])}


def test_six_by_six_blocks_brute_force():
    found = BruteForceCurb(padded_game(6, 6, 2, 2)).minimal()
    assert sorted(s.size for s in found) == [4, 8]


CORPUS = rational_corpus(60, seed=11)


@pytest.mark.parametrize("k", range(len(CORPUS)))
def test_matches_brute_force(k):
    g = CORPUS[k]
    oracle = BruteForceCurb(g)
    assert {x.set for x in all_minimal_curb(g)} == oracle.minimal()
    for ref in g.full_set().refs():
        report = min_containing_curb(g, ref)
        assert report.set == oracle.smallest_containing(ref)
        # containment: inside every CURB set holding the seed
        assert all(report.set.issubset(s) for s in oracle.all_curb() if ref in s)


def _invariants(g):
    alls = [x.set for x in all_minimal_curb(g)]
    for s in alls:
        assert s.both_nonempty and is_curb(g, s)
    for a, b in itertools.combinations(alls, 2):
        assert not a.overlaps(b)
    containing = [min_containing_curb(g, ref).set for ref in g.full_set().refs()]
    for a, b in itertools.combinations(set(containing), 2):
        meet = a.intersection(b)
        if meet.both_nonempty:
            assert is_curb(g, meet)
    for seed in range(3):
        assert one_minimal_curb(g, seed).set in alls
    small = smallest_minimal_curb(g)
    assert is_curb(g, small.set)
    assert small.size == min(s.size for s in alls)


@pytest.mark.parametrize("k", range(len(CORPUS)))
def test_structural_invariants_rational(k):
    _invariants(CORPUS[k])


@pytest.mark.parametrize("seed", range(10))
def test_structural_invariants_float(seed):
    _invariants(random_game(6, 6, seed))


@pytest.mark.parametrize("k", range(0, len(CORPUS), 3))
def test_lfp_call_cap(k):
    g = CORPUS[k]
    for ref in g.full_set().refs():
        assert min_containing_curb(g, ref).lfp_calls <= 2 * g.size ** 2


def test_lfp_counts_accumulate_into_caller_stats():
    stats = SolverStats()
    a = min_containing_curb(omega_game(2), r(0), stats)
    b = min_containing_curb(omega_game(2), r(1), stats)
    assert stats.lfp_calls == a.lfp_calls + b.lfp_calls > 0


def test_deterministic_including_counters():
    g = random_game(8, 8, 42)
    assert all_minimal_curb(g) == all_minimal_curb(g)
    assert one_minimal_curb(g, 5) == one_minimal_curb(g, 5)
    assert smallest_minimal_curb(g) == smallest_minimal_curb(g)
    assert one_minimal_curb(g, np.random.default_rng(5)) == one_minimal_curb(g, 5)


def test_guard_counted_on_merge_game():
    assert all_minimal_curb(MERGE)[0].guard_triggers == 1
    assert all_minimal_curb(gamma_game(3, 3))[0].guard_triggers == 0


def test_report_dict_uses_one_based_labels():
    d = min_containing_curb(MERGE, r(1)).to_dict()
    assert d["rows"] == [1, 2] and d["cols"] == [1]
    assert d["seed"] == "r:2" and d["size"] == 3
