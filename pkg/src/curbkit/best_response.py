"""Best responses to mixtures and conditionally rational strategies."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.optimize import linprog

from .feasibility import EPS_FEAS, FeasibilityProblem, solve_feasibility
from .game import Game, MixedStrategy, Player


@dataclass
class SolverStats:
    """Work counters shared by one solver invocation."""

    lfp_calls: int = 0
    iterations: int = 0


def _check_indices(game: Game, player: Player, indices: Iterable[int], what: str) -> list[int]:
    out = sorted(set(int(i) for i in indices))
    limit = game.count(player)
    if out and (out[0] < 0 or out[-1] >= limit):
        raise IndexError(f"{what} {out} out of range for {limit} {player.name.lower()} strategies")
    return out


def best_responses_to_mixture(
    game: Game, player: Player, opponent_mix: MixedStrategy, among: Iterable[int] | None = None
) -> frozenset[int]:
    """Pure strategies of ``player`` maximising expected payoff against ``opponent_mix``."""
    if opponent_mix.player is not player.other:
        raise ValueError(f"{player.name} best responses need a {player.other.name} mixture")
    u = game.utility(player)
    pool = range(game.count(player)) if among is None else _check_indices(game, player, among, "strategies")
    q = opponent_mix.vector(game.count(player.other))
    values = {s: u[s].dot(q) for s in pool}
    best = max(values.values())
    tol = game.tolerance
    return frozenset(s for s, v in values.items() if v >= best - tol)


def all_conditionally_rational(
    game: Game,
    player: Player,
    comparison_set: Iterable[int],
    opponent_set: Iterable[int],
    candidates: Iterable[int] | None = None,
    stats: SolverStats | None = None,
) -> frozenset[int]:
    """Strategies in ``comparison_set`` that best-respond to some mixture over ``opponent_set``.

    Each candidate is tested with one feasibility system whose competitors are the
    other members of ``comparison_set``.  ``candidates`` limits which members are
    tested (callers that already hold some strategies skip them); by default all
    of ``comparison_set`` is tested.  Every test counts as one LFP call in
    ``stats``, including tests settled by the pure-strategy shortcuts below.
    """
    comp = _check_indices(game, player, comparison_set, "comparison set")
    opp = _check_indices(game, player.other, opponent_set, "opponent set")
    if candidates is None:
        cands = comp
    else:
        cands = _check_indices(game, player, candidates, "candidates")
        if not set(cands) <= set(comp):
            raise ValueError("candidates must lie inside the comparison set")
    if not opp or not cands:
        return frozenset()

    u = game.utility(player)
    sub = u[np.ix_(comp, opp)]
    tol = game.tolerance
    column_best = sub.max(axis=0)
    position = {s: k for k, s in enumerate(comp)}
    found = set()
    for s in cands:
        if stats is not None:
            stats.lfp_calls += 1
        mine = sub[position[s]]
        # best response to some pure opponent strategy
        if np.any(mine >= column_best - tol):
            found.add(s)
            continue
        # beaten everywhere by a single competitor
        if np.any(np.all(sub > mine + tol, axis=1)):
            continue
        diffs = mine - sub
        keep = [k for k in range(len(comp)) if k != position[s] and np.any(diffs[k] < 0)]
        problem = FeasibilityProblem(diffs[keep], len(opp))
        if solve_feasibility(problem).feasible:
            found.add(s)
    return frozenset(found)


def conditional_witness(
    game: Game, player: Player, s: int, comparison_set: Iterable[int], opponent_set: Iterable[int]
) -> MixedStrategy | None:
    """An opponent mixture over ``opponent_set`` making ``s`` a best response, or None."""
    comp = _check_indices(game, player, comparison_set, "comparison set")
    opp = _check_indices(game, player.other, opponent_set, "opponent set")
    if s not in comp:
        raise ValueError(f"strategy {s} is not in the comparison set")
    if not opp:
        return None
    u = game.utility(player)
    sub = u[np.ix_(comp, opp)]
    diffs = sub[comp.index(s)] - sub
    outcome = solve_feasibility(FeasibilityProblem(diffs, len(opp)))
    if not outcome.feasible:
        return None
    probs = {j: p for j, p in zip(opp, outcome.witness) if p != 0}
    return MixedStrategy(player.other, probs)


def is_never_best_response(
    game: Game,
    player: Player,
    s: int,
    opponent_set: Iterable[int],
    comparison_set: Iterable[int] | None = None,
) -> bool:
    """True iff a mixture over the other comparison strategies strictly beats ``s`` on ``opponent_set``.

    Independent of the feasibility engine: solves the dominance LP
    ``max delta`` s.t. ``q @ U[:, c] - U[s, c] >= delta`` with HiGHS.  For exact
    games a positive optimum must also come with a mixture that dominates
    ``s`` in exact arithmetic.
    """
    if comparison_set is None:
        comparison_set = range(game.count(player))
    comp = _check_indices(game, player, comparison_set, "comparison set")
    opp = _check_indices(game, player.other, opponent_set, "opponent set")
    if s not in comp:
        raise ValueError(f"strategy {s} is not in the comparison set")
    if not opp:
        return True
    others = [t for t in comp if t != s]
    if not others:
        return False

    u = game.utility(player)
    mine = u[s, opp]
    rivals = u[np.ix_(others, opp)]
    a = rivals.astype(float)
    b = mine.astype(float)
    n = len(others)
    # variables: q (n), delta; minimise -delta
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    a_ub = np.hstack([-a.T, np.ones((len(opp), 1))])
    b_ub = -b
    a_eq = np.hstack([np.ones((1, n)), np.zeros((1, 1))])
    scale = max(1.0, float(np.max(np.abs(np.concatenate([a.ravel(), b])))))
    bounds = [(0, None)] * n + [(-2 * scale - 1, None)]
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=bounds, method="highs")
    if res.status != 0:
        raise RuntimeError(f"dominance LP failed: {res.message}")
    margin = -res.fun
    if margin <= EPS_FEAS * scale:
        return False
    if not game.is_rational:
        return True
    q = [Fraction(max(x, 0.0)) for x in res.x[:n]]
    total = sum(q)
    if total == 0:
        return False
    for cand in (q, [x.limit_denominator(10**6) for x in q]):
        tot = sum(cand)
        cand = [x / tot for x in cand]
        mixed = [sum(cand[k] * rivals[k, c] for k in range(n)) for c in range(len(opp))]
        if all(m > v for m, v in zip(mixed, mine)):
            return True
    return False
