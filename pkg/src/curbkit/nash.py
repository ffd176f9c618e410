"""Support-enumeration equilibria, regret checks and CURB preprocessing."""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .curb import CurbReport, smallest_minimal_curb
from .game import Game, GameView, MixedStrategy, Player, Scalar, StrategySet, unwrap

log = logging.getLogger(__name__)

EPS_NASH = 1e-8


@dataclass(frozen=True)
class NashProfile:
    row_mix: MixedStrategy
    col_mix: MixedStrategy
    regret: Scalar

    def to_dict(self) -> dict:
        def probs(mix):
            return {str(k + 1): str(v) for k, v in mix.probs.items() if v != 0}

        return {"row": probs(self.row_mix), "col": probs(self.col_mix), "regret": str(self.regret)}


def verify_equilibrium(game: Game, profile) -> Scalar:
    """Largest gain either player could get by a unilateral pure deviation.

    ``profile`` is a :class:`NashProfile` or a ``(row_mix, col_mix)`` pair; the
    result is zero exactly at an equilibrium (exact games).
    """
    if isinstance(profile, NashProfile):
        row_mix, col_mix = profile.row_mix, profile.col_mix
    else:
        row_mix, col_mix = profile
    if row_mix.player is not Player.ROW or col_mix.player is not Player.COL:
        raise ValueError("expected a row mixture and a column mixture")
    x = row_mix.vector(game.rows)
    y = col_mix.vector(game.cols)
    row_values = game.payoff_row.dot(y)
    col_values = x.dot(game.payoff_col)
    row_regret = max(row_values) - x.dot(row_values)
    col_regret = max(col_values) - col_values.dot(y)
    return max(row_regret, col_regret)


def _solve_exact(M: list[list[Fraction]], rhs: list[Fraction]):
    """Gaussian elimination; free variables are set to zero.

    Returns ``(solution, full_rank)`` or ``(None, full_rank)`` when inconsistent.
    """
    rows, cols = len(M), len(M[0])
    A = [list(M[i]) + [rhs[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    full_rank = len(pivots) == cols
    if any(A[i][-1] != 0 for i in range(r, rows)):
        return None, full_rank
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = A[i][-1]
    return x, full_rank


def _solve_float(M: np.ndarray, rhs: np.ndarray):
    x, _, rank, _ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.max(np.abs(M @ x - rhs)) > 1e-9:
        return None, rank == M.shape[1]
    return list(x), rank == M.shape[1]


def _indifferent_mix(game: Game, player: Player, own: tuple, opp: tuple):
    """Opponent mixture over ``opp`` making ``player`` indifferent across ``own``.

    Unknowns are the opponent probabilities plus the common payoff value.
    """
    u = game.utility(player)
    if game.is_rational:
        M = [[u[s, j] for j in opp] + [Fraction(-1)] for s in own]
        M.append([Fraction(1)] * len(opp) + [Fraction(0)])
        rhs = [Fraction(0)] * len(own) + [Fraction(1)]
        return _solve_exact(M, rhs)
    M = np.hstack([u[np.ix_(own, opp)], -np.ones((len(own), 1))])
    M = np.vstack([M, np.append(np.ones(len(opp)), 0.0)])
    rhs = np.append(np.zeros(len(own)), 1.0)
    return _solve_float(M, rhs)


def _as_mix(game: Game, player: Player, support: tuple, probs) -> MixedStrategy | None:
    tol = 0 if game.is_rational else EPS_NASH
    if any(p < -tol for p in probs):
        return None
    if game.is_rational:
        return MixedStrategy(player, {s: p for s, p in zip(support, probs) if p != 0})
    clipped = [max(p, 0.0) for p in probs]
    total = sum(clipped)
    return MixedStrategy(player, {s: p / total for s, p in zip(support, clipped) if p > 0})


def _support_pairs(within: StrategySet, max_support: int | None):
    rows, cols = within.rows, within.cols
    cap_r = len(rows) if max_support is None else min(max_support, len(rows))
    cap_c = len(cols) if max_support is None else min(max_support, len(cols))
    for total in range(2, cap_r + cap_c + 1):
        for a in range(max(1, total - cap_c), min(cap_r, total - 1) + 1):
            for I in itertools.combinations(rows, a):
                for J in itertools.combinations(cols, total - a):
                    yield I, J


def support_enumeration_nash(
    game: Game | GameView,
    within: StrategySet | None = None,
    max_support: int | None = None,
    stop_after_first: bool = False,
) -> list[NashProfile]:
    """Equilibria whose supports lie inside ``within``, smallest supports first.

    For each support pair the two indifference systems are solved for one
    particular solution; rank-deficient systems are not explored further, so
    degenerate games may have equilibria this misses.  Deviations are checked
    against every strategy of the ambient game, not just ``within``.
    """
    base, pool = unwrap(game)
    if within is None:
        within = pool
    if not within.both_nonempty or not within.issubset(pool):
        raise ValueError("`within` must be a nonempty subset of the game on both sides")

    tol = 0 if base.is_rational else EPS_NASH
    found: list[NashProfile] = []
    seen = set()
    degenerate = 0
    for I, J in _support_pairs(within, max_support):
        y, rank_c = _indifferent_mix(base, Player.ROW, I, J)
        if y is None:
            continue
        x, rank_r = _indifferent_mix(base, Player.COL, J, I)
        if x is None:
            continue
        if not (rank_c and rank_r):
            degenerate += 1
        col_mix = _as_mix(base, Player.COL, J, y[:-1])
        row_mix = _as_mix(base, Player.ROW, I, x[:-1])
        if col_mix is None or row_mix is None:
            continue
        regret = verify_equilibrium(base, (row_mix, col_mix))
        if regret > tol:
            continue
        key = (tuple(row_mix.probs.items()), tuple(col_mix.probs.items()))
        if base.is_rational and key in seen:
            continue
        if not base.is_rational and any(_close(p, row_mix, col_mix) for p in found):
            continue
        seen.add(key)
        found.append(NashProfile(row_mix, col_mix, max(regret, base.scalar(0))))
        if stop_after_first:
            break
    if not found and degenerate:
        log.warning("no equilibrium found; %d degenerate support pairs were skipped", degenerate)
    return found


def _close(profile: NashProfile, row_mix: MixedStrategy, col_mix: MixedStrategy) -> bool:
    def gap(a: MixedStrategy, b: MixedStrategy) -> float:
        keys = set(a.probs) | set(b.probs)
        return max(abs(a.probs.get(k, 0) - b.probs.get(k, 0)) for k in keys)

    return gap(profile.row_mix, row_mix) < 1e-7 and gap(profile.col_mix, col_mix) < 1e-7


def nash_via_curb_preprocessing(
    game: Game | GameView, max_support: int | None = None
) -> tuple[NashProfile, CurbReport]:
    """Find a smallest minimal CURB set, then one equilibrium supported inside it."""
    report = smallest_minimal_curb(game)
    profiles = support_enumeration_nash(game, report.set, max_support, stop_after_first=True)
    if not profiles:
        raise RuntimeError(f"no equilibrium found inside CURB set {report.set}")
    return profiles[0], report
