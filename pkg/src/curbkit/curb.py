"""CURB set solvers: minimal containing, all minimal, one minimal, smallest minimal."""
from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .best_response import SolverStats, all_conditionally_rational
from .game import Game, GameView, Player, StrategyRef, StrategySet, unwrap

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurbReport:
    set: StrategySet
    seed: StrategyRef | None = None
    lfp_calls: int = 0
    iterations: int = 0
    minimal: bool = False
    guard_triggers: int = 0

    @property
    def size(self) -> int:
        return self.set.size

    def to_dict(self) -> dict:
        return {
            **self.set.labels(),
            "size": self.size,
            "seed": self.seed.label if self.seed else None,
            "lfp_calls": self.lfp_calls,
            "iterations": self.iterations,
            "minimal": self.minimal,
            "guard_triggers": self.guard_triggers,
        }


def _responses(base: Game, pool: StrategySet, player: Player, opponents, skip, stats) -> frozenset[int]:
    comparison = pool.side(player)
    fresh = [s for s in comparison if s not in skip]
    return all_conditionally_rational(base, player, comparison, opponents, fresh, stats)


def is_curb(game: Game | GameView, strategies: StrategySet, stats: SolverStats | None = None) -> bool:
    """True iff no best response to a mixture over ``strategies`` falls outside it."""
    if not strategies.both_nonempty:
        raise ValueError("a CURB candidate needs strategies for both players")
    base, pool = unwrap(game)
    if not strategies.issubset(pool):
        raise ValueError(f"{strategies} is not inside the game")
    for player in (Player.ROW, Player.COL):
        own = set(strategies.side(player))
        outside = _responses(base, pool, player, strategies.side(player.other), own, stats)
        if outside:
            return False
    return True


def _argmax_sets(base: Game, pool: StrategySet, player: Player) -> dict[int, frozenset[int]]:
    """For each opponent strategy in the pool, ``player``'s best replies within the pool."""
    u = base.utility(player)
    own = list(pool.side(player))
    tol = base.tolerance
    out = {}
    for j in pool.side(player.other):
        column = u[own, j]
        best = column.max()
        out[j] = frozenset(s for s, v in zip(own, column) if v >= best - tol)
    return out


def find_size_two_curbs(game: Game | GameView) -> list[StrategySet]:
    """All strict pure equilibria, i.e. pairs of unique mutual best responses."""
    base, pool = unwrap(game)
    row_replies = _argmax_sets(base, pool, Player.ROW)
    col_replies = _argmax_sets(base, pool, Player.COL)
    found = []
    for r in pool.rows:
        cs = col_replies[r]
        if len(cs) == 1:
            (c,) = cs
            if row_replies[c] == {r}:
                found.append(StrategySet((r,), (c,)))
    return found


def strict_pair_for(game: Game | GameView, seed: StrategyRef) -> StrategySet | None:
    """The size-two CURB set containing ``seed``, found with two scans, or None."""
    base, pool = unwrap(game)
    tol = base.tolerance

    def unique_reply(player: Player, against: int) -> int | None:
        own = pool.side(player)
        column = base.utility(player)[list(own), against]
        best = column.max()
        winners = [s for s, v in zip(own, column) if v >= best - tol]
        return winners[0] if len(winners) == 1 else None

    reply = unique_reply(seed.player.other, seed.index)
    if reply is None or unique_reply(seed.player, reply) != seed.index:
        return None
    partner = StrategyRef(seed.player.other, reply)
    return StrategySet.of([seed, partner])


def _min_containing(base: Game, pool: StrategySet, seed: StrategyRef, stats: SolverStats) -> StrategySet:
    held = {Player.ROW: set(), Player.COL: set()}
    held[seed.player].add(seed.index)
    converged = False
    while not converged:
        converged = True
        stats.iterations += 1
        for player in (Player.ROW, Player.COL):
            added = _responses(base, pool, player, held[player.other], held[player], stats)
            if added:
                converged = False
                held[player] |= added
    return StrategySet(held[Player.ROW], held[Player.COL])


def min_containing_curb(
    game: Game | GameView, seed: StrategyRef, stats: SolverStats | None = None
) -> CurbReport:
    """The smallest CURB set of ``game`` containing ``seed``.

    Players alternate adding every strategy that best-responds to some mixture
    over the other side; old strategies are always kept.
    """
    base, pool = unwrap(game)
    if seed not in pool:
        raise ValueError(f"seed {seed.label} is not in the game")
    local = SolverStats()
    found = _min_containing(base, pool, seed, local)
    if stats is not None:
        stats.lfp_calls += local.lfp_calls
        stats.iterations += local.iterations
    return CurbReport(found, seed, local.lfp_calls, local.iterations)


def _inclusion_minimal(sets: list[StrategySet]) -> list[StrategySet]:
    unique = list(dict.fromkeys(sets))
    return [s for s in unique if not any(t != s and t.issubset(s) for t in unique)]


def _sort_key(s: StrategySet):
    return (s.rows, s.cols)


def all_minimal_curb(game: Game | GameView) -> list[CurbReport]:
    """Every minimal CURB set, sorted by their row indices.

    Strict pure equilibria are collected first and their strategies removed.
    Each remaining row then seeds a minimal-containing search inside the
    smallest CURB set already known to hold it.  Sets found in the reduced game
    are re-checked against the whole game; a failed check is counted in
    ``guard_triggers`` and the seeds are re-run on the whole game.
    """
    base, pool = unwrap(game)
    stats = SolverStats()
    pairs = find_size_two_curbs(game)
    taken = StrategySet.of(ref for p in pairs for ref in p.refs())
    working = pool.difference(taken)

    candidates: dict[StrategySet, StrategyRef] = {}
    smallest: dict[StrategyRef, StrategySet] = {}
    if working.both_nonempty:
        for r in working.rows:
            seed = StrategyRef(Player.ROW, r)
            container = smallest.get(seed, working)
            found = _min_containing(base, container, seed, stats)
            for ref in found.refs():
                known = smallest.get(ref)
                if known is None or found.size < known.size:
                    smallest[ref] = found
            if any(c.issubset(found) for c in candidates):
                continue
            candidates = {c: s for c, s in candidates.items() if not found.issubset(c)}
            candidates[found] = seed

    verified = list(pairs)
    fallback = []
    triggers = 0
    for cand, seed in candidates.items():
        # sets found without any strategies removed are CURB by construction
        if not pairs or is_curb(game, cand, stats):
            verified.append(cand)
            continue
        triggers += 1
        log.debug("reduced-game set %s is not CURB in the full game; re-seeding %s", cand, seed.label)
        fallback.append(_min_containing(base, pool, seed, stats))

    result = _inclusion_minimal(verified + fallback)
    return [
        CurbReport(s, None, stats.lfp_calls, stats.iterations, True, triggers)
        for s in sorted(result, key=_sort_key)
    ]


def _as_rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def one_minimal_curb(game: Game | GameView, rng=None) -> CurbReport:
    """One minimal CURB set, starting from a random row seed.

    After the first containing set is found the search narrows inside it,
    seeding every contained row once (in random order) until none shrinks it.
    Seeds are rows because every CURB set holds at least one row, so row seeds
    reach every minimal set inside the current one.
    """
    rng = _as_rng(rng)
    base, pool = unwrap(game)
    stats = SolverStats()
    first = StrategyRef(Player.ROW, pool.rows[int(rng.integers(len(pool.rows)))])
    pair = strict_pair_for(game, first)
    if pair is not None:
        return CurbReport(pair, first, 0, 0, True)

    current = _min_containing(base, pool, first, stats)
    used = {first.index}
    while True:
        fresh = [r for r in current.rows if r not in used]
        if not fresh:
            break
        seed = StrategyRef(Player.ROW, fresh[int(rng.integers(len(fresh)))])
        used.add(seed.index)
        pair = strict_pair_for(game, seed)
        if pair is not None:
            current = pair
            break
        found = _min_containing(base, current, seed, stats)
        if found != current:
            current = found
    return CurbReport(current, first, stats.lfp_calls, stats.iterations, True)


def smallest_minimal_curb(game: Game | GameView) -> CurbReport:
    """A CURB set no larger than any other CURB set of the game.

    Grows one candidate per row strategy in parallel, always expanding the
    smallest (ties: first inserted).  The first candidate that gains nothing is
    returned.  Candidates that become identical are expanded once.
    """
    base, pool = unwrap(game)
    pairs = find_size_two_curbs(game)
    if pairs:
        return CurbReport(pairs[0], None, 0, 0, True)

    stats = SolverStats()
    counter = itertools.count()
    queue = []
    seen = set()
    for r in pool.rows:
        entry = (frozenset([r]), frozenset())
        seen.add(entry)
        heapq.heappush(queue, (1, next(counter), entry))
    while queue:
        _, _, (rows, cols) = heapq.heappop(queue)
        stats.iterations += 1
        new_cols = cols | _responses(base, pool, Player.COL, rows, cols, stats)
        new_rows = rows | _responses(base, pool, Player.ROW, new_cols, rows, stats)
        if new_rows == rows and new_cols == cols:
            if rows and cols:
                return CurbReport(StrategySet(rows, cols), None, stats.lfp_calls, stats.iterations, True)
            continue
        entry = (new_rows, new_cols)
        if entry in seen:
            continue
        seen.add(entry)
        heapq.heappush(queue, (len(new_rows) + len(new_cols), next(counter), entry))
    raise RuntimeError("candidate queue exhausted without a CURB set")
