"""Phase-one simplex for conditional best-response feasibility systems.

A system asks for a probability vector ``p`` over the opponent's strategies
(``sum(p) == 1``, ``p >= 0``) such that ``D @ p >= 0`` holds row by row, where
row ``k`` of ``D`` is the payoff advantage of the candidate strategy over its
``k``-th competitor.

The solver maximises ``sum(p)`` subject to ``D @ p >= 0``, ``sum(p) <= 1`` and
``p >= 0``.  The slack of the last constraint plays the part of the single
artificial variable, so the all-slack basis is feasible from the start and the
system is feasible exactly when the optimum reaches one.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

EPS_FEAS = 1e-9
PIVOT_EPS = 1e-12
STALL_LIMIT = 50


@dataclass(frozen=True)
class FeasibilityProblem:
    difference_rows: np.ndarray
    var_count: int

    def __post_init__(self):
        rows = np.asarray(self.difference_rows)
        if rows.size == 0:
            rows = rows.reshape(0, self.var_count)
        if rows.ndim != 2 or rows.shape[1] != self.var_count:
            raise ValueError(
                f"difference rows have shape {rows.shape}, expected (k, {self.var_count})"
            )
        if self.var_count < 1:
            raise ValueError("a feasibility problem needs at least one variable")
        object.__setattr__(self, "difference_rows", rows)

    @property
    def exact(self) -> bool:
        return self.difference_rows.dtype == object

    @classmethod
    def from_rows(cls, rows, var_count: int | None = None) -> "FeasibilityProblem":
        """Build from nested lists; Fractions/ints give an exact problem."""
        rows = [list(r) for r in rows]
        if var_count is None:
            var_count = len(rows[0])
        flat = [v for r in rows for v in r]
        if any(isinstance(v, float) for v in flat):
            arr = np.array(rows, dtype=float).reshape(len(rows), var_count)
        else:
            arr = np.array(
                [[Fraction(v) for v in r] for r in rows], dtype=object
            ).reshape(len(rows), var_count)
        return cls(arr, var_count)


@dataclass(frozen=True)
class FeasibilityOutcome:
    feasible: bool
    witness: tuple | None = None
    pivots: int = 0


def _pivot(T: np.ndarray, r: int, j: int) -> None:
    pivot_row = T[r] / T[r, j]
    T -= np.outer(T[:, j], pivot_row)
    T[r] = pivot_row


def solve_feasibility(problem: FeasibilityProblem) -> FeasibilityOutcome:
    """Find a probability vector satisfying every difference row, if one exists.

    Exact problems pivot with Bland's rule on Fractions.  Float problems use the
    largest-coefficient rule and switch to Bland's rule after ``STALL_LIMIT``
    consecutive degenerate pivots.
    """
    D = problem.difference_rows
    k, m = D.shape
    exact = problem.exact
    zero, one = (Fraction(0), Fraction(1)) if exact else (0.0, 1.0)

    if k == 0:
        return FeasibilityOutcome(True, (one,) + (zero,) * (m - 1))

    width = m + k + 1
    if exact:
        T = np.full((k + 2, width + 1), zero, dtype=object)
    else:
        T = np.zeros((k + 2, width + 1))
    T[:k, :m] = -D
    T[np.arange(k), m + np.arange(k)] = one
    T[k, :m] = one
    T[k, m + k] = one
    T[k, -1] = one
    T[k + 1, :m] = one
    basis = list(range(m, m + k + 1))

    tol = 0 if exact else PIVOT_EPS
    target = one if exact else 1.0 - EPS_FEAS
    bland = exact
    stall = 0
    pivots = 0
    max_pivots = 50 * (width + k)

    while -T[-1, -1] < target:
        reduced = T[-1, :width]
        entering = np.nonzero(reduced > tol)[0]
        if entering.size == 0:
            break
        if bland:
            j = int(entering[0])
        else:
            j = int(entering[np.argmax(reduced[entering].astype(float))])
        column = T[: k + 1, j]
        candidates = np.nonzero(column > tol)[0]
        if candidates.size == 0:
            raise RuntimeError("unbounded phase-one problem; sum(p) <= 1 must bound it")
        ratios = T[candidates, -1] / column[candidates]
        best = min(ratios)
        slack = 0 if exact else PIVOT_EPS
        ties = [int(c) for c, q in zip(candidates, ratios) if q <= best + slack]
        r = min(ties, key=lambda c: basis[c])
        _pivot(T, r, j)
        basis[r] = j
        pivots += 1
        if not exact:
            stall = stall + 1 if best <= PIVOT_EPS else 0
            if stall > STALL_LIMIT:
                bland = True
        if pivots > max_pivots:
            raise RuntimeError(f"simplex did not terminate after {pivots} pivots")

    if not exact and not np.all(np.isfinite(T)):
        raise OverflowError("non-finite value in simplex tableau")

    value = -T[-1, -1]
    if value < target:
        return FeasibilityOutcome(False, None, pivots)

    p = [zero] * m
    for row, var in enumerate(basis):
        if var < m:
            p[var] = T[row, -1]
    if not exact:
        p = [max(v, 0.0) for v in p]
        total = sum(p)
        p = [v / total for v in p]
    return FeasibilityOutcome(True, tuple(p), pivots)


def witness_residual(problem: FeasibilityProblem, witness) -> float:
    """Largest violation of any constraint by ``witness`` (0 when all hold)."""
    p = np.asarray(witness, dtype=object if problem.exact else float)
    worst = abs(sum(p) - 1)
    if np.any(p < 0):
        worst = max(worst, -min(p))
    if problem.difference_rows.shape[0]:
        slack = problem.difference_rows.dot(p)
        worst = max(worst, -min(min(slack), 0))
    return worst
