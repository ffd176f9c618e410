"""Game families: random, covariant, the Gamma family, padded embeddings and Omega_k.

Constructed families (Gamma, padded, Omega) are exact-rational; sampled
families are float.  Every sampler takes a ``numpy.random.Generator`` or an
integer seed for ``numpy.random.default_rng`` (PCG64).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .game import Game, NumericMode

DEFAULT_EPSILON = Fraction(1, 10)
DEFAULT_BIG_Z = Fraction(10**4)
FAMILIES = ("random", "covariant", "gamma", "padded", "omega")


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def random_game(rows: int, cols: int, rng=None) -> Game:
    """Every payoff i.i.d. uniform on [0, 1): the row matrix is drawn first, then the column matrix."""
    if rows < 1 or cols < 1:
        raise ValueError("a game needs at least one strategy per player")
    gen = _rng(rng)
    a = gen.random((rows, cols))
    b = gen.random((rows, cols))
    return Game(a, b, NumericMode.FLOAT)


def covariant_game(rows: int, cols: int, rho: float, rng=None) -> Game:
    """Per-cell standard normal payoff pairs with correlation ``rho``.

    Box-Muller on two uniforms ``u1, u2`` per cell (row-major order):
    ``z1 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)``, ``z2 = ... sin(2 pi u2)``;
    the row payoff is ``z1`` and the column payoff ``rho z1 + sqrt(1 - rho^2) z2``.
    """
    if rows < 1 or cols < 1:
        raise ValueError("a game needs at least one strategy per player")
    if not -1.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [-1, 1], got {rho}")
    gen = _rng(rng)
    u = gen.random((rows, cols, 2))
    radius = np.sqrt(-2.0 * np.log1p(-u[..., 0]))
    angle = 2.0 * math.pi * u[..., 1]
    z1 = radius * np.cos(angle)
    z2 = radius * np.sin(angle)
    return Game(z1, rho * z1 + math.sqrt(1.0 - rho * rho) * z2, NumericMode.FLOAT)


def grid_game(rows: int, cols: int, values: Sequence, rng=None) -> Game:
    """Exact game with every payoff drawn uniformly from ``values`` (ties are likely)."""
    gen = _rng(rng)
    pool = [Fraction(v) for v in values]
    a = [[pool[int(gen.integers(len(pool)))] for _ in range(cols)] for _ in range(rows)]
    b = [[pool[int(gen.integers(len(pool)))] for _ in range(cols)] for _ in range(rows)]
    return Game(a, b, NumericMode.RATIONAL)


def gamma_game(r_prime: int, c_prime: int) -> Game:
    """The r' x c' game whose only minimal CURB set is the whole game.

    The top-left 2x2 block is matching pennies; rows below it and columns right
    of it come in pairs that make every strategy a best response to a mixture
    over the first two opposing strategies.  Cells outside the first two rows
    and columns get ``(-i, -j)`` (1-based), e.g. -3,-3 and -3,-4 in the 3x4 game.
    """
    if r_prime < 2 or c_prime < 2:
        raise ValueError("Gamma games need at least two strategies per player")
    R, C = Fraction(r_prime), Fraction(c_prime)
    a = [[None] * c_prime for _ in range(r_prime)]
    b = [[None] * c_prime for _ in range(r_prime)]

    def put(i, j, x, y):
        a[i - 1][j - 1] = Fraction(x)
        b[i - 1][j - 1] = Fraction(y)

    put(1, 1, 0, 1)
    put(2, 2, 0, 1)
    put(1, 2, 1, 0)
    put(2, 1, 1, 0)
    for i in range(2, r_prime // 2 + 1):
        put(2 * i - 1, 1, (R - 2 * i + 2) / R, 1)
        put(2 * i - 1, 2, (2 * i - 2) / R, 0)
        put(2 * i, 1, (R - (2 * i - 1)) / R, 0)
        put(2 * i, 2, (2 * i - 1) / R, 1)
    if r_prime % 2:
        put(r_prime, 1, 1 / R, Fraction(1, 2))
        put(r_prime, 2, (R - 1) / R, Fraction(1, 2))
    for j in range(2, c_prime // 2 + 1):
        put(1, 2 * j - 1, 0, (C - 2 * j + 2) / C)
        put(2, 2 * j - 1, 1, (2 * j - 2) / C)
        put(1, 2 * j, 1, (C - (2 * j - 1)) / C)
        put(2, 2 * j, 0, (2 * j - 1) / C)
    if c_prime % 2:
        put(1, c_prime, Fraction(1, 2), 1 / C)
        put(2, c_prime, Fraction(1, 2), (C - 1) / C)
    for i in range(3, r_prime + 1):
        for j in range(3, c_prime + 1):
            put(i, j, -i, -j)
    return Game(a, b, NumericMode.RATIONAL)


def padded_game(r: int, c: int, r_prime: int, c_prime: int, rng=None) -> Game:
    """Gamma(r', c') top-left, Gamma(r - r', c - c') bottom-right, distinct negative fillers elsewhere.

    Filler cell number ``o`` (0-based, row-major unless ``rng`` shuffles the
    order) pays ``base - o / (count + 1)`` to both players, where ``base`` is
    ``-2`` or one below the lowest block payoff, whichever is smaller.  The
    bottom-right block is left out when either remainder is zero.
    """
    if not (2 <= r_prime <= r and 2 <= c_prime <= c):
        raise ValueError("need 2 <= r' <= r and 2 <= c' <= c")
    rest_r, rest_c = r - r_prime, c - c_prime
    if rest_r == 1 or rest_c == 1:
        raise ValueError("padding of exactly one row or column has no Gamma block")
    a = [[None] * c for _ in range(r)]
    b = [[None] * c for _ in range(r)]
    blocks = [(gamma_game(r_prime, c_prime), 0, 0)]
    if rest_r >= 2 and rest_c >= 2:
        blocks.append((gamma_game(rest_r, rest_c), r_prime, c_prime))
    lowest = Fraction(0)
    for block, di, dj in blocks:
        for i in range(block.rows):
            for j in range(block.cols):
                x, y = block.cell(i, j)
                a[di + i][dj + j] = x
                b[di + i][dj + j] = y
                lowest = min(lowest, x, y)
    empty = [(i, j) for i in range(r) for j in range(c) if a[i][j] is None]
    if rng is not None:
        order = _rng(rng).permutation(len(empty))
        empty = [empty[k] for k in order]
    base = min(Fraction(-2), lowest - 1)
    for o, (i, j) in enumerate(empty):
        value = base - Fraction(o, len(empty) + 1)
        a[i][j] = value
        b[i][j] = value
    return Game(a, b, NumericMode.RATIONAL)


def omega_game(k: int, epsilon=DEFAULT_EPSILON, big_z=DEFAULT_BIG_Z) -> Game:
    """The (2 + k) x (2 + k) game with one large minimal CURB set around a 2x2 equilibrium.

    The ``-Z`` band above and below the near-diagonal starts at strategy 2,
    which is what produces the ``(0, -Z)`` / ``(-Z, 0)`` cells at (r2, c4) and
    (r4, c2) of the 4x4 instance.
    """
    if k < 1:
        raise ValueError("Omega games need k >= 1")
    eps, Z = Fraction(epsilon), Fraction(big_z)
    if eps <= 0 or Z <= 0:
        raise ValueError("epsilon and Z must be positive")
    n = 2 + k
    a = [[None] * n for _ in range(n)]
    b = [[None] * n for _ in range(n)]

    def put(i, j, x, y):
        a[i - 1][j - 1] = Fraction(x)
        b[i - 1][j - 1] = Fraction(y)

    put(1, 1, 0, 1)
    put(2, 2, 0, 1)
    put(1, 2, 1, 0)
    put(2, 1, 1, 0)
    for i in range(3, n + 1):
        put(i, 1, -Z, eps)
        put(1, i, eps, -Z)
        put(i, i, 0, 0)
        put(i, i - 1, 1 + eps, 0)
        put(i - 1, i, 0, 1 + eps)
    for i in range(2, n + 1):
        for j in range(i + 2, n + 1):
            put(i, j, 0, -Z)
            put(j, i, -Z, 0)
    return Game(a, b, NumericMode.RATIONAL)


@dataclass(frozen=True)
class GeneratorSpec:
    """Family name plus whichever parameters that family reads."""

    family: str
    rows: int = 2
    cols: int = 2
    rho: float = 0.0
    r_prime: int = 2
    c_prime: int = 2
    k: int = 1
    epsilon: Fraction = field(default=DEFAULT_EPSILON)
    big_z: Fraction = field(default=DEFAULT_BIG_Z)
    rng_seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")
        if self.family == "gamma" and (self.rows < 2 or self.cols < 2):
            raise ValueError("Gamma games need rows, cols >= 2")
        if self.family == "padded":
            rest = (self.rows - self.r_prime, self.cols - self.c_prime)
            if self.r_prime < 2 or self.c_prime < 2 or min(rest) < 0 or 1 in rest:
                raise ValueError("padded games need r' , c' >= 2 and remainders of 0 or >= 2")
        if self.family == "omega" and (self.k < 1 or self.epsilon <= 0 or self.big_z <= 0):
            raise ValueError("Omega games need k >= 1, epsilon > 0, Z > 0")
        if self.family == "covariant" and not -1 <= self.rho <= 1:
            raise ValueError("rho must lie in [-1, 1]")
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")

    def build(self, rng=None) -> Game:
        rng = self.rng_seed if rng is None else rng
        if self.family == "random":
            return random_game(self.rows, self.cols, rng)
        if self.family == "covariant":
            return covariant_game(self.rows, self.cols, self.rho, rng)
        if self.family == "gamma":
            return gamma_game(self.rows, self.cols)
        if self.family == "padded":
            return padded_game(self.rows, self.cols, self.r_prime, self.c_prime, rng)
        return omega_game(self.k, self.epsilon, self.big_z)
