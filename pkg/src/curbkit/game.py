"""Two-player normal-form games, mixtures, subgame views and the game file format."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .feasibility import EPS_FEAS

Scalar = Union[Fraction, float]

FORMAT_HEADER = "curbkit-game v1"
MIX_TOLERANCE = 1e-12


class Player(enum.Enum):
    ROW = "r"
    COL = "c"

    @property
    def other(self) -> "Player":
        return Player.COL if self is Player.ROW else Player.ROW


class NumericMode(enum.Enum):
    RATIONAL = "rational"
    FLOAT = "float"


class GameFormatError(ValueError):
    """Raised when game text does not follow the canonical format."""


@dataclass(frozen=True, order=True)
class StrategyRef:
    player: Player
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"negative strategy index {self.index}")

    @property
    def label(self) -> str:
        return f"{self.player.value}:{self.index + 1}"

    @classmethod
    def parse(cls, label: str) -> "StrategyRef":
        """Parse a 1-based label such as ``r:2`` or ``c:1``."""
        side, sep, num = label.strip().partition(":")
        if not sep or side not in ("r", "c") or not num.isdigit() or int(num) < 1:
            raise ValueError(f"bad strategy label {label!r}")
        return cls(Player(side), int(num) - 1)


def _sorted_unique(indices: Iterable[int]) -> tuple[int, ...]:
    out = tuple(sorted(set(int(i) for i in indices)))
    if out and out[0] < 0:
        raise ValueError("negative strategy index")
    return out


@dataclass(frozen=True)
class StrategySet:
    """A pair of row and column index sets, kept sorted."""

    rows: tuple[int, ...] = ()
    cols: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rows", _sorted_unique(self.rows))
        object.__setattr__(self, "cols", _sorted_unique(self.cols))

    @classmethod
    def of(cls, refs: Iterable[StrategyRef]) -> "StrategySet":
        refs = list(refs)
        return cls(
            tuple(r.index for r in refs if r.player is Player.ROW),
            tuple(r.index for r in refs if r.player is Player.COL),
        )

    @property
    def size(self) -> int:
        return len(self.rows) + len(self.cols)

    @property
    def both_nonempty(self) -> bool:
        return bool(self.rows) and bool(self.cols)

    def side(self, player: Player) -> tuple[int, ...]:
        return self.rows if player is Player.ROW else self.cols

    def refs(self) -> list[StrategyRef]:
        return [StrategyRef(Player.ROW, i) for i in self.rows] + [
            StrategyRef(Player.COL, j) for j in self.cols
        ]

    def __contains__(self, ref: StrategyRef) -> bool:
        return ref.index in self.side(ref.player)

    def union(self, other: "StrategySet") -> "StrategySet":
        return StrategySet(self.rows + other.rows, self.cols + other.cols)

    def intersection(self, other: "StrategySet") -> "StrategySet":
        return StrategySet(
            set(self.rows) & set(other.rows), set(self.cols) & set(other.cols)
        )

    def difference(self, other: "StrategySet") -> "StrategySet":
        return StrategySet(
            set(self.rows) - set(other.rows), set(self.cols) - set(other.cols)
        )

    def issubset(self, other: "StrategySet") -> bool:
        return set(self.rows) <= set(other.rows) and set(self.cols) <= set(other.cols)

    def overlaps(self, other: "StrategySet") -> bool:
        return bool(set(self.rows) & set(other.rows) or set(self.cols) & set(other.cols))

    def labels(self) -> dict[str, list[int]]:
        """1-based labels, as shown to users."""
        return {"rows": [i + 1 for i in self.rows], "cols": [j + 1 for j in self.cols]}

    def __str__(self) -> str:
        rows = ",".join(str(i + 1) for i in self.rows)
        cols = ",".join(str(j + 1) for j in self.cols)
        return f"rows {{{rows}}} cols {{{cols}}}"


def _to_scalar(value, mode: NumericMode) -> Scalar:
    if mode is NumericMode.RATIONAL:
        if isinstance(value, float):
            raise TypeError("float payoff in a rational-mode game")
        return Fraction(value)
    out = float(value)
    if not math.isfinite(out):
        raise ValueError(f"non-finite payoff {value!r}")
    return out


def _infer_mode(values: Iterable) -> NumericMode:
    has_float = False
    for v in values:
        if isinstance(v, (float, np.floating)):
            has_float = True
        elif not isinstance(v, (int, Fraction, np.integer)):
            raise TypeError(f"unsupported payoff type {type(v).__name__}")
    if has_float and any(
        isinstance(v, Fraction) and v.denominator != 1 for v in values
    ):
        raise TypeError("a game cannot mix Fraction and float payoffs")
    return NumericMode.FLOAT if has_float else NumericMode.RATIONAL


class Game:
    """Immutable bimatrix game.

    ``payoff_row[i][j]`` and ``payoff_col[i][j]`` are the utilities of the row
    and column player when row ``i`` meets column ``j``.  Rational-mode games
    store :class:`fractions.Fraction` entries in object arrays; float-mode games
    store ``float64`` arrays.
    """

    def __init__(self, payoff_row, payoff_col, mode: NumericMode | None = None):
        a = np.asarray(payoff_row, dtype=object)
        b = np.asarray(payoff_col, dtype=object)
        if a.ndim != 2 or b.ndim != 2:
            raise ValueError("payoff matrices must be two-dimensional")
        if a.shape != b.shape:
            raise ValueError(f"payoff shapes differ: {a.shape} vs {b.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValueError("a game needs at least one strategy per player")
        if mode is None:
            mode = _infer_mode(list(a.flat) + list(b.flat))
        self.mode = mode
        if mode is NumericMode.RATIONAL:
            conv = np.vectorize(lambda v: _to_scalar(v, mode), otypes=[object])
            a, b = conv(a), conv(b)
        else:
            a = np.array([_to_scalar(v, mode) for v in a.flat], dtype=float).reshape(a.shape)
            b = np.array([_to_scalar(v, mode) for v in b.flat], dtype=float).reshape(b.shape)
        a.setflags(write=False)
        b.setflags(write=False)
        self.payoff_row = a
        self.payoff_col = b
        col_view = b.T
        self._utility = {Player.ROW: a, Player.COL: col_view}

    @property
    def rows(self) -> int:
        return self.payoff_row.shape[0]

    @property
    def cols(self) -> int:
        return self.payoff_row.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.payoff_row.shape

    @property
    def size(self) -> int:
        return self.rows + self.cols

    @property
    def is_rational(self) -> bool:
        return self.mode is NumericMode.RATIONAL

    @property
    def tolerance(self) -> float:
        """Comparison slack: zero for exact games."""
        return 0 if self.is_rational else EPS_FEAS

    def count(self, player: Player) -> int:
        return self.rows if player is Player.ROW else self.cols

    def utility(self, player: Player) -> np.ndarray:
        """Payoffs of ``player`` indexed ``[own strategy, opponent strategy]``."""
        return self._utility[player]

    def scalar(self, value) -> Scalar:
        if self.is_rational:
            return Fraction(value)
        return float(value)

    def full_set(self) -> StrategySet:
        return StrategySet(range(self.rows), range(self.cols))

    def cell(self, i: int, j: int) -> tuple[Scalar, Scalar]:
        return self.payoff_row[i, j], self.payoff_col[i, j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Game):
            return NotImplemented
        return (
            self.mode is other.mode
            and self.shape == other.shape
            and bool(np.all(self.payoff_row == other.payoff_row))
            and bool(np.all(self.payoff_col == other.payoff_col))
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Game({self.rows}x{self.cols}, {self.mode.value})"


@dataclass(frozen=True)
class GameView:
    """A subgame of ``parent`` that keeps ambient strategy indices.

    ``row_index[k]`` is the ambient row behind local row ``k``.
    """

    parent: Game
    row_index: tuple[int, ...]
    col_index: tuple[int, ...]

    @property
    def rows(self) -> int:
        return len(self.row_index)

    @property
    def cols(self) -> int:
        return len(self.col_index)

    @property
    def size(self) -> int:
        return self.rows + self.cols

    @property
    def mode(self) -> NumericMode:
        return self.parent.mode

    @property
    def payoff_row(self) -> np.ndarray:
        return self.parent.payoff_row[np.ix_(self.row_index, self.col_index)]

    @property
    def payoff_col(self) -> np.ndarray:
        return self.parent.payoff_col[np.ix_(self.row_index, self.col_index)]

    @property
    def pool(self) -> StrategySet:
        return StrategySet(self.row_index, self.col_index)

    def to_ambient(self, local: StrategySet) -> StrategySet:
        return StrategySet(
            (self.row_index[i] for i in local.rows),
            (self.col_index[j] for j in local.cols),
        )

    def to_game(self) -> Game:
        return Game(self.payoff_row, self.payoff_col, self.mode)


def restrict(game: Game | GameView, strategies: StrategySet) -> GameView:
    """Subgame on ``strategies`` (ambient indices of the underlying game)."""
    if not strategies.both_nonempty:
        raise ValueError("cannot restrict to a set with an empty side")
    base, pool = unwrap(game)
    if not strategies.issubset(pool):
        raise ValueError(f"{strategies} is not inside the game being restricted")
    return GameView(base, strategies.rows, strategies.cols)


def unwrap(game: Game | GameView) -> tuple[Game, StrategySet]:
    """The ambient game and the strategy pool a (possibly restricted) game spans."""
    if isinstance(game, GameView):
        return game.parent, game.pool
    return game, game.full_set()


@dataclass(frozen=True, eq=False)
class MixedStrategy:
    """Distribution over one player's pure strategies (index -> probability)."""

    player: Player
    probs: Mapping[int, Scalar]

    def __post_init__(self):
        probs = {int(k): v for k, v in sorted(self.probs.items())}
        if not probs:
            raise ValueError("empty mixture")
        if any(k < 0 for k in probs):
            raise ValueError("negative strategy index in mixture")
        if any(v < 0 for v in probs.values()):
            raise ValueError("negative probability in mixture")
        total = sum(probs.values())
        exact = all(isinstance(v, (int, Fraction)) for v in probs.values())
        if exact:
            if total != 1:
                raise ValueError(f"mixture sums to {total}, not 1")
            probs = {k: Fraction(v) for k, v in probs.items()}
        elif abs(float(total) - 1.0) > MIX_TOLERANCE:
            raise ValueError(f"mixture sums to {float(total)!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point(cls, player: Player, index: int, exact: bool = True) -> "MixedStrategy":
        return cls(player, {index: Fraction(1) if exact else 1.0})

    @classmethod
    def uniform(cls, player: Player, indices: Sequence[int], exact: bool = True) -> "MixedStrategy":
        indices = sorted(set(indices))
        p = Fraction(1, len(indices)) if exact else 1.0 / len(indices)
        return cls(player, {i: p for i in indices})

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.probs.values())

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, v in self.probs.items() if v > 0)

    def vector(self, n: int) -> np.ndarray:
        if max(self.probs) >= n:
            raise ValueError(f"mixture index {max(self.probs)} out of range for {n} strategies")
        if self.exact:
            out = np.array([Fraction(0)] * n, dtype=object)
        else:
            out = np.zeros(n)
        for k, v in self.probs.items():
            out[k] = v
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        mine = {k: v for k, v in self.probs.items() if v != 0}
        theirs = {k: v for k, v in other.probs.items() if v != 0}
        return self.player is other.player and mine == theirs

    def __str__(self) -> str:
        body = ", ".join(f"{k + 1}:{v}" for k, v in self.probs.items() if v != 0)
        return f"{self.player.value}:{{{body}}}"


def expected_utility(
    game: Game, player: Player, row_mix: MixedStrategy, col_mix: MixedStrategy
) -> Scalar:
    """Expected payoff of ``player`` when both mixtures are played."""
    if row_mix.player is not Player.ROW or col_mix.player is not Player.COL:
        raise ValueError("expected a row mixture and a column mixture")
    if max(row_mix.probs) >= game.rows or max(col_mix.probs) >= game.cols:
        raise ValueError("mixture refers to a strategy outside the game")
    u = game.payoff_row if player is Player.ROW else game.payoff_col
    total = game.scalar(0)
    for i, xi in row_mix.probs.items():
        if xi == 0:
            continue
        for j, yj in col_mix.probs.items():
            if yj:
                total += xi * yj * u[i, j]
    return total


# --- text format -----------------------------------------------------------


def _format_scalar(v: Scalar) -> str:
    if isinstance(v, Fraction):
        return str(v)
    return repr(float(v))


def serialize_game(game: Game | GameView) -> str:
    if isinstance(game, GameView):
        game = game.to_game()
    lines = [FORMAT_HEADER, f"{game.rows} {game.cols}"]
    for i in range(game.rows):
        cells = (
            f"{_format_scalar(game.payoff_row[i, j])} {_format_scalar(game.payoff_col[i, j])}"
            for j in range(game.cols)
        )
        lines.append("  ".join(cells))
    return "\n".join(lines) + "\n"


def _token_style(tok: str) -> str:
    if "/" in tok:
        return "fraction"
    try:
        int(tok)
        return "integer"
    except ValueError:
        return "decimal"


def parse_game(text: str) -> Game:
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines or lines[0] != FORMAT_HEADER:
        raise GameFormatError(f"missing header line {FORMAT_HEADER!r}")
    if len(lines) < 2:
        raise GameFormatError("missing dimension line")
    dims = lines[1].split()
    if len(dims) != 2 or not all(d.isdigit() for d in dims):
        raise GameFormatError(f"malformed dimension line {lines[1]!r}")
    rows, cols = int(dims[0]), int(dims[1])
    if rows < 1 or cols < 1:
        raise GameFormatError("dimensions must be positive")
    body = lines[2:]
    if len(body) != rows:
        raise GameFormatError(f"expected {rows} payoff lines, found {len(body)}")
    tokens = [line.split() for line in body]
    for i, toks in enumerate(tokens):
        if len(toks) != 2 * cols:
            raise GameFormatError(
                f"line {i + 3}: expected {2 * cols} entries, found {len(toks)}"
            )
    styles = {_token_style(t) for toks in tokens for t in toks}
    if "fraction" in styles and "decimal" in styles:
        raise GameFormatError("mixed fraction and decimal payoffs")
    rational = "decimal" not in styles

    def convert(tok: str) -> Scalar:
        try:
            if rational:
                num, _, den = tok.partition("/")
                if den and int(den) == 0:
                    raise GameFormatError(f"zero denominator in {tok!r}")
                return Fraction(tok)
            value = float(tok)
        except (ValueError, ZeroDivisionError) as exc:
            raise GameFormatError(f"bad payoff {tok!r}") from exc
        if not math.isfinite(value):
            raise GameFormatError(f"non-finite payoff {tok!r}")
        return value

    a = [[convert(t) for t in toks[0::2]] for toks in tokens]
    b = [[convert(t) for t in toks[1::2]] for toks in tokens]
    mode = NumericMode.RATIONAL if rational else NumericMode.FLOAT
    return Game(a, b, mode)
