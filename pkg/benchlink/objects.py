"""MIT License

Copyright (c) 2024 - present Chessbench Development

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from __future__ import annotations

import chess
import chess.engine

from typing import Any, Dict, List, Optional, Tuple

from .enums import Color, GameResult, ScoreKind
from .utils import content_hash

MATE_CP: int = 32700

class PlayerInfo:
    """A player as named in the game header. A missing rating is None, never 0."""

    __slots__ = ("name", "elo")

    def __init__(self, *, name: str, elo: Optional[int] = None) -> None:
        if elo is not None and elo <= 0:
            elo = None

        self.name: str = name
        self.elo: Optional[int] = elo

    def __eq__(self, other) -> bool:
        return isinstance(other, PlayerInfo) and (self.name, self.elo) == (other.name, other.elo)

    def __repr__(self) -> str:
        return f"<Benchlink.PlayerInfo name={self.name!r} elo={self.elo}>"

    @property
    def data(self) -> dict:
        return {"name": self.name, "elo": self.elo}

    @classmethod
    def from_data(cls, data: dict) -> PlayerInfo:
        return cls(name=data.get("name", "?"), elo=data.get("elo"))

    @classmethod
    def from_tag(cls, name: Optional[str], elo: Optional[str]) -> PlayerInfo:
        try:
            rating = int(elo) if elo not in (None, "", "?", "-") else None
        except ValueError:
            rating = None
        return cls(name=name or "?", elo=rating)

class TimeControlSpec:
    """Base time, per-move increment and the time added when a move count is reached."""

    __slots__ = ("base_seconds", "increment_seconds", "additions")

    def __init__(
        self,
        *,
        base_seconds: int,
        increment_seconds: int = 0,
        additions: Optional[List[Tuple[int, int]]] = None
    ) -> None:
        additions = sorted((int(at), int(added)) for at, added in (additions or []))
        if base_seconds < 0 or increment_seconds < 0 or any(at < 0 or added < 0 for at, added in additions):
            raise ValueError("Time control fields must be non-negative.")

        self.base_seconds: int = int(base_seconds)
        self.increment_seconds: int = int(increment_seconds)
        self.additions: List[Tuple[int, int]] = additions

    def __eq__(self, other) -> bool:
        return isinstance(other, TimeControlSpec) and self.data == other.data

    def __repr__(self) -> str:
        return f"<Benchlink.TimeControlSpec tag={self.tag!r}>"

    def added_at(self, full_move: int) -> int:
        """Seconds added to a player's clock on completing the given full move."""
        return sum(added for at, added in self.additions if at == full_move)

    @property
    def first_control(self) -> Optional[int]:
        return self.additions[0][0] if self.additions else None

    @property
    def tag(self) -> str:
        period = f"{self.base_seconds}" + (f"+{self.increment_seconds}" if self.increment_seconds else "")
        if not self.additions:
            return period

        previous = 0
        periods = []
        for index, (at, added) in enumerate(self.additions):
            seconds = self.base_seconds if index == 0 else self.additions[index - 1][1]
            periods.append(f"{at - previous}/{seconds}" + (f"+{self.increment_seconds}" if self.increment_seconds else ""))
            previous = at
        periods.append(f"{self.additions[-1][1]}" + (f"+{self.increment_seconds}" if self.increment_seconds else ""))
        return ":".join(periods)

    @property
    def data(self) -> dict:
        return {
            "base_seconds": self.base_seconds,
            "increment_seconds": self.increment_seconds,
            "additions": [list(item) for item in self.additions]
        }

    @classmethod
    def from_data(cls, data: dict) -> TimeControlSpec:
        return cls(
            base_seconds=data.get("base_seconds", 0),
            increment_seconds=data.get("increment_seconds", 0),
            additions=[tuple(item) for item in data.get("additions", [])]
        )

    @classmethod
    def parse(cls, tag: Optional[str]) -> Optional[TimeControlSpec]:
        """
        Parses a PGN TimeControl tag.

        Examples:
            "5400+30" -> base 5400, increment 30
            "40/5400+30:1800+30" -> base 5400, increment 30, 1800 added at move 40
        """
        if not tag or tag.strip() in ("?", "-"):
            return None

        periods = tag.strip().split(":")
        base = increment = None
        additions: List[Tuple[int, int]] = []
        moves_so_far = 0
        try:
            for index, period in enumerate(periods):
                moves, _, rest = period.rpartition("/")
                seconds, _, inc = rest.partition("+")
                if base is None:
                    base, increment = int(float(seconds)), int(float(inc or 0))
                else:
                    additions.append((moves_so_far, int(float(seconds))))

                if moves:
                    moves_so_far += int(moves)
                elif index != len(periods) - 1:
                    # only the last period may be sudden death
                    return None
        except ValueError:
            return None

        return cls(base_seconds=base, increment_seconds=increment, additions=additions)

class MoveEvent:
    """One half-move of a recorded game."""

    __slots__ = ("ply", "mover", "san", "uci", "fen_before", "clock_after")

    def __init__(
        self,
        *,
        ply: int,
        mover: Color,
        san: str,
        uci: str,
        fen_before: str,
        clock_after: Optional[float] = None
    ) -> None:
        self.ply: int = ply
        self.mover: Color = mover
        self.san: str = san
        self.uci: str = uci
        self.fen_before: str = fen_before
        self.clock_after: Optional[float] = clock_after

    def __eq__(self, other) -> bool:
        return isinstance(other, MoveEvent) and self.data == other.data

    def __repr__(self) -> str:
        return f"<Benchlink.MoveEvent ply={self.ply} mover={self.mover} san={self.san!r}>"

    @property
    def full_move(self) -> int:
        """The mover's own move count, starting at 1."""
        return (self.ply + 1) // 2

    @property
    def fen_after(self) -> str:
        board = chess.Board(self.fen_before)
        board.push(chess.Move.from_uci(self.uci))
        return board.fen()

    @property
    def data(self) -> dict:
        return {
            "ply": self.ply,
            "mover": self.mover.value,
            "san": self.san,
            "uci": self.uci,
            "fen_before": self.fen_before,
            "clock_after": self.clock_after
        }

    @classmethod
    def from_data(cls, data: dict) -> MoveEvent:
        return cls(
            ply=data["ply"],
            mover=Color(data["mover"]),
            san=data["san"],
            uci=data["uci"],
            fen_before=data["fen_before"],
            clock_after=data.get("clock_after")
        )

class GameRecord:
    """One parsed game with its players, result, time control and ordered moves."""

    __slots__ = (
        "game_id",
        "event",
        "site",
        "date",
        "round",
        "white_player",
        "black_player",
        "result",
        "time_control",
        "moves"
    )

    def __init__(
        self,
        *,
        event: str,
        site: str,
        date: str,
        round: str,
        white_player: PlayerInfo,
        black_player: PlayerInfo,
        result: GameResult,
        time_control: Optional[TimeControlSpec],
        moves: List[MoveEvent]
    ) -> None:
        self.event: str = event
        self.site: str = site
        self.date: str = date
        self.round: str = round
        self.white_player: PlayerInfo = white_player
        self.black_player: PlayerInfo = black_player
        self.result: GameResult = result
        self.time_control: Optional[TimeControlSpec] = time_control
        self.moves: List[MoveEvent] = moves

        self.game_id: str = self.make_id(event, date, round, white_player.name, black_player.name)

    def __eq__(self, other) -> bool:
        return isinstance(other, GameRecord) and self.data == other.data

    def __repr__(self) -> str:
        return (
            f"<Benchlink.GameRecord id={self.game_id} white={self.white_player.name!r} "
            f"black={self.black_player.name!r} result={self.result} plies={len(self.moves)}>"
        )

    @staticmethod
    def make_id(event: str, date: str, round: str, white: str, black: str) -> str:
        return content_hash([event, date, round, white, black], length=16)

    @property
    def ratable(self) -> bool:
        return self.result is not GameResult.UNFINISHED

    def player(self, color: Color) -> PlayerInfo:
        return self.white_player if color is Color.WHITE else self.black_player

    def player_id(self, color: Color) -> str:
        return self.player(color).name

    @property
    def data(self) -> dict:
        return {
            "game_id": self.game_id,
            "event": self.event,
            "site": self.site,
            "date": self.date,
            "round": self.round,
            "white_player": self.white_player.data,
            "black_player": self.black_player.data,
            "result": self.result.value,
            "time_control": self.time_control.data if self.time_control else None,
            "moves": [move.data for move in self.moves]
        }

    @classmethod
    def from_data(cls, data: dict) -> GameRecord:
        return cls(
            event=data.get("event", "?"),
            site=data.get("site", "?"),
            date=data.get("date", "?"),
            round=data.get("round", "?"),
            white_player=PlayerInfo.from_data(data["white_player"]),
            black_player=PlayerInfo.from_data(data["black_player"]),
            result=GameResult(data["result"]),
            time_control=TimeControlSpec.from_data(data["time_control"]) if data.get("time_control") else None,
            moves=[MoveEvent.from_data(move) for move in data.get("moves", [])]
        )

class Score:
    """An engine score from the point of view of the side to move."""

    __slots__ = ("kind", "value")

    def __init__(self, kind: ScoreKind, value: int) -> None:
        if kind is ScoreKind.MATE_IN and value == 0:
            raise ValueError("A mate distance cannot be zero.")

        self.kind: ScoreKind = kind
        self.value: int = int(value)

    def __eq__(self, other) -> bool:
        return isinstance(other, Score) and (self.kind, self.value) == (other.kind, other.value)

    def __hash__(self) -> int:
        return hash((self.kind, self.value))

    def __repr__(self) -> str:
        return f"<Benchlink.Score {self.kind}={self.value}>"

    @property
    def centipawns(self) -> int:
        """Mover-perspective centipawns; mates map to sign(n) * (32700 - |n|), clamped to +/-32700."""
        if self.kind is ScoreKind.MATE_IN:
            magnitude = MATE_CP - abs(self.value)
            return magnitude if self.value > 0 else -magnitude
        return max(-MATE_CP, min(MATE_CP, self.value))

    @property
    def data(self) -> list:
        return [self.kind.value, self.value]

    @classmethod
    def from_data(cls, data: list) -> Score:
        return cls(ScoreKind(data[0]), data[1])

    @classmethod
    def from_engine(cls, score: chess.engine.Score) -> Score:
        if score.is_mate():
            moves = score.mate()
            if moves == 0:
                return cls(ScoreKind.CENTIPAWNS, -MATE_CP)
            return cls(ScoreKind.MATE_IN, moves)
        return cls(ScoreKind.CENTIPAWNS, score.score())

class EvalResult:
    """One engine analysis of one position: ranked candidate moves, best first."""

    __slots__ = ("fen", "engine_tag", "depth", "multipv", "lines", "nodes", "elapsed_seconds")

    def __init__(
        self,
        *,
        fen: str,
        engine_tag: str,
        depth: int,
        lines: List[Tuple[str, Score]],
        nodes: int,
        elapsed_seconds: float,
        multipv: Optional[int] = None
    ) -> None:
        if not lines:
            raise ValueError("An evaluation needs at least one line.")

        self.fen: str = fen
        self.engine_tag: str = engine_tag
        self.depth: int = depth
        self.multipv: int = multipv or len(lines)
        # stable, so engine order survives among equal scores
        self.lines: List[Tuple[str, Score]] = sorted(lines, key=lambda line: -line[1].centipawns)
        self.nodes: int = max(int(nodes), 1)
        self.elapsed_seconds: float = max(float(elapsed_seconds), 1e-6)

    def __eq__(self, other) -> bool:
        return isinstance(other, EvalResult) and self.data == other.data

    def __repr__(self) -> str:
        return f"<Benchlink.EvalResult engine={self.engine_tag} depth={self.depth} lines={len(self.lines)} best={self.best_move}>"

    @property
    def best_move(self) -> str:
        return self.lines[0][0]

    @property
    def best_cp(self) -> int:
        return self.lines[0][1].centipawns

    @property
    def mover(self) -> Color:
        return Color.WHITE if chess.Board(self.fen).turn == chess.WHITE else Color.BLACK

    def score_of(self, uci: str) -> Optional[int]:
        """Mover-perspective centipawns of a move if it is among the lines."""
        for move, score in self.lines:
            if move == uci:
                return score.centipawns
        return None

    @property
    def data(self) -> dict:
        return {
            "fen": self.fen,
            "engine_tag": self.engine_tag,
            "depth": self.depth,
            "multipv": self.multipv,
            "lines": [[move, score.data] for move, score in self.lines],
            "nodes": self.nodes,
            "elapsed_seconds": self.elapsed_seconds
        }

    @classmethod
    def from_data(cls, data: dict) -> EvalResult:
        return cls(
            fen=data["fen"],
            engine_tag=data["engine_tag"],
            depth=data["depth"],
            multipv=data.get("multipv"),
            lines=[(move, Score.from_data(score)) for move, score in data["lines"]],
            nodes=data["nodes"],
            elapsed_seconds=data["elapsed_seconds"]
        )
