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

import io
import re
import json
import logging
import chess
import chess.pgn

from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, TextIO, Tuple, Union

from .config import Config
from .enums import Color, GameResult
from .exceptions import IllegalMove, MalformedHeader, MissingClock, PgnException
from .objects import GameRecord, MoveEvent, PlayerInfo, TimeControlSpec

logger: logging.Logger = logging.getLogger("benchlink.pgn")

REQUIRED_TAGS: Tuple[str, ...] = ("White", "Black", "Result")

SAN_REGEX = re.compile(r"san:? '?([^'\s]+)")


class PgnDiagnostic:
    """A skipped game: where it started in the source and why it failed."""

    __slots__ = ("line", "game_index", "error")

    def __init__(self, *, line: int, game_index: int, error: PgnException) -> None:
        self.line: int = line
        self.game_index: int = game_index
        self.error: PgnException = error

    def __repr__(self) -> str:
        return f"<Benchlink.PgnDiagnostic line={self.line} game={self.game_index} error={type(self.error).__name__}>"

    @property
    def data(self) -> dict:
        return {
            "line": self.line,
            "game_index": self.game_index,
            "error": type(self.error).__name__,
            "message": str(self.error)
        }


class TimeFeatures:
    """Clock derived features of one ply. `missing` marks an absent clock comment."""

    __slots__ = ("ply", "remaining_time_hours", "time_spent_minutes", "missing", "anomaly")

    def __init__(
        self,
        *,
        ply: int,
        remaining_time_hours: Optional[float] = None,
        time_spent_minutes: Optional[float] = None,
        missing: bool = False,
        anomaly: bool = False
    ) -> None:
        self.ply: int = ply
        self.remaining_time_hours: Optional[float] = remaining_time_hours
        self.time_spent_minutes: Optional[float] = time_spent_minutes
        self.missing: bool = missing
        self.anomaly: bool = anomaly

    def __repr__(self) -> str:
        return (
            f"<Benchlink.TimeFeatures ply={self.ply} remaining={self.remaining_time_hours} "
            f"spent={self.time_spent_minutes} missing={self.missing}>"
        )


class LineCounter:
    """Text stream wrapper that numbers the lines python-chess reads from it."""

    __slots__ = ("_stream", "line", "start")

    def __init__(self, stream: TextIO) -> None:
        self._stream: TextIO = stream
        self.line: int = 0
        self.start: Optional[int] = None

    def readline(self) -> str:
        text = self._stream.readline()
        if text:
            self.line += 1
            if self.start is None and text.strip() and not text.startswith(("%", ";")):
                self.start = self.line
        return text

    def mark(self) -> None:
        self.start = None


class TagRecorder(chess.pgn.GameBuilder):
    """GameBuilder that remembers which tags literally appear in the game's header."""

    def begin_game(self) -> None:
        self.tags_seen: Set[str] = set()
        super().begin_game()

    def visit_header(self, tagname: str, tagvalue: str) -> None:
        self.tags_seen.add(tagname)
        super().visit_header(tagname, tagvalue)


def _time_control_for(headers: chess.pgn.Headers, time_controls: Optional[Dict[str, dict]]) -> Optional[TimeControlSpec]:
    if spec := TimeControlSpec.parse(headers.get("TimeControl")):
        return spec

    event = headers.get("Event")
    if time_controls is not None:
        fallback = time_controls.get(event) or time_controls.get("default")
    else:
        fallback = Config.get_time_control(event)
    return TimeControlSpec.from_data(fallback) if fallback else None


def _build_record(game: chess.pgn.Game, tags_seen: Set[str], time_controls: Optional[Dict[str, dict]]) -> GameRecord:
    if missing := [tag for tag in REQUIRED_TAGS if tag not in tags_seen]:
        raise MalformedHeader(missing)

    headers = game.headers
    result = GameResult.match(headers.get("Result"))
    if result is None:
        raise MalformedHeader(["Result"])

    white = PlayerInfo.from_tag(headers.get("White"), headers.get("WhiteElo"))
    black = PlayerInfo.from_tag(headers.get("Black"), headers.get("BlackElo"))
    label = f"{white.name} - {black.name}"

    board = game.board()
    moves: List[MoveEvent] = []
    for node in game.mainline():
        moves.append(MoveEvent(
            ply=board.ply() + 1,
            mover=Color.WHITE if board.turn == chess.WHITE else Color.BLACK,
            san=board.san(node.move),
            uci=node.move.uci(),
            fen_before=board.fen(),
            clock_after=node.clock()
        ))
        board.push(node.move)

    if game.errors:
        match = SAN_REGEX.search(str(game.errors[0]))
        raise IllegalMove(label, board.ply() + 1, match.group(1) if match else None)

    return GameRecord(
        event=headers.get("Event", "?"),
        site=headers.get("Site", "?"),
        date=headers.get("Date", "?"),
        round=headers.get("Round", "?"),
        white_player=white,
        black_player=black,
        result=result,
        time_control=_time_control_for(headers, time_controls),
        moves=moves
    )


def parse_pgn(
    source: Union[str, TextIO],
    *,
    time_controls: Optional[Dict[str, dict]] = None,
    diagnostics: Optional[List[PgnDiagnostic]] = None
) -> List[GameRecord]:
    """
    Parses every game of a PGN source into GameRecords.

    Games that fail are skipped; each failure is logged with its starting line
    and appended to `diagnostics` when a list is given.

    Args:
        source: PGN text or an open text stream.
        time_controls: Event name to time control mapping used when a game has no TimeControl tag.
                       Defaults to the `time_controls` section of the loaded settings.
        diagnostics: Optional list collecting a PgnDiagnostic per skipped game.
    """
    handle = LineCounter(io.StringIO(source) if isinstance(source, str) else source)
    builder = TagRecorder()

    games: List[GameRecord] = []
    index = 0
    while True:
        handle.mark()
        game = chess.pgn.read_game(handle, Visitor=lambda: builder)
        if game is None:
            break

        line = handle.start or handle.line
        try:
            record = _build_record(game, builder.tags_seen, time_controls)
        except PgnException as e:
            logger.warning("Skipping game %d starting at line %d: %s", index + 1, line, e)
            if diagnostics is not None:
                diagnostics.append(PgnDiagnostic(line=line, game_index=index, error=e))
        else:
            if not record.ratable:
                logger.debug("Game %s is unfinished; kept as non-ratable.", record.game_id)
            games.append(record)
        index += 1

    return games


def parse_pgn_file(path: Union[str, Path], **kwargs) -> List[GameRecord]:
    with open(path, encoding="utf-8-sig", errors="replace") as stream:
        return parse_pgn(stream, **kwargs)


def derive_time_features(game: GameRecord) -> List[TimeFeatures]:
    """
    Remaining time and time spent for every ply of a game.

    The time spent by the mover at their k-th move is
    (previous clock - current clock + increment + time added at move k) / 60 minutes,
    floored at 0 with `anomaly` set. The first move of each player uses the base time as
    its previous clock. A missing clock comment marks the ply `missing`, and the following
    move of that player has no time spent. Without a known time control the increments are
    unknown, so clocks still give the remaining time but no ply has a time spent.
    """
    control = game.time_control
    if control is None and game.moves:
        logger.info("Game %s has no known time control; time spent is left empty.", game.game_id)

    previous: Dict[Color, Optional[float]] = {
        color: float(control.base_seconds) if control else None for color in Color
    }

    features: List[TimeFeatures] = []
    for move in game.moves:
        if move.clock_after is None:
            logger.debug("%s (game %s)", MissingClock(move.ply), game.game_id)
            features.append(TimeFeatures(ply=move.ply, missing=True))
            previous[move.mover] = None
            continue

        spent, anomaly = None, False
        if control is not None and (prev := previous[move.mover]) is not None:
            raw = prev - move.clock_after + control.increment_seconds + control.added_at(move.full_move)
            if raw < 0:
                anomaly = True
                logger.debug("Clock anomaly at ply %d of game %s: %.1fs", move.ply, game.game_id, raw)
            spent = max(raw, 0.0) / 60

        features.append(TimeFeatures(
            ply=move.ply,
            remaining_time_hours=move.clock_after / 3600,
            time_spent_minutes=spent,
            anomaly=anomaly
        ))
        previous[move.mover] = move.clock_after

    return features


def write_pgn(game: GameRecord) -> str:
    """Serializes a GameRecord back to PGN with `[%clk]` comments."""
    pgn = chess.pgn.Game()
    pgn.headers["Event"] = game.event
    pgn.headers["Site"] = game.site
    pgn.headers["Date"] = game.date
    pgn.headers["Round"] = game.round
    pgn.headers["White"] = game.white_player.name
    pgn.headers["Black"] = game.black_player.name
    pgn.headers["Result"] = game.result.value
    for color, player in ((Color.WHITE, game.white_player), (Color.BLACK, game.black_player)):
        if player.elo is not None:
            pgn.headers[f"{color.value.title()}Elo"] = str(player.elo)
    if game.time_control:
        pgn.headers["TimeControl"] = game.time_control.tag

    if game.moves and game.moves[0].fen_before != chess.STARTING_FEN:
        pgn.setup(chess.Board(game.moves[0].fen_before))

    node = pgn
    for move in game.moves:
        node = node.add_variation(chess.Move.from_uci(move.uci))
        if move.clock_after is not None:
            node.set_clock(move.clock_after)

    return str(pgn)


def write_store(path: Union[str, Path], games: Iterable[GameRecord]) -> int:
    """Writes one JSON object per game. Returns the number of games written."""
    count = 0
    with open(path, "w", encoding="utf8") as stream:
        for game in games:
            stream.write(json.dumps(game.data, separators=(",", ":")) + "\n")
            count += 1
    return count


def read_store(path: Union[str, Path]) -> List[GameRecord]:
    with open(path, encoding="utf8") as stream:
        return [GameRecord.from_data(json.loads(line)) for line in stream if line.strip()]
