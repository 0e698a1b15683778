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

import json
import logging
import chess
import pandas as pd

from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from .cache import EvalCache
from .enums import AdvantageCategory, Color
from .exceptions import DatasetAborted, MeasureException, MissingAfterEval, MissingEvaluation
from .objects import MATE_CP, EvalResult, GameRecord, MoveEvent
from .pgn import TimeFeatures, derive_time_features
from .pool import EngineConfig, complexity_of, score_to_pawn_units
from .utils import log_modulus, sign

logger: logging.Logger = logging.getLogger("benchlink.measures")

COLUMNS: Tuple[str, ...] = (
    "game_id",
    "player_id",
    "ply",
    "is_white",
    "favorite",
    "elo_player",
    "elo_opponent",
    "standing_pawnunits",
    "better_pos",
    "worse_pos",
    "advantage_cat",
    "remaining_time_hours",
    "num_previous_moves",
    "complexity_seconds",
    "complexity_nodes",
    "time_spent_minutes",
    "opp_remaining_time_hours",
    "opp_time_spent_minutes",
    "near_time_control",
    "game_duration_hours",
    "dist_second_best",
    "is_best_human",
    "is_best_restricted",
    "P_human_cp",
    "P_restricted_cp",
    "P_human",
    "P_restricted",
    "delta",
    "delta_E",
    "delta_P",
    "delta_N",
    "delta_C",
    "delta_L"
)

DELTA_COLUMNS: Tuple[str, ...] = ("delta", "delta_E", "delta_P", "delta_N", "delta_C", "delta_L")

MAX_FAILURE_SHARE: float = 0.10


class BenchmarkPair:
    """Everything needed to score the human and the restricted engine in one position."""

    __slots__ = ("fen", "super_eval", "restricted_move", "eval_after_human", "eval_after_restricted")

    def __init__(
        self,
        *,
        fen: str,
        super_eval: EvalResult,
        restricted_move: Optional[str] = None,
        eval_after_human: Optional[EvalResult] = None,
        eval_after_restricted: Optional[EvalResult] = None
    ) -> None:
        self.fen: str = fen
        self.super_eval: EvalResult = super_eval
        self.restricted_move: Optional[str] = restricted_move
        self.eval_after_human: Optional[EvalResult] = eval_after_human
        self.eval_after_restricted: Optional[EvalResult] = eval_after_restricted

    def __repr__(self) -> str:
        return f"<Benchlink.BenchmarkPair best={self.super_eval.best_move} restricted={self.restricted_move}>"

    @property
    def mover(self) -> Color:
        return Color.WHITE if chess.Board(self.fen).turn == chess.WHITE else Color.BLACK


class MoveObservation:
    """One row of the analysis panel."""

    __slots__ = COLUMNS

    def __init__(self, **fields: Any) -> None:
        for column in COLUMNS:
            setattr(self, column, fields.get(column))

    def __repr__(self) -> str:
        return f"<Benchlink.MoveObservation game={self.game_id} ply={self.ply} delta={self.delta}>"

    @property
    def data(self) -> Dict[str, Any]:
        return {column: getattr(self, column) for column in COLUMNS}


class DatasetFilter:
    """Which games and moves enter the panel."""

    __slots__ = ("min_elo", "max_elo", "exclude_first_moves", "drop_zero_eval", "require_clocks", "include_unfinished")

    def __init__(
        self,
        *,
        min_elo: int = 2500,
        max_elo: Optional[int] = None,
        exclude_first_moves: int = 15,
        drop_zero_eval: bool = False,
        require_clocks: bool = True,
        include_unfinished: bool = False
    ) -> None:
        if min_elo < 0 or exclude_first_moves < 0 or (max_elo is not None and max_elo < 0):
            raise ValueError("Filter thresholds must be non-negative.")

        self.min_elo: int = min_elo
        self.max_elo: Optional[int] = max_elo
        self.exclude_first_moves: int = exclude_first_moves
        self.drop_zero_eval: bool = drop_zero_eval
        self.require_clocks: bool = require_clocks
        self.include_unfinished: bool = include_unfinished

    def __repr__(self) -> str:
        return f"<Benchlink.DatasetFilter {self.data}>"

    def admits_player(self, elo: Optional[int]) -> bool:
        if elo is None:
            return self.min_elo == 0 and self.max_elo is None
        return elo >= self.min_elo and (self.max_elo is None or elo <= self.max_elo)

    def admits_game(self, game: GameRecord) -> bool:
        if not game.ratable and not self.include_unfinished:
            return False
        return self.admits_player(game.white_player.elo) and self.admits_player(game.black_player.elo)

    def is_book_move(self, move: MoveEvent) -> bool:
        return move.full_move <= self.exclude_first_moves

    @property
    def data(self) -> dict:
        return {slot: getattr(self, slot) for slot in self.__slots__}

    @classmethod
    def from_settings(cls, settings: Optional[Dict[str, Any]]) -> DatasetFilter:
        settings = settings or {}
        return cls(**{key: value for key, value in settings.items() if key in cls.__slots__})


class Dataset:
    """Panel rows together with the manifest of how they were built."""

    def __init__(self, rows: List[MoveObservation], manifest: Dict[str, Any]) -> None:
        self.rows: List[MoveObservation] = rows
        self.manifest: Dict[str, Any] = manifest

    def __len__(self) -> int:
        return len(self.rows)

    def __repr__(self) -> str:
        return f"<Benchlink.Dataset rows={len(self.rows)}>"

    @property
    def frame(self) -> pd.DataFrame:
        return pd.DataFrame([row.data for row in self.rows], columns=list(COLUMNS))


def standing_cp(super_eval: EvalResult, mover: Color) -> int:
    """Best-line score in centipawns from the mover's side."""
    white = score_to_pawn_units(super_eval.lines[0][1], super_eval.mover)
    return white if mover is Color.WHITE else -white

def standing(super_eval: EvalResult, mover: Color) -> float:
    return standing_cp(super_eval, mover) / 100

def after_move_cp(fen: str, uci: str, eval_after: Optional[EvalResult]) -> int:
    """
    Standing of the player who moved, in the position after the move.
    Checkmate counts as the full mate value for the mover and stalemate as 0;
    any other position needs the evaluation with the opponent to move.
    """
    board = chess.Board(fen)
    board.push(chess.Move.from_uci(uci))

    if board.is_checkmate():
        return MATE_CP
    if board.is_stalemate():
        return 0
    if eval_after is None:
        raise MissingAfterEval(f"No evaluation after '{uci}' in '{fen}'.")
    return -eval_after.best_cp

def performance_cp(super_eval: EvalResult, fen: str, uci: str, eval_after: Optional[EvalResult]) -> Tuple[int, int]:
    """(is_best, performance in centipawns) of a move against the best line."""
    best = super_eval.best_cp
    score = super_eval.score_of(uci)
    if score is None:
        score = after_move_cp(fen, uci, eval_after)

    performance = score - best
    return int(performance == 0), performance

def human_performance(pair: BenchmarkPair, played_uci: str) -> Tuple[int, float]:
    is_best, performance = performance_cp(pair.super_eval, pair.fen, played_uci, pair.eval_after_human)
    return is_best, performance / 100

def restricted_performance(pair: BenchmarkPair) -> float:
    if pair.restricted_move is None:
        raise MissingEvaluation(f"No restricted engine move for '{pair.fen}'.")

    _, performance = performance_cp(pair.super_eval, pair.fen, pair.restricted_move, pair.eval_after_restricted)
    return performance / 100

def delta_family(P_human: float, P_restricted: float) -> Tuple[float, int, int, int, int, float]:
    """
    (delta, delta_E, delta_P, delta_N, delta_C, delta_L) of a human and a restricted performance.
    The difference is taken on integer centipawns, so a zero is an exact zero.
    """
    difference = round(P_human * 100) - round(P_restricted * 100)
    delta = difference / 100
    delta_E = int(difference != 0)
    delta_P = int(difference > 0)
    delta_N = int(difference < 0)
    return delta, delta_E, delta_P, delta_N, sign(difference) * delta_E, log_modulus(delta)

def score_pair(pair: BenchmarkPair, played_uci: str) -> Dict[str, Any]:
    """Performance and deviation columns of a MoveObservation for `played_uci` in `pair`."""
    is_best_human, P_human = human_performance(pair, played_uci)
    P_restricted = restricted_performance(pair)

    fields: Dict[str, Any] = dict(zip(DELTA_COLUMNS, delta_family(P_human, P_restricted)))
    fields.update(
        is_best_human=is_best_human,
        is_best_restricted=int(round(P_restricted * 100) == 0),
        P_human_cp=round(P_human * 100),
        P_restricted_cp=round(P_restricted * 100),
        P_human=P_human,
        P_restricted=P_restricted
    )
    return fields

def covariates(
    game: GameRecord,
    ply: int,
    standing: float,
    complexity: Tuple[float, int],
    time_features: List[TimeFeatures],
    super_eval: Optional[EvalResult] = None
) -> Dict[str, Any]:
    """The covariate block of a MoveObservation for the move at `ply`."""
    by_ply = {feature.ply: feature for feature in time_features}
    move = next(move for move in game.moves if move.ply == ply)
    own = by_ply.get(ply)
    opponent = by_ply.get(ply + 1)

    player, rival = game.player(move.mover), game.player(move.mover.opponent)
    favorite = None
    if player.elo is not None and rival.elo is not None:
        favorite = int(player.elo > rival.elo)

    near_time_control = 0
    if control := game.time_control.first_control if game.time_control else None:
        near_time_control = int(control - 9 <= move.full_move <= control)

    spent_before = sum(
        feature.time_spent_minutes for feature in time_features
        if feature.ply < ply and feature.time_spent_minutes is not None
    )

    dist_second_best = None
    if super_eval is not None and len(super_eval.lines) > 1:
        dist_second_best = (super_eval.lines[1][1].centipawns - super_eval.lines[0][1].centipawns) / 100

    return {
        "game_id": game.game_id,
        "player_id": player.name,
        "ply": ply,
        "is_white": int(move.mover.is_white),
        "favorite": favorite,
        "elo_player": player.elo,
        "elo_opponent": rival.elo,
        "standing_pawnunits": standing,
        "better_pos": int(standing > 0.5),
        "worse_pos": int(standing < -0.5),
        "advantage_cat": AdvantageCategory.from_standing(standing).value,
        "remaining_time_hours": own.remaining_time_hours if own else None,
        "num_previous_moves": (ply - 1) // 2,
        "complexity_seconds": complexity[0],
        "complexity_nodes": complexity[1],
        "time_spent_minutes": own.time_spent_minutes if own else None,
        "opp_remaining_time_hours": opponent.remaining_time_hours if opponent else None,
        "opp_time_spent_minutes": opponent.time_spent_minutes if opponent else None,
        "near_time_control": near_time_control,
        "game_duration_hours": spent_before / 60,
        "dist_second_best": dist_second_best
    }


class BenchmarkSource:
    """Builds BenchmarkPairs from cached super and restricted engine evaluations."""

    def __init__(self, cache: EvalCache, super_config: EngineConfig, restricted_config: EngineConfig) -> None:
        self._cache: EvalCache = cache
        self._super: EngineConfig = super_config
        self._restricted: EngineConfig = restricted_config

    def __repr__(self) -> str:
        return f"<Benchlink.BenchmarkSource super={self._super.engine_tag} restricted={self._restricted.engine_tag}>"

    @property
    def engine_tags(self) -> Dict[str, Any]:
        return {
            "super": {"tag": self._super.engine_tag, "depth": self._super.depth_limit, "multipv": self._super.multipv},
            "restricted": {"tag": self._restricted.engine_tag, "depth": self._restricted.depth_limit}
        }

    def super_eval(self, fen: str, *, required: bool = True) -> Optional[EvalResult]:
        result = self._cache.get(fen, self._super.engine_tag, self._super.depth_limit, self._super.multipv)
        if result is None and required:
            raise MissingEvaluation(f"No '{self._super.engine_tag}' evaluation cached for '{fen}'.")
        return result

    def restricted_move(self, fen: str) -> str:
        result = self._cache.get(fen, self._restricted.engine_tag, self._restricted.depth_limit, 1)
        if result is None:
            raise MissingEvaluation(f"No '{self._restricted.engine_tag}' move cached for '{fen}'.")
        return result.best_move

    def _after(self, fen: str, uci: str) -> Optional[EvalResult]:
        board = chess.Board(fen)
        board.push(chess.Move.from_uci(uci))
        if board.is_checkmate() or board.is_stalemate():
            return None
        return self.super_eval(board.fen(), required=False)

    def pair(self, fen: str, human_uci: str) -> BenchmarkPair:
        restricted = self.restricted_move(fen)
        return BenchmarkPair(
            fen=fen,
            super_eval=self.super_eval(fen),
            restricted_move=restricted,
            eval_after_human=self._after(fen, human_uci),
            eval_after_restricted=self._after(fen, restricted)
        )


def observe(
    game: GameRecord,
    move: MoveEvent,
    time_features: List[TimeFeatures],
    source: BenchmarkSource,
    *,
    use_restricted_moves: bool = False
) -> MoveObservation:
    """Builds the full MoveObservation of one move."""
    restricted = source.restricted_move(move.fen_before)
    played = restricted if use_restricted_moves else move.uci
    pair = source.pair(move.fen_before, played)

    position = standing(pair.super_eval, move.mover)
    fields = covariates(game, move.ply, position, complexity_of(pair.super_eval), time_features, pair.super_eval)
    fields.update(score_pair(pair, played))
    return MoveObservation(**fields)

def build_dataset(
    games: Iterable[GameRecord],
    filter: DatasetFilter,
    source: BenchmarkSource,
    *,
    use_restricted_moves: bool = False
) -> Dataset:
    """
    Builds the move panel of all games passing the filter, ordered by (game_id, ply).

    Rows whose evaluations are missing are skipped and logged; more than 10% failing rows abort the build.
    With `use_restricted_moves` every human move is replaced by the restricted engine's choice.
    """
    counts = {
        "games_total": 0,
        "games_used": 0,
        "games_excluded_rating": 0,
        "games_excluded_unfinished": 0,
        "plies_total": 0,
        "plies_book": 0,
        "plies_missing_clock": 0,
        "plies_zero_eval": 0,
        "rows_failed": 0,
        "rows": 0
    }
    rows: List[MoveObservation] = []
    attempted = 0

    for game in sorted(games, key=lambda game: game.game_id):
        counts["games_total"] += 1
        counts["plies_total"] += len(game.moves)
        if not game.ratable and not filter.include_unfinished:
            counts["games_excluded_unfinished"] += 1
            continue
        if not filter.admits_game(game):
            counts["games_excluded_rating"] += 1
            continue

        counts["games_used"] += 1
        time_features = derive_time_features(game)
        by_ply = {feature.ply: feature for feature in time_features}

        for move in game.moves:
            if filter.is_book_move(move):
                counts["plies_book"] += 1
                continue
            if filter.require_clocks and by_ply[move.ply].missing:
                counts["plies_missing_clock"] += 1
                continue

            attempted += 1
            try:
                row = observe(game, move, time_features, source, use_restricted_moves=use_restricted_moves)
            except MeasureException as e:
                counts["rows_failed"] += 1
                logger.warning("Skipping ply %d of game %s: %s", move.ply, game.game_id, e)
                continue

            if filter.drop_zero_eval and row.standing_pawnunits == 0:
                counts["plies_zero_eval"] += 1
                continue
            rows.append(row)

    if attempted and counts["rows_failed"] / attempted > MAX_FAILURE_SHARE:
        raise DatasetAborted(
            f"{counts['rows_failed']} of {attempted} rows failed (more than {MAX_FAILURE_SHARE:.0%})."
        )

    rows.sort(key=lambda row: (row.game_id, row.ply))
    counts["rows"] = len(rows)
    if rows:
        counts["share_delta_zero"] = sum(1 for row in rows if row.delta_E == 0) / len(rows)

    logger.info("Built %d rows from %d of %d games.", len(rows), counts["games_used"], counts["games_total"])
    return Dataset(rows, {
        "filter": filter.data,
        "engines": source.engine_tags,
        "use_restricted_moves": use_restricted_moves,
        "counts": counts
    })

def manifest_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".manifest.json")

def write_dataset(path: Union[str, Path], dataset: Dataset) -> None:
    """Writes the delimited table (missing values as empty cells) and its manifest next to it."""
    dataset.frame.to_csv(path, index=False, na_rep="")
    with open(manifest_path(path), "w", encoding="utf8") as stream:
        json.dump(dataset.manifest, stream, indent=4, sort_keys=True)

def read_dataset(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, dtype={"game_id": str, "player_id": str, "advantage_cat": str})

def accounting_identity(frame: pd.DataFrame) -> Dict[str, float]:
    """mean(delta) against mean(delta | delta != 0) * share(delta != 0)."""
    delta = frame["delta"].to_numpy(dtype=float)
    nonzero = delta != 0
    share = float(nonzero.mean()) if len(delta) else 0.0
    conditional = float(delta[nonzero].mean()) if nonzero.any() else 0.0
    mean = float(delta.mean()) if len(delta) else 0.0
    return {
        "mean_delta": mean,
        "mean_delta_nonzero": conditional,
        "share_nonzero": share,
        "gap": abs(mean - conditional * share)
    }
