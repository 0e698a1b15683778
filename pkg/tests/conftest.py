import sys
import json
import chess
import pytest
import benchlink

from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple
from benchlink import Color, EngineRole

TESTS_DIR = Path(__file__).resolve().parent
ROOT_DIR = TESTS_DIR.parent
FAKE_ENGINE = TESTS_DIR / "fake_uci_engine.py"
DESK_CORPUS = ROOT_DIR / "data" / "desk_corpus.pgn"

REGRESSORS = ["remaining_time_hours", "num_previous_moves"]

SUPER = benchlink.EngineConfig(binary_path="sf", depth_limit=21, multipv=6, role=EngineRole.SUPER, engine_tag="sf-super")
RESTRICTED = benchlink.EngineConfig(binary_path="sf", depth_limit=12, role=EngineRole.RESTRICTED, engine_tag="sf-restricted")

SHUFFLE = ["g1f3", "g8f6", "f3g1", "f6g8"]

def shuffle_game(full_moves=40, white_elo=2600, black_elo=2600, round="1"):
    """Knights hopping back and forth; each player's clock loses 30s net per move."""
    board = chess.Board()
    moves = []
    for index in range(2 * full_moves):
        uci = SHUFFLE[index % 4]
        own_moves = index // 2 + 1
        clock = 5400 - 30 * own_moves + (1800 if own_moves >= 40 else 0)
        moves.append(benchlink.MoveEvent(
            ply=index + 1,
            mover=Color.WHITE if board.turn else Color.BLACK,
            san=board.san(chess.Move.from_uci(uci)),
            uci=uci,
            fen_before=board.fen(),
            clock_after=clock
        ))
        board.push_uci(uci)

    return benchlink.GameRecord(
        event="Shuffle",
        site="?",
        date="2024.01.01",
        round=round,
        white_player=benchlink.PlayerInfo(name="White", elo=white_elo),
        black_player=benchlink.PlayerInfo(name="Black", elo=black_elo),
        result=benchlink.GameResult.DRAW,
        time_control=benchlink.TimeControlSpec.parse("40/5400+30:1800+30"),
        moves=moves
    )

def fill_cache(cache, make_eval, game, *, best_cp=10, restricted_plays_second=True):
    """Super lines put the played move first and a pawn move 0.20 behind; the restricted engine picks the pawn move."""
    for move in game.moves:
        alternative = "a2a3" if move.mover is Color.WHITE else "a7a6"
        super_eval = make_eval(move.fen_before, [(move.uci, best_cp), (alternative, best_cp - 20)],
                               engine_tag="sf-super", depth=21, nodes=4000 + move.ply, elapsed_seconds=1.5, multipv=6)
        cache.put(super_eval)
        cache.put(make_eval(move.fen_before, [(alternative if restricted_plays_second else move.uci, 0)],
                            engine_tag="sf-restricted", depth=12))


def fake_engine_settings(
    tag: str,
    depth: int,
    *,
    role: str = "restricted",
    multipv: int = 1,
    flags: Iterable[str] = (),
    handshake_timeout: float = 10,
    search_timeout: float = 60
) -> Dict[str, Any]:
    return {
        "binary_path": sys.executable,
        "args": [str(FAKE_ENGINE), "--name", tag, *flags],
        "role": role,
        "engine_tag": tag,
        "depth_limit": depth,
        "multipv": multipv,
        "handshake_timeout": handshake_timeout,
        "search_timeout": search_timeout
    }

@pytest.fixture(autouse=True)
def fresh_state():
    yield
    benchlink.Config._instance = None
    benchlink.EnginePool._pools.clear()

@pytest.fixture
def engine_config() -> Callable[..., benchlink.EngineConfig]:
    def build(tag: str = "fake", depth: int = 1, **kwargs) -> benchlink.EngineConfig:
        return benchlink.EngineConfig.from_settings(fake_engine_settings(tag, depth, **kwargs))
    return build

@pytest.fixture
def make_eval() -> Callable[..., benchlink.EvalResult]:
    """EvalResult from (uci, mover-perspective centipawns) pairs."""
    def build(fen: str, lines: List[Tuple[str, int]], *, engine_tag: str = "stub", depth: int = 21,
              nodes: int = 1000, elapsed_seconds: float = 0.5, multipv: Optional[int] = None) -> benchlink.EvalResult:
        return benchlink.EvalResult(
            fen=fen,
            engine_tag=engine_tag,
            depth=depth,
            lines=[(uci, benchlink.Score(benchlink.ScoreKind.CENTIPAWNS, cp)) for uci, cp in lines],
            nodes=nodes,
            elapsed_seconds=elapsed_seconds,
            multipv=multipv
        )
    return build

@pytest.fixture
def desk_settings(tmp_path) -> Dict[str, Any]:
    """Settings for a pipeline run over the desk corpus with the scripted engine."""
    return {
        "engines": {
            "super": fake_engine_settings("fake-super", 4, role="super", multipv=6),
            "restricted": fake_engine_settings("fake-restricted", 1)
        },
        "filters": {"min_elo": 0, "exclude_first_moves": 30, "require_clocks": True},
        "time_controls": {"default": {"base_seconds": 5400, "increment_seconds": 30, "additions": [[40, 1800]]}},
        "models": {
            "desk": {
                "title": "Desk corpus",
                "columns": [
                    {"name": "any deviation", "outcome": "delta_E", "regressors": REGRESSORS},
                    {"name": "total", "outcome": "delta", "regressors": REGRESSORS}
                ]
            }
        },
        "binned": [
            {"name": "previous_moves", "outcome": "delta_E", "variable": "num_previous_moves", "n_bins": 3}
        ],
        "simulation": {
            "positions": "synthetic",
            "n_games": 6,
            "moves_per_player": 10,
            "n_replications": 2,
            "seed": 7,
            "agents": {
                "null": {"deviation_prob": {"intercept": 0.0}},
                "independent": {"deviation_prob": {"intercept": 0.5}, "deviation_draw": {"p_positive": 0.5, "scale": 0.3}}
            }
        },
        "labels": {"delta_E": "Any deviation", "remaining_time_hours": "Remaining time (hours)"},
        "workers": 2,
        "run_dir": str(tmp_path / "run"),
        "logging": {"file": {"enable": False}, "level": {"benchlink": "DEBUG"}}
    }

@pytest.fixture
def settings_file(tmp_path, desk_settings) -> Path:
    path = tmp_path / "settings.json"
    path.write_text(json.dumps(desk_settings), encoding="utf8")
    return path
