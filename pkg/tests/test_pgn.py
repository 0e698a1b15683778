import io
import pytest
import chess
import benchlink

from conftest import DESK_CORPUS

TWO_GAMES = """[Event "Test Open"]
[Site "?"]
[Date "2024.01.01"]
[Round "1"]
[White "Alpha"]
[Black "Beta"]
[Result "1-0"]
[WhiteElo "2610"]
[BlackElo "2555"]
[TimeControl "40/5400+30:1800+30"]

1. e4 {[%clk 1:59:30]} e5 {[%clk 1:59:45]} 2. Nf3 {[%clk 1:58:00]} Nc6 {[%clk 1:59:00]} 1-0

[Event "Test Open"]
[Site "?"]
[Date "2024.01.01"]
[Round "2"]
[White "Beta"]
[Black "Alpha"]
[Result "*"]

1. d4 {[%clk 1:30:10]} d5 {[%clk 1:30:20]} *
"""

ILLEGAL_MIDDLE = """[White "A"]
[Black "B"]
[Result "1-0"]

1. e4 e5 1-0

[White "C"]
[Black "D"]
[Result "0-1"]

1. e4 Ke7 2. Ke5 0-1

[White "E"]
[Black "F"]
[Result "1/2-1/2"]

1. d4 d5 1/2-1/2
"""

def test_parse_two_games_with_clocks():
    games = benchlink.parse_pgn(TWO_GAMES)

    assert len(games) == 2
    first, second = games
    assert [move.clock_after for move in first.moves] == [7170, 7185, 7080, 7140]
    assert first.white_player == benchlink.PlayerInfo(name="Alpha", elo=2610)
    assert first.time_control.additions == [(40, 1800)]
    assert first.moves[0].uci == "e2e4" and first.moves[1].san == "e5"
    assert second.result is benchlink.GameResult.UNFINISHED and not second.ratable
    assert second.white_player.elo is None

def test_moves_replay_consistently():
    game = benchlink.parse_pgn(TWO_GAMES)[0]

    board = chess.Board()
    for ply, move in enumerate(game.moves, start=1):
        assert move.ply == ply
        assert move.fen_before == board.fen()
        board.push_uci(move.uci)
    assert game.moves[-1].fen_after == board.fen()

def test_illegal_game_is_skipped_with_diagnostic():
    diagnostics = []
    games = benchlink.parse_pgn(ILLEGAL_MIDDLE, diagnostics=diagnostics)

    assert [game.white_player.name for game in games] == ["A", "E"]
    assert len(diagnostics) == 1
    assert isinstance(diagnostics[0].error, benchlink.IllegalMove)
    assert diagnostics[0].line == 7
    assert diagnostics[0].data["error"] == "IllegalMove"

def test_missing_result_tag_is_malformed():
    diagnostics = []
    games = benchlink.parse_pgn('[White "A"]\n[Black "B"]\n\n1. e4 e5 *\n', diagnostics=diagnostics)

    assert games == []
    assert isinstance(diagnostics[0].error, benchlink.MalformedHeader)
    assert diagnostics[0].error.missing == ["Result"]

def test_desk_corpus_parses_completely():
    diagnostics = []
    games = benchlink.parse_pgn_file(DESK_CORPUS, diagnostics=diagnostics)

    assert diagnostics == []
    assert len(games) == 10
    assert len({game.game_id for game in games}) == 10
    assert all(move.clock_after is not None for game in games for move in game.moves)
    assert all(game.time_control.first_control == 40 for game in games)

@pytest.mark.parametrize("tag, base, increment, additions", [
    ("5400+30", 5400, 30, []),
    ("40/5400+30:1800+30", 5400, 30, [(40, 1800)]),
    ("40/7200:20/3600:900", 7200, 0, [(40, 3600), (60, 900)]),
    ("300", 300, 0, [])
])
def test_time_control_parse(tag, base, increment, additions):
    spec = benchlink.TimeControlSpec.parse(tag)

    assert (spec.base_seconds, spec.increment_seconds, spec.additions) == (base, increment, additions)

@pytest.mark.parametrize("tag", [None, "", "?", "-", "abc", "5400:1800"])
def test_time_control_parse_rejects(tag):
    assert benchlink.TimeControlSpec.parse(tag) is None

def test_time_control_tag_round_trip():
    for tag in ("5400+30", "40/5400+30:1800+30", "40/7200:20/3600:900"):
        assert benchlink.TimeControlSpec.parse(tag).tag == tag

def test_time_control_rejects_negative_fields():
    with pytest.raises(ValueError):
        benchlink.TimeControlSpec(base_seconds=-1)

def _game(clocks, control="40/5400+30:1800+30"):
    moves = []
    board = chess.Board()
    ucis = ["g1f3", "g8f6", "f3g1", "f6g8"] * ((len(clocks) + 3) // 4)
    for ply, (uci, clock) in enumerate(zip(ucis, clocks), start=1):
        move = chess.Move.from_uci(uci)
        moves.append(benchlink.MoveEvent(
            ply=ply,
            mover=benchlink.Color.WHITE if board.turn else benchlink.Color.BLACK,
            san=board.san(move),
            uci=uci,
            fen_before=board.fen(),
            clock_after=clock
        ))
        board.push(move)

    return benchlink.GameRecord(
        event="Clock test",
        site="?",
        date="?",
        round="?",
        white_player=benchlink.PlayerInfo(name="W", elo=2600),
        black_player=benchlink.PlayerInfo(name="B", elo=2600),
        result=benchlink.GameResult.DRAW,
        time_control=benchlink.TimeControlSpec.parse(control),
        moves=moves
    )

def test_time_spent_first_move_uses_base_time():
    features = benchlink.derive_time_features(_game([5340, 5400]))

    assert features[0].time_spent_minutes == pytest.approx(1.5)
    assert features[0].remaining_time_hours == pytest.approx(5340 / 3600)
    assert features[1].time_spent_minutes == pytest.approx(0.5)

def test_time_spent_includes_addition_at_control():
    # white's 39th move leaves 120s, the 40th leaves 1890s after the 1800s addition
    clocks = [5400] * 76 + [120, 5400, 1890, 5400]
    features = benchlink.derive_time_features(_game(clocks))

    fortieth = features[78]
    assert fortieth.ply == 79
    assert fortieth.time_spent_minutes == pytest.approx(1.0)

def test_negative_spend_is_floored_and_flagged():
    features = benchlink.derive_time_features(_game([5340, 5400, 5500, 5400]))

    assert features[2].time_spent_minutes == 0
    assert features[2].anomaly
    assert all(feature.time_spent_minutes >= 0 for feature in features)

def test_missing_clock_marks_ply_and_next_spend():
    features = benchlink.derive_time_features(_game([5340, 5400, None, 5400, 5200, 5370]))

    assert features[2].missing
    assert features[2].remaining_time_hours is None
    assert features[4].time_spent_minutes is None
    assert features[5].time_spent_minutes == pytest.approx(1.0)

def test_unparsed_clock_comment_is_absent():
    game = benchlink.parse_pgn('[White "A"]\n[Black "B"]\n[Result "*"]\n\n1. e4 {a comment} e5 {[%clk 0:39:54]} *\n')[0]

    assert game.moves[0].clock_after is None
    assert game.moves[1].clock_after == 2394
    assert benchlink.derive_time_features(game)[1].remaining_time_hours == pytest.approx(0.665, abs=1e-3)

def test_write_pgn_round_trip():
    original = benchlink.parse_pgn(TWO_GAMES)[0]
    reparsed = benchlink.parse_pgn(benchlink.write_pgn(original))[0]

    assert reparsed == original

def test_store_round_trip(tmp_path):
    games = benchlink.parse_pgn_file(DESK_CORPUS)
    path = tmp_path / "games.jsonl"

    assert benchlink.write_store(path, games) == len(games)
    assert benchlink.read_store(path) == games

def test_time_control_falls_back_to_event_setting():
    text = '[Event "Club"]\n[White "A"]\n[Black "B"]\n[Result "*"]\n\n1. e4 *\n'
    controls = {"Club": {"base_seconds": 3600, "increment_seconds": 10}, "default": {"base_seconds": 60}}

    game = benchlink.parse_pgn(io.StringIO(text), time_controls=controls)[0]

    assert game.time_control == benchlink.TimeControlSpec(base_seconds=3600, increment_seconds=10)

WRAPPED_CLOCKS = """[Event "Wrapped"]
[White "A"]
[Black "B"]
[Result "1/2-1/2"]
[TimeControl "5400+30"]

1. e4 {White opens with the king pawn
[%clk 1:29:50]} 1... e5 {[%clk 1:29:40]} 2. Nf3 {a developing move
[%clk 1:29:20]} 2... Nc6 {
[%clk 1:29:00]} 3. Bb5 {[%clk 1:28:30]} 3... a6 {[%clk 1:28:10]}
1/2-1/2

[Event "Wrapped"]
[White "B"]
[Black "A"]
[Result "*"]

1. d4 {[%clk 1:30:00]} *
"""

def test_wrapped_clock_comments_stay_in_their_game():
    diagnostics = []
    games = benchlink.parse_pgn(WRAPPED_CLOCKS, diagnostics=diagnostics)

    assert diagnostics == []
    assert [len(game.moves) for game in games] == [6, 1]
    assert [move.clock_after for move in games[0].moves] == [5390, 5380, 5360, 5340, 5310, 5290]

    board = chess.Board()
    for move in games[0].moves:
        board.push_uci(move.uci)
    assert board.ply() == len(games[0].moves)

def test_diagnostic_line_after_wrapped_comment():
    text = WRAPPED_CLOCKS + '\n[White "C"]\n[Black "D"]\n[Result "1-0"]\n\n1. e4 Ke7 2. Ke5 1-0\n'
    diagnostics = []

    games = benchlink.parse_pgn(text, diagnostics=diagnostics)

    assert len(games) == 2
    assert diagnostics[0].line == text.splitlines().index('[White "C"]') + 1
    assert diagnostics[0].game_index == 2

def test_game_without_time_control_keeps_remaining_time():
    text = '[Event "Club"]\n[White "A"]\n[Black "B"]\n[Result "*"]\n\n1. e4 {[%clk 0:59:50]} e5 {[%clk 0:59:40]} 2. Nf3 {[%clk 0:59:00]} *\n'

    game = benchlink.parse_pgn(text, time_controls={})[0]
    features = benchlink.derive_time_features(game)

    assert game.time_control is None
    assert [feature.remaining_time_hours for feature in features] == pytest.approx([3590 / 3600, 3580 / 3600, 3540 / 3600])
    assert all(feature.time_spent_minutes is None and not feature.missing for feature in features)
