import math
import json
import pytest
import chess
import numpy as np
import pandas as pd
import benchlink

from numpy.testing import assert_allclose
from benchlink import AdvantageCategory, Color
from conftest import RESTRICTED, SUPER, fill_cache, shuffle_game

AFTER_E4 = "rnbqkbnr/pppppppp/8/8/4P3/8/PPPP1PPP/RNBQKBNR b KQkq - 0 1"
FOOLS_MATE = "rnbqkbnr/pppp1ppp/8/4p3/6P1/5P2/PPPPP2P/RNBQKBNR b KQkq - 0 2"

def after(fen, uci):
    board = chess.Board(fen)
    board.push_uci(uci)
    return board.fen()

@pytest.fixture
def cache(tmp_path):
    return benchlink.EvalCache(tmp_path / "cache")

@pytest.fixture
def source(cache):
    return benchlink.BenchmarkSource(cache, SUPER, RESTRICTED)


@pytest.mark.parametrize("fen, mover_cp, mover, expected", [
    (AFTER_E4, -95, Color.BLACK, -0.95),
    (AFTER_E4, 0, Color.BLACK, 0.0),
    (chess.STARTING_FEN, 0, Color.WHITE, 0.0),
    (AFTER_E4, 100, Color.BLACK, 1.0)
])
def test_standing_from_mover_side(make_eval, fen, mover_cp, mover, expected):
    assert benchlink.standing(make_eval(fen, [("e7e5", mover_cp)] if mover is Color.BLACK else [("e2e4", mover_cp)]), mover) == expected

def test_worked_example_black_move(make_eval):
    # best continuation +0.95 for white; after black's move white stands at +1.14
    pair = benchlink.BenchmarkPair(
        fen=AFTER_E4,
        super_eval=make_eval(AFTER_E4, [("c7c5", -95)]),
        eval_after_human=make_eval(after(AFTER_E4, "e7e5"), [("g1f3", 114)])
    )

    assert pair.mover is Color.BLACK
    assert benchlink.human_performance(pair, "e7e5") == (0, -0.19)

def test_top_line_is_best(make_eval):
    pair = benchlink.BenchmarkPair(fen=AFTER_E4, super_eval=make_eval(AFTER_E4, [("c7c5", -20), ("e7e5", -30)]))

    assert benchlink.human_performance(pair, "c7c5") == (1, 0.0)

def test_tied_moves_are_all_best(make_eval):
    pair = benchlink.BenchmarkPair(fen=AFTER_E4, super_eval=make_eval(AFTER_E4, [("c7c5", -20), ("e7e5", -20)]))

    assert benchlink.human_performance(pair, "e7e5") == (1, 0.0)

def test_third_ranked_move(make_eval):
    lines = [("c7c5", 5), ("e7e5", 0), ("e7e6", -10), ("d7d5", -12), ("g8f6", -15), ("c7c6", -30)]
    pair = benchlink.BenchmarkPair(fen=AFTER_E4, super_eval=make_eval(AFTER_E4, lines))

    assert benchlink.human_performance(pair, "e7e6") == (0, -0.15)

def test_restricted_performance_in_lines(make_eval):
    pair = benchlink.BenchmarkPair(
        fen=AFTER_E4,
        super_eval=make_eval(AFTER_E4, [("c7c5", 20), ("e7e5", 12)]),
        restricted_move="e7e5"
    )

    assert benchlink.restricted_performance(pair) == -0.08

def test_restricted_performance_falls_back_to_after_eval(make_eval):
    # outside the lines; the mover stands at -0.30 after the move, best was -0.05
    pair = benchlink.BenchmarkPair(
        fen=AFTER_E4,
        super_eval=make_eval(AFTER_E4, [("c7c5", -5)]),
        restricted_move="h7h6",
        eval_after_restricted=make_eval(after(AFTER_E4, "h7h6"), [("d2d4", 30)])
    )

    assert benchlink.restricted_performance(pair) == -0.25

def test_fallback_needs_after_eval(make_eval):
    pair = benchlink.BenchmarkPair(fen=AFTER_E4, super_eval=make_eval(AFTER_E4, [("c7c5", -5)]))

    with pytest.raises(benchlink.MissingAfterEval):
        benchlink.human_performance(pair, "h7h6")
    with pytest.raises(benchlink.MissingEvaluation):
        benchlink.restricted_performance(pair)

def test_mating_move_needs_no_after_eval(make_eval):
    assert benchlink.after_move_cp(FOOLS_MATE, "d8h4", None) == benchlink.MATE_CP

    is_best, performance = benchlink.performance_cp(make_eval(FOOLS_MATE, [("g8f6", 50)]), FOOLS_MATE, "d8h4", None)
    assert (is_best, performance) == (0, benchlink.MATE_CP - 50)

@pytest.mark.parametrize("P_human, P_restricted, expected", [
    (-0.19, -0.19, (0.0, 0, 0, 0, 0, 0.0)),
    (0.00, -0.50, (0.5, 1, 1, 0, 1, math.log(1.5))),
    (-1.00, 0.00, (-1.0, 1, 0, 1, -1, -math.log(2)))
])
def test_delta_family(P_human, P_restricted, expected):
    result = benchlink.delta_family(P_human, P_restricted)

    assert result[:5] == expected[:5]
    assert result[5] == pytest.approx(expected[5], abs=1e-12)

def test_log_modulus_properties():
    assert benchlink.delta_family(1.0, 0.0)[5] == pytest.approx(0.693147, abs=1e-6)
    assert abs(benchlink.delta_family(1.0, 0.0)[5] - math.log(2)) < 1e-9

    values = [benchlink.delta_family(cp / 100, 0.0)[5] for cp in range(-500, 501, 7)]
    assert values == sorted(values) and len(set(values)) == len(values)
    for cp in (1, 19, 250):
        assert benchlink.delta_family(cp / 100, 0)[5] == -benchlink.delta_family(-cp / 100, 0)[5]

def test_delta_is_exact_on_centipawns():
    # 0.1 + 0.2 is not 0.3 in floating point, yet the centipawn difference is zero
    assert benchlink.delta_family(0.1 + 0.2, 0.3)[1] == 0

@pytest.mark.parametrize("value, category", [
    (0.0, AdvantageCategory.EQUAL),
    (0.29, AdvantageCategory.EQUAL),
    (0.3, AdvantageCategory.SLIGHT_ADVANTAGE),
    (-0.6, AdvantageCategory.SLIGHT_DISADVANTAGE),
    (0.7, AdvantageCategory.CLEAR_ADVANTAGE),
    (1.6, AdvantageCategory.CLEAR_ADVANTAGE),
    (-1.61, AdvantageCategory.DECISIVE_DISADVANTAGE)
])
def test_advantage_category(value, category):
    assert AdvantageCategory.from_standing(value) is category

def test_covariates(make_eval):
    game = shuffle_game()
    features = benchlink.derive_time_features(game)
    move = game.moves[60]
    super_eval = make_eval(move.fen_before, [(move.uci, 20), ("a2a3", -15)])

    fields = benchlink.covariates(game, move.ply, 0.6, (3.87, 120000), features, super_eval)

    assert (fields["better_pos"], fields["worse_pos"], fields["advantage_cat"]) == (1, 0, "slight_advantage")
    assert fields["dist_second_best"] == pytest.approx(-0.35)
    assert fields["num_previous_moves"] == 30
    assert fields["near_time_control"] == 1
    assert fields["complexity_seconds"] == 3.87 and fields["complexity_nodes"] == 120000
    assert fields["time_spent_minutes"] == pytest.approx(1.0)
    assert fields["opp_time_spent_minutes"] == pytest.approx(1.0)
    assert fields["favorite"] == 0 and fields["is_white"] == 1

def test_covariates_balanced_single_line(make_eval):
    game = shuffle_game()
    features = benchlink.derive_time_features(game)
    last = game.moves[-1]

    fields = benchlink.covariates(game, last.ply, 0.0, (1.0, 10), features, make_eval(last.fen_before, [(last.uci, 0)]))

    assert (fields["better_pos"], fields["worse_pos"], fields["advantage_cat"]) == (0, 0, "equal")
    assert fields["dist_second_best"] is None
    assert fields["opp_remaining_time_hours"] is None

def test_build_dataset_counts_rows(cache, source, make_eval):
    game = shuffle_game()
    fill_cache(cache, make_eval, game)

    dataset = benchlink.build_dataset([game], benchlink.DatasetFilter(), source)
    frame = dataset.frame

    assert len(dataset) == 50
    assert (frame["is_white"] == 1).sum() == 25
    assert list(frame["ply"]) == sorted(frame["ply"])
    assert frame["ply"].min() == 31
    assert (frame["delta"] == 0.2).all() and (frame["delta_P"] == 1).all()
    assert (frame["P_restricted_cp"] == -20).all() and (frame["is_best_human"] == 1).all()
    assert frame["near_time_control"].sum() == 20
    assert dataset.manifest["counts"]["plies_book"] == 30
    assert list(frame.columns) == list(benchlink.COLUMNS)

def test_null_deviation_oracle(cache, source, make_eval):
    game = shuffle_game()
    fill_cache(cache, make_eval, game)

    frame = benchlink.build_dataset([game], benchlink.DatasetFilter(), source, use_restricted_moves=True).frame

    assert (frame["delta"] == 0).all()
    assert (frame["delta_E"] == 0).all()

def test_rating_filter_excludes_game(cache, source, make_eval):
    game = shuffle_game(black_elo=2450)
    fill_cache(cache, make_eval, game)

    dataset = benchlink.build_dataset([game], benchlink.DatasetFilter(min_elo=2500), source)

    assert len(dataset) == 0
    assert dataset.manifest["counts"]["games_excluded_rating"] == 1

def test_unrated_players_need_zero_minimum():
    unrated = shuffle_game(white_elo=None)

    assert not benchlink.DatasetFilter().admits_game(unrated)
    assert benchlink.DatasetFilter(min_elo=0).admits_game(unrated)

def test_drop_zero_eval(cache, source, make_eval):
    game = shuffle_game()
    fill_cache(cache, make_eval, game, best_cp=0)

    dataset = benchlink.build_dataset([game], benchlink.DatasetFilter(drop_zero_eval=True), source)

    assert len(dataset) == 0
    assert dataset.manifest["counts"]["plies_zero_eval"] == 50

def test_missing_evaluations_abort(source):
    with pytest.raises(benchlink.DatasetAborted):
        benchlink.build_dataset([shuffle_game()], benchlink.DatasetFilter(), source)

def test_dataset_file_and_manifest(tmp_path, cache, source, make_eval):
    games = [shuffle_game(round="1"), shuffle_game(round="2")]
    for game in games:
        fill_cache(cache, make_eval, game)
    dataset = benchlink.build_dataset(games, benchlink.DatasetFilter(), source)

    path = tmp_path / "dataset.csv"
    benchlink.write_dataset(path, dataset)
    frame = benchlink.read_dataset(path)
    manifest = json.loads(benchlink.manifest_path(path).read_text(encoding="utf8"))

    assert len(frame) == 100
    assert list(frame.columns) == list(benchlink.COLUMNS)
    assert frame["opp_remaining_time_hours"].isna().sum() == 2
    assert manifest["counts"]["rows"] == 100
    assert manifest["engines"]["super"]["tag"] == "sf-super"
    assert ",," in path.read_text(encoding="utf8").splitlines()[-1]

def test_exact_identities_on_random_panel():
    rng = np.random.default_rng(11)
    human = rng.integers(-300, 40, size=2000)
    restricted = np.where(rng.random(2000) < 0.6, human, rng.integers(-300, 40, size=2000))
    frame = pd.DataFrame(
        [benchlink.delta_family(int(h) / 100, int(r) / 100) for h, r in zip(human, restricted)],
        columns=list(benchlink.DELTA_COLUMNS)
    )

    assert ((frame["delta_P"] + frame["delta_N"]) == frame["delta_E"]).all()
    assert (frame["delta_C"] == frame["delta_P"] - frame["delta_N"]).all()
    identity = benchlink.accounting_identity(frame)
    assert identity["gap"] < 1e-12
    assert 0 < identity["share_nonzero"] < 1
    assert_allclose(identity["mean_delta"], frame["delta"].mean(), rtol=1e-12)
