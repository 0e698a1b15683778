import chess
import benchlink

def test_normalize_fen_drops_move_counters():
    assert benchlink.normalize_fen(chess.STARTING_FEN) == "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq -"
    assert benchlink.cache_key(chess.STARTING_FEN, "sf", 21, 6) == benchlink.cache_key(
        chess.STARTING_FEN.replace(" 0 1", " 7 30"), "sf", 21, 6
    )

def test_key_depends_on_engine_depth_and_multipv():
    keys = {
        benchlink.cache_key(chess.STARTING_FEN, "sf", 21, 6),
        benchlink.cache_key(chess.STARTING_FEN, "sf", 12, 6),
        benchlink.cache_key(chess.STARTING_FEN, "sf", 21, 1),
        benchlink.cache_key(chess.STARTING_FEN, "komodo", 21, 6)
    }
    assert len(keys) == 4

def test_put_and_get_survive_a_new_instance(tmp_path, make_eval):
    result = make_eval(chess.STARTING_FEN, [("e2e4", 30), ("d2d4", 25)], engine_tag="sf", depth=21)
    key = benchlink.EvalCache(tmp_path).put(result)

    reopened = benchlink.EvalCache(tmp_path)
    assert key in reopened
    assert reopened.get(chess.STARTING_FEN, "sf", 21, 2) == result
    assert reopened.get(chess.STARTING_FEN, "sf", 21, 6) is None
    assert (reopened.hits, reopened.misses) == (1, 1)
    assert not list(tmp_path.rglob("*.tmp"))

def test_unreadable_record_is_a_miss(tmp_path, make_eval):
    cache = benchlink.EvalCache(tmp_path)
    key = cache.put(make_eval(chess.STARTING_FEN, [("e2e4", 30)], engine_tag="sf", depth=5))
    cache.clear_buffer()
    (tmp_path / key[:2] / f"{key}.json").write_text("{truncated", encoding="utf8")

    assert cache.get_record(key) is None
    assert cache.misses == 1

def test_buffer_drops_least_recently_used(tmp_path, make_eval):
    cache = benchlink.EvalCache(tmp_path)
    cache._MAX_CACHE_SIZE = 2
    first, second, third = (
        cache.put(make_eval(chess.STARTING_FEN, [("e2e4", 30)], engine_tag="sf", depth=depth)) for depth in (1, 2, 3)
    )
    assert list(cache._buffer) == [second, third]

    cache.get_record(second)
    cache.get_record(first)

    assert list(cache._buffer) == [second, first]
    assert (cache.hits, cache.misses) == (2, 0)
