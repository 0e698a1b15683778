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

import argparse
import asyncio
import time
import chess
import humanize
import benchlink
import function as func

from typing import Any, Dict, List, Optional, Set, Tuple

def required_positions(games: List[benchlink.GameRecord], dataset_filter: benchlink.DatasetFilter) -> List[Tuple[str, str]]:
    """(fen, played uci) of every move the measures stage will look at, without duplicates."""
    positions = {}
    for game in games:
        if not dataset_filter.admits_game(game):
            continue
        for move in game.moves:
            if not dataset_filter.is_book_move(move):
                positions.setdefault((benchlink.normalize_fen(move.fen_before), move.uci), (move.fen_before, move.uci))
    return list(positions.values())

def _after(fen: str, uci: str) -> Optional[str]:
    board = chess.Board(fen)
    board.push_uci(uci)
    return None if board.is_checkmate() or board.is_stalemate() else board.fen()

class Evaluator:
    """Fills the eval cache for a list of positions with a super and a restricted engine pool."""

    def __init__(self, super_pool: benchlink.EnginePool, restricted_pool: benchlink.EnginePool) -> None:
        self.super_pool = super_pool
        self.restricted_pool = restricted_pool
        self.keys: Set[str] = set()
        self.done: int = 0
        self.engines: Dict[str, Any] = {
            "super": {**super_pool.config.data, "name": super_pool.engine_name},
            "restricted": {**restricted_pool.config.data, "name": restricted_pool.engine_name}
        }

    @property
    def stats(self) -> Dict[str, Dict[str, int]]:
        return {"super": self.super_pool.stats, "restricted": self.restricted_pool.stats}

    def _super_key(self, fen: str) -> str:
        config = self.super_pool.config
        return benchlink.cache_key(fen, config.engine_tag, config.depth_limit, config.multipv)

    async def position(self, fen: str, uci: str) -> None:
        await self.super_pool.evaluate(fen)
        self.keys.add(self._super_key(fen))

        restricted = await self.restricted_pool.choose_move(fen)
        config = self.restricted_pool.config
        self.keys.add(benchlink.cache_key(fen, config.engine_tag, config.depth_limit, 1))

        for move in dict.fromkeys([uci, restricted]):
            if after := _after(fen, move):
                await self.super_pool.evaluate(after)
                self.keys.add(self._super_key(after))
        self.done += 1

    async def run(self, positions: List[Tuple[str, str]], batch_size: int) -> None:
        started = time.monotonic()
        for start in range(0, len(positions), batch_size):
            batch = positions[start:start + batch_size]
            results = await asyncio.gather(*(self.position(fen, uci) for fen, uci in batch), return_exceptions=True)
            if errors := [result for result in results if isinstance(result, BaseException)]:
                raise errors[0]

            func.logger.info(
                "Evaluated %s of %s positions (%s elapsed).",
                humanize.intcomma(self.done), humanize.intcomma(len(positions)),
                humanize.naturaldelta(time.monotonic() - started)
            )

async def evaluate_all(
    positions: List[Tuple[str, str]],
    super_config: benchlink.EngineConfig,
    restricted_config: benchlink.EngineConfig,
    cache: benchlink.EvalCache,
    workers: int
) -> Evaluator:
    async with await benchlink.start_pool(super_config, workers, cache=cache) as super_pool:
        async with await benchlink.start_pool(restricted_config, workers, cache=cache) as restricted_pool:
            evaluator = Evaluator(super_pool, restricted_pool)
            await evaluator.run(positions, batch_size=max(workers * 8, 8))
    return evaluator

def evaluate(args: argparse.Namespace) -> int:
    config = benchlink.Config()
    super_config, restricted_config = func.engine_configs(args.restricted)
    stage = f"evaluate{func.stage_suffix(args.restricted, args.min_elo)}"
    dataset_filter = func.dataset_filter(min_elo=args.min_elo)
    games = func.load_games()

    cache = benchlink.EvalCache(func.run_path("cache"))
    keys_path = func.run_path(f"{stage}.keys.json")
    manifest = benchlink.RunManifest(
        stage,
        config={"super": super_config.data, "restricted": restricted_config.data},
        filter=dataset_filter.data,
        parent=func.parent_hash("ingest")
    )
    manifest.add_input("games.jsonl", func.run_path("games.jsonl"))

    if manifest.is_current(func.run_path()):
        keys = func.open_json(str(keys_path)).get("keys", [])
        if all(key in cache for key in keys):
            func.logger.info("Evaluation is up to date (%s cached records); nothing to do.", humanize.intcomma(len(keys)))
            return func.EXIT_OK

    positions = required_positions(games, dataset_filter)
    if not positions:
        func.logger.error("No positions to evaluate; check the filter settings.")
        return func.EXIT_EMPTY

    func.logger.info("Evaluating %s positions from %d game(s) with %d worker(s).",
                     humanize.intcomma(len(positions)), len(games), config.workers)
    try:
        evaluator = asyncio.run(evaluate_all(positions, super_config, restricted_config, cache, config.workers))
    except benchlink.EngineException:
        func.logger.error("Evaluation stopped; %s records are cached. Run evaluate again to resume.",
                          humanize.intcomma(cache.writes))
        raise

    manifest.engines = evaluator.engines
    manifest.finish(
        positions=len(positions),
        records=len(evaluator.keys),
        engine_calls={role: stats["engine_calls"] for role, stats in evaluator.stats.items()},
        cache_hits={role: stats["cache_hits"] for role, stats in evaluator.stats.items()}
    )
    func.write_json(keys_path, {"keys": sorted(evaluator.keys), "manifest": manifest.hash})
    manifest.add_artifact(keys_path.name, keys_path)
    manifest.write(func.run_path())
    func.logger.info("Evaluation complete: %s.", ", ".join(
        f"{role} {stats['engine_calls']} engine calls / {stats['cache_hits']} cache hits"
        for role, stats in evaluator.stats.items()
    ))
    return func.EXIT_OK

def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("evaluate", help="Fill the evaluation cache with both engines.")
    parser.add_argument("--restricted", default="restricted", help="Engine key to use as the restricted benchmark.")
    parser.add_argument("--min-elo", type=int, help="Lower rating bound for both players, overriding the configured filter.")
    parser.set_defaults(handler=evaluate)
