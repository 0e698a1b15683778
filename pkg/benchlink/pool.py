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

import time
import asyncio
import logging
import chess
import chess.engine

from contextlib import asynccontextmanager, suppress
from typing import Any, AsyncIterator, Dict, Iterable, List, Optional, Tuple

from .enums import Color, EngineRole
from .exceptions import (
    EngineCrash,
    EngineException,
    EngineSpawnError,
    IllegalFen,
    NoSessionsAvailable,
    UciHandshakeTimeout
)
from .cache import EvalCache
from .objects import MATE_CP, EvalResult, Score
from .utils import ExponentialBackoff

class EngineConfig:
    """How one UCI engine is started and searched."""

    __slots__ = (
        "binary_path",
        "args",
        "depth_limit",
        "multipv",
        "hash_mb",
        "threads",
        "role",
        "engine_tag",
        "handshake_timeout",
        "search_timeout",
        "deterministic"
    )

    def __init__(
        self,
        *,
        binary_path: str,
        depth_limit: int,
        role: EngineRole,
        engine_tag: str,
        multipv: int = 1,
        hash_mb: int = 16,
        threads: int = 1,
        args: Optional[List[str]] = None,
        handshake_timeout: float = 10.0,
        search_timeout: float = 300.0,
        deterministic: bool = True
    ) -> None:
        if depth_limit < 1:
            raise ValueError("depth_limit must be at least 1.")
        if multipv < 1:
            raise ValueError("multipv must be at least 1.")
        if search_timeout <= 0:
            raise ValueError("search_timeout must be positive.")
        if deterministic and threads != 1:
            logging.getLogger("benchlink.engine").warning(
                "Engine [%s] runs deterministic; threads forced from %d to 1.", engine_tag, threads
            )
            threads = 1

        self.binary_path: str = binary_path
        self.args: List[str] = list(args or [])
        self.depth_limit: int = depth_limit
        self.multipv: int = multipv
        self.hash_mb: int = hash_mb
        self.threads: int = threads
        self.role: EngineRole = role
        self.engine_tag: str = engine_tag
        self.handshake_timeout: float = handshake_timeout
        self.search_timeout: float = search_timeout
        self.deterministic: bool = deterministic

    def __repr__(self) -> str:
        return f"<Benchlink.EngineConfig tag={self.engine_tag} role={self.role} depth={self.depth_limit} multipv={self.multipv}>"

    @property
    def command(self) -> List[str]:
        return [self.binary_path, *self.args]

    @property
    def data(self) -> dict:
        return {
            "binary_path": self.binary_path,
            "args": self.args,
            "depth_limit": self.depth_limit,
            "multipv": self.multipv,
            "hash_mb": self.hash_mb,
            "threads": self.threads,
            "role": self.role.value,
            "engine_tag": self.engine_tag,
            "handshake_timeout": self.handshake_timeout,
            "search_timeout": self.search_timeout,
            "deterministic": self.deterministic
        }

    @classmethod
    def from_settings(cls, settings: Dict[str, Any]) -> EngineConfig:
        role = EngineRole.match(settings.get("role"))
        if role is None:
            raise ValueError(f"Unknown engine role '{settings.get('role')}'.")

        return cls(
            binary_path=settings.get("binary_path", "stockfish"),
            args=settings.get("args"),
            depth_limit=int(settings.get("depth_limit", 1)),
            multipv=int(settings.get("multipv", 1)),
            hash_mb=int(settings.get("hash_mb", 16)),
            threads=int(settings.get("threads", 1)),
            role=role,
            engine_tag=settings.get("engine_tag", role.value),
            handshake_timeout=float(settings.get("handshake_timeout", 10.0)),
            search_timeout=float(settings.get("search_timeout", 300.0)),
            deterministic=bool(settings.get("deterministic", True))
        )

def check_engine_pair(super_config: EngineConfig, restricted_config: EngineConfig) -> None:
    """The super engine must search strictly deeper than the restricted one."""
    if super_config.depth_limit <= restricted_config.depth_limit:
        raise EngineException(
            f"Super engine depth ({super_config.depth_limit}) must exceed "
            f"restricted engine depth ({restricted_config.depth_limit})."
        )

def score_to_pawn_units(score: Score, perspective: Color) -> int:
    """
    White-positive integer centipawns of a score reported for the side `perspective`.
    Mate in n maps to sign(n) * (32700 - |n|); everything is clamped to +/-32700.
    """
    value = max(-MATE_CP, min(MATE_CP, score.centipawns))
    return value if perspective is Color.WHITE else -value

def complexity_of(result: EvalResult) -> Tuple[float, int]:
    """Seconds and nodes the engine needed to reach its depth."""
    return result.elapsed_seconds, result.nodes

def _board_for(fen: str) -> chess.Board:
    try:
        board = chess.Board(fen)
    except ValueError:
        raise IllegalFen(fen)

    if not board.is_valid() or not any(board.legal_moves):
        raise IllegalFen(fen)
    return board


class EngineSession:
    """One running engine process, owned by a single request at a time."""

    def __init__(
        self,
        *,
        pool: EnginePool,
        config: EngineConfig,
        identifier: str,
        logger: logging.Logger
    ) -> None:
        self._pool: EnginePool = pool
        self._config: EngineConfig = config
        self._identifier: str = identifier
        self._logger: logging.Logger = logger

        self._transport: Optional[asyncio.SubprocessTransport] = None
        self._protocol: Optional[chess.engine.UciProtocol] = None
        self._backoff: ExponentialBackoff = ExponentialBackoff(base=0.25, maximum=4)

        self.searches: int = 0

    def __repr__(self) -> str:
        return f"<Benchlink.EngineSession id={self._identifier} alive={self.is_alive} searches={self.searches}>"

    @property
    def is_alive(self) -> bool:
        return self._protocol is not None and not self._protocol.returncode.done()

    @property
    def engine_name(self) -> str:
        return self._protocol.id.get("name", "") if self._protocol else ""

    async def start(self) -> EngineSession:
        """Spawns the process, waits for `uciok` and applies the hash and thread options."""
        try:
            self._transport, self._protocol = await asyncio.wait_for(
                chess.engine.popen_uci(self._config.command),
                timeout=self._config.handshake_timeout
            )
        except asyncio.TimeoutError:
            raise UciHandshakeTimeout(
                f"Engine '{self._config.binary_path}' did not answer 'uciok' within {self._config.handshake_timeout}s."
            )
        except (OSError, chess.engine.EngineError) as e:
            raise EngineSpawnError(self._config.binary_path, str(e))

        options = {}
        if "Hash" in self._protocol.options:
            options["Hash"] = self._config.hash_mb
        if "Threads" in self._protocol.options:
            options["Threads"] = self._config.threads
        await self._protocol.configure(options)

        self._logger.debug("Session [%s] is ready (%s).", self._identifier, self.engine_name or self._config.binary_path)
        return self

    async def close(self) -> None:
        if self._protocol is not None:
            with suppress(chess.engine.EngineError, asyncio.TimeoutError, OSError):
                await asyncio.wait_for(self._protocol.quit(), timeout=2)
        if self._transport is not None:
            self._transport.close()

        self._protocol = self._transport = None

    async def restart(self) -> None:
        retry = self._backoff.delay()
        self._logger.warning("Restarting session [%s] in %.2fs.", self._identifier, retry)
        await self.close()
        await asyncio.sleep(retry)
        await self.start()

    async def _search(self, board: chess.Board, multipv: int) -> List[chess.engine.InfoDict]:
        options = {}
        game = None
        if self._config.deterministic:
            # a fresh game object makes python-chess send ucinewgame
            game = object()
            if "Clear Hash" in self._protocol.options:
                options["Clear Hash"] = None

        return await asyncio.wait_for(
            self._protocol.analyse(
                board,
                chess.engine.Limit(depth=self._config.depth_limit),
                multipv=multipv,
                game=game,
                options=options
            ),
            timeout=self._config.search_timeout
        )

    async def search(self, board: chess.Board, multipv: int) -> EvalResult:
        """
        Runs one fixed-depth search. A crash, or a search outliving `search_timeout`,
        restarts the process and retries once.
        """
        started = time.perf_counter()
        try:
            infos = await self._search(board, multipv)
        except (chess.engine.EngineTerminatedError, asyncio.TimeoutError) as e:
            if isinstance(e, asyncio.TimeoutError):
                self._logger.error("Session [%s] gave no result within %.1fs.", self._identifier, self._config.search_timeout)
            else:
                self._logger.error("Session [%s] terminated: %s", self._identifier, e)
            await self.restart()
            started = time.perf_counter()
            try:
                infos = await self._search(board, multipv)
            except (chess.engine.EngineTerminatedError, asyncio.TimeoutError) as retry_error:
                raise EngineCrash(f"Engine '{self._config.engine_tag}' failed twice on '{board.fen()}'.") from retry_error
        wall = time.perf_counter() - started

        lines = [
            (info["pv"][0].uci(), Score.from_engine(info["score"].relative))
            for info in infos if info.get("pv") and "score" in info
        ]
        if not lines:
            raise EngineException(f"Engine '{self._config.engine_tag}' returned no lines for '{board.fen()}'.")

        reported = max((info.get("time", 0) for info in infos), default=0)
        self.searches += 1
        return EvalResult(
            fen=board.fen(),
            engine_tag=self._config.engine_tag,
            depth=self._config.depth_limit,
            multipv=multipv,
            lines=lines,
            nodes=max((info.get("nodes", 0) for info in infos), default=0),
            elapsed_seconds=reported if reported > 0 else wall
        )


class EnginePool:
    """
    A set of engine sessions sharing one EngineConfig.
    Requests take a free session from a queue; results go through the EvalCache when one is given.
    """

    _pools: Dict[str, EnginePool] = {}

    def __init__(
        self,
        *,
        config: EngineConfig,
        cache: Optional[EvalCache] = None,
        logger: Optional[logging.Logger] = None
    ) -> None:
        self._config: EngineConfig = config
        self._cache: Optional[EvalCache] = cache
        self._logger: logging.Logger = logger or logging.getLogger("benchlink.engine")

        self._sessions: List[EngineSession] = []
        self._idle: asyncio.Queue[EngineSession] = asyncio.Queue()

        self.engine_calls: int = 0
        self.cache_hits: int = 0

    def __repr__(self) -> str:
        return f"<Benchlink.EnginePool tag={self._config.engine_tag} sessions={self.session_count}>"

    @property
    def config(self) -> EngineConfig:
        return self._config

    @property
    def cache(self) -> Optional[EvalCache]:
        return self._cache

    @property
    def session_count(self) -> int:
        return len(self._sessions)

    @property
    def engine_name(self) -> str:
        return self._sessions[0].engine_name if self._sessions else ""

    @property
    def stats(self) -> Dict[str, int]:
        return {"engine_calls": self.engine_calls, "cache_hits": self.cache_hits}

    @classmethod
    def get_pool(cls, engine_tag: str) -> EnginePool:
        if (pool := cls._pools.get(engine_tag)) is None:
            raise NoSessionsAvailable(f"No engine pool is running for '{engine_tag}'.")
        return pool

    @classmethod
    async def create(
        cls,
        config: EngineConfig,
        workers: int = 1,
        *,
        cache: Optional[EvalCache] = None,
        logger: Optional[logging.Logger] = None
    ) -> EnginePool:
        """Starts `workers` sessions; if any of them fails, the others are closed again."""
        pool = cls(config=config, cache=cache, logger=logger)
        sessions = [
            EngineSession(pool=pool, config=config, identifier=f"{config.engine_tag}-{index}", logger=pool._logger)
            for index in range(max(int(workers), 1))
        ]

        results = await asyncio.gather(*(session.start() for session in sessions), return_exceptions=True)
        if errors := [result for result in results if isinstance(result, BaseException)]:
            await asyncio.gather(*(session.close() for session in sessions))
            raise errors[0]

        for session in sessions:
            pool._sessions.append(session)
            pool._idle.put_nowait(session)

        cls._pools[config.engine_tag] = pool
        pool._logger.info("Engine pool [%s] started with %d session(s).", config.engine_tag, len(sessions))
        return pool

    @asynccontextmanager
    async def _acquire(self) -> AsyncIterator[EngineSession]:
        if not self._sessions:
            raise NoSessionsAvailable(f"The engine pool '{self._config.engine_tag}' has no sessions.")

        session = await self._idle.get()
        try:
            yield session
        finally:
            self._idle.put_nowait(session)

    async def evaluate(self, fen: str, *, multipv: Optional[int] = None) -> EvalResult:
        """Fixed-depth evaluation of a position; identical requests are served from the cache."""
        multipv = multipv or self._config.multipv
        board = _board_for(fen)

        if self._cache is not None:
            if cached := self._cache.get(fen, self._config.engine_tag, self._config.depth_limit, multipv):
                self.cache_hits += 1
                return cached

        async with self._acquire() as session:
            result = await session.search(board, multipv)
        self.engine_calls += 1

        if self._cache is not None:
            self._cache.put(result)
        return result

    async def choose_move(self, fen: str) -> str:
        """The move this engine plays in the position."""
        return (await self.evaluate(fen, multipv=1)).best_move

    async def evaluate_many(self, fens: Iterable[str], *, multipv: Optional[int] = None) -> List[EvalResult]:
        return list(await asyncio.gather(*(self.evaluate(fen, multipv=multipv) for fen in fens)))

    async def close(self) -> None:
        await asyncio.gather(*(session.close() for session in self._sessions))
        self._sessions.clear()
        self._idle = asyncio.Queue()
        if self._pools.get(self._config.engine_tag) is self:
            del self._pools[self._config.engine_tag]
        self._logger.info("Engine pool [%s] closed (%d engine calls, %d cache hits).",
                          self._config.engine_tag, self.engine_calls, self.cache_hits)

    async def __aenter__(self) -> EnginePool:
        return self

    async def __aexit__(self, *exc) -> None:
        await self.close()


async def start_pool(config: EngineConfig, workers: int, *, cache: Optional[EvalCache] = None) -> EnginePool:
    return await EnginePool.create(config, workers, cache=cache)

async def evaluate(pool: EnginePool, fen: str) -> EvalResult:
    return await pool.evaluate(fen)
