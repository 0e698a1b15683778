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

import os
import json
import logging
import threading

from collections import OrderedDict
from pathlib import Path
from typing import Any, Dict, Optional, Union

from .objects import EvalResult
from .utils import content_hash

logger: logging.Logger = logging.getLogger("benchlink.cache")

def normalize_fen(fen: str) -> str:
    """Keeps placement, side to move, castling and en passant; move counters are dropped."""
    return " ".join(fen.split()[:4])

def cache_key(fen: str, engine_tag: str, depth: int, multipv: int) -> str:
    return content_hash([normalize_fen(fen), engine_tag, int(depth), int(multipv)])


class EvalCache:
    """
    Content-addressed store of engine evaluations on disk.
    Records live at `<root>/<first two hex>/<key>.json`. Reads are served from an in-memory
    buffer when possible; writes are serialized and land through an atomic rename.
    """

    _MAX_CACHE_SIZE: int = 50000

    def __init__(self, root: Union[str, Path]) -> None:
        self.root: Path = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

        self._lock: threading.Lock = threading.Lock()
        self._buffer: OrderedDict[str, Dict[str, Any]] = OrderedDict()

        self.hits: int = 0
        self.misses: int = 0
        self.writes: int = 0

    def __repr__(self) -> str:
        return f"<Benchlink.EvalCache root={self.root} buffered={len(self._buffer)}>"

    def __contains__(self, key: str) -> bool:
        return key in self._buffer or self._path(key).exists()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def _remember(self, key: str, record: Dict[str, Any]) -> None:
        self._buffer[key] = record
        self._buffer.move_to_end(key)

        # least recently used first
        while len(self._buffer) > self._MAX_CACHE_SIZE:
            self._buffer.popitem(last=False)

    def get_record(self, key: str) -> Optional[Dict[str, Any]]:
        if (record := self._buffer.get(key)) is not None:
            self._buffer.move_to_end(key)
            self.hits += 1
            return record

        path = self._path(key)
        try:
            with open(path, encoding="utf8") as stream:
                record = json.load(stream)
        except FileNotFoundError:
            self.misses += 1
            return None
        except json.JSONDecodeError:
            logger.warning("Discarding unreadable cache record %s", path)
            self.misses += 1
            return None

        self._remember(key, record)
        self.hits += 1
        return record

    def put_record(self, key: str, record: Dict[str, Any]) -> None:
        path = self._path(key)
        with self._lock:
            path.parent.mkdir(parents=True, exist_ok=True)
            temp = path.with_suffix(f".{os.getpid()}.{threading.get_ident()}.tmp")
            with open(temp, "w", encoding="utf8") as stream:
                json.dump(record, stream, sort_keys=True)
            os.replace(temp, path)

            self._remember(key, record)
            self.writes += 1
        logger.debug("Stored evaluation %s", key)

    def get(self, fen: str, engine_tag: str, depth: int, multipv: int) -> Optional[EvalResult]:
        record = self.get_record(cache_key(fen, engine_tag, depth, multipv))
        return EvalResult.from_data(record) if record else None

    def put(self, result: EvalResult) -> str:
        key = cache_key(result.fen, result.engine_tag, result.depth, result.multipv)
        self.put_record(key, result.data)
        return key

    def clear_buffer(self) -> None:
        with self._lock:
            self._buffer.clear()
