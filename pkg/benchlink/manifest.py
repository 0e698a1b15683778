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

import os
import sys
import json
import logging
import platform
import psutil

from pathlib import Path
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Union

from .utils import content_hash, file_hash

logger: logging.Logger = logging.getLogger("benchlink.manifest")

MANIFEST_DIR: str = "manifests"
# not part of the manifest hash
VOLATILE_FIELDS = ("artifacts", "started_at", "finished_at", "host")

def host_facts() -> Dict[str, Any]:
    memory = psutil.virtual_memory()
    frequency = psutil.cpu_freq()
    return {
        "platform": platform.platform(),
        "python": sys.version.split()[0],
        "cpu_physical": psutil.cpu_count(logical=False),
        "cpu_logical": psutil.cpu_count(),
        "cpu_mhz": round(frequency.max or frequency.current) if frequency else None,
        "memory_bytes": memory.total
    }

def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunManifest:
    """
    What a pipeline stage consumed and produced. Two manifests with the same inputs,
    configuration and counts share a `hash`, whenever they were written, so outputs can quote it
    before they exist.
    """

    __slots__ = (
        "stage",
        "config",
        "engines",
        "inputs",
        "artifacts",
        "filter",
        "counts",
        "parent",
        "started_at",
        "finished_at",
        "host"
    )

    def __init__(
        self,
        stage: str,
        *,
        config: Optional[Dict[str, Any]] = None,
        engines: Optional[Dict[str, Any]] = None,
        inputs: Optional[Dict[str, str]] = None,
        artifacts: Optional[Dict[str, str]] = None,
        filter: Optional[Dict[str, Any]] = None,
        counts: Optional[Dict[str, Any]] = None,
        parent: Optional[str] = None,
        started_at: Optional[str] = None,
        finished_at: Optional[str] = None,
        host: Optional[Dict[str, Any]] = None
    ) -> None:
        self.stage: str = stage
        self.config: Dict[str, Any] = dict(config or {})
        self.engines: Dict[str, Any] = dict(engines or {})
        self.inputs: Dict[str, str] = dict(inputs or {})
        self.artifacts: Dict[str, str] = dict(artifacts or {})
        self.filter: Dict[str, Any] = dict(filter or {})
        self.counts: Dict[str, Any] = dict(counts or {})
        self.parent: Optional[str] = parent
        self.started_at: str = started_at or _now()
        self.finished_at: Optional[str] = finished_at
        self.host: Dict[str, Any] = host if host is not None else host_facts()

    def __repr__(self) -> str:
        return f"<Benchlink.RunManifest stage={self.stage} hash={self.hash[:12]} artifacts={len(self.artifacts)}>"

    @property
    def input_hash(self) -> str:
        """Hash of everything that determines the stage's output."""
        return content_hash([self.stage, self.config, self.inputs, self.filter, self.parent])

    @property
    def hash(self) -> str:
        return content_hash({key: value for key, value in self.data.items() if key not in VOLATILE_FIELDS})

    def add_input(self, name: str, path: Union[str, Path]) -> None:
        self.inputs[name] = file_hash(str(path))

    def add_artifact(self, name: str, path: Union[str, Path]) -> None:
        self.artifacts[name] = file_hash(str(path))

    def finish(self, **counts: Any) -> RunManifest:
        self.counts.update(counts)
        self.finished_at = _now()
        return self

    def artifacts_intact(self, run_dir: Union[str, Path]) -> bool:
        for name, digest in self.artifacts.items():
            path = Path(run_dir, name)
            if not path.is_file() or file_hash(str(path)) != digest:
                return False
        return True

    @property
    def data(self) -> dict:
        return {slot: getattr(self, slot) for slot in self.__slots__}

    @classmethod
    def from_data(cls, data: Dict[str, Any]) -> RunManifest:
        return cls(**{key: value for key, value in data.items() if key in cls.__slots__})

    @staticmethod
    def path_for(run_dir: Union[str, Path], stage: str) -> Path:
        return Path(run_dir, MANIFEST_DIR, f"{stage}.json")

    def write(self, run_dir: Union[str, Path]) -> Path:
        path = self.path_for(run_dir, self.stage)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = dict(self.data, hash=self.hash)
        temp_path = path.with_suffix(".json.tmp")
        with open(temp_path, "w", encoding="utf-8") as stream:
            json.dump(payload, stream, indent=4, sort_keys=True, default=str)
        os.replace(temp_path, path)
        logger.debug("Wrote manifest %s for stage %s.", payload["hash"][:12], self.stage)
        return path

    @classmethod
    def load(cls, run_dir: Union[str, Path], stage: str) -> Optional[RunManifest]:
        path = cls.path_for(run_dir, stage)
        if not path.is_file():
            return None
        try:
            with open(path, encoding="utf-8") as stream:
                return cls.from_data(json.load(stream))
        except (OSError, ValueError, TypeError) as e:
            logger.warning("Ignoring unreadable manifest %s: %s", path, e)
            return None

    def is_current(self, run_dir: Union[str, Path]) -> bool:
        """True when the last run of this stage had the same inputs and its artifacts are untouched."""
        previous = self.load(run_dir, self.stage)
        if previous is None or previous.input_hash != self.input_hash:
            return False
        return previous.artifacts_intact(run_dir)

def lineage(run_dir: Union[str, Path], stages: List[str]) -> Dict[str, str]:
    """Manifest hash of each stage that has run."""
    found = {}
    for stage in stages:
        if manifest := RunManifest.load(run_dir, stage):
            found[stage] = manifest.hash
    return found
