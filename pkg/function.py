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

import json
import os
import logging
import benchlink

from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

ROOT_DIR = os.path.dirname(os.path.abspath(__file__))
SETTINGS_FILES = ("settings.json", "settings Example.json")

EXIT_OK: int = 0
EXIT_FAILURE: int = 1
EXIT_EMPTY: int = 2

logger: logging.Logger = logging.getLogger("benchlink")

def settings_path(path: Optional[str] = None) -> str:
    if path:
        if not os.path.exists(os.path.join(ROOT_DIR, path)):
            raise FileNotFoundError(f"Settings file '{path}' not found.")
        return path
    for name in SETTINGS_FILES:
        if os.path.exists(os.path.join(ROOT_DIR, name)):
            return os.path.join(ROOT_DIR, name)
    raise Exception("Settings file not set!")

def open_json(path: str) -> dict:
    try:
        with open(os.path.join(ROOT_DIR, path), encoding="utf8") as json_file:
            return json.load(json_file)
    except (OSError, ValueError):
        return {}

def update_json(path: str, new_data: dict) -> None:
    data = open_json(path)
    if not data:
        data = new_data
    else:
        data.update(new_data)

    os.makedirs(os.path.dirname(os.path.join(ROOT_DIR, path)) or ROOT_DIR, exist_ok=True)
    with open(os.path.join(ROOT_DIR, path), "w", encoding="utf8") as json_file:
        json.dump(data, json_file, indent=4, default=str)

def run_path(*parts: str) -> Path:
    """A path inside the configured run directory."""
    return Path(ROOT_DIR, benchlink.Config().run_dir, *parts)

def require(stage: str, *parts: str) -> Path:
    path = run_path(*parts)
    if not path.exists():
        raise benchlink.MissingArtifact(stage, str(path))
    return path

def engine_configs(restricted: str = "restricted") -> Tuple[benchlink.EngineConfig, benchlink.EngineConfig]:
    """The configured super engine and a restricted engine, checked as a pair."""
    configs = []
    for name in ("super", restricted):
        settings = benchlink.Config.get_engine_settings(name)
        if not settings:
            raise benchlink.EngineException(f"No '{name}' engine is configured.")
        configs.append(benchlink.EngineConfig.from_settings(settings))

    benchlink.check_engine_pair(*configs)
    return configs[0], configs[1]

def stage_suffix(restricted: str, min_elo: Optional[int] = None) -> str:
    """Stage suffix of runs against a non-default restricted engine or rating bound."""
    suffix = "" if restricted == "restricted" else f"-{restricted}"
    return suffix if min_elo is None else f"{suffix}-elo{min_elo}"

def dataset_filter(**overrides: Any) -> benchlink.DatasetFilter:
    """The configured filter with any non-None overrides applied."""
    settings = dict(benchlink.Config().filters or {})
    settings.update({key: value for key, value in overrides.items() if value is not None})
    return benchlink.DatasetFilter.from_settings(settings)

def load_games() -> List[benchlink.GameRecord]:
    return benchlink.read_store(require("ingest", "games.jsonl"))

def parent_hash(stage: str) -> Optional[str]:
    manifest = benchlink.RunManifest.load(run_path(), stage)
    return manifest.hash if manifest else None

def write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf8") as stream:
        stream.write(text)

def write_json(path: Path, data: Dict[str, Any]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf8") as stream:
        json.dump(data, stream, indent=4, sort_keys=True, default=str)
