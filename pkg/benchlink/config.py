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
import copy
import psutil

from pathlib import Path
from dotenv import load_dotenv
from typing import (
    Dict,
    List,
    Any,
    Union,
    Optional
)

load_dotenv()

ENGINE_PATH_ENV: Dict[str, str] = {
    "super": "SUPER_ENGINE_PATH",
    "restricted": "RESTRICTED_ENGINE_PATH"
}

class Config:
    _instance: Optional['Config'] = None
    WORKING_DIR: Path = Path(__file__).resolve().parent.parent

    def __new__(cls, settings: Dict[str, Any] = None) -> 'Config':
        """
        Singleton pattern to ensure only one instance of Config exists.
        If settings are provided, creates a new instance that replaces the old one.

        Args:
            settings (Dict[str, Any], optional): A dictionary containing configuration settings. Defaults to None.
                                               If provided, creates a new instance that replaces the old one.
        """
        if settings is not None:
            instance = super(Config, cls).__new__(cls)
            instance.__init__(settings)
            cls._instance = instance
            return instance

        if cls._instance is None:
            cls._instance = super(Config, cls).__new__(cls)

        return cls._instance

    def __init__(self, settings: Dict[str, Any] = None) -> None:
        """
        Initialize configuration settings.

        Args:
            settings (Dict[str, Any], optional): A dictionary containing configuration settings.
                                               If None, uses empty dict with default values.
        """
        if hasattr(self, 'initialized'):
            return

        settings = settings or {}

        self.engines: Dict[str, Dict[str, Any]] = copy.deepcopy(settings.get("engines", {}))
        for name, env_key in ENGINE_PATH_ENV.items():
            if (path := os.getenv(env_key)) and name in self.engines:
                self.engines[name]["binary_path"] = path

        self.filters: Dict[str, Union[int, bool, None]] = settings.get("filters", {})
        self.time_controls: Dict[str, Dict[str, Any]] = settings.get("time_controls", {})
        self.models: Dict[str, Dict[str, Any]] = settings.get("models", {})
        self.binned: List[Dict[str, Any]] = settings.get("binned", [])
        self.simulation: Dict[str, Any] = settings.get("simulation", {})
        self.labels: Dict[str, str] = settings.get("labels", {})
        self.logging: Dict[str, Union[str, Dict[str, Union[str, bool]]]] = settings.get("logging", {})
        self.workers: int = int(settings.get("workers") or psutil.cpu_count(logical=False) or 1)
        self.run_dir: str = settings.get("run_dir", "./runs/default")
        self.version: str = settings.get("version", "")

        self.initialized = True

    @classmethod
    def get_engine_settings(cls, name: str) -> Dict[str, Any]:
        """
        Get the settings of one configured engine.

        Args:
            name (str): The engine key in the `engines` section (e.g. 'super', 'restricted', 'komodo').

        Returns:
            Dict[str, Any]: A copy of the engine settings with the name added as fallback tag.
                            Returns an empty dict if the engine is not configured.
        """
        engine = cls._instance.engines.get(name)
        if engine is None:
            return {}

        engine = dict(engine)
        engine.setdefault("engine_tag", name)
        engine.setdefault("role", "restricted" if name != "super" else "super")
        return engine

    @classmethod
    def get_time_control(cls, event: Optional[str]) -> Optional[Dict[str, Any]]:
        """Time control configured for an event name, falling back to `default`."""
        controls = cls._instance.time_controls if cls._instance else {}
        if event and event in controls:
            return controls[event]
        return controls.get("default")

    @classmethod
    def get_model(cls, name: str) -> Optional[Dict[str, Any]]:
        return cls._instance.models.get(name)
