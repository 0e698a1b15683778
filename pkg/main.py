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
import importlib
import sys
import os
import logging
import benchlink
import function as func

from typing import List, Optional
from logging.handlers import TimedRotatingFileHandler

LOG_FORMAT = logging.Formatter('{asctime} [{levelname:<8}] {name}: {message}', '%Y-%m-%d %H:%M:%S', style='{')

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chessbench",
        description="Benchmark recorded chess moves against a super and a restricted engine."
    )
    parser.add_argument("--config", help="Settings file (defaults to settings.json, then 'settings Example.json').")
    parser.add_argument("--run-dir", help="Directory holding the artifacts of this run.")
    parser.add_argument("--workers", type=int, help="Engine sessions or simulation processes.")
    parser.add_argument("--seed", type=int, help="Seed of the simulator.")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log debug messages to the console.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {benchlink.__version__}")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    # Loading all the module in `cogs` folder
    for module in sorted(os.listdir(os.path.join(func.ROOT_DIR, "cogs"))):
        if module.endswith(".py") and not module.startswith("_"):
            try:
                importlib.import_module(f"cogs.{module[:-3]}").setup(subparsers)
            except Exception as e:
                func.logger.error(f"Something went wrong while loading {module[:-3]} cog.", exc_info=e)

    return parser

def load_config(args: argparse.Namespace) -> benchlink.Config:
    settings = func.open_json(func.settings_path(args.config))
    if args.run_dir:
        settings["run_dir"] = args.run_dir
    if args.workers:
        settings["workers"] = args.workers
    if args.seed is not None:
        settings.setdefault("simulation", {})["seed"] = args.seed
    return benchlink.Config(settings)

def setup_logging(config: benchlink.Config, verbose: bool = False) -> None:
    root = logging.getLogger()
    for handler in root.handlers[:]:
        if getattr(handler, "_benchlink", False):
            root.removeHandler(handler)
            handler.close()

    LOG_SETTINGS = config.logging
    if (LOG_FILE := LOG_SETTINGS.get("file", {})).get("enable", True):
        log_path = os.path.abspath(os.path.join(func.ROOT_DIR, LOG_FILE.get("path", "./logs")))
        if not os.path.exists(log_path):
            os.makedirs(log_path)

        file_handler = TimedRotatingFileHandler(filename=f'{log_path}/chessbench.log', encoding="utf-8", backupCount=LOG_SETTINGS.get("max-history", 30), when="d")
        file_handler.namer = lambda name: name.replace(".log", "") + ".log"
        file_handler.setFormatter(LOG_FORMAT)
        file_handler._benchlink = True
        root.addHandler(file_handler)

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(LOG_FORMAT)
    console_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    console_handler._benchlink = True
    root.addHandler(console_handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)

    for log_name, log_level in LOG_SETTINGS.get("level", {}).items():
        _logger = logging.getLogger(log_name)
        _logger.setLevel(log_level)

def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
    except Exception as e:
        print(f"Unable to load settings: {e}", file=sys.stderr)
        return func.EXIT_FAILURE

    setup_logging(config, args.verbose)
    func.logger.debug("Chessbench %s, Python %s", benchlink.__version__, sys.version.split()[0])

    try:
        return args.handler(args)

    except benchlink.BenchlinkException as e:
        func.logger.error("Stage '%s' failed: %s", args.command, e)
        return func.EXIT_FAILURE

    except KeyboardInterrupt:
        func.logger.warning("Stage '%s' interrupted; completed work is kept.", args.command)
        return func.EXIT_FAILURE

    except Exception as e:
        func.logger.error(f"An unexpected error occurred in the {args.command} stage.", exc_info=e)
        return func.EXIT_FAILURE

if __name__ == "__main__":
    sys.exit(main())
