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
import benchlink
import function as func

from pathlib import Path
from typing import Dict, List

def collect_files(paths: List[str]) -> List[Path]:
    """PGN files named directly or found in the given directories, in a stable order."""
    files: List[Path] = []
    for entry in paths:
        path = Path(entry)
        if path.is_dir():
            files.extend(sorted(path.rglob("*.pgn")))
        elif path.is_file():
            files.append(path)
        else:
            func.logger.warning("Input path %s does not exist.", path)
    return list(dict.fromkeys(files))

def ingest(args: argparse.Namespace) -> int:
    config = benchlink.Config()
    files = collect_files(args.paths)

    manifest = benchlink.RunManifest("ingest", config={"time_controls": config.time_controls})
    for path in files:
        manifest.add_input(str(path), path)

    store_path = func.run_path("games.jsonl")
    report_path = func.run_path("ingest.report.json")
    if files and manifest.is_current(func.run_path()):
        func.logger.info("Ingest is up to date with %d file(s); nothing to do.", len(files))
        return func.EXIT_OK

    games: Dict[str, benchlink.GameRecord] = {}
    report = {"files": []}
    for path in files:
        diagnostics: List[benchlink.PgnDiagnostic] = []
        try:
            parsed = benchlink.parse_pgn_file(path, diagnostics=diagnostics)
        except OSError as e:
            func.logger.warning("Unable to read %s: %s", path, e)
            report["files"].append({"path": str(path), "games": 0, "error": str(e), "skipped": []})
            continue

        duplicates = 0
        for game in parsed:
            if game.game_id in games:
                duplicates += 1
                continue
            games[game.game_id] = game

        report["files"].append({
            "path": str(path),
            "games": len(parsed),
            "duplicates": duplicates,
            "skipped": [diagnostic.data for diagnostic in diagnostics]
        })
        func.logger.info("Parsed %d game(s) from %s, skipped %d.", len(parsed), path, len(diagnostics))

    if not games:
        func.logger.error("no games parsed")
        return func.EXIT_EMPTY

    store_path.parent.mkdir(parents=True, exist_ok=True)
    written = benchlink.write_store(store_path, games.values())
    report["games"] = written
    report["unfinished"] = sum(1 for game in games.values() if not game.ratable)
    report["missing_clocks"] = sum(1 for game in games.values() for move in game.moves if move.clock_after is None)
    report["skipped"] = sum(len(entry["skipped"]) for entry in report["files"])

    manifest.finish(games=written, skipped=report["skipped"], files=len(files))
    report["manifest"] = manifest.hash
    func.write_json(report_path, report)

    manifest.add_artifact("games.jsonl", store_path)
    manifest.add_artifact("ingest.report.json", report_path)
    manifest.write(func.run_path())
    func.logger.info("Stored %d game(s) (%d skipped) in %s.", written, report["skipped"], store_path)
    return func.EXIT_OK

def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("ingest", help="Parse PGN files into the game store.")
    parser.add_argument("paths", nargs="+", help="PGN files or directories holding them.")
    parser.set_defaults(handler=ingest)
