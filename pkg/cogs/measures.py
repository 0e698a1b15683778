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

from typing import Optional

def dataset_name(restricted: str = "restricted", oracle: bool = False, min_elo: Optional[int] = None) -> str:
    """dataset.csv, dataset.oracle.csv, dataset.komodo.csv, dataset.elo2000.csv, ..."""
    parts = ["dataset"]
    if restricted != "restricted":
        parts.append(restricted)
    if min_elo is not None:
        parts.append(f"elo{min_elo}")
    if oracle:
        parts.append("oracle")
    return ".".join(parts + ["csv"])

def measures(args: argparse.Namespace) -> int:
    super_config, restricted_config = func.engine_configs(args.restricted)
    dataset_filter = func.dataset_filter(min_elo=args.min_elo)
    games = func.load_games()
    cache_root = func.require("evaluate", "cache")

    name = dataset_name(args.restricted, args.oracle, args.min_elo)
    suffix = func.stage_suffix(args.restricted, args.min_elo)
    manifest = benchlink.RunManifest(
        f"measures{suffix}" + ("-oracle" if args.oracle else ""),
        config={"super": super_config.data, "restricted": restricted_config.data, "oracle": args.oracle},
        filter=dataset_filter.data,
        parent=func.parent_hash(f"evaluate{suffix}")
    )
    if manifest.parent is None:
        raise benchlink.MissingArtifact(f"evaluate{suffix}")
    manifest.add_input("games.jsonl", func.run_path("games.jsonl"))

    if manifest.is_current(func.run_path()):
        func.logger.info("%s is up to date; nothing to do.", name)
        return func.EXIT_OK

    source = benchlink.BenchmarkSource(benchlink.EvalCache(cache_root), super_config, restricted_config)
    dataset = benchlink.build_dataset(games, dataset_filter, source, use_restricted_moves=args.oracle)
    if not len(dataset):
        func.logger.error("No move observations survived the filter.")
        return func.EXIT_EMPTY

    frame = dataset.frame
    identity = benchlink.accounting_identity(frame)
    manifest.engines = source.engine_tags
    manifest.finish(**dataset.manifest["counts"])
    dataset.manifest.update(manifest=manifest.hash, identity=identity)

    path = func.run_path(name)
    benchlink.write_dataset(path, dataset)
    manifest.add_artifact(name, path)
    manifest.add_artifact(benchlink.manifest_path(path).name, benchlink.manifest_path(path))
    manifest.write(func.run_path())

    func.logger.info(
        "Wrote %d rows to %s; share(delta = 0) = %.4f, identity gap %.2e.",
        len(dataset), path, 1 - identity["share_nonzero"], identity["gap"]
    )
    if args.oracle and identity["share_nonzero"] != 0:
        func.logger.error("Null-deviation oracle failed: %d row(s) deviate.", int((frame["delta_E"] == 1).sum()))
        return func.EXIT_FAILURE
    return func.EXIT_OK

def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("measures", help="Build the move panel from the game store and the eval cache.")
    parser.add_argument("--oracle", action="store_true",
                        help="Replace every human move by the restricted engine's move (null-deviation check).")
    parser.add_argument("--restricted", default="restricted", help="Engine key to use as the restricted benchmark.")
    parser.add_argument("--min-elo", type=int, help="Lower rating bound for both players, overriding the configured filter.")
    parser.set_defaults(handler=measures)
