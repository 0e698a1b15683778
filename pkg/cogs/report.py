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
import warnings
import benchlink
import function as func

from pathlib import Path
from typing import List, Optional

DESCRIPTIVE_COLUMNS = (
    "delta",
    "delta_E",
    "delta_P",
    "delta_N",
    "standing_pawnunits",
    "better_pos",
    "worse_pos",
    "remaining_time_hours",
    "num_previous_moves",
    "complexity_seconds",
    "time_spent_minutes"
)

def result_files(spec: Optional[str] = None) -> List[Path]:
    folder = func.run_path("results")
    if spec:
        return [func.require("regress", "results", f"{spec}.txt")]

    files = sorted(folder.glob("*.txt")) if folder.is_dir() else []
    if not files:
        raise benchlink.MissingArtifact("regress")
    return files

def report(args: argparse.Namespace) -> int:
    config = benchlink.Config()
    dataset = func.require("measures", "dataset.csv")
    results = result_files(args.spec)

    manifest = benchlink.RunManifest(
        "report",
        config={"binned": config.binned, "labels": config.labels, "spec": args.spec},
        parent=func.parent_hash("measures")
    )
    manifest.add_input("dataset.csv", dataset)
    for path in results:
        manifest.add_input(f"results/{path.name}", path)

    if manifest.is_current(func.run_path()):
        func.logger.info("Report is up to date; nothing to do.")
        return func.EXIT_OK

    frame = benchlink.read_dataset(dataset)
    folder = func.run_path("reports")
    folder.mkdir(parents=True, exist_ok=True)
    written = {}

    descriptives = benchlink.descriptive_statistics(frame, [column for column in DESCRIPTIVE_COLUMNS if column in frame.columns])
    written["reports/descriptives.csv"] = folder / "descriptives.csv"
    descriptives.to_csv(written["reports/descriptives.csv"], index_label="variable")

    for request in config.binned:
        name = request.get("name", request["variable"])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", benchlink.EmptyBinWarning)
            try:
                bins = benchlink.binned_effects(
                    frame,
                    request.get("outcome", "delta"),
                    request["variable"],
                    int(request.get("n_bins", 10)),
                    base_bin=int(request.get("base_bin", 0)),
                    controls=request.get("controls", []),
                    fe_group=request.get("fe_group", benchlink.PLAYER_GAME),
                    cluster=request.get("cluster", "game_id")
                )
            except benchlink.EstimationError as e:
                func.logger.warning("Skipping binned effect %s: %s", name, e)
                continue

        for warning in caught:
            func.logger.warning("Binned effect %s: %s", name, warning.message)

        written[f"reports/binned_{name}.csv"] = folder / f"binned_{name}.csv"
        bins.to_csv(written[f"reports/binned_{name}.csv"], index=False)

    try:
        calibration = benchlink.calibration_curve(frame)
    except benchlink.EstimationError as e:
        func.logger.info("No calibration curve: %s", e)
    else:
        written["reports/calibration.csv"] = folder / "calibration.csv"
        calibration.to_csv(written["reports/calibration.csv"], index=False)

    stages = ["ingest", "evaluate", "measures", "measures-oracle", *(f"regress-{path.stem}" for path in results)]
    upstream = benchlink.lineage(func.run_path(), stages)
    identity = benchlink.accounting_identity(frame)
    manifest.finish(rows=len(frame), binned=len(config.binned), tables=len(results))

    sections = [path.read_text(encoding="utf8") for path in results]
    summary = [
        f"Move observations: {len(frame)}",
        f"share(delta = 0) = {1 - identity['share_nonzero']:.4f}",
        f"mean(delta) = {identity['mean_delta']:.6f}, "
        f"mean(delta | delta != 0) * share(delta != 0) = {identity['mean_delta_nonzero'] * identity['share_nonzero']:.6f}",
        "",
        "Descriptive statistics",
        descriptives.to_string(float_format=lambda value: f"{value:.4f}"),
        ""
    ]
    plots = [f"Plot data: {name}" for name in written if name.startswith("reports/binned_") or name == "reports/calibration.csv"]
    provenance = ["Lineage"] + [f"  {stage}: {digest}" for stage, digest in upstream.items()]
    text = "\n".join(summary) + "\n" + "\n".join(sections) + "\n" + "\n".join(plots + [""] + provenance) + f"\nManifest: {manifest.hash}\n"

    written["reports/report.txt"] = folder / "report.txt"
    func.write_text(written["reports/report.txt"], text)

    for name, path in written.items():
        manifest.add_artifact(name, path)
    manifest.write(func.run_path())

    print(text, end="")
    return func.EXIT_OK

def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("report", help="Collect result tables, descriptives and plot data into a report.")
    parser.add_argument("--spec", help="Only include the results of this model group.")
    parser.set_defaults(handler=report)
