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
from typing import List, Optional, Tuple

def model_group(name: str) -> Tuple[dict, List[benchlink.ModelSpec]]:
    settings = benchlink.Config.get_model(name)
    if settings is None:
        known = ", ".join(sorted(benchlink.Config().models)) or "none"
        raise benchlink.EstimationError(f"Unknown model group '{name}' (configured: {known}).")

    specs = [
        benchlink.ModelSpec.from_settings(
            column.get("name", f"{name}({index})"),
            dict(column, dataset=column.get("dataset", settings.get("dataset")))
        )
        for index, column in enumerate(settings.get("columns", []), start=1)
    ]
    if not specs:
        raise benchlink.EstimationError(f"Model group '{name}' has no columns.")
    return settings, specs

def dataset_path(spec: benchlink.ModelSpec, override: Optional[str]) -> Path:
    if override:
        path = Path(override)
        if not path.exists():
            raise benchlink.MissingArtifact("measures", str(path))
        return path
    return func.require("measures", spec.dataset or "dataset.csv")

def regress(args: argparse.Namespace) -> int:
    settings, specs = model_group(args.spec)
    paths = {spec.name: dataset_path(spec, args.dataset) for spec in specs}

    manifest = benchlink.RunManifest(
        f"regress-{args.spec}",
        config={"group": settings, "labels": benchlink.Config().labels},
        parent=func.parent_hash("measures")
    )
    for path in dict.fromkeys(paths.values()):
        manifest.add_input(path.name, path)

    if manifest.is_current(func.run_path()):
        func.logger.info("Results of %s are up to date; nothing to do.", args.spec)
        return func.EXIT_OK

    frames = {path: benchlink.read_dataset(path) for path in dict.fromkeys(paths.values())}
    fits = [benchlink.fit_model(frames[paths[spec.name]], spec) for spec in specs]

    decomposition = None
    if settings.get("decomposition"):
        first = specs[0]
        decomposition = benchlink.decomposition_report(frames[paths[first.name]], first)

    manifest.finish(
        models=len(fits),
        n_obs={fit.name: fit.n_obs for fit in fits},
        n_clusters={fit.name: fit.n_clusters for fit in fits}
    )
    text = benchlink.render_table(
        fits,
        labels=benchlink.Config().labels,
        title=settings.get("title", args.spec),
        manifest_hash=manifest.hash
    )
    if decomposition is not None:
        text += "\n" + benchlink.render_decomposition(decomposition, labels=benchlink.Config().labels, manifest_hash=manifest.hash)

    results = func.run_path("results")
    artifacts = {
        f"results/{args.spec}.txt": results / f"{args.spec}.txt",
        f"results/{args.spec}.csv": results / f"{args.spec}.csv",
        f"results/{args.spec}.json": results / f"{args.spec}.json"
    }
    func.write_text(artifacts[f"results/{args.spec}.txt"], text)
    frame = benchlink.fits_frame(fits)
    frame["manifest"] = manifest.hash
    frame.to_csv(artifacts[f"results/{args.spec}.csv"], index=False)
    func.write_json(artifacts[f"results/{args.spec}.json"], {
        "group": args.spec,
        "title": settings.get("title", args.spec),
        "manifest": manifest.hash,
        "fits": [fit.data for fit in fits],
        "decomposition": decomposition.data if decomposition else None
    })

    for name, path in artifacts.items():
        manifest.add_artifact(name, path)
    manifest.write(func.run_path())

    print(text, end="")
    return func.EXIT_OK

def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("regress", help="Fit a configured model group on the move panel.")
    parser.add_argument("--spec", required=True, help="Name of a model group in the `models` settings.")
    parser.add_argument("--dataset", help="Dataset file to use instead of the run's dataset.csv.")
    parser.set_defaults(handler=regress)
