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

from typing import Optional, Tuple

def simulation_setup(agent_name: str, replications: Optional[int] = None) -> Tuple[benchlink.SimConfig, benchlink.AgentSpec]:
    config = benchlink.Config()
    settings = dict(config.simulation)
    agents = settings.pop("agents", {})
    source = settings.pop("positions", "synthetic")

    if agent_name not in agents:
        known = ", ".join(sorted(agents)) or "none"
        raise benchlink.BenchlinkException(f"Unknown agent '{agent_name}' (configured: {known}).")
    agent = benchlink.AgentSpec.from_settings(agent_name, agents[agent_name])

    positions = None
    if source == "corpus":
        super_config, restricted_config = func.engine_configs()
        cache = benchlink.EvalCache(func.require("evaluate", "cache"))
        benchmarks = benchlink.BenchmarkSource(cache, super_config, restricted_config)
        positions = benchlink.corpus_positions(func.load_games(), func.dataset_filter(), benchmarks)
        if not positions:
            raise benchlink.SimulationError("No corpus position has cached engine evaluations.")
    elif source != "synthetic":
        raise benchlink.SimulationError(f"Unknown position source '{source}' (use 'corpus' or 'synthetic').")

    return benchlink.SimConfig.from_settings(
        settings,
        positions=positions,
        n_replications=replications,
        workers=config.workers
    ), agent

def simulate(args: argparse.Namespace) -> int:
    sim_config, agent = simulation_setup(args.agent, args.replications)

    stage = f"simulate-{agent.name}"
    manifest = benchlink.RunManifest(
        stage,
        config={"simulation": sim_config.data, "agent": agent.data},
        parent=func.parent_hash("evaluate") if sim_config.positions else None
    )
    if manifest.is_current(func.run_path()):
        func.logger.info("Simulation for agent %s is up to date; nothing to do.", agent.name)
        return func.EXIT_OK

    panel = benchlink.simulate_panel(sim_config, agent, replication=0)
    report = benchlink.validate_identification(sim_config, agent)
    manifest.finish(
        rows=len(panel),
        replications=sim_config.n_replications,
        identity_max_gap=report.identity_max_gap,
        null_oracle_passed=report.null_oracle_passed
    )

    folder = func.run_path("simulate")
    panel_path = folder / f"{agent.name}.panel.csv"
    text_path = folder / f"{agent.name}.validation.txt"
    json_path = folder / f"{agent.name}.validation.json"

    folder.mkdir(parents=True, exist_ok=True)
    panel.to_csv(panel_path, index=False, na_rep="")
    text = report.render() + f"Manifest: {manifest.hash}\n"
    func.write_text(text_path, text)
    func.write_json(json_path, dict(report.data, manifest=manifest.hash))

    for path in (panel_path, text_path, json_path):
        manifest.add_artifact(f"simulate/{path.name}", path)
    manifest.write(func.run_path())

    print(text, end="")
    if report.null_oracle_passed is False:
        func.logger.error("Null-deviation oracle failed for agent %s.", agent.name)
        return func.EXIT_FAILURE
    return func.EXIT_OK

def setup(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="Validate the estimators on synthetic panels with known effects.")
    parser.add_argument("--agent", required=True, help="Name of an agent in the `simulation.agents` settings.")
    parser.add_argument("--replications", type=int, help="Override the configured number of replications.")
    parser.set_defaults(handler=simulate)
