import json
import pytest
import benchlink
import function as func

from pathlib import Path

from main import main
from cogs.measures import dataset_name
from conftest import DESK_CORPUS

def run(settings_file, *argv):
    return main(["--config", str(settings_file), *argv])


def test_ingest_of_empty_directory(settings_file, tmp_path):
    empty = tmp_path / "empty"
    empty.mkdir()

    assert run(settings_file, "ingest", str(empty)) == func.EXIT_EMPTY

def test_stage_without_upstream_artifact(settings_file):
    assert run(settings_file, "measures") == func.EXIT_FAILURE
    assert run(settings_file, "regress", "--spec", "desk") == func.EXIT_FAILURE
    assert run(settings_file, "report") == func.EXIT_FAILURE

def test_unknown_settings_file(tmp_path):
    assert main(["--config", str(tmp_path / "missing.json"), "report"]) == func.EXIT_FAILURE

def test_desk_pipeline(settings_file, desk_settings, caplog):
    run_dir = Path(desk_settings["run_dir"])

    assert run(settings_file, "ingest", str(DESK_CORPUS)) == func.EXIT_OK
    report = json.loads((run_dir / "ingest.report.json").read_text(encoding="utf8"))
    assert report["games"] == 10 and report["skipped"] == 0

    assert run(settings_file, "evaluate") == func.EXIT_OK
    keys = json.loads((run_dir / "evaluate.keys.json").read_text(encoding="utf8"))["keys"]
    assert keys and all((run_dir / "cache" / key[:2] / f"{key}.json").is_file() for key in keys)

    caplog.clear()
    assert run(settings_file, "evaluate") == func.EXIT_OK
    assert "Evaluation is up to date" in caplog.text

    assert run(settings_file, "measures") == func.EXIT_OK
    frame = benchlink.read_dataset(run_dir / "dataset.csv")
    assert len(frame) > 0
    assert (frame["ply"] > 60).all()
    assert frame["game_id"].nunique() == 3
    assert benchlink.accounting_identity(frame)["gap"] < 1e-12

    assert run(settings_file, "measures", "--oracle") == func.EXIT_OK
    oracle = benchlink.read_dataset(run_dir / "dataset.oracle.csv")
    assert len(oracle) == len(frame)
    assert (oracle["delta"] == 0).all() and (oracle["delta_E"] == 0).all()

    assert run(settings_file, "regress", "--spec", "desk") == func.EXIT_OK
    assert "Any deviation" in (run_dir / "results" / "desk.txt").read_text(encoding="utf8")

    assert run(settings_file, "regress", "--spec", "desk", "--dataset", str(run_dir / "dataset.oracle.csv")) == func.EXIT_OK
    results = json.loads((run_dir / "results" / "desk.json").read_text(encoding="utf8"))
    assert all(term["estimate"] == 0 for fit in results["fits"] for term in fit["terms"])

    assert run(settings_file, "regress", "--spec", "nonexistent") == func.EXIT_FAILURE

    assert run(settings_file, "simulate", "--agent", "null") == func.EXIT_OK
    assert "passed" in (run_dir / "simulate" / "null.validation.txt").read_text(encoding="utf8")

    desk_settings["simulation"]["positions"] = "corpus"
    settings_file.write_text(json.dumps(desk_settings), encoding="utf8")
    assert run(settings_file, "simulate", "--agent", "null") == func.EXIT_OK
    panel = benchlink.read_dataset(run_dir / "simulate" / "null.panel.csv")
    assert len(panel) == len(oracle)
    assert (panel["delta"] == 0).all()

    assert run(settings_file, "report") == func.EXIT_OK
    text = (run_dir / "reports" / "report.txt").read_text(encoding="utf8")
    assert f"Move observations: {len(frame)}" in text
    assert f"  ingest: {benchlink.RunManifest.load(run_dir, 'ingest').hash}" in text
    assert "  regress-desk: " in text
    assert (run_dir / "reports" / "binned_previous_moves.csv").is_file()
    assert not (run_dir / "reports" / "calibration.csv").exists()

    for stage in ("ingest", "evaluate", "measures", "measures-oracle", "regress-desk", "simulate-null", "report"):
        assert benchlink.RunManifest.load(run_dir, stage) is not None

@pytest.mark.parametrize("argv", [["simulate", "--agent", "ghost"], ["evaluate", "--restricted", "komodo"]])
def test_unconfigured_names_fail(settings_file, argv):
    assert run(settings_file, *argv) == func.EXIT_FAILURE

def test_dataset_names_follow_engine_and_rating_bound():
    assert dataset_name() == "dataset.csv"
    assert dataset_name("komodo", oracle=True) == "dataset.komodo.oracle.csv"
    assert dataset_name(min_elo=2000) == "dataset.elo2000.csv"
    assert func.stage_suffix("restricted", 2000) == "-elo2000"
    assert func.stage_suffix("komodo") == "-komodo"
