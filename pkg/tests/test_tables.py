import numpy as np
import pandas as pd
import benchlink

from benchlink import ModelSpec

def frame(seed=3, n_games=12, moves=8):
    rng = np.random.default_rng(seed)
    rows = []
    for game in range(n_games):
        for player in ("a", "b"):
            for move in range(moves):
                better = int(rng.random() < 0.3)
                hours = rng.uniform(0.2, 1.5)
                rows.append({
                    "game_id": f"g{game}",
                    "player_id": f"{player}{game}",
                    "better_pos": better,
                    "remaining_time_hours": hours,
                    "delta_E": int(rng.random() < 0.2 + 0.3 * better),
                    "delta": rng.normal()
                })
    return pd.DataFrame(rows)


def test_render_table():
    data = frame()
    fits = [
        benchlink.fit_model(data, ModelSpec(outcome="delta_E", regressors=["better_pos", "remaining_time_hours"])),
        benchlink.fit_model(data, ModelSpec(outcome="delta", regressors=["better_pos"], fe_group=None))
    ]

    text = benchlink.render_table(
        fits,
        labels={"delta_E": "Any deviation", "better_pos": "Better position"},
        title="Deviations",
        manifest_hash="cafe"
    )
    lines = text.splitlines()

    assert lines[0] == "Deviations"
    assert "(1)" in lines[2] and "(2)" in lines[2]
    assert "Any deviation" in lines[3]
    better = next(line for line in lines if line.startswith("Better position"))
    assert f"{fits[0].coef('better_pos'):.4f}" in better
    assert f"({fits[0].std_err('better_pos'):.4f})" in lines[lines.index(better) + 1]
    assert any(line.startswith("Constant") for line in lines)
    assert next(line for line in lines if line.startswith("Player-Game Fixed Effects")).split()[-2:] == ["Yes", "No"]
    assert next(line for line in lines if line.startswith("Clusters (games)")).split()[-1] == "12"
    assert benchlink.STAR_NOTE in text
    assert lines[-1] == "Manifest: cafe"

def test_stars_follow_p_values():
    data = frame()
    data["delta_E"] = data["better_pos"] * 0.5 + np.random.default_rng(1).normal(scale=0.05, size=len(data))

    fit = benchlink.fit_model(data, ModelSpec(outcome="delta_E", regressors=["better_pos"]))

    assert fit.stars == ["***"]
    assert "***" in benchlink.render_table([fit])

def test_fits_frame():
    data = frame()
    fits = [benchlink.fit_model(data, ModelSpec(outcome=outcome, regressors=["better_pos"])) for outcome in ("delta", "delta_E")]

    table = benchlink.fits_frame(fits)

    assert list(table["outcome"]) == ["delta", "delta_E"]
    assert (table["n_clusters"] == 12).all()
    assert {"estimate", "std_error", "p_value", "ci_low", "ci_high"} <= set(table.columns)

def test_render_decomposition_marks_undefined():
    data = frame()
    data["delta"] = np.where(data["delta"] == 0, 0.5, data["delta"])
    data["delta_E"] = 1

    report = benchlink.decomposition_report(data, ModelSpec(outcome="delta", regressors=["better_pos"]))
    text = benchlink.render_decomposition(report, labels={"better_pos": "Better position"})

    row = next(line for line in text.splitlines() if line.startswith("Better position"))
    assert row.split()[-4:] == ["undefined", f"{report.rows[0]['intensive']:.4f}", "undefined", "undefined"]
    assert "Note: Every move deviates; the extensive margin is undefined." in text
