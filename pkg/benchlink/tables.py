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

import humanize
import pandas as pd

from typing import Callable, Dict, List, Optional, Sequence

from .econometrics import DecompositionReport, FitResult, INTERCEPT, STAR_LEVELS

STAR_NOTE: str = "Standard errors are clustered on the game level. " + ", ".join(
    f"{mark}: p<{level:g}" for level, mark in reversed(STAR_LEVELS)
)

def _label_for(labels: Optional[Dict[str, str]]) -> Callable[[str], str]:
    labels = labels or {}

    def label(name: str) -> str:
        if name in labels:
            return labels[name]
        if " × " in name:
            return " × ".join(labels.get(part, part) for part in name.split(" × "))
        return name

    return label

def render_table(
    fits: Sequence[FitResult],
    *,
    labels: Optional[Dict[str, str]] = None,
    title: str = "",
    manifest_hash: Optional[str] = None,
    decimals: int = 4
) -> str:
    """
    Text table with one column per fit: coefficients with stars, standard errors in
    parentheses beneath, and the fixed-effects and observation footer rows.
    """
    label = _label_for(labels)
    terms: List[str] = []
    for fit in fits:
        terms.extend(name for name in fit.names if name not in terms and name != INTERCEPT)
    if any(INTERCEPT in fit.names for fit in fits):
        terms.append(INTERCEPT)

    body: List[List[str]] = [
        [""] + [f"({index})" for index in range(1, len(fits) + 1)],
        [""] + [label(fit.outcome) for fit in fits]
    ]
    for term in terms:
        coefficients, errors = [label(term) if term != INTERCEPT else "Constant"], [""]
        for fit in fits:
            if term in fit.names:
                position = fit.names.index(term)
                coefficients.append(f"{fit.beta[position]:.{decimals}f}{fit.stars[position]}")
                errors.append(f"({fit.se[position]:.{decimals}f})")
            else:
                coefficients.append("")
                errors.append("")
        body.extend([coefficients, errors])

    footer: List[List[str]] = [
        ["Player-Game Fixed Effects"] + ["Yes" if fit.fixed_effects else "No" for fit in fits],
        ["Move Observations"] + [humanize.intcomma(fit.n_obs) for fit in fits],
        ["Player-Game Observations"] + [humanize.intcomma(fit.n_groups) if fit.fixed_effects else "" for fit in fits],
        ["Clusters (games)"] + [humanize.intcomma(fit.n_clusters) for fit in fits]
    ]

    rows = body + footer
    widths = [max(len(row[column]) for row in rows) for column in range(len(rows[0]))]
    render = lambda row: "  ".join(
        cell.ljust(widths[column]) if column == 0 else cell.rjust(widths[column])
        for column, cell in enumerate(row)
    ).rstrip()

    rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
    lines = ([title] if title else []) + [rule]
    lines += [render(row) for row in body[:2]] + [rule]
    lines += [render(row) for row in body[2:]] + [rule]
    lines += [render(row) for row in footer] + [rule]
    lines.append(STAR_NOTE)
    if manifest_hash:
        lines.append(f"Manifest: {manifest_hash}")
    return "\n".join(lines) + "\n"

def fits_frame(fits: Sequence[FitResult]) -> pd.DataFrame:
    """All fits as one long table, one row per model and term."""
    frames = []
    for fit in fits:
        frame = fit.frame
        frame["n_obs"] = fit.n_obs
        frame["n_groups"] = fit.n_groups
        frame["n_clusters"] = fit.n_clusters
        frame["fixed_effects"] = fit.fixed_effects
        frames.append(frame)
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()

def render_decomposition(
    report: DecompositionReport,
    *,
    labels: Optional[Dict[str, str]] = None,
    manifest_hash: Optional[str] = None,
    decimals: int = 4
) -> str:
    label = _label_for(labels)
    fmt = lambda value: "undefined" if value is None else f"{value:.{decimals}f}"

    lines = [
        "Margin decomposition of the total effect",
        f"share(delta != 0) = {report.share_nonzero:.{decimals}f}, "
        f"mean(delta | delta != 0) = {report.mean_nonzero:.{decimals}f}",
        ""
    ]
    header = ["", "Total", "Extensive", "Intensive", "Implied", "Gap"]
    rows = [header] + [
        [label(row["term"]), fmt(row["total"]), fmt(row["extensive"]), fmt(row["intensive"]),
         fmt(row["implied_total"]), fmt(row["gap"])]
        for row in report.rows
    ]
    widths = [max(len(row[column]) for row in rows) for column in range(len(header))]
    for row in rows:
        lines.append("  ".join(
            cell.ljust(widths[column]) if column == 0 else cell.rjust(widths[column])
            for column, cell in enumerate(row)
        ).rstrip())

    lines.append("")
    lines.extend(f"Note: {note}" for note in report.notes)
    if manifest_hash:
        lines.append(f"Manifest: {manifest_hash}")
    return "\n".join(lines) + "\n"
