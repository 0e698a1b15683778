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

from __future__ import annotations

import re
import logging
import warnings
import numpy as np
import pandas as pd
import scipy.linalg as scl
import scipy.stats as scs

from typing import Any, Dict, List, Optional, Sequence, Tuple

from .enums import AdvantageCategory
from .exceptions import (
    EmptyBinWarning,
    EmptyDesign,
    EstimationError,
    RankDeficient,
    TooFewClusters,
    UnknownColumn
)

logger: logging.Logger = logging.getLogger("benchlink.econometrics")

PLAYER_GAME: str = "player_game"
INTERCEPT: str = "const"
CORRECTION: str = "G/(G-1) * (N-1)/(N-K), K = regressors + absorbed groups; p-values from t(G-1)"
SELECTION_CAVEAT: str = (
    "The intensive margin is estimated on deviating moves only; "
    "its coefficients are subject to sample selection."
)

STAR_LEVELS: Tuple[Tuple[float, str], ...] = ((0.01, "***"), (0.05, "**"), (0.1, "*"))

CATEGORICAL_REGEX = re.compile(r"C\(\s*(\w+)\s*(?:,\s*base\s*=\s*['\"]?([^'\")]+?)['\"]?\s*)?\)")
PRODUCT_REGEX = re.compile(r"\s*(?:\*|×|:)\s*")
SCALED_REGEX = re.compile(r"(\w+)\s*/\s*([0-9]*\.?[0-9]+)")

def stars(p_value: float) -> str:
    for level, mark in STAR_LEVELS:
        if p_value < level:
            return mark
    return ""


class Term:
    """
    One regressor term: a column, a product of columns, or a categorical expansion.
    A factor written `column/100` enters divided by that constant.
    """

    __slots__ = ("text", "columns", "divisors", "categorical", "base")

    def __init__(
        self,
        text: str,
        columns: List[str],
        *,
        divisors: Optional[List[float]] = None,
        categorical: bool = False,
        base: Optional[str] = None
    ) -> None:
        self.text: str = text
        self.columns: List[str] = columns
        self.divisors: List[float] = list(divisors) if divisors else [1.0] * len(columns)
        self.categorical: bool = categorical
        self.base: Optional[str] = base

        if any(divisor == 0 for divisor in self.divisors):
            raise EstimationError(f"Term '{text}' divides by zero.")

    def __repr__(self) -> str:
        return f"<Benchlink.Term {self.text!r}>"

    @classmethod
    def parse(cls, text: str) -> Term:
        text = text.strip()
        if match := CATEGORICAL_REGEX.fullmatch(text):
            return cls(text, [match.group(1)], categorical=True, base=match.group(2))

        columns, divisors = [], []
        for factor in PRODUCT_REGEX.split(text):
            if not factor:
                continue
            if scaled := SCALED_REGEX.fullmatch(factor):
                columns.append(scaled.group(1))
                divisors.append(float(scaled.group(2)))
            else:
                columns.append(factor)
                divisors.append(1.0)
        return cls(text, columns, divisors=divisors)

    @property
    def factors(self) -> List[str]:
        return [
            column if divisor == 1 else f"{column}/{divisor:g}"
            for column, divisor in zip(self.columns, self.divisors)
        ]

    def levels(self, series: pd.Series) -> List[str]:
        values = set(series.dropna().astype(str))
        ordered = AdvantageCategory.levels() if values <= set(AdvantageCategory.levels()) else sorted(values)
        return [level for level in ordered if level in values]

    def expand(self, frame: pd.DataFrame) -> List[Tuple[str, np.ndarray]]:
        if self.categorical:
            column = self.columns[0]
            series = frame[column].astype(str)
            levels = self.levels(frame[column])
            base = self.base if self.base is not None else (levels[0] if levels else None)
            return [
                (f"{column}[{level}]", (series == level).to_numpy(dtype=float))
                for level in levels if level != base
            ]

        values = np.ones(len(frame))
        for column, divisor in zip(self.columns, self.divisors):
            values = values * frame[column].to_numpy(dtype=float) / divisor
        name = " × ".join(self.factors)
        return [(name, values)]


class ModelSpec:
    """A declarative regression: outcome, regressor terms, absorbed groups and clusters."""

    __slots__ = ("name", "outcome", "regressors", "fe_group", "cluster", "subset", "dataset")

    def __init__(
        self,
        *,
        outcome: str,
        regressors: Sequence[str],
        fe_group: Optional[str] = PLAYER_GAME,
        cluster: str = "game_id",
        subset: Optional[Dict[str, Any]] = None,
        name: Optional[str] = None,
        dataset: Optional[str] = None
    ) -> None:
        if not regressors:
            raise EstimationError("A model needs at least one regressor.")
        if outcome in (term.strip() for term in regressors):
            raise EstimationError(f"Outcome '{outcome}' cannot also be a regressor.")

        self.name: str = name or outcome
        self.outcome: str = outcome
        self.regressors: List[str] = list(regressors)
        self.fe_group: Optional[str] = fe_group
        self.cluster: str = cluster
        self.subset: Dict[str, Any] = dict(subset or {})
        self.dataset: Optional[str] = dataset

    def __repr__(self) -> str:
        return f"<Benchlink.ModelSpec name={self.name} outcome={self.outcome} terms={len(self.regressors)}>"

    @property
    def terms(self) -> List[Term]:
        return [Term.parse(text) for text in self.regressors]

    def replace(self, **changes: Any) -> ModelSpec:
        fields = {slot: getattr(self, slot) for slot in self.__slots__}
        fields.update(changes)
        return ModelSpec(**fields)

    @property
    def data(self) -> dict:
        return {slot: getattr(self, slot) for slot in self.__slots__}

    @classmethod
    def from_settings(cls, name: str, settings: Dict[str, Any]) -> ModelSpec:
        return cls(
            name=name,
            outcome=settings["outcome"],
            regressors=settings["regressors"],
            fe_group=settings.get("fe_group", PLAYER_GAME),
            cluster=settings.get("cluster", "game_id"),
            subset=settings.get("subset"),
            dataset=settings.get("dataset")
        )


class Design:
    """Outcome vector, regressor matrix and integer group and cluster codes."""

    __slots__ = ("y", "X", "names", "group_ids", "cluster_ids", "n_dropped", "fixed_effects")

    def __init__(
        self,
        *,
        y: np.ndarray,
        X: np.ndarray,
        names: List[str],
        group_ids: np.ndarray,
        cluster_ids: np.ndarray,
        n_dropped: int = 0,
        fixed_effects: bool = True
    ) -> None:
        self.y: np.ndarray = y
        self.X: np.ndarray = X
        self.names: List[str] = names
        self.group_ids: np.ndarray = group_ids
        self.cluster_ids: np.ndarray = cluster_ids
        self.n_dropped: int = n_dropped
        self.fixed_effects: bool = fixed_effects

    def __repr__(self) -> str:
        return f"<Benchlink.Design n={len(self.y)} k={len(self.names)} groups={self.n_groups}>"

    @property
    def n_groups(self) -> int:
        return int(self.group_ids.max()) + 1 if self.fixed_effects and len(self.group_ids) else 0

    @property
    def n_clusters(self) -> int:
        return len(np.unique(self.cluster_ids))


class FitResult:
    """Estimates of one model with game-clustered standard errors."""

    __slots__ = (
        "name",
        "outcome",
        "names",
        "beta",
        "se",
        "t",
        "p",
        "stars",
        "conf_int",
        "vcov",
        "n_obs",
        "n_groups",
        "n_clusters",
        "n_dropped",
        "r2_within",
        "y_mean",
        "fitted_mean",
        "fixed_effects",
        "correction"
    )

    def __init__(self, **fields: Any) -> None:
        for slot in self.__slots__:
            setattr(self, slot, fields.get(slot))

    def __repr__(self) -> str:
        return f"<Benchlink.FitResult name={self.name} outcome={self.outcome} n_obs={self.n_obs} n_clusters={self.n_clusters}>"

    def coef(self, name: str) -> float:
        return float(self.beta[self.names.index(name)])

    def std_err(self, name: str) -> float:
        return float(self.se[self.names.index(name)])

    @property
    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "model": self.name,
            "outcome": self.outcome,
            "term": self.names,
            "estimate": self.beta,
            "std_error": self.se,
            "t_stat": self.t,
            "p_value": self.p,
            "stars": self.stars,
            "ci_low": self.conf_int[:, 0],
            "ci_high": self.conf_int[:, 1]
        })

    @property
    def data(self) -> dict:
        return {
            "name": self.name,
            "outcome": self.outcome,
            "terms": self.frame.to_dict(orient="records"),
            "n_obs": self.n_obs,
            "n_groups": self.n_groups,
            "n_clusters": self.n_clusters,
            "n_dropped": self.n_dropped,
            "r2_within": self.r2_within,
            "y_mean": self.y_mean,
            "fitted_mean": self.fitted_mean,
            "fixed_effects": self.fixed_effects,
            "correction": self.correction
        }


def apply_subset(frame: pd.DataFrame, subset: Dict[str, Any]) -> pd.DataFrame:
    """
    Keeps rows where every column equals the given value, lies in the given [low, high] range,
    or differs from the value of a {"not": value} condition.
    """
    mask = pd.Series(True, index=frame.index)
    for column, condition in subset.items():
        if column not in frame.columns:
            raise UnknownColumn(column)
        if isinstance(condition, (list, tuple)):
            low, high = condition
            if low is not None:
                mask &= frame[column] >= low
            if high is not None:
                mask &= frame[column] <= high
        elif isinstance(condition, dict) and "not" in condition:
            mask &= frame[column] != condition["not"]
        else:
            mask &= frame[column] == condition
    return frame.loc[mask]

def _with_group_column(frame: pd.DataFrame, spec: ModelSpec) -> pd.DataFrame:
    if spec.fe_group == PLAYER_GAME and PLAYER_GAME not in frame.columns:
        for column in ("player_id", "game_id"):
            if column not in frame.columns:
                raise UnknownColumn(column)
        frame = frame.assign(**{PLAYER_GAME: frame["player_id"].astype(str) + "|" + frame["game_id"].astype(str)})
    return frame

def build_design(frame: pd.DataFrame, spec: ModelSpec) -> Design:
    """
    Builds y, X and the group and cluster codes of a model.

    Rows with a missing value in any referenced column are dropped and counted.
    Rows are put in a canonical order (cluster, group, then values) so results do not
    depend on how rows were ordered in the input.
    """
    frame = _with_group_column(apply_subset(frame, spec.subset), spec)
    terms = spec.terms

    referenced = [spec.outcome, spec.cluster] + ([spec.fe_group] if spec.fe_group else [])
    referenced += [column for term in terms for column in term.columns]
    for column in referenced:
        if column not in frame.columns:
            raise UnknownColumn(column)

    complete = frame.dropna(subset=list(dict.fromkeys(referenced)))
    n_dropped = len(frame) - len(complete)
    if n_dropped:
        logger.info("Model %s: dropped %d row(s) with missing values.", spec.name, n_dropped)
    if complete.empty:
        raise EmptyDesign(f"No rows left for model '{spec.name}'.")

    names: List[str] = []
    columns: List[np.ndarray] = []
    if spec.fe_group is None:
        names.append(INTERCEPT)
        columns.append(np.ones(len(complete)))
    for term in terms:
        for name, values in term.expand(complete):
            names.append(name)
            columns.append(values)
    if not columns:
        raise EmptyDesign(f"Model '{spec.name}' has no regressor columns after expansion.")

    y = complete[spec.outcome].to_numpy(dtype=float)
    X = np.column_stack(columns)
    cluster_ids = pd.factorize(complete[spec.cluster].astype(str), sort=True)[0]
    group_ids = (
        pd.factorize(complete[spec.fe_group].astype(str), sort=True)[0]
        if spec.fe_group else np.zeros(len(complete), dtype=int)
    )

    order = np.lexsort([X[:, j] for j in reversed(range(X.shape[1]))] + [y, group_ids, cluster_ids])
    return Design(
        y=y[order],
        X=X[order],
        names=names,
        group_ids=group_ids[order],
        cluster_ids=cluster_ids[order],
        n_dropped=n_dropped,
        fixed_effects=spec.fe_group is not None
    )

def within_transform(y: np.ndarray, X: np.ndarray, group_ids: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Subtracts group means from y and every column of X."""
    counts = np.bincount(group_ids).astype(float)
    counts[counts == 0] = 1.0

    y_means = np.bincount(group_ids, weights=y) / counts
    X_means = np.column_stack([
        np.bincount(group_ids, weights=X[:, j], minlength=len(counts)) / counts for j in range(X.shape[1])
    ]) if X.shape[1] else np.zeros((len(counts), 0))

    return y - y_means[group_ids], X - X_means[group_ids]

def ols_fit(
    y: np.ndarray,
    X: np.ndarray,
    *,
    names: Optional[Sequence[str]] = None,
    n_groups: int = 0
) -> Tuple[np.ndarray, np.ndarray, int]:
    """
    Least squares through a column-pivoted QR decomposition.

    Returns:
        (beta, residuals, dof) with dof = n_obs - n_groups - k.

    Raises:
        RankDeficient: naming the columns that are linear combinations of the others.
    """
    n, k = X.shape
    names = list(names) if names is not None else [f"x{j}" for j in range(k)]

    Q, R, pivots = scl.qr(X, mode="economic", pivoting=True)
    diagonal = np.abs(np.diag(R))
    tolerance = (diagonal[0] if len(diagonal) else 0.0) * max(n, k) * np.finfo(float).eps
    rank = int(np.sum(diagonal > tolerance))
    if rank < k:
        raise RankDeficient([names[pivots[j]] for j in range(rank, k)])

    beta = np.empty(k)
    beta[pivots] = scl.solve_triangular(R[:k, :k], Q.T @ y)
    residuals = y - X @ beta
    return beta, residuals, n - n_groups - k

def cluster_vcov(
    X: np.ndarray,
    residuals: np.ndarray,
    cluster_ids: np.ndarray,
    dof: int
) -> np.ndarray:
    """
    Cluster-robust sandwich covariance
    (X'X)^-1 (sum_g X_g' u_g u_g' X_g) (X'X)^-1 * G/(G-1) * (N-1)/dof.
    """
    clusters, codes = np.unique(cluster_ids, return_inverse=True)
    n_clusters = len(clusters)
    if n_clusters < 2:
        raise TooFewClusters(f"Clustered covariance needs at least 2 clusters, got {n_clusters}.")
    if dof <= 0:
        raise EstimationError(f"No residual degrees of freedom left (dof={dof}).")

    n = X.shape[0]
    bread = scl.inv(X.T @ X)
    scores = np.zeros((n_clusters, X.shape[1]))
    np.add.at(scores, codes, X * residuals[:, None])
    meat = scores.T @ scores

    correction = n_clusters / (n_clusters - 1) * (n - 1) / dof
    return correction * bread @ meat @ bread

def fit_design(design: Design, *, name: str = "", outcome: str = "") -> FitResult:
    y, X = design.y, design.X
    if design.fixed_effects:
        y, X = within_transform(y, X, design.group_ids)

    beta, residuals, dof = ols_fit(y, X, names=design.names, n_groups=design.n_groups)
    vcov = cluster_vcov(X, residuals, design.cluster_ids, dof)
    se = np.sqrt(np.clip(np.diag(vcov), 0.0, None))

    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta / np.where(se > 0, se, 1.0), 0.0)
    df = design.n_clusters - 1
    p = np.clip(2 * scs.t.sf(np.abs(t), df), 0.0, 1.0)
    critical = scs.t.ppf(0.975, df)

    total = float(np.sum((y - y.mean()) ** 2)) if not design.fixed_effects else float(np.sum(y ** 2))
    r2 = 1 - float(residuals @ residuals) / total if total > 0 else 0.0

    return FitResult(
        name=name,
        outcome=outcome,
        names=list(design.names),
        beta=beta,
        se=se,
        t=t,
        p=p,
        stars=[stars(value) for value in p],
        conf_int=np.column_stack([beta - critical * se, beta + critical * se]),
        vcov=vcov,
        n_obs=len(design.y),
        n_groups=design.n_groups,
        n_clusters=design.n_clusters,
        n_dropped=design.n_dropped,
        r2_within=r2,
        y_mean=float(design.y.mean()),
        # residuals of the demeaned fit equal those of the fit with group intercepts
        fitted_mean=float(np.mean(design.y - residuals)),
        fixed_effects=design.fixed_effects,
        correction=CORRECTION
    )

def fit_model(frame: pd.DataFrame, spec: ModelSpec) -> FitResult:
    """build_design, within_transform, ols_fit and cluster_vcov in one go."""
    result = fit_design(build_design(frame, spec), name=spec.name, outcome=spec.outcome)
    logger.debug("Fitted %s on %d rows (%d groups, %d clusters).",
                 spec.name, result.n_obs, result.n_groups, result.n_clusters)
    return result


class DecompositionReport:
    """Total, extensive and intensive margin fits and how well they add up."""

    def __init__(
        self,
        *,
        total: FitResult,
        extensive: Optional[FitResult],
        intensive: Optional[FitResult],
        rows: List[Dict[str, Any]],
        share_nonzero: float,
        mean_nonzero: float,
        notes: List[str]
    ) -> None:
        self.total: FitResult = total
        self.extensive: Optional[FitResult] = extensive
        self.intensive: Optional[FitResult] = intensive
        self.rows: List[Dict[str, Any]] = rows
        self.share_nonzero: float = share_nonzero
        self.mean_nonzero: float = mean_nonzero
        self.notes: List[str] = notes

    def __repr__(self) -> str:
        return f"<Benchlink.DecompositionReport terms={len(self.rows)} share_nonzero={self.share_nonzero:.3f}>"

    @property
    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    @property
    def data(self) -> dict:
        return {
            "total": self.total.data,
            "extensive": self.extensive.data if self.extensive else None,
            "intensive": self.intensive.data if self.intensive else None,
            "rows": self.rows,
            "share_nonzero": self.share_nonzero,
            "mean_nonzero": self.mean_nonzero,
            "notes": self.notes
        }

def decomposition_report(frame: pd.DataFrame, spec: ModelSpec) -> DecompositionReport:
    """
    Fits delta, delta_E and delta on the deviating subsample, then compares the total effect with
    mean(delta | delta != 0) * extensive effect + intensive effect * share(delta != 0).
    """
    total_spec = spec.replace(outcome="delta", name=f"{spec.name}:total")
    total = fit_model(frame, total_spec)

    sample = _with_group_column(apply_subset(frame, spec.subset), spec)
    referenced = ["delta", "delta_E", spec.cluster] + ([spec.fe_group] if spec.fe_group else [])
    referenced += [column for term in spec.terms for column in term.columns]
    sample = sample.dropna(subset=list(dict.fromkeys(referenced)))
    delta = sample["delta"].to_numpy(dtype=float)
    deviating = sample["delta_E"].to_numpy(dtype=float) == 1
    share = float(deviating.mean())
    mean_nonzero = float(delta[deviating].mean()) if deviating.any() else 0.0
    notes = [SELECTION_CAVEAT]

    extensive = None
    if deviating.all():
        notes.append("Every move deviates; the extensive margin is undefined.")
    else:
        extensive = fit_model(frame, spec.replace(outcome="delta_E", name=f"{spec.name}:extensive"))

    intensive = None
    if deviating.any():
        intensive_subset = dict(spec.subset, delta_E=1)
        intensive = fit_model(frame, spec.replace(outcome="delta", subset=intensive_subset, name=f"{spec.name}:intensive"))
    else:
        notes.append("No move deviates; the intensive margin is reported as zero.")

    rows = []
    for name in total.names:
        extensive_effect = extensive.coef(name) if extensive else None
        intensive_effect = intensive.coef(name) if intensive and name in intensive.names else 0.0
        implied = None
        if extensive_effect is not None:
            implied = mean_nonzero * extensive_effect + intensive_effect * share
        rows.append({
            "term": name,
            "total": total.coef(name),
            "extensive": extensive_effect,
            "intensive": intensive_effect,
            "implied_total": implied,
            "gap": None if implied is None else total.coef(name) - implied
        })

    return DecompositionReport(
        total=total,
        extensive=extensive,
        intensive=intensive,
        rows=rows,
        share_nonzero=share,
        mean_nonzero=mean_nonzero,
        notes=notes
    )

def assign_bins(values: np.ndarray, n_bins: int) -> Tuple[np.ndarray, List[Tuple[float, float]]]:
    """
    Equal-width bins over the observed range. Empty bins are merged into their right
    neighbour (the last one into its left) with an EmptyBinWarning.
    """
    if n_bins < 2:
        raise EstimationError("At least two bins are needed.")

    low, high = float(np.min(values)), float(np.max(values))
    edges = np.linspace(low, high, n_bins + 1)
    index = np.clip(np.digitize(values, edges[1:-1]), 0, n_bins - 1)
    bounds = [(float(edges[j]), float(edges[j + 1])) for j in range(n_bins)]
    counts = np.bincount(index, minlength=n_bins).tolist()

    j = 0
    while j < len(bounds) and len(bounds) > 1:
        if counts[j] > 0:
            j += 1
            continue

        target = j + 1 if j + 1 < len(bounds) else j - 1
        warnings.warn(
            f"Bin [{bounds[j][0]:.4g}, {bounds[j][1]:.4g}] is empty and was merged into its neighbour.",
            EmptyBinWarning,
            stacklevel=2
        )
        first, second = sorted((j, target))
        bounds[first] = (bounds[first][0], bounds[second][1])
        counts[first] += counts[second]
        index[index == second] = first
        index[index > second] -= 1
        del bounds[second], counts[second]
        j = first

    return index, bounds

def binned_effects(
    frame: pd.DataFrame,
    outcome: str,
    variable: str,
    n_bins: int,
    *,
    base_bin: int = 0,
    controls: Sequence[str] = (),
    fe_group: Optional[str] = PLAYER_GAME,
    cluster: str = "game_id"
) -> pd.DataFrame:
    """
    Per-bin fixed-effects coefficients of an equal-width binned variable, relative to a reference bin.
    Returns plot-ready rows: bin, bin_low, bin_high, bin_center, n_obs, estimate, std_error, ci_low, ci_high.
    """
    if variable not in frame.columns:
        raise UnknownColumn(variable)

    sample = frame.dropna(subset=[variable])
    index, bounds = assign_bins(sample[variable].to_numpy(dtype=float), n_bins)
    base_bin = min(max(base_bin, 0), len(bounds) - 1)

    indicators = {
        f"{variable}_bin{j}": (index == j).astype(float)
        for j in range(len(bounds)) if j != base_bin
    }
    rows = [{
        "bin": j,
        "bin_low": low,
        "bin_high": high,
        "bin_center": (low + high) / 2,
        "n_obs": int(np.sum(index == j)),
        "estimate": 0.0,
        "std_error": 0.0,
        "ci_low": 0.0,
        "ci_high": 0.0,
        "is_base": j == base_bin
    } for j, (low, high) in enumerate(bounds)]

    if not indicators:
        return pd.DataFrame(rows)

    spec = ModelSpec(
        name=f"{outcome}~bins({variable})",
        outcome=outcome,
        regressors=list(indicators) + list(controls),
        fe_group=fe_group,
        cluster=cluster
    )
    fit = fit_model(sample.assign(**indicators), spec)
    for row in rows:
        if row["is_base"]:
            continue
        position = fit.names.index(f"{variable}_bin{row['bin']}")
        row.update(
            estimate=float(fit.beta[position]),
            std_error=float(fit.se[position]),
            ci_low=float(fit.conf_int[position, 0]),
            ci_high=float(fit.conf_int[position, 1])
        )
    return pd.DataFrame(rows)

def descriptive_statistics(frame: pd.DataFrame, columns: Sequence[str]) -> pd.DataFrame:
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise UnknownColumn(missing[0])

    numeric = frame[list(columns)].apply(pd.to_numeric, errors="coerce")
    return pd.DataFrame({
        "N": numeric.count(),
        "mean": numeric.mean(),
        "sd": numeric.std(ddof=1),
        "min": numeric.min(),
        "max": numeric.max()
    })

def calibration_curve(
    frame: pd.DataFrame,
    n_bins: int = 10,
    *,
    min_remaining_hours: float = 1.0,
    rating_column: str = "elo_player",
    outcome: str = "delta"
) -> pd.DataFrame:
    """Mean deviation by equal-width rating bin with 95% confidence intervals, on moves made with time to spare."""
    for column in (rating_column, outcome, "remaining_time_hours"):
        if column not in frame.columns:
            raise UnknownColumn(column)

    sample = frame.dropna(subset=[rating_column, outcome, "remaining_time_hours"])
    sample = sample[sample["remaining_time_hours"] > min_remaining_hours]
    if sample.empty:
        raise EmptyDesign("No moves with enough remaining time for the calibration curve.")

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyBinWarning)
        index, bounds = assign_bins(sample[rating_column].to_numpy(dtype=float), n_bins)

    values = sample[outcome].to_numpy(dtype=float)
    rows = []
    for j, (low, high) in enumerate(bounds):
        chunk = values[index == j]
        mean = float(chunk.mean())
        ci_low = ci_high = None
        if len(chunk) > 1:
            half = scs.t.ppf(0.975, len(chunk) - 1) * chunk.std(ddof=1) / np.sqrt(len(chunk))
            ci_low, ci_high = mean - half, mean + half
        rows.append({
            "bin_low": low,
            "bin_high": high,
            "bin_center": (low + high) / 2,
            "n_obs": len(chunk),
            "mean": mean,
            "ci_low": ci_low,
            "ci_high": ci_high
        })
    return pd.DataFrame(rows)
