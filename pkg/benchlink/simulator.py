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

import time
import logging
import humanize
import numpy as np
import pandas as pd
import scipy.stats as scs

from concurrent.futures import ProcessPoolExecutor
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from .enums import AdvantageCategory, BasePolicy, DeviationMode
from .econometrics import ModelSpec, decomposition_report
from .exceptions import MeasureException, MissingEngineLines
from .measures import (
    COLUMNS,
    DELTA_COLUMNS,
    BenchmarkPair,
    BenchmarkSource,
    DatasetFilter,
    accounting_identity,
    delta_family,
    observe,
    performance_cp,
    score_pair
)
from .objects import EvalResult, GameRecord
from .pgn import derive_time_features

logger: logging.Logger = logging.getLogger("benchlink.simulator")

BASELINE_REGRESSORS: List[str] = [
    "better_pos",
    "worse_pos",
    "remaining_time_hours",
    "num_previous_moves",
    "complexity_seconds"
]

POSITION_STREAM: int = 0x5EED
MARGINS = ("total", "extensive", "intensive")


class AgentSpec:
    """
    A synthetic mover. It plays the restricted engine's move unless it deviates, which happens with
    probability pi(x) = clip(intercept + sum(effects[c] * x_c), 0, 1). A deviation changes the
    performance by a signed amount: positive with probability `p_positive`, of exponential size
    with mean `scale + sum(scale_effects[c] * x_c)` pawn units.
    """

    __slots__ = (
        "name",
        "base_policy",
        "intercept",
        "effects",
        "p_positive",
        "scale",
        "scale_effects",
        "mode",
        "noise_scale"
    )

    def __init__(
        self,
        *,
        name: str = "agent",
        base_policy: BasePolicy = BasePolicy.RESTRICTED_ENGINE,
        intercept: float = 0.0,
        effects: Optional[Dict[str, float]] = None,
        p_positive: float = 0.5,
        scale: float = 0.3,
        scale_effects: Optional[Dict[str, float]] = None,
        mode: DeviationMode = DeviationMode.GAP,
        noise_scale: float = 0.05
    ) -> None:
        if scale <= 0 or noise_scale < 0:
            raise ValueError("Deviation scale must be positive and noise non-negative.")
        if not 0 <= p_positive <= 1:
            raise ValueError("p_positive must lie in [0, 1].")

        self.name: str = name
        self.base_policy: BasePolicy = base_policy
        self.intercept: float = intercept
        self.effects: Dict[str, float] = dict(effects or {})
        self.p_positive: float = p_positive
        self.scale: float = scale
        self.scale_effects: Dict[str, float] = dict(scale_effects or {})
        self.mode: DeviationMode = mode
        self.noise_scale: float = noise_scale

    def __repr__(self) -> str:
        return f"<Benchlink.AgentSpec name={self.name} policy={self.base_policy.name} mode={self.mode}>"

    @property
    def is_null(self) -> bool:
        return (
            self.base_policy is BasePolicy.RESTRICTED_ENGINE
            and self.intercept == 0
            and not any(self.effects.values())
        )

    @property
    def covariates(self) -> List[str]:
        return list(dict.fromkeys([*self.effects, *self.scale_effects]))

    def with_effects(self, extra: Optional[Dict[str, float]]) -> AgentSpec:
        if not extra:
            return self
        effects = dict(self.effects)
        for column, value in extra.items():
            effects[column] = effects.get(column, 0.0) + value
        fields = {slot: getattr(self, slot) for slot in self.__slots__}
        fields["effects"] = effects
        return AgentSpec(**fields)

    def _linear(self, frame: pd.DataFrame, base: float, effects: Dict[str, float]) -> np.ndarray:
        values = np.full(len(frame), float(base))
        for column, effect in effects.items():
            values += effect * frame[column].to_numpy(dtype=float)
        return values

    def deviation_probability(self, frame: pd.DataFrame) -> np.ndarray:
        return np.clip(self._linear(frame, self.intercept, self.effects), 0.0, 1.0)

    def deviation_scale(self, frame: pd.DataFrame) -> np.ndarray:
        return np.maximum(self._linear(frame, self.scale, self.scale_effects), 0.01)

    @property
    def data(self) -> dict:
        return {
            "name": self.name,
            "base_policy": self.base_policy.name,
            "deviation_prob": {"intercept": self.intercept, "effects": self.effects},
            "deviation_draw": {"p_positive": self.p_positive, "scale": self.scale, "scale_effects": self.scale_effects},
            "mode": self.mode.value,
            "noise_scale": self.noise_scale
        }

    @classmethod
    def from_settings(cls, name: str, settings: Dict[str, Any]) -> AgentSpec:
        probability = settings.get("deviation_prob", {})
        draw = settings.get("deviation_draw", {})
        policy = BasePolicy.match(settings.get("base_policy", "restricted_engine"))
        if policy is None:
            raise ValueError(f"Unknown base policy '{settings.get('base_policy')}'.")

        return cls(
            name=name,
            base_policy=policy,
            intercept=float(probability.get("intercept", 0.0)),
            effects=probability.get("effects"),
            p_positive=float(draw.get("p_positive", 0.5)),
            scale=float(draw.get("scale", 0.3)),
            scale_effects=draw.get("scale_effects"),
            mode=DeviationMode(settings.get("mode", "gap")),
            noise_scale=float(settings.get("noise_scale", 0.05))
        )


class SimConfig:
    """Positions and replication settings of a simulation run."""

    __slots__ = (
        "positions",
        "n_games",
        "moves_per_player",
        "n_replications",
        "seed",
        "injected_effects",
        "regressors",
        "workers"
    )

    def __init__(
        self,
        *,
        positions: Optional[List[Dict[str, Any]]] = None,
        n_games: int = 50,
        moves_per_player: int = 20,
        n_replications: int = 200,
        seed: int = 20171,
        injected_effects: Optional[Dict[str, float]] = None,
        regressors: Optional[Sequence[str]] = None,
        workers: int = 1
    ) -> None:
        self.positions: List[Dict[str, Any]] = list(positions or [])
        self.n_games: int = n_games
        self.moves_per_player: int = moves_per_player
        self.n_replications: int = n_replications
        self.seed: int = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.injected_effects: Dict[str, float] = dict(injected_effects or {})
        self.regressors: List[str] = list(regressors or BASELINE_REGRESSORS)
        self.workers: int = max(int(workers), 1)

    def __repr__(self) -> str:
        return f"<Benchlink.SimConfig seed={self.seed} replications={self.n_replications} positions={len(self.positions) or 'synthetic'}>"

    @property
    def data(self) -> dict:
        return {
            "positions": len(self.positions),
            "n_games": self.n_games,
            "moves_per_player": self.moves_per_player,
            "n_replications": self.n_replications,
            "seed": self.seed,
            "injected_effects": self.injected_effects,
            "regressors": self.regressors
        }

    @classmethod
    def from_settings(cls, settings: Dict[str, Any], **overrides: Any) -> SimConfig:
        fields = {key: settings[key] for key in cls.__slots__ if key in settings}
        fields.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**fields)


def synthesize_positions(config: SimConfig) -> pd.DataFrame:
    """Desk-scale base rows: covariates and a restricted-engine performance per move."""
    rng = np.random.default_rng([config.seed, POSITION_STREAM])
    rows = []
    for game in range(config.n_games):
        game_id = f"sim{game:05d}"
        elos = rng.integers(2500, 2800, size=2)
        for side in (0, 1):
            remaining = 1.5
            for move in range(config.moves_per_player):
                full_move = 16 + move
                ply = 2 * (full_move - 1) + 1 + side
                spent = rng.exponential(2.5)
                remaining = max(remaining - spent / 60, 0.01)
                standing = round(float(rng.normal(0.0, 0.9)), 2)
                lines = sorted((-int(round(rng.exponential(40))) for _ in range(5)), reverse=True)
                lines = [0] + lines
                restricted_rank = int(rng.choice(6, p=[0.6, 0.2, 0.1, 0.05, 0.03, 0.02]))
                rows.append({
                    "game_id": game_id,
                    "player_id": f"{game_id}-{'w' if side == 0 else 'b'}",
                    "ply": ply,
                    "is_white": int(side == 0),
                    "favorite": int(elos[side] > elos[1 - side]),
                    "elo_player": int(elos[side]),
                    "elo_opponent": int(elos[1 - side]),
                    "standing_pawnunits": standing,
                    "better_pos": int(standing > 0.5),
                    "worse_pos": int(standing < -0.5),
                    "advantage_cat": AdvantageCategory.from_standing(standing).value,
                    "remaining_time_hours": remaining,
                    "num_previous_moves": (ply - 1) // 2,
                    "complexity_seconds": float(rng.exponential(4.0)),
                    "complexity_nodes": int(rng.integers(10_000, 5_000_000)),
                    "time_spent_minutes": spent,
                    "near_time_control": int(31 <= full_move <= 40),
                    "lines_cp": lines,
                    "restricted_rank": restricted_rank
                })
    return pd.DataFrame(rows)

def corpus_positions(games: Iterable[GameRecord], filter: DatasetFilter, source: BenchmarkSource) -> List[Dict[str, Any]]:
    """
    Base rows from recorded games: the covariates of every admitted move under restricted play,
    plus the cached evaluations needed to score any other engine line in the same position.
    """
    rows: List[Dict[str, Any]] = []
    skipped = 0
    for game in sorted(games, key=lambda game: game.game_id):
        if not filter.admits_game(game):
            continue

        time_features = derive_time_features(game)
        by_ply = {feature.ply: feature for feature in time_features}
        for move in game.moves:
            if filter.is_book_move(move) or (filter.require_clocks and by_ply[move.ply].missing):
                continue
            try:
                pair = source.pair(move.fen_before, source.restricted_move(move.fen_before))
                row = observe(game, move, time_features, source, use_restricted_moves=True).data
            except MeasureException as e:
                skipped += 1
                logger.debug("No corpus position for ply %d of game %s: %s", move.ply, game.game_id, e)
                continue

            row.update(
                fen=pair.fen,
                super_eval=pair.super_eval.data,
                restricted_move=pair.restricted_move,
                eval_after_restricted=pair.eval_after_restricted.data if pair.eval_after_restricted else None
            )
            rows.append(row)

    if skipped:
        logger.warning("Left out %d corpus position(s) without cached evaluations.", skipped)
    logger.info("Collected %s corpus positions.", humanize.intcomma(len(rows)))
    return rows

def base_positions(config: SimConfig) -> pd.DataFrame:
    frame = pd.DataFrame(config.positions) if config.positions else synthesize_positions(config)
    if "P_restricted_cp" not in frame.columns:
        frame["P_restricted_cp"] = [
            lines[rank] - lines[0] for lines, rank in zip(frame["lines_cp"], frame["restricted_rank"])
        ]
    return frame.reset_index(drop=True)

def stored_pair(row: Mapping[str, Any]) -> BenchmarkPair:
    """The BenchmarkPair of a corpus row."""
    super_eval = row.get("super_eval")
    if not isinstance(super_eval, dict) or not row.get("restricted_move"):
        raise MissingEngineLines(f"No cached engine lines for ply {row.get('ply')} of game {row.get('game_id')}.")

    after = row.get("eval_after_restricted")
    return BenchmarkPair(
        fen=row["fen"],
        super_eval=EvalResult.from_data(super_eval),
        restricted_move=row["restricted_move"],
        eval_after_restricted=EvalResult.from_data(after) if isinstance(after, dict) else None
    )

def simulate_panel(config: SimConfig, agent: AgentSpec, replication: int = 0) -> pd.DataFrame:
    """
    One synthetic panel on the configured positions, in the dataset schema.

    In gap mode a deviation is added to the restricted performance directly. In move mode the mover
    plays another cached engine line of a corpus position, scored by the measures code like a recorded move.
    """
    agent = agent.with_effects(config.injected_effects)
    rng = np.random.default_rng([config.seed, replication])
    frame = base_positions(config)
    n = len(frame)

    if agent.mode is DeviationMode.MOVE and "super_eval" not in frame.columns:
        raise MissingEngineLines("Move-level deviations need corpus positions with cached engine lines.")

    restricted_cp = frame["P_restricted_cp"].to_numpy(dtype=np.int64)
    human_cp = restricted_cp.copy()

    if agent.base_policy is BasePolicy.NOISY_RESTRICTED:
        human_cp = human_cp + np.rint(rng.normal(0.0, agent.noise_scale * 100, size=n)).astype(np.int64)

    deviates = rng.random(n) < agent.deviation_probability(frame)
    if agent.mode is DeviationMode.GAP:
        signs = np.where(rng.random(n) < agent.p_positive, 1, -1)
        sizes = np.maximum(np.rint(rng.exponential(agent.deviation_scale(frame)) * 100), 1).astype(np.int64)
        human_cp = np.where(deviates, human_cp + signs * sizes, human_cp)
    else:
        for row in np.flatnonzero(deviates):
            pair = stored_pair(frame.iloc[row])
            others = [
                uci for uci, _ in pair.super_eval.lines
                if performance_cp(pair.super_eval, pair.fen, uci, None)[1] != restricted_cp[row]
            ]
            if not others:
                continue
            human_cp[row] = score_pair(pair, str(rng.choice(others)))["P_human_cp"]

    out = frame.copy()
    out["P_human_cp"] = human_cp
    out["P_restricted_cp"] = restricted_cp
    out["P_human"] = human_cp / 100
    out["P_restricted"] = restricted_cp / 100
    out["is_best_human"] = (human_cp == 0).astype(int)
    out["is_best_restricted"] = (restricted_cp == 0).astype(int)

    family = [delta_family(h / 100, r / 100) for h, r in zip(human_cp, restricted_cp)]
    for position, column in enumerate(DELTA_COLUMNS):
        out[column] = [values[position] for values in family]

    for column in COLUMNS:
        if column not in out.columns:
            out[column] = None
    return out[list(COLUMNS)]


class ValidationReport:
    """How well the estimators recover the agent's designed effects across replications."""

    def __init__(
        self,
        *,
        agent: AgentSpec,
        config: SimConfig,
        rows: List[Dict[str, Any]],
        null_oracle_passed: Optional[bool],
        identity_max_gap: float,
        mean_share_nonzero: float
    ) -> None:
        self.agent: AgentSpec = agent
        self.config: SimConfig = config
        self.rows: List[Dict[str, Any]] = rows
        self.null_oracle_passed: Optional[bool] = null_oracle_passed
        self.identity_max_gap: float = identity_max_gap
        self.mean_share_nonzero: float = mean_share_nonzero

    def __repr__(self) -> str:
        return f"<Benchlink.ValidationReport agent={self.agent.name} rows={len(self.rows)} null_oracle={self.null_oracle_passed}>"

    @property
    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def row(self, margin: str, term: str) -> Dict[str, Any]:
        return next(row for row in self.rows if row["margin"] == margin and row["term"] == term)

    @property
    def data(self) -> dict:
        return {
            "agent": self.agent.data,
            "config": self.config.data,
            "rows": self.rows,
            "null_oracle_passed": self.null_oracle_passed,
            "identity_max_gap": self.identity_max_gap,
            "mean_share_nonzero": self.mean_share_nonzero
        }

    def render(self) -> str:
        lines = [
            f"Identification check for agent '{self.agent.name}' "
            f"({self.config.n_replications} replications, seed {self.config.seed})",
            f"Mean share of deviating moves: {self.mean_share_nonzero:.4f}",
            f"Largest accounting identity gap: {self.identity_max_gap:.3e}"
        ]
        if self.null_oracle_passed is not None:
            lines.append(f"Null-deviation oracle: {'passed' if self.null_oracle_passed else 'FAILED'}")

        lines.append("")
        lines.append(f"{'margin':<10} {'term':<22} {'designed':>10} {'mean':>10} {'bias':>10} {'rmse':>10} {'coverage':>9} {'sign':>6}")
        fmt = lambda value, width: f"{'-':>{width}}" if value is None else f"{value:>{width}.4f}"
        for row in self.rows:
            lines.append(
                f"{row['margin']:<10} {row['term']:<22} {fmt(row['designed'], 10)} {fmt(row['mean_estimate'], 10)} "
                f"{fmt(row['bias'], 10)} {fmt(row['rmse'], 10)} {fmt(row['coverage'], 9)} {fmt(row['sign_share'], 6)}"
            )
        return "\n".join(lines) + "\n"


def designed_effects(config: SimConfig, agent: AgentSpec) -> Dict[str, Dict[str, Optional[float]]]:
    """
    Slopes the agent builds in, per margin and regressor. The total effect is the derivative of
    pi(x) * (2 p - 1) * m(x) evaluated at the sample means.
    """
    agent = agent.with_effects(config.injected_effects)
    frame = base_positions(config)
    means = frame[config.regressors].astype(float).mean()
    mean_frame = pd.DataFrame([means])

    direction = 2 * agent.p_positive - 1
    pi = float(agent.deviation_probability(mean_frame)[0])
    magnitude = float(agent.deviation_scale(mean_frame)[0])

    keep = 1.0
    if agent.base_policy is BasePolicy.NOISY_RESTRICTED:
        sigma = agent.noise_scale * 100
        keep = float(2 * scs.norm.cdf(0.5 / sigma) - 1) if sigma > 0 else 1.0

    designed: Dict[str, Dict[str, Optional[float]]] = {margin: {} for margin in MARGINS}
    for term in config.regressors:
        effect = agent.effects.get(term, 0.0)
        scale_effect = agent.scale_effects.get(term, 0.0)
        if agent.mode is DeviationMode.MOVE:
            designed["extensive"][term] = effect * keep
            designed["intensive"][term] = None
            designed["total"][term] = None
            continue

        designed["extensive"][term] = effect * keep
        designed["intensive"][term] = direction * scale_effect if agent.base_policy is BasePolicy.RESTRICTED_ENGINE else None
        designed["total"][term] = (
            direction * (effect * magnitude + pi * scale_effect)
            if agent.base_policy is BasePolicy.RESTRICTED_ENGINE else None
        )
    return designed

def run_replication(config: SimConfig, agent: AgentSpec, replication: int) -> Dict[str, Any]:
    """Simulates one panel and fits the three margins."""
    frame = simulate_panel(config, agent, replication)
    spec = ModelSpec(name="simulated", outcome="delta", regressors=config.regressors)
    report = decomposition_report(frame, spec)

    estimates: Dict[str, Dict[str, Any]] = {}
    for margin in MARGINS:
        fit = getattr(report, margin)
        if fit is None:
            continue
        estimates[margin] = {
            name: (float(fit.beta[j]), float(fit.conf_int[j, 0]), float(fit.conf_int[j, 1]))
            for j, name in enumerate(fit.names)
        }

    exact_zero = bool(
        (frame["delta"] == 0).all()
        and all(np.all(getattr(report, margin).beta == 0) for margin in MARGINS if getattr(report, margin) is not None)
    )
    return {
        "replication": replication,
        "estimates": estimates,
        "identity_gap": accounting_identity(frame)["gap"],
        "share_nonzero": float((frame["delta_E"] == 1).mean()),
        "exact_zero": exact_zero
    }

def _replicate(payload) -> Dict[str, Any]:
    config, agent, replication = payload
    return run_replication(config, agent, replication)

def validate_identification(config: SimConfig, agent: AgentSpec) -> ValidationReport:
    """
    Runs every replication and compares the estimated total, extensive and intensive effects to the designed ones.
    Replications are spread over processes when `config.workers` > 1; results keep replication order.
    """
    started = time.monotonic()
    payloads = [(config, agent, replication) for replication in range(config.n_replications)]
    if config.workers > 1 and config.n_replications > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            results = list(executor.map(_replicate, payloads))
    else:
        results = [_replicate(payload) for payload in payloads]

    designed = designed_effects(config, agent)
    rows = []
    for margin in MARGINS:
        for term in config.regressors:
            draws = [result["estimates"][margin][term] for result in results if margin in result["estimates"]]
            target = designed[margin].get(term)
            row = {
                "margin": margin,
                "term": term,
                "designed": target,
                "replications": len(draws),
                "mean_estimate": None,
                "bias": None,
                "rmse": None,
                "coverage": None,
                "sign_share": None
            }
            if draws:
                estimates = np.array([draw[0] for draw in draws])
                row["mean_estimate"] = float(estimates.mean())
                if target is not None:
                    row["bias"] = float(estimates.mean() - target)
                    row["rmse"] = float(np.sqrt(np.mean((estimates - target) ** 2)))
                    row["coverage"] = float(np.mean([low <= target <= high for _, low, high in draws]))
                    if target != 0:
                        row["sign_share"] = float(np.mean(np.sign(estimates) == np.sign(target)))
            rows.append(row)

    null_oracle = all(result["exact_zero"] for result in results) if agent.with_effects(config.injected_effects).is_null else None
    logger.info(
        "Validated agent %s over %s replications in %s.",
        agent.name, humanize.intcomma(config.n_replications), humanize.naturaldelta(time.monotonic() - started)
    )
    return ValidationReport(
        agent=agent,
        config=config,
        rows=rows,
        null_oracle_passed=null_oracle,
        identity_max_gap=max((result["identity_gap"] for result in results), default=0.0),
        mean_share_nonzero=float(np.mean([result["share_nonzero"] for result in results])) if results else 0.0
    )
