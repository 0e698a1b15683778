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

from typing import Iterable, Optional


class BenchlinkException(Exception):
    """Base of all Benchlink exceptions."""


class PgnException(BenchlinkException):
    """Base exception for PGN ingestion."""


class IllegalMove(PgnException):
    """A SAN token did not resolve to a legal move on the replayed board."""

    def __init__(self, game: str, ply: int, san: Optional[str] = None) -> None:
        self.game: str = game
        self.ply: int = ply
        self.san: Optional[str] = san
        token = f" '{san}'" if san else ""
        super().__init__(f"Illegal move{token} in game '{game}' at ply {ply}.")


class MalformedHeader(PgnException):
    """Required tags are missing from a game header."""

    def __init__(self, missing: Iterable[str]) -> None:
        self.missing: list[str] = sorted(missing)
        super().__init__(f"Missing required tags: {', '.join(self.missing)}.")


class MissingClock(PgnException):
    """A clock comment needed for time features is absent."""

    def __init__(self, ply: int) -> None:
        self.ply: int = ply
        super().__init__(f"No clock comment recorded for ply {ply}.")


class EngineException(BenchlinkException):
    """Base exception for engine sessions."""


class EngineSpawnError(EngineException):
    """The engine binary could not be started."""

    def __init__(self, path: str, reason: str = "") -> None:
        self.path: str = path
        super().__init__(f"Unable to start engine at '{path}'." + (f" {reason}" if reason else ""))


class UciHandshakeTimeout(EngineException):
    """The engine did not answer 'uciok' in time."""


class EngineCrash(EngineException):
    """The engine process terminated while serving a request."""


class IllegalFen(EngineException):
    """The position text is not a legal, playable chess position."""

    def __init__(self, fen: str) -> None:
        self.fen: str = fen
        super().__init__(f"Illegal position: '{fen}'.")


class NoSessionsAvailable(EngineException):
    """The engine pool has no live sessions."""


class MeasureException(BenchlinkException):
    """Base exception for measure construction."""


class MissingAfterEval(MeasureException):
    """The fallback rule needs an evaluation of the position after the move."""


class MissingEvaluation(MeasureException):
    """A required evaluation is not in the cache."""


class DatasetAborted(MeasureException):
    """Too many rows failed while building the dataset."""


class EstimationError(BenchlinkException):
    """Base exception for the regression machinery."""


class UnknownColumn(EstimationError):
    """A model term references a column the dataset does not have."""

    def __init__(self, column: str) -> None:
        self.column: str = column
        super().__init__(f"Unknown column '{column}'.")


class EmptyDesign(EstimationError):
    """No rows are left after dropping missing values."""


class RankDeficient(EstimationError):
    """The demeaned design does not have full column rank."""

    def __init__(self, columns: Iterable[str]) -> None:
        self.columns: list[str] = list(columns)
        super().__init__(f"Design is rank deficient; collinear columns: {', '.join(self.columns)}.")


class TooFewClusters(EstimationError):
    """Clustered covariance needs at least two clusters."""


class SimulationError(BenchlinkException):
    """A simulation cannot run on the configured positions."""


class MissingEngineLines(SimulationError):
    """Move-level deviations need cached engine lines for every position."""


class MissingArtifact(BenchlinkException):
    """An upstream stage has not produced its artifact yet."""

    def __init__(self, stage: str, path: str = "") -> None:
        self.stage: str = stage
        super().__init__(f"Missing artifact from stage '{stage}'" + (f" ({path})." if path else ". Run it first."))


class EmptyBinWarning(UserWarning):
    """An equal-width bin held no observations and was merged into a neighbour."""
