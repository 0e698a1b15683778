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

from enum import Enum, auto


class GameResult(Enum):
    """The enum for the outcome recorded in a PGN result tag.

        GameResult.WHITE_WIN: "1-0"
        GameResult.DRAW: "1/2-1/2"
        GameResult.BLACK_WIN: "0-1"
        GameResult.UNFINISHED: "*"

    """

    WHITE_WIN = "1-0"
    DRAW = "1/2-1/2"
    BLACK_WIN = "0-1"
    UNFINISHED = "*"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def match(cls, value: str):
        """find an enum based on a result tag."""
        value = (value or "").strip()
        for member in cls:
            if member.value == value:
                return member
        return None


class Color(Enum):
    WHITE = "white"
    BLACK = "black"

    def __str__(self) -> str:
        return self.value

    @property
    def opponent(self) -> "Color":
        return Color.BLACK if self is Color.WHITE else Color.WHITE

    @property
    def is_white(self) -> bool:
        return self is Color.WHITE


class EngineRole(Enum):
    """The enum for the two benchmarks an engine can provide.

    - EngineRole.SUPER:
      The deep engine whose evaluations define the best possible move.

    - EngineRole.RESTRICTED:
      The depth-limited engine whose move choices define the
      cognitively bounded benchmark.
    """

    SUPER = "super"
    RESTRICTED = "restricted"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def match(cls, value: str):
        normalized_value = (value or "").lower().strip()
        for member in cls:
            if member.value == normalized_value or member.name.lower() == normalized_value:
                return member
        return None


class ScoreKind(Enum):
    CENTIPAWNS = "cp"
    MATE_IN = "mate"

    def __str__(self) -> str:
        return self.value


class AdvantageCategory(Enum):
    """Seven signed bins of the usual chess annotation convention, in pawn units
    from the mover's side: below 0.3 is equal, up to 0.7 slight, up to 1.6 clear,
    beyond that decisive.
    """

    DECISIVE_DISADVANTAGE = "decisive_disadvantage"
    CLEAR_DISADVANTAGE = "clear_disadvantage"
    SLIGHT_DISADVANTAGE = "slight_disadvantage"
    EQUAL = "equal"
    SLIGHT_ADVANTAGE = "slight_advantage"
    CLEAR_ADVANTAGE = "clear_advantage"
    DECISIVE_ADVANTAGE = "decisive_advantage"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def from_standing(cls, standing: float) -> "AdvantageCategory":
        magnitude = abs(standing)
        if magnitude < 0.3:
            return cls.EQUAL

        positive = standing > 0
        if magnitude < 0.7:
            return cls.SLIGHT_ADVANTAGE if positive else cls.SLIGHT_DISADVANTAGE
        if magnitude <= 1.6:
            return cls.CLEAR_ADVANTAGE if positive else cls.CLEAR_DISADVANTAGE
        return cls.DECISIVE_ADVANTAGE if positive else cls.DECISIVE_DISADVANTAGE

    @classmethod
    def levels(cls) -> list[str]:
        return [member.value for member in cls]


class BasePolicy(Enum):
    """The enum for the synthetic mover's default behaviour.

        BasePolicy.RESTRICTED_ENGINE plays the restricted engine's move unless it deviates.
        BasePolicy.NOISY_RESTRICTED adds a small symmetric noise to the benchmark itself.
    """

    RESTRICTED_ENGINE = auto()
    NOISY_RESTRICTED = auto()

    @classmethod
    def match(cls, value: str):
        normalized_value = (value or "").lower().replace("_", "").replace(" ", "")
        for member in cls:
            if member.name.lower().replace("_", "") == normalized_value:
                return member
        return None


class DeviationMode(Enum):
    """How a synthetic deviation is realised: as a performance gap value, or by
    picking another engine line from the cached super evaluation."""

    GAP = "gap"
    MOVE = "move"

    def __str__(self) -> str:
        return self.value
