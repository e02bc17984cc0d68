import enum
import math
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, model_validator

from ..core.exception import AlphaOutOfRangeException, LevelDepthException, ValidationException

MAX_LEVEL = 62
INT64_SAFE = 2**62


class RuleKind(str, enum.Enum):
    """Families of scaling sequences"""

    CANONICAL = "canonical"
    GEOMETRIC = "geometric"
    CONSTANT = "constant"
    EXPLICIT = "explicit"


class ScalingRule(BaseModel):
    """
    Scaling sequence alpha_1 <= alpha_2 <= ... and its partial sums.

    Values are precomputed at construction up to MAX_LEVEL, so the rule is
    immutable and safe to share between threads.
    """

    kind: RuleKind
    ratio: Optional[float] = Field(None, gt=1.0)
    constant: Optional[int] = Field(None, ge=1)
    values: Optional[Tuple[int, ...]] = None

    model_config = ConfigDict(frozen=True)

    _alphas: Tuple[int, ...] = PrivateAttr(default=())
    _sums: Tuple[int, ...] = PrivateAttr(default=())

    @model_validator(mode="after")
    def _check_parameters(self) -> "ScalingRule":
        if self.kind is RuleKind.GEOMETRIC and self.ratio is None:
            raise ValueError("geometric rule needs a ratio > 1")
        if self.kind is RuleKind.CONSTANT and self.constant is None:
            raise ValueError("constant rule needs a constant >= 1")
        if self.kind is RuleKind.EXPLICIT:
            if not self.values:
                raise ValueError("explicit rule needs at least one value")
            if any(v < 1 for v in self.values):
                raise ValueError("scaling values must be >= 1")
            if any(a > b for a, b in zip(self.values, self.values[1:])):
                raise ValueError("scaling values must be nondecreasing")
            if len(self.values) > MAX_LEVEL:
                raise ValueError(f"at most {MAX_LEVEL} explicit levels are supported")
        return self

    def model_post_init(self, __context) -> None:
        alphas = self._generate()
        sums = [0]
        for a in alphas:
            sums.append(sums[-1] + a + 1)
        self._alphas = tuple(alphas)
        self._sums = tuple(sums)

    def _generate(self) -> list[int]:
        if self.kind is RuleKind.EXPLICIT:
            return list(self.values)
        if self.kind is RuleKind.CONSTANT:
            return [self.constant] * MAX_LEVEL
        if self.kind is RuleKind.GEOMETRIC:
            return self._geometric_levels()

        # Running maximum of ceil(2^k / k^2); the raw sequence dips at k = 2..4.
        alphas, best = [], 1
        for k in range(1, MAX_LEVEL + 1):
            best = max(best, -(-(2**k) // (k * k)))
            alphas.append(best)
        return alphas

    def _geometric_levels(self) -> list[int]:
        """ceil(r^k) for every level whose value is a finite float."""
        alphas = []
        for k in range(1, MAX_LEVEL + 1):
            try:
                alphas.append(math.ceil(self.ratio**k))
            except OverflowError:
                break
        if not alphas:
            raise ValidationException(f"ratio {self.ratio} overflows at level 1", field="ratio")
        return alphas

    @classmethod
    def canonical(cls) -> "ScalingRule":
        return cls(kind=RuleKind.CANONICAL)

    @classmethod
    def geometric(cls, ratio: float) -> "ScalingRule":
        return cls(kind=RuleKind.GEOMETRIC, ratio=ratio)

    @classmethod
    def constant_rule(cls, c: int) -> "ScalingRule":
        return cls(kind=RuleKind.CONSTANT, constant=c)

    @classmethod
    def explicit(cls, *values: int) -> "ScalingRule":
        return cls(kind=RuleKind.EXPLICIT, values=tuple(values))

    @property
    def depth(self) -> int:
        """Number of levels this rule defines."""
        return len(self._alphas)

    @property
    def array_depth(self) -> int:
        """Deepest level whose coordinates fit the int64 kernels."""
        depth = 0
        for level in range(1, self.depth + 1):
            if 2 * self._alphas[level - 1] >= INT64_SAFE or self._sums[level] >= INT64_SAFE:
                break
            depth = level
        return depth

    def alpha(self, k: int) -> int:
        if k < 1:
            raise ValidationException("level must be >= 1", field="k")
        if k > self.depth:
            if self.kind is RuleKind.EXPLICIT:
                raise AlphaOutOfRangeException(k, self.depth)
            raise LevelDepthException(k, self.depth)
        return self._alphas[k - 1]

    def partial_sum(self, k: int) -> int:
        """s_k = alpha_1 + ... + alpha_k + k, with s_0 = 0."""
        if k < 0:
            raise ValidationException("index must be >= 0", field="k")
        if k > self.depth:
            if self.kind is RuleKind.EXPLICIT:
                raise AlphaOutOfRangeException(k, self.depth)
            raise LevelDepthException(k, self.depth)
        return self._sums[k]

    def level_of_radius(self, r: int) -> int:
        """The level k with s_{k-1} <= r < s_k."""
        for k in range(1, self.depth + 1):
            if r < self._sums[k]:
                return k
        if self.kind is RuleKind.EXPLICIT:
            raise AlphaOutOfRangeException(self.depth + 1, self.depth)
        raise LevelDepthException(self.depth + 1, self.depth)

    def alpha_table(self) -> np.ndarray:
        """int64 table indexed by level (index 0 unused) up to array_depth."""
        depth = self.array_depth
        table = np.zeros(depth + 2, dtype=np.int64)
        table[1 : depth + 1] = self._alphas[:depth]
        return table

    def sum_table(self) -> np.ndarray:
        """int64 table of s_0..s_{array_depth}."""
        return np.asarray(self._sums[: self.array_depth + 1], dtype=np.int64)

    def describe(self) -> str:
        if self.kind is RuleKind.GEOMETRIC:
            return f"geometric:{self.ratio:g}"
        if self.kind is RuleKind.CONSTANT:
            return f"constant:{self.constant}"
        if self.kind is RuleKind.EXPLICIT:
            return "explicit:" + ",".join(str(v) for v in self.values)
        return "canonical"
