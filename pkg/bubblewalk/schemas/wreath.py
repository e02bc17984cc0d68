from pydantic import BaseModel, ConfigDict, Field
from typing import FrozenSet, List, Tuple

from ..models.vertex import VertexAddress


class SwsSummary(BaseModel):
    """One switch-walk-switch trajectory."""

    n: int = Field(..., ge=0)
    sample_times: List[int]
    support_size_trace: List[int] = Field(..., description="|supp X_k| at each sample time")
    toggle_sites: FrozenSet[VertexAddress] = Field(
        default_factory=frozenset, description="Sites switched by at least one nonzero bit"
    )
    returned_to_identity: bool
    word: str = Field("", description="Sampled letters")
    switches: List[Tuple[int, int]] = Field(default_factory=list, description="(s1, s2) per step")

    model_config = ConfigDict(frozen=True)

    @property
    def final_support(self) -> int:
        return self.support_size_trace[-1]


class SwsRow(BaseModel):
    replica: int
    final_support: int
    returned: bool
    toggles: int


class HarmonicEstimate(BaseModel):
    """Monte Carlo value of P(lamp at o is off at the horizon)."""

    horizon: int = Field(..., ge=0)
    reps: int = Field(..., ge=1)
    p_hat: float = Field(..., ge=0, le=1)
    stderr: float = Field(..., ge=0)
    late_toggle_fraction: float = Field(
        ..., ge=0, le=1, description="Share of runs whose last flip of the lamp at o fell in the final 10%"
    )
