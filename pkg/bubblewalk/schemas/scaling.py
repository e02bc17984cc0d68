from pydantic import BaseModel, Field
from typing import Optional


class AssumptionReport(BaseModel):
    """Scan of alpha_k / s_{k-1} over k = 2..checked_up_to."""

    d: float = Field(..., gt=0, description="Queried constant")
    max_feasible_d: float = Field(..., description="min over k of alpha_k / s_{k-1}")
    argmin_k: int = Field(..., description="Level attaining max_feasible_d")
    first_violation_k: Optional[int] = Field(None, description="Least k with alpha_k < d * s_{k-1}")
    checked_up_to: int

    @property
    def holds(self) -> bool:
        return self.first_violation_k is None
