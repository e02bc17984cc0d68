from pydantic import BaseModel, Field
from typing import Optional


class ConfineQuery(BaseModel):
    """The confinement event A_{n,m}: the projected walk stays in [-m, m] for n steps."""

    n: int = Field(..., ge=0, description="Steps")
    m: int = Field(..., ge=1, description="Half-width of the interval")


class ConfinementProbability(BaseModel):
    n: int
    m: int
    log_prob: float
    prob: Optional[float] = Field(None, description="Omitted when it would underflow")
    rate: float = Field(..., description="-log of the top eigenvalue of the killed chain")
    method: str = Field(..., description="iteration or spectral")
