from enum import Enum
from pydantic import BaseModel, Field, model_validator
from typing import List, Optional

from ..models.vertex import ROOT, VertexAddress


class OrbitEngine(str, Enum):
    """Algorithms for inverted orbits"""

    ORACLE = "oracle"
    TRACKED = "tracked"
    BATCHED = "batched"


class Sampler(str, Enum):
    REJECTION = "rejection"
    BRIDGE = "bridge"


class InvertedOrbitTrace(BaseModel):
    """Points u_k = o.(g_1...g_k)^-1 for k = 0..n."""

    points: List[VertexAddress]
    radius: int = Field(..., ge=0, description="max_k d(o, u_k)")
    distinct_count: int = Field(..., ge=1)
    engine: OrbitEngine
    expansions: int = Field(0, ge=0, description="Tracking-ball growths (tracked engine)")

    @model_validator(mode="after")
    def _starts_at_root(self) -> "InvertedOrbitTrace":
        if not self.points or self.points[0] != ROOT:
            raise ValueError("an inverted orbit starts at the root")
        return self

    def same_points(self, other: "InvertedOrbitTrace") -> bool:
        return self.points == other.points


class OrbitSampleRow(BaseModel):
    """One replica of an orbit experiment."""

    replica: int
    accepted: bool
    orbit_radius: Optional[int] = None
    max_displacement: Optional[int] = None
    distinct_count: Optional[int] = None


class ConfinementReport(BaseModel):
    """Orbit and displacement statistics of words conditioned on A_{n,m}."""

    n: int
    m: int
    reps: int
    accepted: int = Field(..., ge=0)
    acceptance_probability: float = Field(..., description="Exact P(A_{n,m})")
    sampler: Sampler
    test_radius: int
    max_orbit_radius_over_m: Optional[float] = None
    max_displacement_over_m: Optional[float] = None
    empirical_K: Optional[float] = Field(None, description="Absent when nothing was accepted")
    subword_violations: int = 0
    deep_checked: int = 0
    deep_violations: int = 0

    @model_validator(mode="after")
    def _accepted_within_reps(self) -> "ConfinementReport":
        if self.accepted > self.reps:
            raise ValueError("accepted cannot exceed reps")
        return self

    @property
    def has_data(self) -> bool:
        return self.accepted > 0
