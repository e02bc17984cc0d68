from enum import Enum
from pathlib import Path
from pydantic import AliasChoices, BaseModel, Field
from typing import Optional

from ..config import settings
from .orbit import Sampler


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"


class ExperimentConfig(BaseModel):
    """Options shared by every command; with the command's own parameters it fixes the output."""

    alpha: str = Field("canonical", description="Scaling rule spec")
    seed: int = Field(settings.DEFAULT_SEED, ge=0, lt=2**64)
    threads: Optional[int] = Field(None, ge=0, description="0 = all cores")
    out: Optional[Path] = None
    format: OutputFormat = OutputFormat.CSV


class BallParams(BaseModel):
    radius: int = Field(..., ge=0)
    center: str = ":0"


class DistParams(BaseModel):
    # config files may use the flag names from and to
    source: str = Field(..., validation_alias=AliasChoices("source", "from"))
    target: str = Field(..., validation_alias=AliasChoices("target", "to"))
    cap: Optional[int] = Field(None, ge=0, description="BFS depth cap; closed form when absent")


class OrbitParams(BaseModel):
    n: int = Field(..., ge=0)
    m: Optional[int] = Field(None, ge=1)
    reps: int = Field(1000, ge=1)
    test_radius: Optional[int] = Field(None, ge=1)
    sampler: Optional[Sampler] = Field(None, description="Chosen from n * confine_rate(m) when absent")


class CountParams(BaseModel):
    n: int = Field(..., ge=0)
    m: int = Field(..., ge=1)
    k: float = Field(..., gt=0)


class SimulateParams(BaseModel):
    n: int = Field(..., ge=0)
    reps: int = Field(1, ge=1)


class HarmonicParams(BaseModel):
    start: str = "lamps=;base="
    horizon: int = Field(..., ge=0)
    reps: int = Field(1000, ge=1)


class FlowParams(BaseModel):
    k_max: int = Field(60, ge=1)


class GreenParams(BaseModel):
    n: int = Field(..., ge=1)
    reps: int = Field(1000, ge=1)


class VolumeParams(BaseModel):
    rmin: float = Field(1e3, ge=1)
    rmax: float = Field(1e5, ge=1)
    points: int = Field(9, ge=2)


class BoundParams(BaseModel):
    nmin: float = Field(1e3, ge=1)
    nmax: float = Field(1e7, ge=1)
    K: float = Field(2.0, gt=0)
    c_path: float = Field(12.0, gt=0)
    c_deep: float = Field(1.0, gt=0)
