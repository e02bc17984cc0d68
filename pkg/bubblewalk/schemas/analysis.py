from pydantic import BaseModel, Field, model_validator
from typing import List, Optional


class FlowRow(BaseModel):
    K: int
    partial_sum: float
    half_energy: float
    converges: Optional[bool] = None


class EnergyTrace(BaseModel):
    """Partial energies of the level-by-level unit flow."""

    k_max: int = Field(..., ge=1)
    partial_sums: List[float] = Field(..., description="E_K including b-edges, K = 1..k_max")
    half_energy: List[float] = Field(..., description="1/2 * sum_{k<=K} alpha_k / 2^k")
    converges: Optional[bool] = Field(None, description="Analytic verdict on sum alpha_k / 2^k")

    @property
    def total(self) -> float:
        return self.partial_sums[-1]

    def rows(self) -> List[FlowRow]:
        return [
            FlowRow(K=K, partial_sum=energy, half_energy=half, converges=self.converges)
            for K, (energy, half) in enumerate(zip(self.partial_sums, self.half_energy), start=1)
        ]


class GreenPoint(BaseModel):
    T: int = Field(..., ge=0)
    green: float = Field(..., ge=0, description="Mean visits to o during 0..T")
    stderr: float = Field(..., ge=0)


class GreenRow(GreenPoint):
    relative_growth: float


class GreenEstimate(BaseModel):
    """Expected visits of the induced walk to o, started at o."""

    n: int
    reps: int
    points: List[GreenPoint]

    @property
    def relative_growth(self) -> float:
        """(G_n - G_{n/2}) / G_{n/2}"""
        by_time = {p.T: p.green for p in self.points}
        half = by_time[self.n // 2]
        return (by_time[self.n] - half) / half

    def rows(self) -> List[GreenRow]:
        growth = self.relative_growth
        return [GreenRow(**p.model_dump(), relative_growth=growth) for p in self.points]


class VolumeRow(BaseModel):
    r: int
    volume: int
    slope: float
    predicted: Optional[float] = None


class VolumeFit(BaseModel):
    radii: List[int]
    volumes: List[int]
    slope: float
    predicted: Optional[float] = Field(None, description="1 + log 2 / log r for geometric rules")

    def rows(self) -> List[VolumeRow]:
        return [
            VolumeRow(r=r, volume=v, slope=self.slope, predicted=self.predicted)
            for r, v in zip(self.radii, self.volumes)
        ]


class CountingConstants(BaseModel):
    """Constants of the |A| upper bound."""

    K: float = Field(2.0, gt=0)
    c_path: float = Field(12.0, gt=0)
    c_deep: float = Field(1.0, gt=0)

    def doubled(self) -> "CountingConstants":
        return CountingConstants(K=2 * self.K, c_path=2 * self.c_path, c_deep=2 * self.c_deep)


class BoundRow(BaseModel):
    n: int
    m_opt: int
    log_pA_lower: float
    log_A_upper: float
    log_bound: float = Field(..., le=0)


class BoundTableRow(BoundRow):
    fitted_exponent: Optional[float] = None
    m_opt_exponent: Optional[float] = None


class BoundTable(BaseModel):
    rows: List[BoundRow]
    constants: CountingConstants
    fitted_exponent: Optional[float] = Field(None, description="Slope of log(-log_bound) against log n")
    m_opt_exponent: Optional[float] = Field(None, description="Slope of log m_opt against log n")

    @model_validator(mode="after")
    def _has_rows(self) -> "BoundTable":
        if not self.rows:
            raise ValueError("a bound table needs at least one n")
        return self

    def table_rows(self) -> List[BoundTableRow]:
        """One row per n with the fitted exponents repeated."""
        return [
            BoundTableRow(**row.model_dump(), fitted_exponent=self.fitted_exponent, m_opt_exponent=self.m_opt_exponent)
            for row in self.rows
        ]


class PACheck(BaseModel):
    """Monte Carlo P(Z_n in C) against the exact confinement probability."""

    n: int
    m: int
    reps: int
    K: float
    p_hat: float
    stderr: float
    p_confine: float
    consistent: bool = Field(..., description="p_hat >= p_confine - 3 stderr")
