from pydantic import BaseModel, ConfigDict, Field


class ActionFingerprint(BaseModel):
    """Images of a probe set under a word; equal fingerprints mean equal elements."""

    test_set_id: str = Field(..., description="Probe set descriptor, e.g. 'eq:L=6'")
    size: int = Field(..., ge=0)
    images: bytes

    model_config = ConfigDict(frozen=True)


class SmallOrbitCount(BaseModel):
    """Distinct elements among length-n words with small inverted orbit and displacement."""

    n: int = Field(..., ge=0)
    m: int = Field(..., ge=1)
    k_emp: float = Field(..., gt=0)
    radius: int = Field(..., description="ceil(k_emp * m)")
    distinct_elements: int = Field(..., ge=0)
    words_kept: int = Field(..., ge=0)
    words_examined: int = Field(..., description="4^n; pruned subtrees count as examined")
