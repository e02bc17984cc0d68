from enum import Enum
from pydantic import BaseModel, ConfigDict
from typing import Optional


class ErrorCategory(Enum):
    VALIDATION = "Validation"
    OUT_OF_RANGE = "Out Of Range"
    RESOURCE_GUARD = "Resource Guard"
    NO_DATA = "No Data"
    OUTPUT = "Output"
    INTERNAL = "Internal Error"


class Error(BaseModel):
    message: str
    exit_code: int
    category: ErrorCategory

    model_config = ConfigDict(use_enum_values=True)


class ResultRecord(BaseModel):
    """One emitted number, traceable to the config and seed that produced it."""

    experiment: str
    params: str
    metric: str
    value: float
    stderr: Optional[float] = None
