from typing import Sequence

import numpy as np

from ..core.exception import ValidationException


def loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or x.size != y.size:
        raise ValidationException("a fit needs at least two paired points", field="radii")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValidationException("log-log fit needs positive values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def geometric_grid(start: float, stop: float, factor: float) -> list[int]:
    """Distinct integers start, start*factor, ... up to stop."""
    values = []
    value = float(start)
    while value <= stop:
        rounded = int(round(value))
        if not values or rounded > values[-1]:
            values.append(rounded)
        value *= factor
    return values
