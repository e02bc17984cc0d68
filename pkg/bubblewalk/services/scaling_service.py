import logging
from fractions import Fraction

from ..core.exception import ValidationException
from ..models.scaling import ScalingRule
from ..schemas.scaling import AssumptionReport

logger = logging.getLogger(__name__)


class ScalingService:
    """Service layer for scaling sequences."""

    def __init__(self, rule: ScalingRule):
        self.rule = rule

    def alpha_at(self, k: int) -> int:
        """alpha_k; raises when k is past an explicit list or the depth cap."""
        return self.rule.alpha(k)

    def s_at(self, k: int) -> int:
        return self.rule.partial_sum(k)

    def check_assumption(self, d: float, k_max: int) -> AssumptionReport:
        """
        Scan the growth condition d * s_{k-1} <= alpha_k for k = 2..k_max.

        Args:
            d: Queried constant
            k_max: Last level to scan

        Returns:
            Report with the largest feasible d and the first violating level

        Raises:
            ValidationException: If k_max < 2 or d <= 0
        """
        if k_max < 2:
            raise ValidationException("k_max must be >= 2", field="k_max")
        if d <= 0:
            raise ValidationException("d must be positive", field="d")

        # Exact ratios keep "passes iff d <= max_feasible_d" free of rounding.
        best, argmin, violation = None, 2, None
        for k in range(2, k_max + 1):
            ratio = Fraction(self.rule.alpha(k), self.rule.partial_sum(k - 1))
            if best is None or ratio < best:
                best, argmin = ratio, k
            if violation is None and ratio < Fraction(d):
                violation = k

        logger.debug("Assumption scan to %d: max feasible d = %s at k = %d", k_max, best, argmin)
        return AssumptionReport(
            d=d,
            max_feasible_d=float(best),
            argmin_k=argmin,
            first_violation_k=violation,
            checked_up_to=k_max,
        )
